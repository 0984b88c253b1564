"""
Concrete entire maps with closed-form inverse branches.

Two families are supported:

* ``Exponential``: ``f(z) = exp(z) + a`` (one tract, a right half-plane),
* ``Cosine``: ``f(z) = a*exp(z) + b*exp(-z)`` (two tracts, left and right).

Each map carries a disc ``D = {|w| < R}`` containing the singular values and
a straight cut ``delta = {t*exp(i*cut_angle) : t >= R}``.  The base domain is
``W0 = C \\ (closure(D) | delta)`` and the fundamental domains are the
components of ``f^{-1}(W0)``, labelled by :class:`DomainLabel`.

Inverse branches come in two flavours.  :meth:`EntireMap.inverse_branch`
is the strict branch, defined on ``W0`` only.  :meth:`EntireMap.continued_branch`
is its analytic continuation to the complement of a cut that joins the
singular set to ``delta``; iterated pullbacks need it because intermediate
points of ``f^{-n}_s`` routinely fall inside ``D``.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from ._geometry import arg_in_window, dist_point_ray, dist_point_segment
from .errors import BranchAmbiguity, NormalizationError, NotComparable, PreconditionViolated

TWO_PI = 2.0 * math.pi

#: Real-part bound beyond which ``exp`` is treated as overflowing.
EXP_SAFE = 700.0

#: Points within this distance of a cut (or of ``closure(D)``) are rejected.
BOUNDARY_TOL = 1e-12

#: Returned by :meth:`EntireMap.eval` and :meth:`EntireMap.deriv` on overflow.
ESCAPED = complex(math.inf, 0.0)


def is_escaped(w):
    return not cmath.isfinite(w)


class Family(enum.Enum):
    EXPONENTIAL = "Exponential"
    COSINE = "Cosine"


@dataclass(frozen=True)
class DomainLabel:
    """Fundamental domain identifier.

    ``tract`` is 0 for the exponential family; for the cosine family 0 is the
    right tract and 1 the left one.  ``k`` counts ``2*pi*i`` translates.
    """

    tract: int = 0
    k: int = 0

    @property
    def order_key(self):
        # Counterclockwise order at infinity starting from the cut; for the
        # cosine family (cut pointing up) the left tract comes first, top down.
        if self.tract == 1:
            return (0, -self.k)
        return (1, self.k)

    def __lt__(self, other):
        return self.order_key < other.order_key

    def __str__(self):
        return str(self.k) if self.tract == 0 else f"L{self.k}"

    def to_text(self, family=Family.EXPONENTIAL):
        if family is Family.COSINE:
            return f"{'R' if self.tract == 0 else 'L'}{self.k}"
        return str(self.k)


@dataclass(frozen=True)
class CylPoint:
    """A nonzero point together with a logarithm ``log_lift`` of it."""

    z: complex
    log_lift: complex

    @classmethod
    def lift(cls, z, cut_angle):
        """Lift with imaginary part in the window cut open along ``cut_angle``."""
        if z == 0:
            raise PreconditionViolated("cannot lift 0")
        return cls(z, complex(math.log(abs(z)), arg_in_window(z, cut_angle)))


@dataclass(frozen=True)
class EntireMap:
    """A member of one of the two closed-form families.

    Use :meth:`exponential` or :meth:`cosine` to build one; they choose the
    disc radius by :func:`choose_radius` unless it is given explicitly.
    Instances are immutable and safe to share between threads.
    """

    family: Family
    params: tuple
    disc_radius: float
    cut_angle: float
    normalization: str = field(default="sampled normalization", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(complex(p) for p in self.params))
        object.__setattr__(self, "cut_angle", float(self.cut_angle) % TWO_PI)
        expected = 1 if self.family is Family.EXPONENTIAL else 2
        if len(self.params) != expected:
            raise ValueError(f"{self.family.value} family takes {expected} parameter(s)")
        if self.family is Family.COSINE and (self.params[0] == 0 or self.params[1] == 0):
            raise ValueError("cosine family needs a != 0 and b != 0")
        R = self.disc_radius
        if not (R > 0 and math.isfinite(R)):
            raise ValueError("disc radius must be positive and finite")
        for s in self.singular_values():
            if abs(s) >= R:
                raise PreconditionViolated(f"singular value {s} is not inside D (R={R})")
        if abs(self.eval(0j)) >= R:
            raise PreconditionViolated(f"f(0) is not inside D (R={R})")
        self._check_cut_avoids_tracts()

    # -- construction -----------------------------------------------------

    @classmethod
    def exponential(cls, a, disc_radius=None, cut_angle=math.pi, samples=64):
        if disc_radius is None:
            disc_radius = _choose_radius(Family.EXPONENTIAL, (complex(a),), cut_angle, samples)
            return cls(Family.EXPONENTIAL, (a,), disc_radius, cut_angle)
        return cls(Family.EXPONENTIAL, (a,), float(disc_radius), cut_angle, "override")

    @classmethod
    def cosine(cls, a, b, disc_radius=None, cut_angle=math.pi / 2, samples=64):
        params = (complex(a), complex(b))
        if disc_radius is None:
            disc_radius = _choose_radius(Family.COSINE, params, cut_angle, samples)
            return cls(Family.COSINE, params, disc_radius, cut_angle)
        return cls(Family.COSINE, params, float(disc_radius), cut_angle, "override")

    @classmethod
    def _unchecked(cls, family, params, R, cut_angle):
        # Probe instance for the radius search; skips the invariant checks.
        m = object.__new__(cls)
        for name, value in (
            ("family", family),
            ("params", tuple(params)),
            ("disc_radius", R),
            ("cut_angle", cut_angle % TWO_PI),
            ("normalization", "probe"),
        ):
            object.__setattr__(m, name, value)
        return m

    def with_radius(self, R):
        return replace(self, disc_radius=float(R), normalization="override")

    @property
    def map_id(self):
        def c(x):
            return f"{x.real:.17g},{x.imag:.17g}"

        if self.family is Family.EXPONENTIAL:
            return f"exp:{c(self.params[0])}"
        return f"cos:{c(self.params[0])},{c(self.params[1])}"

    @cached_property
    def cut_direction(self):
        return cmath.exp(1j * self.cut_angle)

    # -- evaluation --------------------------------------------------------

    def eval(self, z):
        """Return ``f(z)``, or :data:`ESCAPED` when ``exp`` would overflow."""
        z = complex(z)
        if self.family is Family.EXPONENTIAL:
            if z.real > EXP_SAFE:
                return ESCAPED
            return cmath.exp(z) + self.params[0]
        if abs(z.real) > EXP_SAFE:
            return ESCAPED
        a, b = self.params
        return a * cmath.exp(z) + b * cmath.exp(-z)

    __call__ = eval

    def deriv(self, z):
        z = complex(z)
        if self.family is Family.EXPONENTIAL:
            if z.real > EXP_SAFE:
                return ESCAPED
            return cmath.exp(z)
        if abs(z.real) > EXP_SAFE:
            return ESCAPED
        a, b = self.params
        return a * cmath.exp(z) - b * cmath.exp(-z)

    def eval_array(self, z):
        """Vectorized :meth:`eval`; overflowing entries become ``inf``."""
        z = np.asarray(z, dtype=complex)
        with np.errstate(over="ignore", invalid="ignore"):
            if self.family is Family.EXPONENTIAL:
                out = np.exp(z) + self.params[0]
                bad = z.real > EXP_SAFE
            else:
                a, b = self.params
                out = a * np.exp(z) + b * np.exp(-z)
                bad = np.abs(z.real) > EXP_SAFE
        out[bad] = ESCAPED
        return out

    def cyl_derivative_norm(self, z):
        """Cylindrical derivative ``|f'(z) * z / f(z)|``."""
        z = complex(z)
        if z == 0:
            raise PreconditionViolated("cylindrical derivative undefined at z = 0")
        w = self.eval(z)
        if w == 0:
            raise PreconditionViolated("cylindrical derivative undefined where f(z) = 0")
        if is_escaped(w):
            return abs(z)  # |f'/f| -> 1 in every tract
        return abs(self.deriv(z) * z / w)

    def singular_values(self):
        if self.family is Family.EXPONENTIAL:
            return [self.params[0]]
        a, b = self.params
        r = 2 * cmath.sqrt(a * b)
        return [r, -r]

    # -- the base domain W0 -------------------------------------------------

    def dist_to_delta(self, w):
        return dist_point_ray(complex(w), self.disc_radius, self.cut_direction)

    def in_W0(self, w, tol=BOUNDARY_TOL):
        w = complex(w)
        if not cmath.isfinite(w):
            return False
        return abs(w) > self.disc_radius + tol and self.dist_to_delta(w) > tol

    def _require_W0(self, w):
        if not cmath.isfinite(w):
            raise PreconditionViolated("point at infinity is not in W0")
        if abs(w) <= self.disc_radius + BOUNDARY_TOL:
            raise PreconditionViolated(f"{w} lies in closure(D), R={self.disc_radius}")
        if self.dist_to_delta(w) <= BOUNDARY_TOL:
            raise BranchAmbiguity(f"{w} lies on the cut delta")

    def log_lift(self, w):
        """Logarithm of ``w`` with imaginary part in ``[cut_angle - 2*pi, cut_angle)``."""
        return CylPoint.lift(complex(w), self.cut_angle).log_lift

    def cyl_distance(self, z, w):
        """Cylindrical distance inside ``W0``.

        In logarithmic coordinates ``W0`` becomes the convex half-strip
        ``{Re > log R, cut_angle - 2*pi < Im < cut_angle}``, so the distance is
        the Euclidean distance of the lifts.
        """
        for p in (z, w):
            if not self.in_W0(p):
                raise NotComparable(f"{p} is not in W0; lifts have no common window")
        return abs(self.log_lift(z) - self.log_lift(w))

    # -- inverse branches --------------------------------------------------

    def inverse_branch(self, label, w):
        """The point of fundamental domain ``label`` mapped to ``w`` (``w`` in W0)."""
        w = complex(w)
        self._require_W0(w)
        return self._branch_formula(label, w)

    def continued_branch(self, label, w):
        """Analytic continuation of :meth:`inverse_branch` off ``W0``.

        Defined on the complement of :meth:`dist_to_cut`'s cut; raises
        :class:`BranchAmbiguity` within ``BOUNDARY_TOL`` of it.
        """
        w = complex(w)
        if not cmath.isfinite(w):
            raise BranchAmbiguity("cannot pull back the escape marker")
        if self.dist_to_cut(w) <= BOUNDARY_TOL:
            raise BranchAmbiguity(f"{w} lies on the branch cut")
        if self.family is Family.EXPONENTIAL and abs(w) <= self.disc_radius:
            return self._exp_inner_log(w) + TWO_PI * 1j * label.k
        return self._branch_formula(label, w)

    def dist_to_cut(self, w):
        """Distance from ``w`` to the cut of :meth:`continued_branch`."""
        w = complex(w)
        d = self.cut_direction
        if self.family is Family.EXPONENTIAL:
            a = self.params[0]
            return min(
                dist_point_segment(w, a, self.disc_radius * d),
                dist_point_ray(w, self.disc_radius, d),
            )
        c = self._cos_crit
        return min(dist_point_segment(w, -c, c), dist_point_ray(w, 0.0, d))

    def _branch_formula(self, label, w):
        if self.family is Family.EXPONENTIAL:
            if label.tract != 0:
                raise ValueError(f"exponential family has a single tract, got {label}")
            a = self.params[0]
            return self.log_lift(w) + cmath.log(1 - a / w) + TWO_PI * 1j * label.k
        a, b = self.params
        half = 0.5 * (1 + cmath.sqrt(1 - 4 * a * b / (w * w)))
        base = self.log_lift(w) + cmath.log(half)
        if label.tract == 0:
            return base - cmath.log(a) + TWO_PI * 1j * label.k
        if label.tract == 1:
            return -(base - cmath.log(b)) + TWO_PI * 1j * label.k
        raise ValueError(f"cosine family has tracts 0 and 1, got {label}")

    @cached_property
    def _cos_crit(self):
        return self.singular_values()[0]

    @cached_property
    def _exp_inner(self):
        # Inside D the exponential cut is the segment from a to R*e^{i*cut};
        # fix the 2*pi*i offset so the inner log continues the outer one.
        a = self.params[0]
        phi = cmath.phase(self.disc_radius * self.cut_direction - a)
        probe = -self.disc_radius * self.cut_direction
        outer = self.log_lift(probe) + cmath.log(1 - a / probe)
        inner = complex(math.log(abs(probe - a)), arg_in_window(probe - a, phi))
        shift = round((outer - inner).imag / TWO_PI)
        return phi, shift

    def _exp_inner_log(self, w):
        a = self.params[0]
        if w == a:
            raise BranchAmbiguity("the omitted value has no preimage")
        phi, shift = self._exp_inner
        return complex(math.log(abs(w - a)), arg_in_window(w - a, phi) + TWO_PI * shift)

    # -- fundamental domains ----------------------------------------------

    def fundamental_domain_of(self, z):
        """Label of the fundamental domain containing ``z`` (needs ``f(z)`` in W0)."""
        z = complex(z)
        w = self.eval(z)
        if is_escaped(w):
            return self._label_at_overflow(z)
        self._require_W0(w)
        if self.family is Family.EXPONENTIAL:
            candidates = [self._branch_formula(DomainLabel(0, 0), w)]
        else:
            candidates = [self._branch_formula(DomainLabel(t, 0), w) for t in (0, 1)]
        scale = 1e-7 * (1 + abs(z))
        for tract, z0 in enumerate(candidates):
            d = z - z0
            k = round(d.imag / TWO_PI)
            if abs(d - TWO_PI * 1j * k) <= scale:
                return DomainLabel(tract, k)
        raise PreconditionViolated(f"no branch of f^-1 maps f(z) back to {z}")

    def _label_at_overflow(self, z):
        # For Re z beyond the exp-safe bound, log f(z) = z up to a negligible term.
        if self.family is Family.EXPONENTIAL:
            tract, lg = 0, z
        elif z.real > 0:
            tract, lg = 0, z + cmath.log(self.params[0])
        else:
            tract, lg = 1, -z + cmath.log(self.params[1])
        reduced = arg_in_window(cmath.exp(1j * lg.imag), self.cut_angle)
        if abs(reduced - (self.cut_angle - TWO_PI)) <= BOUNDARY_TOL:
            raise BranchAmbiguity("f(z) lies on the cut delta")
        # z = +-(lg - log param) with Im lg = reduced + 2*pi*k
        k = round((lg.imag - reduced) / TWO_PI)
        return DomainLabel(tract, k if tract == 0 else -k)

    # -- sanity checks ----------------------------------------------------

    def _check_cut_avoids_tracts(self, samples=200):
        # Sampled check that |f| < R along delta (delta misses closure of the tracts).
        ts = self.disc_radius * np.geomspace(1.0, 1e6, samples)
        pts = ts * self.cut_direction
        vals = self.eval_array(pts)
        finite = np.isfinite(vals)
        if not np.all(finite) or np.any(np.abs(vals) >= self.disc_radius):
            raise PreconditionViolated(
                f"cut direction {self.cut_angle:.6g} meets a tract of {self.map_id}"
            )


@dataclass(frozen=True)
class PostsingularReport:
    bounded: bool
    max_modulus: float
    n_iter: int


def check_postsingular_bounded(m, n_iter, bound):
    """Iterate every singular value ``n_iter`` times and report boundedness.

    This is a finite-horizon necessary condition only.
    """
    if n_iter < 1:
        raise ValueError("n_iter must be >= 1")
    bounded = True
    max_mod = 0.0
    for s in m.singular_values():
        z = s
        max_mod = max(max_mod, abs(z))
        for _ in range(n_iter):
            z = m.eval(z)
            if is_escaped(z) or abs(z) >= bound:
                bounded = False
                max_mod = max(max_mod, abs(z))
                break
            max_mod = max(max_mod, abs(z))
    return PostsingularReport(bounded, max_mod, n_iter)


def _radius_grid(family, params, cut_angle, R, samples):
    """Preimages of a ring grid outside ``D_R`` for the expansion check (vectorized)."""
    m = EntireMap._unchecked(family, params, R, cut_angle)
    radii = R * np.geomspace(1.0 + 1e-9, 1e4, samples)
    angles = cut_angle - TWO_PI + TWO_PI * (np.arange(samples) + 0.5) / samples
    w = (radii[:, None] * np.exp(1j * angles[None, :])).ravel()
    lift = np.log(radii)[:, None] + 1j * np.broadcast_to(angles, (samples, samples))
    lift = lift.ravel()
    shifts = TWO_PI * 1j * np.arange(-2, 3)
    if family is Family.EXPONENTIAL:
        base = lift + np.log(1 - params[0] / w)
        zs = base[:, None] + shifts[None, :]
    else:
        a, b = params
        half = 0.5 * (1 + np.sqrt(1 - 4 * a * b / (w * w)))
        base = lift + np.log(half)
        right = base[:, None] - cmath.log(a) + shifts[None, :]
        left = -(base[:, None] - cmath.log(b)) + shifts[None, :]
        zs = np.concatenate([right, left], axis=1)
    return m, zs.ravel()


def _min_cyl_norm(m, zs):
    zs = zs[zs != 0]
    w = m.eval_array(zs)
    with np.errstate(over="ignore", invalid="ignore"):
        if m.family is Family.EXPONENTIAL:
            d = np.exp(zs)
        else:
            a, b = m.params
            d = a * np.exp(zs) - b * np.exp(-zs)
        norm = np.abs(d * zs / w)
    norm = np.where(np.isfinite(w), norm, np.abs(zs))
    return float(norm.min())


def _choose_radius(family, params, cut_angle, samples, max_doublings=30):
    s_max = max(abs(s) for s in _singular_values_of(family, params))
    R = 2.0 * max(s_max, 0.5)
    for _ in range(max_doublings):
        m, zs = _radius_grid(family, params, cut_angle, R, samples)
        if abs(m.eval(0j)) < R and s_max < R:
            try:
                m._check_cut_avoids_tracts()
            except PreconditionViolated:
                pass
            else:
                if _min_cyl_norm(m, zs) >= 2.0:
                    return R
        R *= 2.0
    raise NormalizationError(f"normalization not achieved for {family.value} {params}")


def _singular_values_of(family, params):
    if family is Family.EXPONENTIAL:
        return [params[0]]
    r = 2 * cmath.sqrt(params[0] * params[1])
    return [r, -r]


def choose_radius(m, samples=64):
    """Smallest ``R`` on the schedule ``R0 * 2**j`` passing the sampled expansion test.

    ``R0`` is twice the largest singular-value modulus (at least 1).  On a
    grid of preimages of points with ``|f(z)| > R`` the sampled minimum of
    :meth:`EntireMap.cyl_derivative_norm` must be at least 2.  Use
    :meth:`EntireMap.with_radius` to apply the result.
    """
    return _choose_radius(m.family, m.params, m.cut_angle, samples)
