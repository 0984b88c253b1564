"""Periodic points of ``f`` by damped Newton iteration, and hyperbolic sets built from them."""

from __future__ import annotations

import enum
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from ._geometry import Window
from ._parallel import parallel_map
from .errors import DerivativeBlowup, NoConvergence, NotExpanding
from .function_model import is_escaped

#: Multiplier tolerance used by :func:`classify`.
EPS_LAMBDA = 1e-6
#: Largest denominator tried when detecting roots of unity.
Q_MAX = 12


class Classification(enum.Enum):
    REPELLING = "Repelling"
    PARABOLIC_MULTIPLIER_1 = "ParabolicMultiplier1"
    PARABOLIC_ROOT_OF_UNITY = "ParabolicRootOfUnity"
    ATTRACTING = "Attracting"
    INDIFFERENT = "Indifferent"
    UNCLASSIFIED = "Unclassified"

    @property
    def is_repelling_or_parabolic(self):
        return self in (
            Classification.REPELLING,
            Classification.PARABOLIC_MULTIPLIER_1,
            Classification.PARABOLIC_ROOT_OF_UNITY,
        )

    @property
    def is_parabolic(self):
        return self in (Classification.PARABOLIC_MULTIPLIER_1, Classification.PARABOLIC_ROOT_OF_UNITY)


def classify(multiplier, eps=EPS_LAMBDA, q_max=Q_MAX):
    """Classify a cycle by its multiplier.

    Returns
    -------
    (Classification, q)
        ``q`` is the root-of-unity order for ``PARABOLIC_ROOT_OF_UNITY``,
        otherwise None.
    """
    r = abs(multiplier)
    if not math.isfinite(r):
        return Classification.UNCLASSIFIED, None
    if r > 1 + eps:
        return Classification.REPELLING, None
    if abs(multiplier - 1) <= eps:
        return Classification.PARABOLIC_MULTIPLIER_1, None
    if 1 - eps <= r <= 1 + eps:
        for q in range(2, q_max + 1):
            if abs(multiplier**q - 1) <= eps:
                return Classification.PARABOLIC_ROOT_OF_UNITY, q
    if r < 1 - eps:
        return Classification.ATTRACTING, None
    return Classification.INDIFFERENT, None


def classification_text(classification, q=None):
    if classification is Classification.PARABOLIC_ROOT_OF_UNITY:
        return f"ParabolicRootOfUnity({q})"
    return classification.value


def iterate_with_derivative(m, z, p):
    """Return ``(f^p(z), (f^p)'(z))``; raises DerivativeBlowup on overflow."""
    d = 1.0 + 0j
    for _ in range(p):
        fd = m.deriv(z)
        z = m.eval(z)
        if is_escaped(z) or is_escaped(fd):
            raise DerivativeBlowup("orbit left the exp-safe region")
        d *= fd
    return z, d


def orbit(m, z, p):
    out = [complex(z)]
    for _ in range(p - 1):
        out.append(m.eval(out[-1]))
    return out


def divisors(p):
    return [q for q in range(1, p) if p % q == 0]


@dataclass(frozen=True)
class PeriodicPoint:
    point: complex
    period: int
    multiplier: complex
    classification: Classification
    residual: float
    rotation_q: int | None = None
    multiple_root: bool = False

    @property
    def classification_text(self):
        return classification_text(self.classification, self.rotation_q)

    def cycle(self, m):
        return orbit(m, self.point, self.period)


def make_periodic_point(m, z, p, residual_tol, eps=EPS_LAMBDA, q_max=Q_MAX, multiple_root=False):
    """Build a :class:`PeriodicPoint` at ``z``, reducing ``p`` to the primitive period."""
    period = p
    for q in divisors(p):
        w, _ = iterate_with_derivative(m, z, q)
        if abs(w - z) <= 1e3 * residual_tol:
            period = q
            break
    w, lam = iterate_with_derivative(m, z, period)
    cls, q = classify(lam, eps, q_max)
    return PeriodicPoint(complex(z), period, lam, cls, abs(w - z), q, multiple_root)


def rounding_floor(z, d):
    """Smallest residual of ``f^p(z) - z`` one can expect in double precision.

    A relative error of a few ulps in ``z`` is amplified by ``|(f^p)'(z)|``;
    far from the origin this exceeds any fixed absolute tolerance.
    """
    return 8 * sys.float_info.epsilon * (1 + abs(z)) * (1 + abs(d))


def newton_periodic(m, p, seed, tol=1e-10, max_steps=100, eps=EPS_LAMBDA, q_max=Q_MAX):
    """Damped Newton iteration for ``g(z) = f^p(z) - z``.

    The step is halved (up to 8 times) while the residual increases.  Near
    a multiple root of ``g`` (parabolic cycle) convergence is only linear;
    the step budget is then quadrupled and the result is flagged
    ``multiple_root``.  Iteration stops when the step is at rounding level or
    no damped step reduces the residual; success requires ``|g| <= tol``,
    or ``|g|`` within :func:`rounding_floor` when ``tol`` is below it.

    Raises
    ------
    NoConvergence
        The final residual exceeds both ``tol`` and the rounding floor.
    DerivativeBlowup
        The orbit of the seed overflows.
    """
    if p < 1:
        raise ValueError("period must be >= 1")
    z = complex(seed)
    w, d = iterate_with_derivative(m, z, p)
    g = w - z
    budget = max_steps
    step = 0
    while step < budget:
        step += 1
        gp = d - 1
        if g == 0:
            break
        if gp == 0:
            raise NoConvergence(f"g'(z) vanished at {z}")
        if abs(gp) < 1e-2:
            budget = 4 * max_steps
        dz = g / gp
        t = 1.0
        accepted = False
        for _ in range(9):
            trial = z - t * dz
            try:
                w_t, d_t = iterate_with_derivative(m, trial, p)
            except DerivativeBlowup:
                t *= 0.5
                continue
            g_t = w_t - trial
            if abs(g_t) < abs(g) or (abs(g_t) == abs(g) and t == 1.0):
                accepted = True
                break
            t *= 0.5
        if not accepted:
            break
        moved = abs(trial - z)
        z, g, d = trial, g_t, d_t
        if moved <= 4e-16 * (1 + abs(z)):
            break
    if not abs(g) <= max(tol, rounding_floor(z, d)):
        raise NoConvergence(f"residual {abs(g):.3g} > {tol:.3g} after {step} steps from {seed}")
    multiple = abs(d - 1) < 1e-4
    return make_periodic_point(m, z, p, tol, eps, q_max, multiple_root=multiple)


@dataclass
class PeriodicScan:
    """Result of :func:`scan_periodic`; iterates over the points found."""

    points: list
    seeds: int
    failures: int
    outside: int
    other_period: int
    diagnostics: dict = field(default_factory=dict)

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]


def dedup_radius(a, b, tol):
    """Two Newton results closer than this are the same point.

    Simple roots are accurate to ``tol``; at multiple roots (parabolic
    points) rounding limits accuracy to about ``sqrt`` of that.
    """
    if a.multiple_root or b.multiple_root:
        return math.sqrt(100 * tol)
    return 100 * tol


def scan_periodic(m, p, window, grid=(40, 40), tol=1e-10, max_steps=100, workers=None):
    """Newton from every cell centre of ``grid`` over ``window``; keep primitive period ``p``.

    Points outside ``window`` and points of smaller period are dropped and
    counted.  Results are deduplicated and sorted by ``(Im, Re)``.
    """
    window = window if isinstance(window, Window) else Window.from_sequence(window)
    nx, ny = grid
    if window.degenerate or nx <= 0 or ny <= 0:
        return PeriodicScan([], 0, 0, 0, 0)
    xs = window.re_min + (window.re_max - window.re_min) * (np.arange(nx) + 0.5) / nx
    ys = window.im_min + (window.im_max - window.im_min) * (np.arange(ny) + 0.5) / ny
    seeds = [complex(x, y) for x in xs for y in ys]

    def run(seed):
        try:
            return newton_periodic(m, p, seed, tol, max_steps)
        except (NoConvergence, DerivativeBlowup):
            return None

    results = parallel_map(run, seeds, workers)
    failures = outside = other = 0
    kept = []
    for r in results:
        if r is None:
            failures += 1
        elif not window.contains(r.point):
            outside += 1
        elif r.period != p:
            other += 1
        else:
            kept.append(r)
    # deterministic dedup: best residual first, ties by position
    kept.sort(key=lambda r: (r.residual, r.point.imag, r.point.real))
    unique = []
    for r in kept:
        if all(abs(r.point - u.point) >= dedup_radius(r, u, tol) for u in unique):
            unique.append(r)
    unique.sort(key=lambda r: (r.point.imag, r.point.real))
    return PeriodicScan(unique, len(seeds), failures, outside, other)


@dataclass(frozen=True)
class HyperbolicSetApprox:
    """Union of repelling cycles with an expansion witness ``|(f^k)'| >= eta``."""

    cycles: tuple
    k: int
    eta: float

    @property
    def points(self):
        return [z for cycle in self.cycles for z in cycle]

    def distance(self, z):
        return min(abs(z - w) for w in self.points)


def build_hyperbolic_set(m, points, k=1):
    """Collect full orbits of repelling ``points`` and measure expansion of ``f^k``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    cycles = []
    for pt in points:
        if pt.classification is not Classification.REPELLING:
            raise ValueError(f"{pt.point} is {pt.classification.value}, not repelling")
        cyc = tuple(pt.cycle(m))
        if not any(any(abs(cyc[0] - w) <= 1e-8 * (1 + abs(w)) for w in c) for c in cycles):
            cycles.append(cyc)
    eta = min(abs(iterate_with_derivative(m, z, k)[1]) for c in cycles for z in c)
    if not eta > 1:
        raise NotExpanding(f"min |(f^{k})'| = {eta:.6g} <= 1")
    return HyperbolicSetApprox(tuple(cycles), k, eta)
