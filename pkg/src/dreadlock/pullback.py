"""
Iterated inverse branches along an external address.

For an address ``s = F_0 F_1 F_2 ...`` and a base point ``zeta`` in ``W0``::

    zeta_n = inv(F_0) o inv(F_1) o ... o inv(F_{n-1}) (zeta)

i.e. the innermost branch is applied first.  ``f`` maps ``zeta_n(s)`` to
``zeta_{n-1}(shift(s))``.  A periodic dreadlock lands iff ``zeta_n`` converges;
:func:`land` detects convergence, refines the limit by Newton's method and
classifies it by its multiplier.
"""

from __future__ import annotations

import enum
import io
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ._geometry import segment_hits_disc, segment_hits_ray
from .errors import (
    ArcLeavesW0,
    BranchAmbiguity,
    DerivativeBlowup,
    NoConvergence,
    OrbitEntersDisc,
    PreconditionViolated,
    PullbackError,
)
from .function_model import BOUNDARY_TOL, Family, is_escaped
from .periodic_points import (
    EPS_LAMBDA,
    Q_MAX,
    Classification,
    classification_text,
    newton_periodic,
)
from .symbolic import FiniteAddress

#: Divergence radius for pullback sequences.
R_DIV = 1e6
#: Number of trailing gaps inspected by the convergence test.
GAP_WINDOW = 5


class Status(enum.Enum):
    LANDED = "Landed"
    CYCLING = "Cycling"
    DIVERGED = "Diverged"
    UNDECIDED = "Undecided"


def _require_base(m, zeta):
    zeta = complex(zeta)
    if not m.in_W0(zeta):
        raise PreconditionViolated(f"base point {zeta} is not in W0")
    return zeta


def _apply(m, label, w, depth, sample=None):
    try:
        return m.continued_branch(label, w)
    except (BranchAmbiguity, PreconditionViolated) as exc:
        raise PullbackError(depth, exc, sample) from exc


def compose(m, labels, w, sample=None):
    """Apply ``inv(labels[0]) o ... o inv(labels[-1])`` to ``w``."""
    for depth in range(len(labels) - 1, -1, -1):
        w = _apply(m, labels[depth], w, depth, sample)
    return w


def pullback_point(m, s, zeta, n):
    """``zeta_n = f_s^{-n}(zeta)``.

    Parameters
    ----------
    m : EntireMap
    s : ExternalAddress or FiniteAddress
        Only the first ``n`` entries are used.
    zeta : complex
        Base point in ``W0``.
    n : int
        Depth, ``n >= 0``.
    """
    zeta = _require_base(m, zeta)
    if n < 0:
        raise ValueError("depth must be nonnegative")
    labels = list(s.entries[:n]) if isinstance(s, FiniteAddress) else s.labels(n)
    if len(labels) < n:
        raise ValueError(f"address of length {len(labels)} is shorter than depth {n}")
    return compose(m, labels, zeta)


def pullback_sequence(m, s, zeta):
    """Yield ``zeta_1, zeta_2, ...`` for an eventually periodic ``s``.

    With preperiod ``h`` and period block ``g``, ``zeta_n = h(y_{n-q})`` where
    ``y_{j+p} = g(y_j)``; so each new point costs ``p + q`` branch
    evaluations instead of ``n``.
    """
    zeta = _require_base(m, zeta)
    pre, per = list(s.preperiod), list(s.period)
    q, p = len(pre), len(per)
    for n in range(1, q + 1):
        yield compose(m, pre[:n], zeta)
    # ys holds y_{j-p} .. y_{j-1}; y_j = g(y_{j-p})
    ys = deque([zeta] + [compose(m, per[:r], zeta) for r in range(1, p)], maxlen=p)
    for j in range(1, p):
        yield compose(m, pre, ys[j])
    while True:
        y = compose(m, per, ys[0])
        ys.append(y)
        yield compose(m, pre, y)


@dataclass
class PullbackOrbit:
    address: object
    base: complex
    points: list
    gaps: list

    def to_csv(self):
        buf = io.StringIO()
        buf.write("n,re,im,gap\n")
        for n, z in enumerate(self.points, start=1):
            gap = self.gaps[n - 2] if n >= 2 else math.nan
            buf.write(f"{n},{z.real:.17g},{z.imag:.17g},{gap:.17g}\n")
        return buf.getvalue()


@dataclass
class LandingReport:
    address: object
    status: Status
    landing_point: complex | None = None
    period: int | None = None
    multiplier: complex | None = None
    classification: Classification = Classification.UNCLASSIFIED
    rotation_q: int | None = None
    residual: float | None = None
    gap_final: float | None = None
    steps: int = 0
    slow_mode: bool = False
    cycle_estimate: int | None = None
    note: str = ""
    orbit: PullbackOrbit | None = field(default=None, repr=False)

    @property
    def landed(self):
        return self.status is Status.LANDED

    @property
    def classification_text(self):
        return classification_text(self.classification, self.rotation_q)

    @property
    def status_text(self):
        if self.status is Status.CYCLING:
            return f"Cycling({self.cycle_estimate})"
        return self.status.value


def _converged(gaps, tol, window):
    if len(gaps) < window:
        return False
    tail = gaps[-window:]
    if any(g >= tol for g in tail):
        return False
    monotone = all(b < a for a, b in zip(tail, tail[1:]))
    return monotone or all(g < tol / 10 for g in tail)


def _sub_geometric(gaps, window):
    if len(gaps) < window + 1:
        return False
    tail = gaps[-(window + 1):]
    if not all(0 < b < a for a, b in zip(tail, tail[1:])):
        return False
    return tail[-1] / tail[-2] > 0.9


def land(
    m,
    s,
    zeta,
    tol=1e-10,
    n_max=10_000,
    *,
    slow_n_max=1_000_000,
    r_div=R_DIV,
    eps_lambda=EPS_LAMBDA,
    q_max=Q_MAX,
    newton_tol=1e-10,
    refine_radius=0.5,
    keep_orbit=True,
):
    """Follow ``zeta_n(s)`` until it converges, diverges or the budget runs out.

    ``Landed`` is declared when the last five gaps ``|zeta_{n+1} - zeta_n|``
    are below ``tol`` and either decrease or stay below ``tol/10``.  The limit
    is then refined by Newton's method on ``f^p(z) - z`` (``p`` the address
    period), seeded at the last point, and classified by its multiplier.

    If the budget ``n_max`` is exhausted while the gaps are still decreasing
    sub-geometrically (the parabolic signature) the run continues in slow
    mode up to ``slow_n_max`` steps.
    """
    zeta = _require_base(m, zeta)
    p = s.period_length
    points, gaps = [], []
    report = LandingReport(address=s, status=Status.UNDECIDED)
    limit = n_max
    prev = None
    n = 0
    seq = pullback_sequence(m, s, zeta)
    while n < limit:
        z = next(seq)
        n += 1
        points.append(z)
        if abs(z) > r_div or is_escaped(z):
            report.status = Status.DIVERGED
            report.note = f"|zeta_n| > {r_div:g} at n={n}"
            break
        if prev is not None:
            gaps.append(abs(z - prev))
            if _converged(gaps, tol, GAP_WINDOW):
                report.status = Status.LANDED
                break
        prev = z
        if n == limit and limit < slow_n_max and _sub_geometric(gaps, GAP_WINDOW):
            limit = slow_n_max
            report.slow_mode = True
    report.steps = n
    report.gap_final = gaps[-1] if gaps else None
    if keep_orbit:
        report.orbit = PullbackOrbit(s, zeta, points, gaps)

    if report.status is Status.UNDECIDED:
        report.cycle_estimate = _cycle_estimate(points, tol, p)
        if report.cycle_estimate is not None:
            report.status = Status.CYCLING
        return report
    if report.status is not Status.LANDED:
        return report

    seed = points[-1]
    try:
        pt = newton_periodic(m, p, seed, tol=newton_tol, eps=eps_lambda, q_max=q_max)
    except (NoConvergence, DerivativeBlowup) as exc:
        report.status = Status.UNDECIDED
        report.note = f"refinement failed: {exc}"
        return report
    if abs(pt.point - seed) > refine_radius:
        report.status = Status.UNDECIDED
        report.note = f"Newton moved {abs(pt.point - seed):.3g} away from the pullback limit"
        return report
    report.landing_point = pt.point
    report.period = pt.period
    report.multiplier = pt.multiplier
    report.classification = pt.classification
    report.rotation_q = pt.rotation_q
    report.residual = pt.residual
    return report


def _cycle_estimate(points, tol, p):
    if len(points) < 2 * GAP_WINDOW + 2 * p:
        return None
    for d in range(2, max(p, 1) + 1):
        tail = [abs(points[-i] - points[-i - d]) for i in range(1, GAP_WINDOW + 1)]
        if all(g < tol for g in tail):
            return d
    return None


# -- ray curves ---------------------------------------------------------------


@dataclass
class RayPolyline:
    """Vertices of a dynamic ray with potential times ``t`` (``t = -n`` at ``zeta_n``)."""

    address: object
    vertices: list
    t_values: list

    def to_csv(self):
        buf = io.StringIO()
        buf.write("t,re,im\n")
        for t, z in zip(self.t_values, self.vertices):
            buf.write(f"{t:.17g},{z.real:.17g},{z.imag:.17g}\n")
        return buf.getvalue()

    def at(self, t):
        """Vertex with parameter exactly ``t`` (within 1e-9)."""
        i = int(np.argmin(np.abs(np.asarray(self.t_values) - t)))
        if abs(self.t_values[i] - t) > 1e-9:
            raise KeyError(f"no vertex at t={t}")
        return self.vertices[i]


def _validate_arc(m, start, end):
    R, d = m.disc_radius, m.cut_direction
    if not (m.in_W0(start) and m.in_W0(end)):
        raise ArcLeavesW0(f"base arc endpoint outside W0: {start} -> {end}")
    if segment_hits_disc(start, end, R + BOUNDARY_TOL):
        raise ArcLeavesW0(f"base arc {start} -> {end} meets closure(D)")
    if segment_hits_ray(start, end, R, d, BOUNDARY_TOL):
        raise ArcLeavesW0(f"base arc {start} -> {end} crosses delta")


def trace_ray(m, s, zeta, n_pull, samples_per_unit=8):
    """Polyline approximation of the ray of ``s`` on ``t in [-n_pull, 1]``.

    The piece on ``[-n-1, -n]`` is ``f_s^{-n}`` applied to the straight arc
    from ``inv(F_n)(zeta)`` to ``zeta``; samples at the same arc parameter
    ``u`` on different pieces therefore satisfy ``f(gamma(t)) = gamma(t+1)``
    exactly (for fixed addresses; in general the image lies on the ray of
    ``shift(s)``).  The piece on ``[0, 1]`` is the forward image of the
    first arc; it is emitted for purely periodic ``s`` when ``f`` does not
    overflow there.
    """
    zeta = _require_base(m, zeta)
    if n_pull < 1 or samples_per_unit < 1:
        raise ValueError("n_pull and samples_per_unit must be positive")
    us = [i / samples_per_unit for i in range(samples_per_unit + 1)]
    arcs = {}
    for n in range(n_pull):
        label = s.entry(n)
        if label not in arcs:
            start = _apply(m, label, zeta, 0)
            _validate_arc(m, start, zeta)
            arcs[label] = [start + u * (zeta - start) for u in us]
    vertices, ts = [], []
    for n in range(n_pull - 1, -1, -1):
        arc = arcs[s.entry(n)]
        labels = s.labels(n)
        first = 0 if n == n_pull - 1 else 1  # u=0 duplicates the previous piece's end
        for i in range(first, len(us)):
            vertices.append(compose(m, labels, arc[i], sample=i))
            ts.append(-n - 1 + us[i])
    if s.is_periodic:
        arc = arcs[s.entry(0)]
        image = [m.eval(a) for a in arc]
        if not any(is_escaped(w) for w in image):
            for i in range(1, len(us)):
                vertices.append(image[i])
                ts.append(us[i])
    return RayPolyline(s, vertices, ts)


# -- forward addresses ----------------------------------------------------


def escape_address(m, z, n_max):
    """Labels of ``z, f(z), ..., f^{n_max-1}(z)``.

    This observes a prefix of the external address of an escaping point.
    A real orbit of a real exponential map that overflows stays on the
    positive real axis, so its remaining labels are still determined.
    """
    if n_max < 1:
        raise ValueError("n_max must be positive")
    labels = []
    w = complex(z)
    real_overflow = False
    for j in range(n_max):
        if real_overflow:
            labels.append(labels[-1])
            continue
        try:
            labels.append(m.fundamental_domain_of(w))
        except (PreconditionViolated, BranchAmbiguity) as exc:
            raise OrbitEntersDisc(j + 1, f"f^{j + 1}(z) is not in W0: {exc}") from exc
        nxt = m.eval(w)
        if is_escaped(nxt):
            real_map = m.family is Family.EXPONENTIAL and m.params[0].imag == 0
            if real_map and w.imag == 0.0 and w.real > 0:
                real_overflow = True
                continue
            if j + 1 < n_max:
                raise OrbitEntersDisc(j + 1, f"f^{j + 1}(z) overflows")
        w = nxt
    return FiniteAddress(tuple(labels))


# -- convergence diagnostics ---------------------------------------------------


@dataclass(frozen=True)
class GapDecay:
    geometric: bool
    rate: float
    fitted: int


def gap_decay_check(orbit, slack=math.log(1.2), floor=1e-13, tail=30):
    """Least-squares fit of ``log(gap)`` against ``n`` over the converged tail.

    Gaps below ``floor * (1 + |zeta_N|)`` are rounding noise and excluded;
    the fit uses the last ``tail`` remaining gaps.  ``geometric`` is true iff
    the fitted slope is at most ``log(1/2) + slack``; ``rate`` is
    ``exp(slope)``.  An orbit whose gaps are all noise is geometric with
    rate 0.
    """
    gaps = np.asarray(orbit.gaps, dtype=float)
    scale = 1 + (abs(orbit.points[-1]) if orbit.points else 0.0)
    idx = np.nonzero(gaps > floor * scale)[0]
    if len(idx) < 3:
        return GapDecay(True, 0.0, int(len(idx)))
    # fit only the last `tail` significant gaps
    idx = idx[-tail:]
    slope = np.polyfit(idx.astype(float), np.log(gaps[idx]), 1)[0]
    rate = float(math.exp(slope))
    return GapDecay(bool(slope <= math.log(0.5) + slack), rate, int(len(idx)))
