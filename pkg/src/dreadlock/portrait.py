"""
Ray portraits: which periodic addresses land at which periodic points.

Two complementary searches are provided.  The brute-force one lands every
periodic address over a truncated alphabet and groups the results by
landing point.  The candidate tree grows finite addresses level by level,
keeping only those whose pullback stays in a geometrically shrinking ball
around a target point, and reads off the periodic addresses it contains.

All alphabets are truncated at ``|k| <= K``; statements about finiteness
or completeness hold only within that alphabet, and reports say so.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from ._geometry import Window
from ._parallel import parallel_map
from .errors import BranchAmbiguity, EmptyLevel, PreconditionViolated, PullbackError
from .function_model import TWO_PI, DomainLabel, Family, is_escaped
from .periodic_points import Classification, scan_periodic
from .pullback import land, pullback_sequence
from .symbolic import FiniteAddress, alphabet, cyclic_between, periodic_addresses

HEURISTIC_NOTE = (
    "heuristic candidate filter: metric balls around the target stand in for "
    "preimage components"
)
ALPHABET_NOTE = "finiteness and completeness are certified only within the explored alphabet |k| <= K"


@dataclass(frozen=True)
class Tolerances:
    """Numerical knobs shared by the portrait routines."""

    land_tol: float = 1e-10
    match_tol: float = 1e-7
    n_max: int = 10_000
    slow_n_max: int = 1_000_000
    newton_tol: float = 1e-10

    def __post_init__(self):
        for name in ("land_tol", "match_tol", "newton_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.n_max < 1 or self.slow_n_max < 1:
            raise ValueError("step budgets must be positive")


def default_base(m):
    """A base point in ``W0``: twice the disc radius, opposite the cut."""
    w = -2.0 * m.disc_radius * m.cut_direction
    # drop rounding noise of e^{i*theta} so that e.g. theta = pi gives a real point
    eps = 1e-12 * abs(w)
    return complex(0.0 if abs(w.real) < eps else w.real, 0.0 if abs(w.imag) < eps else w.imag)


def _point_of(z0):
    return complex(getattr(z0, "point", z0))


def land_all(m, addresses, zeta=None, tolerances=None, workers=None):
    """Run :func:`land` on every address; returns ``{address: LandingReport}``."""
    tol = tolerances or Tolerances()
    zeta = default_base(m) if zeta is None else complex(zeta)

    def run(s):
        return land(
            m,
            s,
            zeta,
            tol=tol.land_tol,
            n_max=tol.n_max,
            slow_n_max=tol.slow_n_max,
            newton_tol=tol.newton_tol,
            keep_orbit=False,
        )

    addresses = list(addresses)
    return dict(zip(addresses, parallel_map(run, addresses, workers)))


def rays_to_point(m, z0, p, K, zeta=None, tolerances=None, *, landings=None, workers=None):
    """Periodic addresses of period ``p`` over ``|k| <= K`` landing at ``z0``.

    Every address is landed (or looked up in ``landings``) and kept when its
    refined landing point is within ``match_tol`` of ``z0``.  The result is
    sorted in the symbolic order.
    """
    if K < 1:
        raise ValueError("alphabet bound K must be >= 1")
    tol = tolerances or Tolerances()
    target = _point_of(z0)
    addrs = periodic_addresses(p, alphabet(K, m.family))
    if landings is None:
        landings = land_all(m, addrs, zeta, tol, workers)
    out = []
    for s in addrs:
        rep = landings[s]
        if rep.landed and abs(rep.landing_point - target) <= tol.match_tol:
            out.append(s)
    return sorted(out)


# -- candidate tree -----------------------------------------------------------


@dataclass
class CandidateTree:
    """Surviving finite addresses per depth (``levels[n-1]`` has length ``n``)."""

    target: object
    levels: list
    radii: list
    N: int
    delta_ball: float
    note: str = HEURISTIC_NOTE

    @property
    def depth(self):
        return len(self.levels)

    def check_prefix_invariant(self):
        for n in range(1, self.depth):
            parents = set(self.levels[n - 1])
            for s in self.levels[n]:
                if s.drop_last() not in parents:
                    return False
        return True

    def periodic_addresses(self, max_period=None):
        """Addresses of the periodic infinite paths ``uuu...`` with ``|u| <= max_period``.

        A path survives when its length-``depth`` prefix is in the last level
        (by the prefix invariant it is then in every level).  Nodes are
        pulled back in reverse, so the path ``uuu...`` approximates the
        address with block ``reversed(u)``.  ``max_period`` defaults to half
        the depth so that each block is seen at least twice.
        """
        from .symbolic import ExternalAddress

        max_period = self.depth // 2 if max_period is None else max_period
        final = set(self.levels[-1])
        found = set()
        for s in final:
            for q in range(1, max_period + 1):
                block = s.entries[:q]
                path = FiniteAddress(tuple(block[j % q] for j in range(self.depth)))
                if path in final:
                    found.add(ExternalAddress((), block[::-1]))
        return sorted(found)


def _tree_levels(m, target, labels, zeta, delta_ball, N, depth, max_level_size):
    levels, radii = [], []
    # node -> pullback of the reversed node, built one branch at a time
    frontier = [(FiniteAddress((lab,)), zeta) for lab in labels]
    for n in range(1, depth + 1):
        radius = delta_ball * 2.0 ** (N - n)
        keep = []
        for s, w in frontier:
            try:
                z = m.continued_branch(s.entries[-1], w)
            except (BranchAmbiguity, PreconditionViolated):
                continue
            if abs(z - target) <= radius:
                keep.append((s, z))
        if not keep:
            raise EmptyLevel(n)
        if len(keep) > max_level_size:
            raise OverflowError(f"{len(keep)} survivors at depth {n} exceed {max_level_size}")
        keep.sort(key=lambda t: [e.order_key for e in t[0].entries])
        levels.append([s for s, _ in keep])
        radii.append(radius)
        if n < depth:
            frontier = [(s.extend(lab), z) for s, z in keep for lab in labels]
    return levels, radii


def candidate_tree(m, z0, K, delta_ball=0.25, N=None, depth=12, zeta=None, max_level_size=100_000):
    """Shrinking-ball search for the addresses landing at a repelling point.

    Level ``n`` keeps the length-``n`` extensions ``s`` of level ``n-1``
    survivors with ``|pullback_point(reversed(s), zeta, n) - z0|`` at most
    ``delta_ball * 2**(N - n)``.  The newest label is thus the outermost
    branch, so a node's point is one inverse branch away from its parent's.
    Before depth ``N`` the radius is larger than ``delta_ball`` (the reach
    phase); afterwards it halves with each level.

    ``N=None`` picks the smallest ``N`` for which no level is empty, i.e.
    the first depth at which the search reaches the ``delta_ball``-ball.

    Raises
    ------
    EmptyLevel
        Some level has no survivor (for ``N=None``: for every ``N <= depth``).
    PreconditionViolated
        ``z0`` is not repelling.
    """
    cls = getattr(z0, "classification", Classification.REPELLING)
    if cls is not Classification.REPELLING:
        raise PreconditionViolated(f"target must be repelling, got {cls.value}")
    if K < 1 or depth < 1 or not delta_ball > 0:
        raise ValueError("need K >= 1, depth >= 1 and delta_ball > 0")
    target = _point_of(z0)
    zeta = default_base(m) if zeta is None else complex(zeta)
    labels = alphabet(K, m.family)
    schedule = [N] if N is not None else range(1, depth + 1)
    last = None
    for n_reach in schedule:
        try:
            levels, radii = _tree_levels(
                m, target, labels, zeta, delta_ball, n_reach, depth, max_level_size
            )
        except EmptyLevel as exc:
            last = exc
            continue
        tree = CandidateTree(z0, levels, radii, n_reach, delta_ball)
        assert tree.check_prefix_invariant()
        return tree
    raise last


# -- uniform landing ----------------------------------------------------------


@dataclass
class UniformLandingReport:
    n0: int | None
    eps: float
    window: int
    distances: dict
    diagnostic: str = ""

    @property
    def failed(self):
        return self.n0 is None


def uniform_landing_check(m, H, addresses, zeta=None, eps=1e-3, n0_max=60, window=10):
    """Least ``n0 <= n0_max`` with ``dist(zeta_n(s), H) <= eps`` on ``[n0, n0 + window]`` for all ``s``.

    ``H`` is a :class:`HyperbolicSetApprox` or any iterable of points.
    The distance tracks ``distances[s][n-1] = dist(zeta_n(s), H)`` are
    returned for inspection; a pullback failure counts as infinite distance.
    """
    pts = list(H.points) if hasattr(H, "points") else [complex(z) for z in H]
    zeta = default_base(m) if zeta is None else complex(zeta)
    horizon = n0_max + window
    tracks = {}
    for s in addresses:
        track = []
        seq = pullback_sequence(m, s, zeta)
        try:
            for _ in range(horizon):
                z = next(seq)
                track.append(math.inf if is_escaped(z) else min(abs(z - w) for w in pts))
        except PullbackError:
            pass
        track += [math.inf] * (horizon - len(track))
        tracks[s] = track
    for n0 in range(1, n0_max + 1):
        if all(max(t[n0 - 1 : n0 + window]) <= eps for t in tracks.values()):
            return UniformLandingReport(n0, eps, window, tracks)
    worst = max(tracks, key=lambda s: min(tracks[s][n0_max - 1 :]), default=None)
    diag = "no addresses" if worst is None else (
        f"address {worst} stays at distance >= {min(tracks[worst][n0_max - 1:]):.3g} "
        f"from H after n={n0_max}"
    )
    return UniformLandingReport(None, eps, window, tracks, diag)


# -- landing theorem at desk scale --------------------------------------------


def branch_label_of(m, z):
    """The label ``F`` with ``continued_branch(F, f(z)) == z``, or None.

    For a point ``z`` of a periodic cycle, reading these labels along the
    cycle gives the address one expects to land there.
    """
    w = m.eval(z)
    if is_escaped(w):
        return None
    tracts = (0,) if m.family is Family.EXPONENTIAL else (0, 1)
    for t in tracts:
        try:
            base = m.continued_branch(DomainLabel(t, 0), w)
        except (BranchAmbiguity, PreconditionViolated):
            return None
        k = round((z - base).imag / TWO_PI)
        lab = DomainLabel(t, k)
        if abs(m.continued_branch(lab, w) - z) <= 1e-6 * (1 + abs(z)):
            return lab
    return None


def required_labels(m, pt):
    """Labels read along the cycle of ``pt`` (None entries where undetermined)."""
    return [branch_label_of(m, z) for z in pt.cycle(m)]


@dataclass
class PortraitReport:
    map_id: str
    period: int
    K: int
    window: list
    pairs: list
    unmatched_points: list
    unmatched_addresses: list
    colanding: list
    violations: list
    landings: dict = field(repr=False, default_factory=dict)
    notes: list = field(default_factory=lambda: [ALPHABET_NOTE])

    @property
    def ok(self):
        return not self.violations

    def violation_kinds(self):
        return sorted({v["kind"] for v in self.violations})

    def table(self, family=Family.EXPONENTIAL):
        """Plain-text summary: one row per landing point, then the violations."""
        lines = [f"{self.map_id}  period {self.period}  |k| <= {self.K}", ""]
        lines.append(f"{'point':>36}  {'rays':>4}  addresses")
        for z, addrs in self.colanding:
            pt = f"{z.real:+.10f} {z.imag:+.10f}i"
            lines.append(f"{pt:>36}  {len(addrs):>4}  " + " ".join(s.format(family) for s in addrs))
        for pt, req in self.unmatched_points:
            z = pt.point
            labels = ",".join("?" if l is None else l.to_text(family) for l in req)
            lines.append(f"{z.real:+.10f} {z.imag:+.10f}i".rjust(36) + f"  {0:>4}  needs [{labels}]")
        lines.append("")
        counts = {}
        for v in self.violations:
            counts[v["kind"]] = counts.get(v["kind"], 0) + 1
        lines.append("violations: " + (", ".join(f"{k} x{n}" for k, n in sorted(counts.items())) or "none"))
        return "\n".join(lines) + "\n"

    def to_dict(self, family=Family.EXPONENTIAL):
        fmt = lambda s: s.format(family)  # noqa: E731
        return {
            "map": self.map_id,
            "period": self.period,
            "K": self.K,
            "window": list(self.window),
            "pairs": [
                {
                    "address": fmt(s),
                    "point": pt.point,
                    "landing_point": self.landings[s].landing_point,
                    "classification": pt.classification_text,
                    "multiplier": pt.multiplier,
                }
                for s, pt in self.pairs
            ],
            "unmatched_points": [
                {
                    "point": pt.point,
                    "classification": pt.classification_text,
                    "required_labels": [None if l is None else l.to_text(family) for l in req],
                }
                for pt, req in self.unmatched_points
            ],
            "unmatched_addresses": [
                {"address": fmt(s), "status": self.landings[s].status_text, "note": self.landings[s].note}
                for s in self.unmatched_addresses
            ],
            "colanding": [
                {"point": z, "addresses": [fmt(s) for s in addrs], "count": len(addrs)}
                for z, addrs in self.colanding
            ],
            "violations": list(self.violations),
            "notes": list(self.notes),
        }


def _cluster(points_with_keys, tol):
    """Group ``(point, key)`` pairs whose points are within ``tol``; deterministic."""
    groups = []
    for z, key in points_with_keys:
        for g in groups:
            if abs(g[0] - z) <= tol:
                g[1].append(key)
                break
        else:
            groups.append([z, [key]])
    return groups


def verify_landing_theorem(
    m, p, K, window, tolerances=None, zeta=None, grid=(40, 40), workers=None, scan=None
):
    """Check both directions of the landing theorem for period ``p`` over ``|k| <= K``.

    Direction A: every ``Landed`` period-``p`` address lands at a repelling
    or parabolic point.  Direction B: every repelling or parabolic period-``p``
    point found in ``window`` is the landing point of some address.  Also
    checked: the conjugacy ``shift(s) -> f(z0)``, a common period among
    co-landing addresses, and that the landing point's period divides ``p``.

    Violations are listed in the report; nothing is raised.
    """
    tol = tolerances or Tolerances()
    window = window if isinstance(window, Window) else Window.from_sequence(window)
    addrs = periodic_addresses(p, alphabet(K, m.family))
    landings = land_all(m, addrs, zeta, tol, workers)
    violations = []

    landed = [s for s in addrs if landings[s].landed]
    unmatched_addresses = [s for s in addrs if not landings[s].landed]
    for s in landed:
        rep = landings[s]
        if not rep.classification.is_repelling_or_parabolic:
            violations.append(
                {"kind": "landed-not-repelling-or-parabolic", "address": str(s),
                 "classification": rep.classification_text}
            )
        if p % rep.period:
            violations.append(
                {"kind": "landing-period-mismatch", "address": str(s), "landing_period": rep.period}
            )
        partner = landings.get(s.shift())
        fz = m.eval(rep.landing_point)
        if partner is None or not partner.landed or abs(partner.landing_point - fz) > tol.match_tol:
            violations.append({"kind": "conjugacy", "address": str(s)})

    groups = _cluster(
        sorted(((landings[s].landing_point, s) for s in landed),
               key=lambda t: (t[0].imag, t[0].real, t[1])),
        tol.match_tol,
    )
    colanding = sorted(((z, sorted(ss)) for z, ss in groups), key=lambda t: (t[0].imag, t[0].real))
    for z, ss in colanding:
        if len({s.period_length for s in ss}) > 1:
            violations.append({"kind": "colanding-period", "point": z})
        by_first = itertools.groupby(sorted(ss, key=lambda s: s.entry(0).order_key),
                                     key=lambda s: s.entry(0))
        for _, grp in by_first:
            grp = list(grp)
            for a, b, c in itertools.combinations(grp, 3):
                if cyclic_between(a, b, c) != cyclic_between(a.shift(), b.shift(), c.shift()):
                    violations.append({"kind": "cyclic-order", "addresses": [str(a), str(b), str(c)]})

    if scan is None:
        scan = scan_periodic(m, p, window, grid=grid, workers=workers)
    pairs, unmatched_points = [], []
    for pt in scan:
        if not pt.classification.is_repelling_or_parabolic:
            continue
        hits = [s for s in landed if abs(landings[s].landing_point - pt.point) <= tol.match_tol]
        if hits:
            pairs.extend((s, pt) for s in sorted(hits))
        else:
            req = required_labels(m, pt)
            unmatched_points.append((pt, req))
            violations.append(
                {"kind": "point-without-ray", "point": pt.point,
                 "required_labels": [None if l is None else str(l) for l in req]}
            )

    notes = [ALPHABET_NOTE]
    return PortraitReport(
        map_id=m.map_id,
        period=p,
        K=K,
        window=window.as_list(),
        pairs=pairs,
        unmatched_points=unmatched_points,
        unmatched_addresses=unmatched_addresses,
        colanding=colanding,
        violations=violations,
        landings=landings,
        notes=notes,
    )


def count_colanding(report):
    """``{landing point: number of addresses}`` within the explored alphabet."""
    return {z: len(addrs) for z, addrs in report.colanding}


def compare_colanding(report, larger, tol=1e-7):
    """Landing points whose count grows from ``report`` to ``larger`` (alphabet ``K+1``)."""
    small = count_colanding(report)
    grew = []
    for z, n in count_colanding(larger).items():
        before = next((c for w, c in small.items() if abs(w - z) <= tol), 0)
        if before and n > before:
            grew.append((z, before, n))
    return grew
