import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dreadlock import (
    ArcLeavesW0,
    Classification,
    DomainLabel,
    EntireMap,
    ExternalAddress,
    FiniteAddress,
    PreconditionViolated,
    Status,
    escape_address,
    gap_decay_check,
    land,
    parse_address,
    pullback_point,
    trace_ray,
)
from dreadlock.errors import OrbitEntersDisc
from dreadlock.pullback import PullbackOrbit, pullback_sequence

import oracles

A = parse_address
EXP2 = EntireMap.exponential(-2)


# -- pullback points ------------------------------------------------------------


def test_pullback_point_examples():
    assert pullback_point(EXP2, A("(0)"), 10, 1) == pytest.approx(math.log(12), abs=1e-15)
    assert pullback_point(EXP2, A("(1)"), 10, 1) == pytest.approx(math.log(12) + 2j * math.pi, abs=1e-15)
    z60 = pullback_point(EXP2, A("(0)"), 10, 60)
    assert abs(z60 - oracles.FIX_EXP_M2[0]) < 1e-12
    assert abs(z60 - oracles.inverse_fixed_point(-2, 0)) < 1e-12


def test_pullback_point_matches_log_oracle():
    # on the real axis right of a = -2 every intermediate point stays there
    for n in range(1, 8):
        assert pullback_point(EXP2, A("(0)"), 10, n) == pytest.approx(
            oracles.pullback_exp(-2, [0] * n, 10), abs=1e-14
        )


def test_pullback_point_zero_depth_and_errors():
    assert pullback_point(EXP2, A("(3)"), 20, 0) == 20
    with pytest.raises(PreconditionViolated):
        pullback_point(EXP2, A("(0)"), 1, 3)
    with pytest.raises(ValueError):
        pullback_point(EXP2, FiniteAddress((0, 1)), 20, 3)


def test_pullback_sequence_matches_direct_composition():
    for text in ["(0)", "(1,-1)", "[2,-1] (0,1)", "[3] (2,0,-1)"]:
        s = A(text)
        seq = list(itertools.islice(pullback_sequence(EXP2, s, 16), 12))
        for n, z in enumerate(seq, start=1):
            assert abs(z - pullback_point(EXP2, s, 16, n)) < 1e-12


def _random_address(rng):
    pre = [rng.randint(-3, 3) for _ in range(rng.randint(0, 3))]
    per = [rng.randint(-3, 3) for _ in range(rng.randint(1, 3))]
    return ExternalAddress(tuple(pre), tuple(per))


def test_shift_pullback_commutation():
    rng = random.Random(20261017)
    for _ in range(50):
        s = _random_address(rng)
        n = rng.randint(1, 25)
        lhs = EXP2.eval(pullback_point(EXP2, s, 16, n))
        rhs = pullback_point(EXP2, s.shift(), 16, n - 1)
        assert abs(lhs - rhs) <= 1e-9


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-2, 2), min_size=1, max_size=3), st.integers(1, 12))
def test_pullback_lands_in_labelled_domain(block, n):
    s = ExternalAddress.periodic(block)
    z = pullback_point(EXP2, s, 16, n)
    w = EXP2.eval(z)
    if EXP2.in_W0(w, tol=1e-9):
        assert EXP2.fundamental_domain_of(z) == s.entry(0)


# -- landing ------------------------------------------------------------------------


@pytest.mark.parametrize("k", range(-3, 4))
def test_fixed_addresses_land_at_fixed_points(k):
    rep = land(EXP2, ExternalAddress.periodic([k]), 10, tol=1e-10)
    assert rep.status is Status.LANDED
    assert abs(rep.landing_point - oracles.FIX_EXP_M2[k]) < 1e-12
    assert abs(rep.multiplier - (rep.landing_point + 2)) < 1e-10
    assert rep.classification is Classification.REPELLING
    assert rep.residual <= 1e-8


def test_landing_upper_fixed_point():
    rep = land(EXP2, A("(1)"), 10)
    assert math.pi < rep.landing_point.imag < 3 * math.pi


def test_period_two_landing_is_a_two_cycle():
    rep = land(EXP2, A("(0,1)"), 16)
    assert rep.landed and rep.period == 2
    partner = land(EXP2, A("(1,0)"), 16)
    assert abs(EXP2.eval(rep.landing_point) - partner.landing_point) < 1e-9


def test_parabolic_landing_enters_slow_mode():
    m = EntireMap.exponential(-1)
    rep = land(m, A("(0)"), 10, tol=1e-8, n_max=2000)
    assert rep.status is Status.LANDED
    assert rep.slow_mode and rep.steps > 2000
    assert abs(rep.landing_point) < 1e-4
    assert rep.classification is Classification.PARABOLIC_MULTIPLIER_1


def test_divergence_is_reported():
    rep = land(EXP2, A("(0)"), 16, r_div=1.0)
    assert rep.status is Status.DIVERGED
    assert rep.landing_point is None


def test_budget_exhaustion_is_undecided():
    rep = land(EXP2, A("(0)"), 16, n_max=3)
    assert rep.status is Status.UNDECIDED
    assert rep.steps == 3


def test_orbit_csv():
    rep = land(EXP2, A("(0)"), 16)
    text = rep.orbit.to_csv()
    lines = text.splitlines()
    assert lines[0] == "n,re,im,gap"
    assert len(lines) == rep.steps + 1
    n, re_, im, gap = lines[2].split(",")
    assert int(n) == 2 and float(gap) == pytest.approx(rep.orbit.gaps[0])


# -- gap decay --------------------------------------------------------------------------


def test_gap_decay_hyperbolic():
    rep = land(EXP2, A("(0)"), 10)
    g = gap_decay_check(rep.orbit)
    assert g.geometric and g.rate <= 0.6
    assert g.rate == pytest.approx(1 / 3.1461932206205826, rel=0.05)


def test_gap_decay_parabolic():
    rep = land(EntireMap.exponential(-1), A("(0)"), 10, tol=1e-6, n_max=2000)
    g = gap_decay_check(rep.orbit)
    assert not g.geometric and g.rate > 0.9


def test_gap_decay_constant_orbit():
    z = oracles.FIX_EXP_M2[0]
    orbit = PullbackOrbit(A("(0)"), 16, [z] * 10, [0.0] * 9)
    g = gap_decay_check(orbit)
    assert g.geometric and g.rate == 0.0


# -- ray tracing ----------------------------------------------------------------------


@pytest.fixture(scope="module")
def ray0():
    return trace_ray(EXP2, A("(0)"), 1e4, 12)


def test_trace_ray_functional_equation(ray0):
    assert abs(EXP2.eval(ray0.at(-2.5)) - ray0.at(-1.5)) < 1e-6
    for t in (-11.25, -6.5, -3.875):
        assert abs(EXP2.eval(ray0.at(t)) - ray0.at(t + 1)) < 1e-6 * (1 + abs(ray0.at(t + 1)))


def test_trace_ray_endpoints(ray0):
    for n in range(1, 13):
        assert abs(ray0.at(-n) - pullback_point(EXP2, A("(0)"), 1e4, n)) < 1e-12
    # f overflows on the base arc, so the forward piece on [0, 1] is omitted
    assert ray0.t_values[0] == -12 and ray0.t_values[-1] == 0
    assert ray0.t_values == sorted(ray0.t_values)


def test_trace_ray_forward_piece():
    m = EntireMap.exponential(-2, disc_radius=2.1)
    ray = trace_ray(m, A("(0)"), 100, 6, 4)
    assert ray.t_values[-1] == 1
    assert ray.at(1) == pytest.approx(m.eval(ray.at(0)))
    assert abs(m.eval(ray.at(-0.5)) - ray.at(0.5)) < 1e-9 * abs(ray.at(0.5))


def test_trace_ray_is_real_for_real_address(ray0):
    for t, z in zip(ray0.t_values, ray0.vertices):
        if t <= -10:
            assert abs(z.imag) < 1e-6


def test_trace_ray_non_fixed_address():
    s = A("(1,-2)")
    ray = trace_ray(EXP2, s, 1e4, 10, 4)
    for n in range(1, 11):
        assert abs(ray.at(-n) - pullback_point(EXP2, s, 1e4, n)) < 1e-12
    # f maps the ray of s into the ray of shift(s)
    other = trace_ray(EXP2, s.shift(), 1e4, 10, 4)
    assert abs(EXP2.eval(ray.at(-3.5)) - other.at(-2.5)) < 1e-6


def test_trace_ray_csv(ray0):
    lines = ray0.to_csv().splitlines()
    assert lines[0] == "t,re,im"
    assert len(lines) == len(ray0.vertices) + 1


def test_trace_ray_rejects_short_base_arc():
    with pytest.raises(ArcLeavesW0):
        trace_ray(EXP2, A("(0)"), 10, 5)


# -- escape addresses ---------------------------------------------------------------------


def test_escape_address_examples():
    assert escape_address(EXP2, 100, 3) == FiniteAddress((0, 0, 0))
    assert escape_address(EXP2, 100 + 2j * math.pi, 1) == FiniteAddress((DomainLabel(0, 1),))


def test_escape_address_round_trip():
    # a small disc keeps the whole forward orbit in W0 (R = 2.1 still contains a)
    m = EntireMap.exponential(-2, disc_radius=2.1)
    s = A("(0,1)")
    z = pullback_point(m, s, 1e100, 6)
    assert escape_address(m, z, 6) == s.prefix(6)


def test_escape_address_enters_disc():
    with pytest.raises(OrbitEntersDisc) as info:
        escape_address(EXP2, 1.0, 3)
    assert info.value.step == 1
