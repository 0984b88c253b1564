import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dreadlock import (
    BranchAmbiguity,
    DomainLabel,
    EntireMap,
    Family,
    NormalizationError,
    NotComparable,
    PreconditionViolated,
    check_postsingular_bounded,
    choose_radius,
)
from dreadlock.function_model import ESCAPED, is_escaped

import oracles

EXP2 = EntireMap.exponential(-2)
SINH2 = EntireMap.cosine(1, -1)


# -- evaluation -----------------------------------------------------------------


def test_eval_examples(exp2, cosh2):
    assert exp2.eval(0) == -1
    assert exp2(math.log(3)) == pytest.approx(1, abs=1e-15)
    assert cosh2.eval(0) == 2


def test_deriv_examples(exp2, cosh2):
    assert exp2.deriv(0) == 1
    assert cosh2.deriv(0) == 0
    assert exp2.deriv(1) == pytest.approx(math.e, rel=1e-15)


def test_eval_overflow_is_marked(exp2, cosh2):
    assert exp2.eval(701) == ESCAPED
    assert exp2.deriv(701) == ESCAPED
    assert cosh2.eval(-701) == ESCAPED
    assert is_escaped(exp2.eval(1e6 + 3j))


def test_eval_array_matches_scalar(exp2, sinh2):
    zs = np.array([0, 1 + 2j, -3 - 1j, 750, 4.5j])
    for m in (exp2, sinh2):
        arr = m.eval_array(zs)
        for z, w in zip(zs, arr):
            ref = m.eval(complex(z))
            if is_escaped(ref):
                assert is_escaped(w)
            else:
                assert w == pytest.approx(ref, rel=1e-15)


def test_cyl_derivative_norm_oracle(exp2):
    assert exp2.cyl_derivative_norm(3) == pytest.approx(oracles.CYL_NORM_EXP_M2_AT_3, rel=1e-13)
    assert exp2.cyl_derivative_norm(math.log(3)) == pytest.approx(
        oracles.CYL_NORM_EXP_M2_AT_LN3, rel=1e-13
    )


def test_cyl_derivative_norm_degenerate():
    m = EntireMap.exponential(0)
    assert m.cyl_derivative_norm(1) == pytest.approx(1.0)
    with pytest.raises(PreconditionViolated):
        m.cyl_derivative_norm(0)


# -- singular values and normalization ------------------------------------------


def test_singular_values(exp2, cosh2, sinh2):
    assert exp2.singular_values() == [-2]
    assert sorted(cosh2.singular_values(), key=lambda z: z.real) == [-2, 2]
    assert sorted(sinh2.singular_values(), key=lambda z: z.imag) == [
        pytest.approx(-2j),
        pytest.approx(2j),
    ]


def test_sinh_critical_values_solve_derivative(sinh2):
    # f'(c) = e^c + e^-c = 0 at c = i*pi/2; f(c) = 2i
    c = 1j * math.pi / 2
    assert abs(sinh2.deriv(c)) < 1e-15
    assert sinh2.eval(c) == pytest.approx(2j)


@pytest.mark.parametrize(
    "maker, R",
    [
        (lambda: EntireMap.exponential(-2), 8.0),
        (lambda: EntireMap.exponential(-1), 8.0),
        (lambda: EntireMap.exponential(0), 8.0),
        (lambda: EntireMap.cosine(1, 1), 16.0),
        (lambda: EntireMap.cosine(1, -1), 8.0),
    ],
)
def test_default_radius_fixture(maker, R):
    m = maker()
    assert m.disc_radius == R
    assert choose_radius(m) == R
    assert all(abs(s) < R for s in m.singular_values())


def test_radius_smaller_than_singular_values_rejected():
    with pytest.raises(PreconditionViolated):
        EntireMap.exponential(-2, disc_radius=1.5)


def test_cut_through_tract_rejected():
    # the ray along the positive real axis lies in the tract of e^z - 2
    with pytest.raises(PreconditionViolated):
        EntireMap.exponential(-2, disc_radius=8, cut_angle=0.0)
    with pytest.raises(NormalizationError):
        EntireMap.exponential(-2, cut_angle=0.0)


def test_map_is_immutable(exp2):
    with pytest.raises(AttributeError):
        exp2.disc_radius = 3.0
    assert exp2.with_radius(10).disc_radius == 10
    assert exp2.disc_radius == 8


def test_postsingular_bounded():
    r = check_postsingular_bounded(EntireMap.exponential(-2), 1000, 10)
    assert r.bounded and r.max_modulus == pytest.approx(2.0)
    ref = oracles.forward_orbit(-2, -2, 1000)
    assert abs(ref[-1] - oracles.ATTRACTING_EXP_M2) < 1e-12
    assert check_postsingular_bounded(EntireMap.exponential(-1), 1000, 10).bounded
    assert not check_postsingular_bounded(EntireMap.exponential(0), 50, 1e10).bounded


# -- W0, cylindrical distance ----------------------------------------------------


def test_in_W0(exp2):
    R = exp2.disc_radius
    assert exp2.in_W0(2 * R)
    assert not exp2.in_W0(R / 2)
    assert not exp2.in_W0(-2 * R)  # on delta
    assert exp2.in_W0(-2 * R + 1e-6j)


def test_cyl_distance_examples(exp2):
    R = exp2.disc_radius
    assert exp2.cyl_distance(2 * R, 2 * R) == 0
    assert exp2.cyl_distance(2 * R, 2j * R) == pytest.approx(math.pi / 2)
    assert exp2.cyl_distance(2 * R, 4 * R) == pytest.approx(math.log(2))
    with pytest.raises(NotComparable):
        exp2.cyl_distance(1, 2 * R)


def _w0_points(m):
    R = m.disc_radius
    th = m.cut_angle
    return st.builds(
        lambda r, u: r * cmath.exp(1j * (th - 2 * math.pi + u)),
        st.floats(R * 1.001, R * 1e3),
        st.floats(1e-6, 2 * math.pi - 1e-6),
    )


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_cyl_distance_is_a_metric(data):
    m = EXP2
    pts = _w0_points(m)
    z, w, v = data.draw(pts), data.draw(pts), data.draw(pts)
    assert m.cyl_distance(z, w) == pytest.approx(m.cyl_distance(w, z), abs=1e-12)
    assert m.cyl_distance(z, v) <= m.cyl_distance(z, w) + m.cyl_distance(w, v) + 1e-12


# -- inverse branches and labels --------------------------------------------------


def test_inverse_branch_strict_rejects_points_in_disc(exp2):
    # w = 1 lies in D for every admissible R, so only the continued branch applies
    with pytest.raises(PreconditionViolated):
        exp2.inverse_branch(DomainLabel(0, 0), 1)
    assert exp2.continued_branch(DomainLabel(0, 0), 1) == pytest.approx(math.log(3), abs=1e-15)
    assert exp2.continued_branch(DomainLabel(0, 1), 1) == pytest.approx(
        math.log(3) + 2j * math.pi, abs=1e-15
    )


def test_inverse_branch_on_delta_is_ambiguous(exp2):
    with pytest.raises(BranchAmbiguity):
        exp2.inverse_branch(DomainLabel(0, 0), -3 * exp2.disc_radius)


def test_inverse_branch_matches_oracle(exp2):
    assert exp2.inverse_branch(DomainLabel(0, 0), 10) == pytest.approx(math.log(12), abs=1e-15)
    for k in range(-3, 4):
        assert exp2.inverse_branch(DomainLabel(0, k), 10) == pytest.approx(
            oracles.pullback_exp(-2, [k], 10), abs=1e-14
        )


@settings(max_examples=200, deadline=None)
@given(st.data(), st.integers(-5, 5), st.sampled_from([0, 1]))
def test_branch_round_trip_and_label(data, k, tract):
    for m in (EXP2, SINH2):
        if m.family is Family.EXPONENTIAL and tract == 1:
            continue
        w = data.draw(_w0_points(m))
        lab = DomainLabel(tract, k)
        z = m.inverse_branch(lab, w)
        assert abs(m.eval(z) - w) <= 1e-12 * abs(w)
        assert m.fundamental_domain_of(z) == lab


@settings(max_examples=150, deadline=None)
@given(st.floats(0.05, 2 * math.pi - 0.05), st.integers(-3, 3))
def test_continued_branch_is_continuous_across_the_circle(angle, k):
    # inner (bent-cut) and outer formulas agree on |w| = R
    m = EXP2
    R = m.disc_radius
    w = R * cmath.exp(1j * (m.cut_angle - 2 * math.pi + angle))
    lab = DomainLabel(0, k)
    inside = m.continued_branch(lab, w * (1 - 1e-10))
    outside = m.continued_branch(lab, w * (1 + 1e-10))
    assert abs(inside - outside) < 1e-8
    assert abs(m.eval(inside) - w * (1 - 1e-10)) < 1e-9


def test_fundamental_domain_examples(exp2):
    assert exp2.fundamental_domain_of(100) == DomainLabel(0, 0)
    assert exp2.fundamental_domain_of(100 + 2j * math.pi) == DomainLabel(0, 1)
    z = cmath.log(-exp2.disc_radius / 2 + 2)  # f(z) = -R/2 lies in D
    with pytest.raises(PreconditionViolated):
        exp2.fundamental_domain_of(z)


def test_label_order_and_text():
    labs = sorted([DomainLabel(0, 1), DomainLabel(1, 0), DomainLabel(0, -1), DomainLabel(1, 2)])
    assert labs == [DomainLabel(1, 2), DomainLabel(1, 0), DomainLabel(0, -1), DomainLabel(0, 1)]
    assert DomainLabel(1, -3).to_text(Family.COSINE) == "L-3"
    assert DomainLabel(0, 4).to_text() == "4"
