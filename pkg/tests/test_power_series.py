import cmath
import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import polynomial as P

from loewnerzip import conformal_maps as cm
from loewnerzip.errors import ValidationError
from loewnerzip.power_series import (
    PowerSeries,
    compose,
    eval_h_via_series,
    revert,
    series_of_step,
    series_of_tilted,
    series_of_vertical,
)

# oracles ---------------------------------------------------------------------


def brute_compose(a, b):
    """``a(b(z))`` by expanding every power of ``b``; coefficient arrays start at z^1."""
    n = len(a)
    bf = np.concatenate(([0.0], b))
    out = np.zeros(n + 1)
    for j, aj in enumerate(a, start=1):
        power = P.polypow(bf, j)[: n + 1]
        out[: power.size] += aj * power
    return out[1:]


def brute_revert(a):
    """Reversion by the fixed point ``R <- R - (A o R - z)``, one order per pass."""
    n = len(a)
    ident = np.zeros(n)
    ident[0] = 1.0
    r = ident.copy()
    for _ in range(n + 2):
        r = r - (brute_compose(a, r) - ident)
    return r


def binomial_vertical(n):
    """Coefficients of ``z (1 + z^2)^(-1/2)`` as exact fractions."""
    out = []
    for j in range(1, n + 1):
        if j % 2 == 0:
            out.append(Fraction(0))
        else:
            k = (j - 1) // 2
            c = Fraction(1)
            for i in range(k):
                c *= Fraction(-1, 2) - i
                c /= i + 1
            out.append(c)
    return out


unit_series = st.lists(st.floats(-1, 1), min_size=2, max_size=7).map(lambda c: np.array([1.0] + c))
tips = st.builds(complex, st.floats(-2, 2), st.floats(0.1, 2))


# construction ------------------------------------------------------------------


def test_vertical_series_binomial():
    s = series_of_vertical(cm.VerticalSlit(0.0, 1.0), 12)
    ref = np.array([float(c) for c in binomial_vertical(12)])
    assert np.max(np.abs(s.coeffs - ref)) <= 1e-14
    assert np.allclose(series_of_vertical(cm.VerticalSlit(0.0, 1.0), 5).coeffs, [1, 0, -0.5, 0, 0.375], atol=0)


@given(tips)
def test_vertical_series_second_coefficient_is_x(w):
    s = series_of_vertical(cm.VerticalSlit(w.real, w.imag), 12)
    assert s.coeffs[0] == 1.0
    assert s.coeffs[1] == pytest.approx(w.real, abs=1e-15)
    # finite difference of hhat(z) = 1 / h(1/z) at small z
    z = 1e-4
    hh = 1.0 / cm.apply_vertical(cm.VerticalSlit(w.real, w.imag), 1.0 / z)
    assert ((hh - z) / z**2).real == pytest.approx(w.real, abs=1e-3 * (1 + abs(w) ** 2))


def test_tilted_half_angle_matches_vertical():
    t = series_of_tilted(cm.tilted_from_tip(1j).map, 12)
    v = series_of_vertical(cm.VerticalSlit(0.0, 1.0), 12)
    assert np.max(np.abs(t.coeffs - v.coeffs)) <= 1e-10
    t5 = series_of_tilted(cm.tilted_from_tip(1j).map, 5)
    assert np.allclose(t5.coeffs, [1, 0, -0.5, 0, 0.375], atol=1e-12)


@given(r=st.floats(0.2, 2), alpha=st.floats(0.1, 0.9))
def test_tilted_second_coefficient_matches_map(r, alpha):
    step = cm.tilted_from_tip(cmath.rect(r, math.pi * alpha))
    s = series_of_tilted(step.map, 12)
    # h(z) = z - du + ..., so a_2 = du
    assert s.coeffs[1] == pytest.approx(step.du, abs=1e-12 * r)
    # 1/z must lie in the upper half plane
    z = -1e-3 * 1j
    hh = 1.0 / cm.apply_tilted(step.map, 1.0 / z)
    approx = (hh - z) / z**2
    assert approx.real == pytest.approx(s.coeffs[1], abs=1e-2 * r * r)


@given(tips)
def test_series_agrees_with_map_far_away(w):
    for step in (cm.vertical_from_tip(w), cm.tilted_from_tip(w)):
        s = series_of_step(step, 12)
        for z in (20 * abs(w) * 1j, 20 * abs(w) * (1 + 1j), -30 * abs(w) + 5j * abs(w)):
            exact = cm.apply_step(step, z)
            assert abs(eval_h_via_series(s, z) - exact) <= 1e-12 * abs(z)


# composition and reversion ---------------------------------------------------


def test_compose_hand_example():
    a = PowerSeries([1.0, 1.0, 0.0])
    c = compose(a, a)
    assert np.allclose(c.coeffs, [1, 2, 2], atol=0)


def test_compose_identity():
    b = PowerSeries([1.0, 0.3, -0.2, 0.7])
    assert np.array_equal(compose(PowerSeries.identity(4), b).coeffs, b.coeffs)
    assert np.array_equal(compose(b, PowerSeries.identity(4)).coeffs, b.coeffs)


def test_compose_order_mismatch():
    with pytest.raises(ValidationError):
        compose(PowerSeries.identity(4), PowerSeries.identity(5))


@given(unit_series, st.data())
def test_compose_matches_brute_force(a, data):
    b = np.array([1.0] + data.draw(st.lists(st.floats(-1, 1), min_size=a.size - 1, max_size=a.size - 1)))
    got = compose(PowerSeries(a), PowerSeries(b)).coeffs
    ref = brute_compose(a, b)
    assert np.allclose(got, ref, rtol=1e-12, atol=1e-12)
    assert got[0] == 1.0


@given(unit_series, st.data())
def test_compose_associative(a, data):
    n = a.size
    draw = lambda: np.array([1.0] + data.draw(st.lists(st.floats(-1, 1), min_size=n - 1, max_size=n - 1)))
    A, B, C = PowerSeries(a), PowerSeries(draw()), PowerSeries(draw())
    left = compose(compose(A, B), C).coeffs
    right = compose(A, compose(B, C)).coeffs
    assert np.max(np.abs(left - right)) <= 1e-12 * max(1.0, np.max(np.abs(left)))


@given(unit_series)
def test_revert_involution_and_oracle(a):
    r = revert(PowerSeries(a))
    assert r.coeffs[0] == pytest.approx(1.0, abs=1e-14)
    scale = max(1.0, np.max(np.abs(r.coeffs)))
    assert np.allclose(r.coeffs, brute_revert(a), rtol=1e-10, atol=1e-10 * scale)
    assert np.allclose(revert(r).coeffs, a, rtol=1e-9, atol=1e-9 * scale)
    ident = compose(PowerSeries(a), r).coeffs
    assert np.allclose(ident, np.eye(1, a.size)[0], atol=1e-9 * scale)


def test_revert_rejects_zero_linear_term():
    with pytest.raises(ValidationError):
        revert(PowerSeries([0.0, 1.0, 2.0]))


@settings(max_examples=50)
@given(tips, tips, st.booleans())
def test_hat_composition_matches_map_composition(w1, w2, tilted):
    """The series of ``h1 o h2`` is the composition of the two series."""
    make = cm.tilted_from_tip if tilted else cm.vertical_from_tip
    s1, s2 = make(w1), make(w2)
    both = compose(series_of_step(s1), series_of_step(s2))
    bound = 10 * (abs(w1) + abs(w2))
    for theta in (0.1, 0.5 * math.pi, 3.0):
        z = cmath.rect(bound, theta)
        exact = cm.apply_step(s1, cm.apply_step(s2, z))
        assert abs(eval_h_via_series(both, z) - exact) <= 1e-8 * abs(exact)


# evaluation -------------------------------------------------------------------


def test_eval_identity():
    assert eval_h_via_series(PowerSeries.identity(12), 3 + 4j) == pytest.approx(3 + 4j, rel=1e-15)


def test_eval_truncation_error_at_100i():
    s = series_of_vertical(cm.VerticalSlit(0.0, 1.0), 12)
    z = 100j
    exact = cm.apply_vertical(cm.VerticalSlit(0.0, 1.0), z)
    # double evaluation is within rounding of the closed form
    assert abs(eval_h_via_series(s, z) - exact) <= 4 * np.finfo(float).eps * abs(exact)
    # the truncation error itself, measured in extended precision
    with mp.workdps(50):
        zeta = 1 / mp.mpc(z)
        series = 1 / mp.fsum(mp.mpf(float(a)) * zeta ** (j + 1) for j, a in enumerate(s.coeffs))
        closed = 1j * mp.sqrt(-mp.mpc(z) ** 2 - 1)
        assert abs(series - closed) / abs(closed) <= 1e-20


@given(tips)
def test_truncation_tail_bound(w):
    step = cm.vertical_from_tip(w)
    n = 12
    R = abs(w)
    z = 4 * R * 1j
    short = eval_h_via_series(series_of_step(step, n), z)
    long = eval_h_via_series(series_of_step(step, n + 4), z)
    # coefficients grow like R^j up to a modest constant
    assert abs(short - long) <= 10 * abs(z) * (R / abs(z)) ** (n + 1)


def test_power_series_object():
    s = PowerSeries([1.0, 2.0])
    assert s.order == 2
    assert s(0.5) == pytest.approx(0.5 + 2 * 0.25)
    assert "PowerSeries" in repr(s)
    with pytest.raises(ValidationError):
        PowerSeries([])
