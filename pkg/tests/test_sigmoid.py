import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from grn_logistic.errors import DomainError
from grn_logistic.sigmoid import (
    Direction,
    HillParams,
    SigmoidParams,
    hill,
    hill_deriv,
    logistic,
    logistic_deriv,
    logistic_inverse,
    logistic_second_deriv,
    match_steepness,
    match_weighted_basal_slope,
    match_weighted_custom_threshold,
    rescale_weight,
)

INC, DEC = Direction.INCREASING, Direction.DECREASING

thetas = st.floats(-500, 500)
lams = st.floats(1e-3, 5.0)
xs = st.floats(-1e4, 1e4)


def naive(x, theta, lam, sign):
    return 1.0 / (1.0 + math.exp(-sign * lam * (x - theta)))


# --- evaluation -------------------------------------------------------------

def test_half_at_threshold():
    for lam in (1e-4, 0.04, 10.0):
        assert logistic(37.5, SigmoidParams(37.5, lam)) == 0.5
        assert logistic(37.5, SigmoidParams(37.5, lam, DEC)) == 0.5


def test_reference_values():
    inc = SigmoidParams(100.0, 0.04)
    dec = SigmoidParams(100.0, 0.04, DEC)
    assert logistic(167.96, inc) == pytest.approx(0.9381, abs=1e-4)
    assert logistic(167.96, dec) == pytest.approx(0.0619, abs=1e-4)
    assert logistic(139.99, dec) == pytest.approx(0.1680, abs=1e-4)


@given(x=xs, theta=thetas, lam=lams)
def test_complementarity(x, theta, lam):
    inc = logistic(x, SigmoidParams(theta, lam))
    dec = logistic(x, SigmoidParams(theta, lam, DEC))
    assert abs(inc + dec - 1.0) <= 1e-15


@given(x=st.floats(-50, 50), theta=st.floats(-20, 20), lam=st.floats(0.01, 2))
def test_matches_naive_formula(x, theta, lam):
    for d, sign in ((INC, 1), (DEC, -1)):
        assert logistic(x, SigmoidParams(theta, lam, d)) == pytest.approx(naive(x, theta, lam, sign), rel=1e-13)


def test_no_overflow_far_tails():
    p = SigmoidParams(0.0, 1.0)
    grid = np.linspace(-1e6, 1e6, 20001)
    y = logistic(grid, p)
    assert np.all(np.isfinite(y))
    assert np.all(np.diff(y) >= 0)
    assert logistic(-1e6, p) == 0.0 or logistic(-1e6, p) < 1e-300
    assert logistic(1e6, p) == 1.0
    assert math.isfinite(logistic_deriv(800.0, p))
    assert math.isfinite(logistic_second_deriv(-800.0, p))


def test_vector_and_scalar_paths_agree():
    p = SigmoidParams(3.0, 0.7, DEC)
    grid = np.linspace(-40, 40, 81)
    vec = logistic(grid, p)
    assert np.allclose(vec, [logistic(float(x), p) for x in grid], rtol=0, atol=1e-16)


def test_invalid_params():
    with pytest.raises(ValueError):
        SigmoidParams(1.0, 0.0)
    with pytest.raises(ValueError):
        SigmoidParams(math.nan, 1.0)
    with pytest.raises(ValueError):
        HillParams(0.0, 4.0)


# --- derivatives --------------------------------------------------------------

def test_peak_slope_at_threshold():
    assert logistic_deriv(100.0, SigmoidParams(100.0, 0.04)) == 0.01
    assert logistic_deriv(100.0, SigmoidParams(100.0, 0.04, DEC)) == -0.01


def test_deriv_reference_value():
    # decreasing sigmoid at the weighted equilibrium A: -lam f (1 - f)
    d = logistic_deriv(144.46, SigmoidParams(100.0, 0.04, DEC))
    assert d == pytest.approx(-0.04 * 0.1445 * 0.8555, rel=2e-3)


@given(x=xs, theta=thetas, lam=lams)
def test_slope_bound(x, theta, lam):
    for d in (INC, DEC):
        assert abs(logistic_deriv(x, SigmoidParams(theta, lam, d))) <= lam / 4.0 * (1 + 1e-15)


def central_difference(x, p):
    # step on the sigmoid's own length scale 1/lam, made exactly representable,
    # differencing whichever branch is small so rounding stays relative
    h = np.cbrt(np.finfo(float).eps) / p.lam
    h = (x + h) - x
    other = SigmoidParams(p.theta, p.lam, DEC if p.direction is INC else INC)
    if logistic(x, p) <= 0.5:
        return (logistic(x + h, p) - logistic(x - h, p)) / (2 * h)
    return -(logistic(x + h, other) - logistic(x - h, other)) / (2 * h)


@given(x=st.floats(-300, 300), theta=st.floats(-100, 100), lam=st.floats(0.005, 1.0))
def test_derivative_vs_central_difference(x, theta, lam):
    for d in (INC, DEC):
        p = SigmoidParams(theta, lam, d)
        exact = logistic_deriv(x, p)
        assert central_difference(x, p) == pytest.approx(exact, rel=1e-8, abs=1e-300)


@given(x=st.floats(-200, 200), theta=st.floats(-50, 50), lam=st.floats(0.01, 1.0))
def test_second_derivative_vs_difference_of_first(x, theta, lam):
    for d in (INC, DEC):
        p = SigmoidParams(theta, lam, d)
        h = 1e-5 * max(1.0, abs(x))
        fd = (logistic_deriv(x + h, p) - logistic_deriv(x - h, p)) / (2 * h)
        assert fd == pytest.approx(logistic_second_deriv(x, p), rel=1e-5, abs=1e-10)


# --- inverse ------------------------------------------------------------------

def test_inverse_basic():
    p = SigmoidParams(100.0, 0.04)
    assert logistic_inverse(0.5, p) == 100.0
    assert logistic_inverse(0.0619, SigmoidParams(100.0, 0.04, DEC)) == pytest.approx(167.96, abs=0.02)


def test_inverse_guarded_near_one():
    p = SigmoidParams(100.0, 0.04)
    for y in (1 - 1e-18, 1e-18, 1e-300, 1.0, 0.0):
        assert math.isfinite(logistic_inverse(y, p))


@pytest.mark.parametrize("y", [-0.1, 1.5, math.nan, math.inf])
def test_inverse_domain(y):
    with pytest.raises(DomainError):
        logistic_inverse(y, SigmoidParams(0.0, 1.0))


@given(x=st.floats(-300, 300), theta=st.floats(-100, 100), lam=st.floats(0.01, 0.1))
def test_inverse_round_trip(x, theta, lam):
    for d in (INC, DEC):
        p = SigmoidParams(theta, lam, d)
        y = logistic(x, p)
        back = logistic_inverse(y, p)
        # rounding y costs eps/(lam y (1-y)) in x near saturation: input conditioning
        spread = y * (1 - y)
        slack = 4 * np.finfo(float).eps / (lam * spread) if spread > 0 else math.inf
        assert abs(back - x) <= 1e-10 * max(1.0, abs(x)) + slack


# --- Hill ---------------------------------------------------------------------

def test_hill_values():
    h = HillParams(100.0, 4.0)
    assert hill(100.0, h) == 0.5
    assert hill(0.0, h, DEC) == 1.0
    assert hill(0.0, h, INC) == 0.0
    direct = 1.0 / (1.0 + (167.96 / 100.0) ** 4)
    assert hill(167.96, h, DEC) == pytest.approx(direct, rel=1e-14)
    # published approximation 0.1122 differs in the fourth decimal
    assert hill(167.96, h, DEC) == pytest.approx(0.1122, abs=1e-3)


def test_hill_rejects_negative():
    h = HillParams(100.0, 4.0)
    with pytest.raises(DomainError):
        hill(-1.0, h, DEC)
    with pytest.raises(DomainError):
        hill_deriv(-1.0, h, DEC)
    assert hill(-1.0, h, DEC, clamp_negative=True) == 1.0


@given(x=st.floats(1e-3, 1e3), theta=st.floats(1, 300), n=st.floats(0.5, 6))
def test_hill_deriv_vs_difference(x, theta, n):
    hp = HillParams(theta, n)
    h = np.cbrt(np.finfo(float).eps) * x
    h = (x + h) - x  # exactly representable step
    for d in (INC, DEC):
        up, down = hill(x + h, hp, d), hill(x - h, hp, d)
        fd = (up - down) / (2 * h)
        # rounding in the two values, amplified by 1/h, plus O(h^2) truncation
        noise = 4 * np.finfo(float).eps * max(abs(up), abs(down)) / h
        assert fd == pytest.approx(hill_deriv(x, hp, d), rel=1e-6 * (1 + n) ** 3, abs=noise)


# --- matching -----------------------------------------------------------------

def test_match_steepness():
    assert match_steepness(HillParams(100.0, 4.0)) == 0.04
    assert match_steepness(HillParams(70.0, 4.0)) == pytest.approx(0.0571, abs=1e-4)
    assert match_steepness(HillParams(1.0, 1.0)) == 1.0


@given(theta=st.floats(1, 500), n=st.floats(0.5, 8))
def test_matched_slopes_coincide(theta, n):
    hp = HillParams(theta, n)
    lam = match_steepness(hp)
    assert hill_deriv(theta, hp, DEC) == pytest.approx(logistic_deriv(theta, SigmoidParams(theta, lam, DEC)), rel=1e-12)


def test_local_not_global_agreement():
    hp = HillParams(100.0, 4.0)
    p = SigmoidParams(100.0, match_steepness(hp), DEC)
    near = np.linspace(90, 110, 201)
    assert max(abs(hill(float(x), hp, DEC) - logistic(float(x), p)) for x in near) < 0.02
    assert abs(hill(167.96, hp, DEC) - logistic(167.96, p)) > 0.04


def test_weighted_basal_slope():
    m = match_weighted_basal_slope(50.0)
    assert (m.kappa, m.theta, m.lam) == (200.0, 50.0, math.log(3.0) / 50.0)
    assert m.basal_rate() == pytest.approx(50.0, rel=1e-12)
    m1 = match_weighted_basal_slope(1.0)
    assert (m1.kappa, m1.theta, m1.lam) == (4.0, 1.0, math.log(3.0))
    assert m.kappa * m.lam / 4.0 == pytest.approx(math.log(3.0), rel=1e-15)
    with pytest.raises(DomainError):
        match_weighted_basal_slope(0.0)


def test_custom_threshold():
    same = match_weighted_custom_threshold(50.0, 50.0)
    ref = match_weighted_basal_slope(50.0)
    assert same.kappa == ref.kappa
    assert same.lam == pytest.approx(ref.lam, rel=1e-15)
    m = match_weighted_custom_threshold(50.0, 100.0)
    assert m.kappa == 300.0
    assert m.lam == pytest.approx(math.log(5.0) / 100.0, rel=1e-15)
    tiny = match_weighted_custom_threshold(50.0, 1e-9)
    assert tiny.kappa == pytest.approx(100.0)
    assert tiny.lam * tiny.theta < 1e-9


@given(g=st.floats(1e-2, 1e3), theta=st.floats(1e-3, 1e3))
def test_basal_identities(g, theta):
    for m in (match_weighted_basal_slope(g), match_weighted_custom_threshold(g, theta)):
        assert m.kappa > 0 and m.theta > 0 and m.lam > 0
        assert m.kappa / (1.0 + math.exp(m.lam * m.theta)) == pytest.approx(g, rel=1e-12)


def test_rescale_weight_reference():
    p = SigmoidParams(50.0, math.log(3) / 50.0, units="nM/min")
    r = rescale_weight(p, 3.0, units="nM")
    assert r.lam == pytest.approx(0.0659, abs=1e-4)
    assert r.theta == pytest.approx(16.67, abs=1e-2)
    assert r.units == "nM"
    assert rescale_weight(p, 1.0) == p
    with pytest.raises(DomainError):
        rescale_weight(p, 0.0)
    with pytest.raises(DomainError):
        rescale_weight(p, -2.0)


@given(theta=st.floats(-100, 100), lam=st.floats(1e-3, 1.0), w=st.floats(1e-2, 1e2))
def test_rescale_weight_pointwise(theta, lam, w):
    for d in (INC, DEC):
        p = SigmoidParams(theta, lam, d)
        r = rescale_weight(p, w)
        xs_ = np.linspace(-300, 300, 100)
        a = np.array([logistic(w * x, p) for x in xs_])
        b = np.array([logistic(x, r) for x in xs_])
        assert np.allclose(a, b, rtol=1e-12, atol=1e-300)
