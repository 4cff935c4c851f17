import json
import math
import time
import warnings

import numpy as np
import pytest
from scipy.optimize import brentq, fsolve

from grn_logistic.model import CoreParams, LogisticModelParams, ModelConfig, rhs
from grn_logistic.equilibrium import equilibrium_factors, solve_equilibrium, verify_residual
from grn_logistic.sigmoid import SigmoidParams, Direction, logistic


def test_linear_reference(base_cfg):
    rep = solve_equilibrium("linear-additive", base_cfg.linear, guess=(100, 100), tol=1e-8)
    assert rep.converged and rep.iterations <= 10
    assert rep.point.A == pytest.approx(167.96, abs=0.01)
    assert rep.point.B == pytest.approx(164.22, abs=0.01)


def test_weighted_reference(base_cfg):
    rep = solve_equilibrium("weighted", base_cfg.weighted, guess=(100, 100), tol=1e-10)
    assert rep.converged
    assert rep.point.A == pytest.approx(144.46, abs=0.01)
    assert rep.point.B == pytest.approx(139.99, abs=0.01)


@pytest.mark.parametrize("form", ["linear-additive", "weighted", "hill"])
def test_agrees_with_library_root_finder(base_cfg, form):
    p = base_cfg.params_for(form)
    rep = solve_equilibrium(form, p)
    ref = fsolve(lambda x: rhs(form, p, tuple(x)), [100.0, 100.0], xtol=1e-13)
    assert np.allclose(rep.point, ref, atol=1e-8)


def test_hill_equilibrium_residual(base_cfg):
    rep = solve_equilibrium("hill", base_cfg.core)
    assert rep.converged
    assert max(verify_residual(rep.point, "hill", base_cfg.core)) < 1e-8


def test_decoupled_against_bisection():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        core = CoreParams(g_AB=0.0, g_BA=0.0)
    p = LogisticModelParams.from_core(core)
    rep = solve_equilibrium("linear-additive", p)
    fA = lambda x: core.g_A * logistic(x, p.repression_A) - core.gamma_A * x
    fB = lambda x: core.g_B * logistic(x, p.repression_B) - core.gamma_B * x
    assert rep.point.A == pytest.approx(brentq(fA, 0, 1000, xtol=1e-14), abs=1e-8)
    assert rep.point.B == pytest.approx(brentq(fB, 0, 1000, xtol=1e-14), abs=1e-8)


def test_factors(base_cfg, lin_eq, wt_eq):
    f = lin_eq.factors
    assert f["f_A_minus"] == pytest.approx(0.0619, abs=5e-4)
    assert f["f_B_minus"] == pytest.approx(0.0712, abs=5e-4)
    w = wt_eq.factors
    for key, val in zip(["f1_plus", "f2_plus", "f3_minus", "f4_minus"], [0.9997, 0.9998, 0.1445, 0.1680]):
        assert w[key] == pytest.approx(val, abs=5e-4)
    assert all(0 < v < 1 for v in list(f.values()) + list(w.values()))


def test_factors_at_threshold(base_cfg):
    f = equilibrium_factors((100.0, 100.0), "linear-additive", base_cfg.linear)
    assert f == {"f_A_minus": 0.5, "f_B_minus": 0.5}


def test_verify_residual(base_cfg, lin_eq):
    assert max(verify_residual(lin_eq.point, "linear-additive", base_cfg.linear)) < 1e-8
    r0 = verify_residual((0.0, 0.0), "linear-additive", base_cfg.linear)
    assert r0 == pytest.approx((49.10, 49.10), abs=5e-3)


def test_weighted_confinement(base_cfg, wt_eq):
    w = base_cfg.weighted
    c = base_cfg.core
    assert 0 <= wt_eq.point.A <= w.kappa_1 / c.gamma_A
    assert 0 <= wt_eq.point.B <= w.kappa_2 / c.gamma_B


@pytest.mark.parametrize("form", ["linear-additive", "weighted"])
def test_basin_robustness(base_cfg, form):
    rng = np.random.default_rng(11)
    p = base_cfg.params_for(form)
    ref = solve_equilibrium(form, p).point
    for guess in rng.uniform(1, 500, size=(20, 2)):
        rep = solve_equilibrium(form, p, guess=tuple(guess))
        assert rep.converged
        assert np.allclose(rep.point, ref, atol=1e-6)


def test_linear_dominates_weighted(lin_eq, wt_eq):
    assert lin_eq.point.A > wt_eq.point.A and lin_eq.point.B > wt_eq.point.B


def test_nonconvergence_is_reported(base_cfg):
    rep = solve_equilibrium("linear-additive", base_cfg.linear, guess=(1000.0, -1000.0), max_iter=1)
    assert not rep.converged
    assert rep.message


def test_bad_arguments(base_cfg):
    with pytest.raises(ValueError):
        solve_equilibrium("linear-additive", base_cfg.linear, tol=0)
    with pytest.raises(ValueError):
        solve_equilibrium("linear-additive", base_cfg.linear, guess=(math.nan, 1))


def test_json(lin_eq):
    d = json.loads(lin_eq.to_json())
    assert d["point"]["A"] == lin_eq.point.A
    assert d["converged"] is True


def test_runtime(base_cfg):
    solve_equilibrium("linear-additive", base_cfg.linear)
    t0 = time.perf_counter()
    for _ in range(20):
        solve_equilibrium("linear-additive", base_cfg.linear)
    assert (time.perf_counter() - t0) / 20 < 1e-3
