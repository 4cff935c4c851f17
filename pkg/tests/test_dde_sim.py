import logging
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from grn_logistic.dde_sim import (
    HistorySpec,
    Trajectory,
    integrate,
    oscillation_metrics,
    read_csv,
)
from grn_logistic.equilibrium import solve_equilibrium
from grn_logistic.errors import DomainError, SimulationError
from grn_logistic.model import DelayConfig, DelayedState, rhs


@pytest.fixture(scope="module")
def comparison_runs(comparison_cfg):
    return {f: integrate(f, comparison_cfg.params_for(f), t_end=20, dt=0.01) for f in ("linear-additive", "weighted")}


@pytest.mark.parametrize("form,expected", [("linear-additive", 115.0), ("weighted", 107.0)])
def test_comparison_terminal_values(comparison_cfg, comparison_runs, form, expected):
    traj = comparison_runs[form]
    eq = solve_equilibrium(form, comparison_cfg.params_for(form))
    assert abs(traj.final_state.A - eq.point.A) < 2.0
    assert abs(traj.final_state.A - expected) < 2.0
    assert np.all(np.diff(traj.A) >= -1e-12)
    assert np.all(np.diff(traj.B) >= -1e-12)


def test_comparison_gap(comparison_runs):
    lin = comparison_runs["linear-additive"].final_state.A
    wt = comparison_runs["weighted"].final_state.A
    assert 0.04 < (lin - wt) / wt < 0.10


def test_grid_shape(comparison_runs):
    traj = comparison_runs["weighted"]
    assert len(traj.times) == 2001
    assert traj.times[-1] == pytest.approx(20.0)
    assert np.all(np.diff(traj.times) > 0)
    assert traj.metadata["dt"] == 0.01
    with pytest.raises(ValueError):
        traj.states[0, 0] = 1.0


@pytest.mark.parametrize("form", ["linear-additive", "weighted"])
def test_step_halving_order(base_cfg, form):
    p = base_cfg.params_for(form)
    ends = [np.array(integrate(form, p, t_end=4.0, dt=dt).final_state) for dt in (0.2, 0.1, 0.05)]
    e1 = np.linalg.norm(ends[0] - ends[1])
    e2 = np.linalg.norm(ends[1] - ends[2])
    assert math.log2(e1 / e2) >= 3.5


@pytest.mark.parametrize("tau,order", [(0.6, 3.8), (0.537, 2.2)])
def test_delayed_step_halving(base_cfg, tau, order):
    # Grid-aligned delays keep fourth order. Off-grid, the kink the constant
    # history leaves at t = tau falls inside a step and costs accuracy there.
    d = DelayConfig(tau, tau, tau, tau)
    ends = [np.array(integrate("linear-additive", base_cfg.linear, d, t_end=6.0, dt=dt).final_state)
            for dt in (0.04, 0.02, 0.01)]
    e1 = np.linalg.norm(ends[0] - ends[1])
    e2 = np.linalg.norm(ends[1] - ends[2])
    assert math.log2(e1 / e2) >= order


@pytest.mark.parametrize("form", ["linear-additive", "weighted"])
def test_converges_to_equilibrium(base_cfg, form):
    p = base_cfg.params_for(form)
    eq = solve_equilibrium(form, p).point
    rng = np.random.default_rng(3)
    for a, b in rng.uniform(1, 500, size=(10, 2)):
        traj = integrate(form, p, history=HistorySpec.constant(a, b), t_end=200, dt=0.02)
        assert math.dist(traj.final_state, eq) < 0.1
        assert traj.metadata["negative_excursions"] == 0


def test_ode_matches_zero_delay(base_cfg):
    a = integrate("weighted", base_cfg.weighted, None, t_end=5)
    b = integrate("weighted", base_cfg.weighted, DelayConfig(), t_end=5)
    assert np.array_equal(a.states, b.states)


def test_delay_uses_history(base_cfg):
    # before the delay elapses the delayed terms see only the history value
    d = DelayConfig(2.0, 2.0, 2.0, 2.0)
    h = HistorySpec.constant(30.0, 40.0)
    traj = integrate("linear-additive", base_cfg.linear, d, h, t_end=1.0, dt=0.01)
    for i in (0, 50, 100):
        s = traj.states[i]
        expect = rhs("linear-additive", base_cfg.linear, tuple(s), DelayedState(30.0, 40.0, 40.0, 30.0))
        assert traj.derivatives[i] == pytest.approx(expect, rel=1e-12)


def test_negative_history_logistic_vs_hill(base_cfg):
    h = HistorySpec.constant(-5.0, 10.0, allow_negative=True)
    d = DelayConfig.symmetric(1.0)
    for form in ("linear-additive", "weighted"):
        traj = integrate(form, base_cfg.params_for(form), d, h, t_end=5.0)
        assert np.all(np.isfinite(traj.states))
    with pytest.raises(DomainError):
        integrate("hill", base_cfg.core, d, h, t_end=5.0)


def test_negative_state_is_logged(base_cfg, caplog):
    h = HistorySpec.constant(-5.0, -5.0, allow_negative=True)
    with caplog.at_level(logging.WARNING, logger="grn_logistic.dde_sim"):
        traj = integrate("weighted", base_cfg.weighted, history=h, t_end=0.5)
    assert traj.metadata["negative_excursions"] > 0
    assert traj.states[0, 0] == -5.0  # not clamped
    assert any("negative" in r.message for r in caplog.records)


def test_history_validation():
    with pytest.raises(ValueError):
        HistorySpec.constant(-1.0, 0.0)
    with pytest.raises(ValueError):
        HistorySpec.constant(float("nan"), 0.0)
    with pytest.raises(ValueError):
        HistorySpec((1.0, 1.0), kind="linear")


def test_configuration_errors(base_cfg):
    p = base_cfg.linear
    with pytest.raises(ValueError):
        integrate("linear-additive", p, DelayConfig.symmetric(0.005), t_end=1, dt=0.01)
    with pytest.raises(ValueError):
        integrate("linear-additive", p, t_end=1, dt=0.0)
    with pytest.raises(ValueError):
        integrate("linear-additive", p, t_end=-1)


def test_non_finite_state_aborts(base_cfg):
    # RK4 is unstable for gamma*dt = 5, so the state overflows
    with pytest.warns(UserWarning):
        p = base_cfg.linear.replace(gamma_A=5.0)
    with pytest.raises(SimulationError) as err:
        integrate("linear-additive", p, t_end=2000.0, dt=1.0)
    assert err.value.time is not None and 0 < err.value.time <= 2000.0


def test_sinusoid_metrics():
    t = np.arange(0, 100.0001, 0.01)
    a = 100 + 10 * np.sin(2 * np.pi * t / 5)
    traj = Trajectory(t, np.column_stack([a, a]), np.zeros((len(t), 2)))
    m = oscillation_metrics(traj, t_discard=10)
    assert m.amplitude == pytest.approx(10, rel=0.01)
    assert m.period == pytest.approx(5, rel=0.01)


def test_constant_metrics():
    t = np.arange(0, 10.001, 0.01)
    traj = Trajectory(t, np.full((len(t), 2), 7.0), np.zeros((len(t), 2)))
    m = oscillation_metrics(traj, t_discard=1)
    assert m.amplitude == 0 and m.period is None
    with pytest.raises(ValueError):
        oscillation_metrics(traj, t_discard=20)


@given(st.floats(2.0, 20.0), st.floats(1.0, 50.0), st.floats(0, 2 * np.pi))
def test_sinusoid_metrics_property(period, amp, phase):
    t = np.arange(0, 10 * period + 1e-9, 0.01)
    a = 50 + amp * np.sin(2 * np.pi * t / period + phase)
    traj = Trajectory(t, np.column_stack([a, a]), np.zeros((len(t), 2)))
    m = oscillation_metrics(traj, t_discard=period)
    assert m.amplitude == pytest.approx(amp, rel=1e-3)
    assert m.period == pytest.approx(period, rel=1e-3)


def test_sample_matches_grid_and_interpolates(base_cfg):
    traj = integrate("weighted", base_cfg.weighted, t_end=2.0, dt=0.01)
    assert np.allclose(traj.sample(traj.times[:50]), traj.states[:50], rtol=0, atol=1e-12)
    fine = integrate("weighted", base_cfg.weighted, t_end=2.0, dt=0.005)
    mid = traj.times[:-1] + 0.005
    assert np.max(np.abs(traj.sample(mid) - fine.sample(mid))) < 1e-6
    with pytest.raises(ValueError):
        traj.sample([3.0])


def test_csv_round_trip(tmp_path, comparison_runs):
    traj = comparison_runs["linear-additive"]
    text = traj.to_csv()
    lines = text.splitlines()
    assert lines[0] == "t,A,B"
    assert len(lines) == 2002
    path = tmp_path / "traj.csv"
    traj.to_csv(path)
    t, s = read_csv(path)
    assert np.allclose(t, traj.times, rtol=1e-8)
    assert np.allclose(s, traj.states, rtol=1e-8)
    with pytest.raises(ValueError):
        read_csv("x,y\n1,2\n")
