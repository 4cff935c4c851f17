"""Least-squares fitting of model parameters to concentration time series.

The objective is the weighted sum of squared differences between simulated
and observed (A, B) at the sample times. Minimisation is Levenberg-Marquardt
on the logarithms of the free parameters, which keeps them positive, with
forward finite-difference sensitivities of the full simulation.
"""
from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .dde_sim import DEFAULT_DT, HistorySpec, integrate, read_csv
from .errors import DomainError, SimulationError, UnsupportedConfigurationError
from .model import DelayConfig, Formulation, Params, check_formulation

__all__ = ["TimeSeries", "FitResult", "fit", "simulate_observations"]


@dataclass(frozen=True)
class TimeSeries:
    times: np.ndarray
    observations: np.ndarray  # shape (N, 2): A, B in nM
    weights: np.ndarray | None = None  # per time point, positive

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        obs = np.asarray(self.observations, dtype=float)
        if obs.ndim != 2 or obs.shape[1] != 2:
            raise ValueError("observations must have shape (N, 2)")
        if len(t) != len(obs) or len(t) == 0:
            raise ValueError("times and observations must be non-empty and of equal length")
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        if t[0] < 0:
            raise ValueError("times must be non-negative")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "observations", obs)
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if w.shape != t.shape or np.any(w <= 0) or not np.all(np.isfinite(w)):
                raise ValueError("weights must be positive, finite and one per time point")
            object.__setattr__(self, "weights", w)

    @classmethod
    def from_csv(cls, path_or_text) -> "TimeSeries":
        t, states = read_csv(path_or_text)
        return cls(t, states)


@dataclass(frozen=True)
class FitResult:
    params: dict  # fitted values of the free parameters, by name
    sse: float
    iterations: int
    converged: bool
    initial_sse: float
    model: object = None  # full parameter object at the optimum
    message: str = ""

    def to_dict(self) -> dict:
        return {"params": dict(self.params), "sse": self.sse, "iterations": self.iterations,
                "converged": self.converged, "initial_sse": self.initial_sse,
                "message": self.message}


def _with_values(params: Params, values: dict):
    if hasattr(params, "core"):
        return params.replace(**values)
    return dataclasses.replace(params, **values)


def simulate_observations(formulation, params: Params, times, history: HistorySpec,
                          delays: DelayConfig | None = None, dt: float = DEFAULT_DT) -> np.ndarray:
    """Model prediction of (A, B) at ``times``, shape (len(times), 2)."""
    times = np.asarray(times, dtype=float)
    n = max(1, math.ceil(times[-1] / dt - 1e-9))
    traj = integrate(formulation, params, delays, history, t_end=n * dt, dt=dt)
    return traj.sample(times)


def fit(data: TimeSeries, formulation, free_params, fixed_params: Params, init_guess: dict | None = None,
        history: HistorySpec | None = None, delays: DelayConfig | None = None,
        dt: float = DEFAULT_DT, max_iter: int = 100, fd_step: float = 1e-6) -> FitResult:
    """Estimate ``free_params`` by minimising the weighted squared error.

    Parameters
    ----------
    data : TimeSeries
    formulation : Formulation or str
    free_params : sequence of str
        Names from ``fixed_params.as_dict()`` (for example ``lambda_A``).
    fixed_params : parameter object
        Supplies every value not being fitted.
    init_guess : dict, optional
        Starting values for the free parameters; all must be positive.
        Missing names start from ``fixed_params``.
    history : HistorySpec, optional
        Defaults to a constant history equal to the first observation.
    delays : DelayConfig, optional
        Only delay-free fitting is supported.
    dt : float
        Integration step (min).

    Notes
    -----
    Damping starts at 1e-3, is multiplied by 10 after a rejected step and
    divided by 10 after an accepted one. The step is scaled by diag(J'J), so
    multiplying all weights by a constant leaves the iterates unchanged. The
    run stops when the relative drop in sse is below 1e-10 or the gradient
    norm falls below 1e-8 times the initial sse.
    """
    form = check_formulation(formulation, fixed_params)
    names = list(free_params)
    if not names:
        raise ValueError("at least one free parameter is required")
    if len(set(names)) != len(names):
        raise ValueError("duplicate free parameter names")
    if delays is not None and not delays.is_delay_free:
        raise UnsupportedConfigurationError("fitting with nonzero delays is not supported")
    known = fixed_params.as_dict()
    unknown = [n for n in names if n not in known]
    if unknown:
        raise KeyError(f"unknown parameter(s): {unknown}")
    guess = {n: float((init_guess or {}).get(n, known[n])) for n in names}
    bad = [n for n, v in guess.items() if not (v > 0 and math.isfinite(v))]
    if bad:
        raise ValueError(f"initial values must be positive: {bad}")
    if history is None:
        history = HistorySpec.constant(*data.observations[0])

    obs = data.observations
    sw = np.ones(len(data.times)) if data.weights is None else np.sqrt(data.weights)
    sw = sw[:, None]

    def residuals(logx):
        values = dict(zip(names, np.exp(logx)))
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                p = _with_values(fixed_params, values)
                pred = simulate_observations(form, p, data.times, history, None, dt)
        except (SimulationError, DomainError, ValueError, OverflowError):
            return None
        r = (sw * (pred - obs)).ravel()
        return r if np.all(np.isfinite(r)) else None

    x = np.log([guess[n] for n in names])
    r = residuals(x)
    if r is None:
        raise SimulationError("simulation failed at the initial guess")
    sse = float(r @ r)
    initial_sse = sse
    damping = 1e-3
    converged = False
    message = ""
    it = 0
    while it < max_iter:
        J = np.empty((len(r), len(x)))
        for k in range(len(x)):
            xp = x.copy()
            xp[k] += fd_step
            rp = residuals(xp)
            if rp is None:
                xp[k] = x[k] - fd_step
                rp = residuals(xp)
                if rp is None:
                    raise SimulationError(f"sensitivity of {names[k]} could not be evaluated")
                J[:, k] = (r - rp) / fd_step
            else:
                J[:, k] = (rp - r) / fd_step
        g = J.T @ r
        if np.max(np.abs(g)) < 1e-8 * max(initial_sse, 1e-300):
            converged, message = True, "gradient below tolerance"
            break
        JTJ = J.T @ J
        scale = np.diag(JTJ).copy()
        scale[scale == 0] = 1.0
        accepted = False
        while damping < 1e16:
            try:
                step = np.linalg.solve(JTJ + damping * np.diag(scale), -g)
            except np.linalg.LinAlgError:
                damping *= 10.0
                continue
            r_new = residuals(x + step)
            sse_new = math.inf if r_new is None else float(r_new @ r_new)
            if sse_new < sse:
                accepted = True
                break
            damping *= 10.0
        it += 1
        if not accepted:
            converged, message = True, "no further decrease possible"
            break
        rel = (sse - sse_new) / sse
        x, r, sse = x + step, r_new, sse_new
        damping = max(damping / 10.0, 1e-12)
        if rel < 1e-10 or sse == 0.0:
            converged, message = True, "relative sse change below tolerance"
            break
    else:
        message = f"no convergence after {max_iter} iterations"

    fitted = dict(zip(names, (float(v) for v in np.exp(x))))
    return FitResult(fitted, sse, it, converged, initial_sse,
                     _with_values(fixed_params, fitted), message)
