"""Recover the repression steepness from a noisy simulated time course.

Run: python3 demos/fit_recovery.py
"""
import numpy as np

from grn_logistic import CoreParams, ModelConfig
from grn_logistic.dde_sim import HistorySpec, integrate
from grn_logistic.param_fit import TimeSeries, fit

cfg = ModelConfig.from_core(CoreParams())
hist = HistorySpec.constant(10, 10)
truth = integrate("linear-additive", cfg.linear, history=hist, t_end=50, dt=0.05)
idx = np.linspace(0, len(truth.times) - 1, 100).round().astype(int)
rng = np.random.default_rng(0)
obs = truth.states[idx] * (1 + 0.01 * rng.standard_normal((len(idx), 2)))

res = fit(TimeSeries(truth.times[idx], obs), "linear-additive", ["lambda_A", "lambda_B"],
          cfg.linear, {"lambda_A": 0.02, "lambda_B": 0.02}, history=hist, dt=0.05)
print(f"true lambda = 0.04 1/nM, start 0.02, {res.iterations} iterations ({res.message})")
for name, value in res.params.items():
    print(f"  {name} = {value:.5f}  ({100 * (value / 0.04 - 1):+.2f}%)")
print(f"sse {res.initial_sse:.4g} -> {res.sse:.4g} nM^2")
