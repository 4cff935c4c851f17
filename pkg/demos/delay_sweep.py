"""Sweep the symmetric self-delay through tau_c and watch the cycle appear.

The linear analysis predicts the period only at the threshold itself; past
it the cycle slows down as it grows. Just below tau_c the decay is so slow
that a small oscillation is still visible in the measurement window.

Run: python3 demos/delay_sweep.py
"""
from grn_logistic import CoreParams, DelayConfig, ModelConfig, solve_equilibrium
from grn_logistic.dde_sim import HistorySpec, integrate, oscillation_metrics
from grn_logistic.hopf import find_hopf, hopf_coefficients

cfg = ModelConfig.from_core(CoreParams())
p = cfg.linear
eq = solve_equilibrium("linear-additive", p)
crit = find_hopf(hopf_coefficients("linear-additive", p, eq.point))[0]
print(f"tau_c = {crit.tau_c:.4f} min, linear period 2pi/omega_c = {crit.period:.4f} min\n")
print(f"{'tau/tau_c':>10s}{'amplitude (nM)':>16s}{'period (min)':>14s}")
for f in (0.8, 0.9, 0.99, 1.01, 1.05, 1.1, 1.2):
    traj = integrate("linear-additive", p, DelayConfig.symmetric(f * crit.tau_c),
                     HistorySpec.constant(10, 10), t_end=400, dt=0.01)
    m = oscillation_metrics(traj, t_discard=300)
    period = f"{m.period:14.4f}" if m.period else f"{'-':>14s}"
    print(f"{f:10.2f}{m.amplitude:16.4g}{period}")
