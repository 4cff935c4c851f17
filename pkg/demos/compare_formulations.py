"""Side-by-side numbers for the linear-additive and weighted logistic models.

Run: python3 demos/compare_formulations.py
"""
from grn_logistic import run_full_analysis

rep = run_full_analysis()
print(f"{'':24s}{'linear-additive':>18s}{'weighted':>14s}")
rows = [
    ("A* (nM)", lambda b: b["equilibrium"]["point"]["A"]),
    ("B* (nM)", lambda b: b["equilibrium"]["point"]["B"]),
    ("trace (1/min)", lambda b: b["stability"]["trace"]),
    ("omega_c (rad/min)", lambda b: b["hopf_primary"]["omega_c"]),
    ("tau_c (min)", lambda b: b["hopf_primary"]["tau_c"]),
    ("period (min)", lambda b: b["hopf_primary"]["period"]),
    ("L_F (1/min)", lambda b: b["lipschitz"]["L_F"]),
    ("L_DF (1/(nM min))", lambda b: b["lipschitz"]["L_DF"]),
]
lin, wt = rep.formulations["linear-additive"], rep.formulations["weighted"]
for label, get in rows:
    print(f"{label:24s}{get(lin):18.4f}{get(wt):14.4f}")

r = rep.ratios
print()
print(f"linear-additive A* is {r['equilibrium_shift_pct']:.1f}% above weighted")
print(f"weighted tau_c is {100 * (r['tau_c_ratio'] - 1):.1f}% longer")
print(f"L_F ratio {r['L_F_ratio']:.3f}, L_DF ratio {r['L_DF_ratio']:.3f}")
