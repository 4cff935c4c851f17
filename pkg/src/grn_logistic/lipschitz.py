"""Closed-form global bounds on the vector field's first and second derivatives.

L_F bounds the infinity norm of the delay-free Jacobian over a concentration
box [0, A_max] x [0, B_max]; L_DF bounds every second partial derivative.
Both follow from |f(1-f)| <= 1/4 and |f(1-f)(1-2f)| <= sqrt(3)/18.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

from .model import Formulation, LogisticModelParams, Params, WeightedModelParams, check_formulation

__all__ = [
    "DomainBox",
    "LipschitzReport",
    "rho_constant",
    "lipschitz_linear_additive",
    "lipschitz_weighted",
    "lipschitz",
    "comparison_table",
]


@dataclass(frozen=True)
class DomainBox:
    A_max: float = 500.0
    B_max: float = 500.0

    def __post_init__(self):
        if not (self.A_max > 0 and self.B_max > 0):
            raise ValueError(f"box bounds must be positive, got ({self.A_max}, {self.B_max})")


@dataclass(frozen=True)
class LipschitzReport:
    formulation: str
    L_F: float
    L_DF: float
    entry_bounds: dict   # |J11|, |J12|, |J21|, |J22| bounds, 1/min
    hessian_bounds: dict  # second-partial bounds, 1/(nM min)
    rho: float
    box: DomainBox
    box_dependent: bool

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kwargs) -> str:
        kwargs.setdefault("indent", 2)
        kwargs.setdefault("sort_keys", True)
        return json.dumps(self.to_dict(), **kwargs)


def rho_constant() -> float:
    """max over f in (0,1) of |f(1-f)(1-2f)|, attained at f = (1 - 1/sqrt(3))/2."""
    return math.sqrt(3.0) / 18.0


def _report(form, entry, hess, box, box_dependent):
    L_F = max(entry["J11"] + entry["J12"], entry["J21"] + entry["J22"])
    return LipschitzReport(form.value, L_F, max(hess.values()), entry, hess,
                           rho_constant(), box, box_dependent)


def lipschitz_linear_additive(p: LogisticModelParams, box: DomainBox = DomainBox()) -> LipschitzReport:
    """Bounds for linear activation with logistic self-repression.

    The production prefactor g + g_cross*x is unbounded, so the bounds grow
    with the box.
    """
    c = p.core
    rho = rho_constant()
    pref_A = c.g_A + c.g_AB * box.B_max
    pref_B = c.g_B + c.g_BA * box.A_max
    entry = {
        "J11": pref_A * p.lambda_A / 4.0 + c.gamma_A,
        "J12": c.g_AB,
        "J21": c.g_BA,
        "J22": pref_B * p.lambda_B / 4.0 + c.gamma_B,
    }
    hess = {
        "d2A_dA2": pref_A * p.lambda_A**2 * rho,
        "d2A_dAdB": c.g_AB * p.lambda_A / 4.0,
        "d2B_dB2": pref_B * p.lambda_B**2 * rho,
        "d2B_dAdB": c.g_BA * p.lambda_B / 4.0,
    }
    return _report(Formulation.LINEAR_ADDITIVE, entry, hess, box, True)


def lipschitz_weighted(p: WeightedModelParams, box: DomainBox = DomainBox()) -> LipschitzReport:
    """Bounds for the product-of-logistics model.

    Production is confined to (0, kappa) whatever the state, so the result
    does not depend on ``box``; it is accepted for a uniform interface.
    The cross partial d2A/dAdB = kappa_1 (lambda_1 g_AB f1') (lambda_3 f3')
    is bounded by kappa_1 lambda_1 g_AB lambda_3 / 16.
    """
    c = p.core
    rho = rho_constant()
    s1 = p.lambda_1 * c.g_AB  # steepness of f1 with respect to B
    s2 = p.lambda_2 * c.g_BA
    entry = {
        "J11": p.kappa_1 * p.lambda_3 / 4.0 + c.gamma_A,
        "J12": p.kappa_1 * s1 / 4.0,
        "J21": p.kappa_2 * s2 / 4.0,
        "J22": p.kappa_2 * p.lambda_4 / 4.0 + c.gamma_B,
    }
    hess = {
        "d2A_dB2": p.kappa_1 * s1**2 * rho,
        "d2A_dA2": p.kappa_1 * p.lambda_3**2 * rho,
        "d2A_dAdB": p.kappa_1 * s1 * p.lambda_3 / 16.0,
        "d2B_dA2": p.kappa_2 * s2**2 * rho,
        "d2B_dB2": p.kappa_2 * p.lambda_4**2 * rho,
        "d2B_dAdB": p.kappa_2 * s2 * p.lambda_4 / 16.0,
    }
    return _report(Formulation.WEIGHTED, entry, hess, box, False)


def lipschitz(formulation, params: Params, box: DomainBox = DomainBox()) -> LipschitzReport:
    form = check_formulation(formulation, params)
    if form is Formulation.HILL:
        # d2h/dx2 ~ x^(n-2) diverges at the origin for n < 2: no finite L_DF
        raise ValueError("Lipschitz bounds are provided for the logistic formulations only")
    if form is Formulation.LINEAR_ADDITIVE:
        return lipschitz_linear_additive(params, box)
    return lipschitz_weighted(params, box)


def comparison_table(linear: LipschitzReport, weighted: LipschitzReport) -> dict:
    """Side-by-side L_F, L_DF and L_DF/L_F with weighted/linear ratios."""
    rows = {}
    for key, f in (("L_F", lambda r: r.L_F), ("L_DF", lambda r: r.L_DF),
                   ("L_DF/L_F", lambda r: r.L_DF / r.L_F)):
        lin, wt = f(linear), f(weighted)
        rows[key] = {"linear-additive": lin, "weighted": wt, "ratio": wt / lin}
    return rows
