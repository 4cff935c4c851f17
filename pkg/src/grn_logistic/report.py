"""One-call comparison of the two logistic formulations for a core parameter set."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .equilibrium import solve_equilibrium
from .hopf import find_hopf, higher_order_taus, hopf_coefficients, numerical_transversality
from .lipschitz import DomainBox, comparison_table, lipschitz
from .model import CoreParams, Formulation, ModelConfig, jacobian
from .stability import classify, trace_negativity_certificate

__all__ = ["SCHEMA_VERSION", "ComparisonReport", "analyze_formulation", "run_full_analysis"]

SCHEMA_VERSION = "1.0"
LOGISTIC = (Formulation.LINEAR_ADDITIVE, Formulation.WEIGHTED)


@dataclass
class ComparisonReport:
    core: dict
    formulations: dict  # formulation name -> analysis block
    ratios: dict
    converged: bool
    schema_version: str = SCHEMA_VERSION
    messages: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "core": self.core,
            "formulations": self.formulations,
            "ratios": self.ratios,
            "converged": self.converged,
            "messages": list(self.messages),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def analyze_formulation(form: Formulation, params, k_max: int = 3, box: DomainBox = DomainBox()):
    """Equilibrium, stability, Hopf points and Lipschitz bounds for one formulation.

    Returns ``(block, lipschitz_report, messages)``; the block is JSON-ready.
    """
    messages = []
    eq = solve_equilibrium(form, params)
    block = {"matched_params": params.as_dict(), "equilibrium": eq.to_dict()}
    if not eq.converged:
        messages.append(f"{form.value}: equilibrium did not converge ({eq.message})")
        return block, None, messages

    stab = classify(jacobian(form, params, eq.point))
    block["stability"] = stab.to_dict()
    cert = trace_negativity_certificate(form, params, eq.point)
    block["trace_certificate"] = {"terms": cert.terms, "total": cert.total,
                                  "all_negative": cert.all_negative}

    c = hopf_coefficients(form, params, eq.point)
    block["hopf_coefficients"] = {"alpha_A": c.alpha_A, "alpha_B": c.alpha_B, "beta": c.beta}
    points = find_hopf(c)
    if points:
        primary = points[0]
        block["hopf_primary"] = dict(primary.to_dict(),
                                     numerical_transversality=numerical_transversality(c, primary))
        block["hopf_secondary"] = [p.to_dict() for p in points[1:]]
        block["hopf_higher"] = [{"k": k, "tau": tau}
                                for k, tau in enumerate(higher_order_taus(primary, k_max, c), start=1)]
    else:
        messages.append(f"{form.value}: no Hopf point found on the fundamental branch")
        block["hopf_primary"] = None
        block["hopf_secondary"] = []
        block["hopf_higher"] = []

    lip = lipschitz(form, params, box)
    block["lipschitz"] = lip.to_dict()
    return block, lip, messages


def run_full_analysis(core: CoreParams | None = None, k_max: int = 3,
                      box: DomainBox = DomainBox()) -> ComparisonReport:
    """Match both logistic formulations to ``core`` and analyse each.

    Ratios compare weighted against linear-additive: ``equilibrium_shift_pct``
    is how much higher the linear-additive A* is, in percent of the weighted
    value; ``tau_c_ratio`` and ``L_F_ratio`` are weighted/linear.
    ``converged`` is true only if every equilibrium solve converged and both
    formulations produced a primary Hopf point.
    """
    core = core or CoreParams()
    cfg = ModelConfig.from_core(core)
    blocks, lips, messages = {}, {}, []
    for form in LOGISTIC:
        block, lip, msgs = analyze_formulation(form, cfg.params_for(form), k_max, box)
        blocks[form.value] = block
        lips[form.value] = lip
        messages.extend(msgs)
    converged = not messages

    ratios = {}
    lin, wt = blocks["linear-additive"], blocks["weighted"]
    if lin["equilibrium"]["converged"] and wt["equilibrium"]["converged"]:
        a_lin = lin["equilibrium"]["point"]["A"]
        a_wt = wt["equilibrium"]["point"]["A"]
        ratios["equilibrium_shift_pct"] = 100.0 * (a_lin - a_wt) / a_wt
    if lin.get("hopf_primary") and wt.get("hopf_primary"):
        ratios["tau_c_ratio"] = wt["hopf_primary"]["tau_c"] / lin["hopf_primary"]["tau_c"]
    if all(lips.values()):
        table = comparison_table(lips["linear-additive"], lips["weighted"])
        ratios["L_F_ratio"] = table["L_F"]["ratio"]
        ratios["L_DF_ratio"] = table["L_DF"]["ratio"]
        ratios["lipschitz_table"] = table
    return ComparisonReport(core.as_dict(), blocks, ratios, converged, messages=messages)
