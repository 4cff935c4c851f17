"""Delay-free local stability of 2x2 Jacobians (trace/determinant test)."""
from __future__ import annotations

import cmath
import json
from dataclasses import dataclass

import numpy as np

from .model import Formulation, Params, check_formulation
from .sigmoid import logistic, logistic_deriv

__all__ = ["StabilityReport", "TraceCertificate", "classify", "trace_negativity_certificate"]

MARGINAL_EPS = 1e-12


@dataclass(frozen=True)
class StabilityReport:
    trace: float
    determinant: float
    discriminant: float
    eigenvalues: tuple  # two complex numbers, larger real part first (+Im first for a pair)
    classification: str

    def to_dict(self) -> dict:
        return {
            "trace": self.trace,
            "determinant": self.determinant,
            "discriminant": self.discriminant,
            "eigenvalues": [[mu.real, mu.imag] for mu in self.eigenvalues],
            "classification": self.classification,
        }

    def to_json(self, **kwargs) -> str:
        kwargs.setdefault("indent", 2)
        kwargs.setdefault("sort_keys", True)
        return json.dumps(self.to_dict(), **kwargs)


def _quadratic_roots(tr, det):
    # roots of mu^2 - tr*mu + det, avoiding cancellation in the smaller root
    disc = tr * tr - 4.0 * det
    if disc < 0:
        re, im = tr / 2.0, (-disc) ** 0.5 / 2.0
        return complex(re, im), complex(re, -im)
    sq = cmath.sqrt(disc)
    q = (tr + sq) / 2.0 if tr >= 0 else (tr - sq) / 2.0
    if q == 0:
        return complex(0.0), complex(0.0)
    r1, r2 = q, det / q
    if (r1.real, r1.imag) < (r2.real, r2.imag):
        r1, r2 = r2, r1
    return complex(r1), complex(r2)


def classify(J) -> StabilityReport:
    """Classify the equilibrium with Jacobian ``J``.

    Labels: ``stable-node`` (tr<0, det>0, real roots), ``stable-focus``
    (tr<0, det>0, complex roots), ``saddle`` (det<0), ``unstable``
    (tr>0, det>0) and ``marginal`` when |tr| or |det| is below 1e-12.
    """
    J = np.asarray(J, dtype=float)
    if J.shape != (2, 2) or not np.all(np.isfinite(J)):
        raise ValueError("J must be a finite 2x2 matrix")
    tr = float(J[0, 0] + J[1, 1])
    det = float(J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0])
    disc = tr * tr - 4.0 * det
    eig = _quadratic_roots(tr, det)
    if abs(det) < MARGINAL_EPS or abs(tr) < MARGINAL_EPS:
        label = "marginal"
    elif det < 0:
        label = "saddle"
    elif tr > 0:
        label = "unstable"
    else:
        label = "stable-node" if disc >= 0 else "stable-focus"
    return StabilityReport(tr, det, disc, eig, label)


@dataclass(frozen=True)
class TraceCertificate:
    terms: dict
    total: float
    all_negative: bool


def trace_negativity_certificate(formulation, params: Params, point) -> TraceCertificate:
    """Split tr(J) at ``point`` into its sign-definite pieces.

    linear-additive: -lambda_A (g_A + g_AB B) f_A(1-f_A), the B analogue and
    -(gamma_A + gamma_B). weighted: -kappa_1 lambda_3 f1 f3(1-f3), the B
    analogue and -(gamma_A + gamma_B). Every term is negative for positive
    parameters, which rules out a delay-free Hopf bifurcation.
    """
    form = check_formulation(formulation, params)
    if form is Formulation.HILL:
        raise ValueError("trace certificate is defined for the logistic formulations only")
    A, B = float(point[0]), float(point[1])
    c = params.core
    if form is Formulation.LINEAR_ADDITIVE:
        terms = {
            "self_repression_A": (c.g_A + c.g_AB * B) * logistic_deriv(A, params.repression_A),
            "self_repression_B": (c.g_B + c.g_BA * A) * logistic_deriv(B, params.repression_B),
            "degradation": -(c.gamma_A + c.gamma_B),
        }
    else:
        f1 = logistic(c.g_AB * B, params.activation_A)
        f2 = logistic(c.g_BA * A, params.activation_B)
        terms = {
            "self_repression_A": params.kappa_1 * f1 * logistic_deriv(A, params.repression_A),
            "self_repression_B": params.kappa_2 * f2 * logistic_deriv(B, params.repression_B),
            "degradation": -(c.gamma_A + c.gamma_B),
        }
    total = sum(terms.values())
    return TraceCertificate(terms, total, all(v < 0 for v in terms.values()))
