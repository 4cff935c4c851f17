"""Newton-Raphson equilibria of the delay-free system, with residual certification."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DomainError
from .model import (
    DelayedState,
    Formulation,
    Params,
    State,
    check_formulation,
    jacobian,
    rhs,
)
from .sigmoid import Direction, HillParams, hill, logistic

__all__ = ["EquilibriumReport", "solve_equilibrium", "equilibrium_factors", "verify_residual"]


@dataclass
class EquilibriumReport:
    """Outcome of :func:`solve_equilibrium`.

    Non-convergence is reported through ``converged`` (and ``singular`` when a
    Newton step could not be formed) rather than raised, so parameter sweeps
    can carry on past failures.
    """

    formulation: str
    point: State
    residual_inf_norm: float
    iterations: int
    converged: bool
    tol: float
    factors: dict = field(default_factory=dict)
    singular: bool = False
    message: str = ""
    feasible: bool = True  # both concentrations non-negative

    def to_dict(self) -> dict:
        d = asdict(self)
        d["point"] = {"A": self.point.A, "B": self.point.B}
        return d

    def to_json(self, **kwargs) -> str:
        kwargs.setdefault("indent", 2)
        kwargs.setdefault("sort_keys", True)
        return json.dumps(self.to_dict(), **kwargs)


def _residual(form, params, x):
    try:
        r = rhs(form, params, x)
    except DomainError:
        return None
    return float(r[0]), float(r[1])


def _inf_norm(r):
    return math.inf if r is None else max(abs(r[0]), abs(r[1]))


def solve_equilibrium(formulation, params: Params, guess=None, tol: float = 1e-10,
                      max_iter: int = 100, max_halvings: int = 20) -> EquilibriumReport:
    """Solve rhs(s, s) = 0 by damped Newton iteration.

    Newton steps are halved until the residual norm decreases. If that run
    fails, or converges to a root with a negative concentration (the
    linear-additive model has such spurious roots when cross-activation is
    strong), the solve restarts from the same guess with pseudo-transient
    continuation: implicit-Euler steps of the flow whose pseudo-time step
    grows as the residual falls, ending in plain Newton steps. The flow keeps
    positive states positive and is attracted to stable equilibria, so this
    second stage converges from far-off guesses where bare Newton wanders.

    Parameters
    ----------
    formulation : Formulation or str
        ``hill``, ``linear-additive`` or ``weighted``; must match ``params``.
    params : CoreParams, LogisticModelParams or WeightedModelParams
    guess : pair of float, optional
        Starting point (nM). Defaults to the repression thresholds (A0, B0).
    tol : float
        Convergence threshold on the infinity norm of the residual (nM/min).
    max_iter : int
        Step budget for each of the two stages.
    max_halvings : int
        Backtracking budget per Newton step.

    Returns
    -------
    EquilibriumReport
        ``iterations`` counts the steps of both stages.
    """
    form = check_formulation(formulation, params)
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    core = params if form is Formulation.HILL else params.core
    x = (float(core.A0), float(core.B0)) if guess is None else (float(guess[0]), float(guess[1]))
    if not (math.isfinite(x[0]) and math.isfinite(x[1])):
        raise ValueError(f"guess must be finite, got {guess!r}")
    r = _residual(form, params, x)
    if r is None:
        raise DomainError(f"residual undefined at the initial guess {x}")

    pt, norm, its, singular, message = _newton(form, params, x, r, tol, max_iter, max_halvings)
    feasible = pt[0] >= 0 and pt[1] >= 0
    if not (norm < tol and (feasible or not (x[0] >= 0 and x[1] >= 0))):
        pt2, norm2, its2, singular2, message2 = _continuation(form, params, x, r, tol, max_iter)
        its += its2
        if norm2 < tol or not norm < tol:
            pt, norm, singular, message = pt2, norm2, singular2, message2

    converged = norm < tol
    if not converged and not message:
        message = f"no convergence after {its} iterations"
    point = State(*pt)
    return EquilibriumReport(
        formulation=form.value,
        point=point,
        residual_inf_norm=norm,
        iterations=its,
        converged=converged,
        tol=tol,
        factors=equilibrium_factors(point, form, params) if math.isfinite(norm) else {},
        singular=singular,
        message="" if converged else message,
        feasible=point.A >= 0 and point.B >= 0,
    )


def _solve2(J, r):
    a, b, c, d = (float(v) for v in J.ravel())
    det = a * d - b * c
    if det == 0.0 or not math.isfinite(det):
        return None
    return (-(d * r[0] - b * r[1]) / det, -(-c * r[0] + a * r[1]) / det)


def _newton(form, params, x, r, tol, max_iter, max_halvings):
    norm = _inf_norm(r)
    it = 0
    while norm >= tol and it < max_iter:
        step = _solve2(jacobian(form, params, x), r)
        if step is None:
            return x, norm, it, True, "singular Jacobian"
        t = 1.0
        for _ in range(max_halvings + 1):
            trial = (x[0] + t * step[0], x[1] + t * step[1])
            r_trial = _residual(form, params, trial)
            n_trial = _inf_norm(r_trial)
            if n_trial < norm:
                break
            t *= 0.5
        else:
            return x, norm, it, False, "line search failed to reduce the residual"
        x, r, norm = trial, r_trial, n_trial
        it += 1
    return x, norm, it, False, ""


def _continuation(form, params, x, r, tol, max_iter, dt0: float = 0.1):
    # pseudo-transient continuation: solve (I/dt - J) s = F, grow dt by
    # the residual ratio (switched evolution relaxation)
    norm = _inf_norm(r)
    dt = dt0
    positive = x[0] > 0 and x[1] > 0
    it = 0
    while norm >= tol and it < max_iter:
        J = jacobian(form, params, x)
        M = np.eye(2) / dt - J
        step = _solve2(M, (-r[0], -r[1]))
        if step is None:
            return x, norm, it, True, "singular continuation matrix"
        t = 1.0
        trial = (x[0] + step[0], x[1] + step[1])
        while positive and min(trial) <= 0 and t > 1e-12:
            t *= 0.5
            trial = (x[0] + t * step[0], x[1] + t * step[1])
        r_trial = _residual(form, params, trial)
        n_trial = _inf_norm(r_trial)
        if not math.isfinite(n_trial):
            return x, norm, it, False, "continuation left the domain"
        dt = dt * norm / n_trial if n_trial > 0 else math.inf
        x, r, norm = trial, r_trial, n_trial
        it += 1
    return x, norm, it, False, ""


def equilibrium_factors(point, formulation, params: Params) -> dict:
    """Named sigmoid factor values at ``point``.

    linear-additive: ``f_A_minus``, ``f_B_minus``; weighted: ``f1_plus``,
    ``f2_plus``, ``f3_minus``, ``f4_minus``; hill: ``h_A_minus``, ``h_B_minus``.
    """
    form = check_formulation(formulation, params)
    A, B = float(point[0]), float(point[1])
    if form is Formulation.LINEAR_ADDITIVE:
        return {"f_A_minus": logistic(A, params.repression_A),
                "f_B_minus": logistic(B, params.repression_B)}
    if form is Formulation.WEIGHTED:
        c = params.core
        return {
            "f1_plus": logistic(c.g_AB * B, params.activation_A),
            "f2_plus": logistic(c.g_BA * A, params.activation_B),
            "f3_minus": logistic(A, params.repression_A),
            "f4_minus": logistic(B, params.repression_B),
        }
    dec = Direction.DECREASING
    return {"h_A_minus": hill(A, HillParams(params.A0, params.n), dec),
            "h_B_minus": hill(B, HillParams(params.B0, params.n), dec)}


def verify_residual(point, formulation, params: Params):
    """Componentwise |rhs(point, point)| in nM/min. Pure re-evaluation."""
    form = check_formulation(formulation, params)
    s = State(float(point[0]), float(point[1]))
    dA, dB = rhs(form, params, s, DelayedState.undelayed(s))
    return abs(dA), abs(dB)
