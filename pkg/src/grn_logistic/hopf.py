"""Delay-induced Hopf bifurcation for symmetric self-repression delays.

With tau_1 = tau_2 = tau and no cross delays, the characteristic equation at
an equilibrium is

    F(mu, tau) = (mu + gamma_A + alpha_A e^{-mu tau}) (mu + gamma_B + alpha_B e^{-mu tau}) - beta = 0.

Purely imaginary roots mu = i*omega are located by solving the real and
imaginary parts of F jointly in the variables (omega, theta = omega*tau).
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from .errors import UnsupportedConfigurationError
from .model import DelayConfig, Formulation, Params, check_formulation, jacobian

__all__ = [
    "HopfCoefficients",
    "HopfPoint",
    "hopf_coefficients",
    "char_residual",
    "char_residual_jacobian",
    "characteristic_function",
    "find_hopf",
    "transversality",
    "numerical_transversality",
    "higher_order_taus",
    "replica",
    "check_symmetric_delays",
]

CERT_TOL = 1e-10


@dataclass(frozen=True)
class HopfCoefficients:
    """Linearisation constants entering the characteristic equation.

    alpha_A, alpha_B : delayed self-repression gains (1/min)
    beta : product of the two cross-activation Jacobian entries (1/min^2)
    gamma_A, gamma_B : degradation rates (1/min)
    """

    alpha_A: float
    alpha_B: float
    beta: float
    gamma_A: float
    gamma_B: float

    def __post_init__(self):
        if not (self.alpha_A > 0 and self.alpha_B > 0):
            raise ValueError("alpha_A and alpha_B must be positive")
        if self.beta < 0:
            raise ValueError("beta must be non-negative")

    def with_beta(self, beta: float) -> "HopfCoefficients":
        return replace(self, beta=beta)


@dataclass(frozen=True)
class HopfPoint:
    omega_c: float
    tau_c: float
    theta_c: float
    transversality: float
    period: float
    branch: str
    replica_index: int = 0
    residual_re: float = 0.0
    residual_im: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


def check_symmetric_delays(delays: DelayConfig) -> None:
    if delays.tau_1 != delays.tau_2 or delays.tau_12 != 0 or delays.tau_21 != 0:
        raise UnsupportedConfigurationError(
            "Hopf analysis covers only tau_1 = tau_2 with tau_12 = tau_21 = 0; "
            f"got {delays}"
        )


def hopf_coefficients(formulation, params: Params, eq_point) -> HopfCoefficients:
    """Gains of the characteristic equation at an equilibrium.

    Read off the delay-free Jacobian: its diagonal is -alpha - gamma (only the
    self-repression part is delayed) and beta = J12*J21. For linear-additive
    this is alpha_A = lambda_A (g_A + g_AB B) f_A(1-f_A), beta = g_AB g_BA f_A f_B;
    for weighted alpha_A = kappa_1 lambda_3 f1 f3(1-f3) and beta is the tiny
    product of the saturated activation slopes, kept rather than zeroed.
    """
    form = check_formulation(formulation, params)
    core = params if form is Formulation.HILL else params.core
    J = jacobian(form, params, eq_point)
    return HopfCoefficients(
        alpha_A=-float(J[0, 0] + core.gamma_A),
        alpha_B=-float(J[1, 1] + core.gamma_B),
        beta=float(J[0, 1] * J[1, 0]),
        gamma_A=core.gamma_A,
        gamma_B=core.gamma_B,
    )


def char_residual(omega, theta, c: HopfCoefficients):
    """Real and imaginary parts of F(i*omega) with omega*tau = theta.

    Works elementwise on arrays.
    """
    co, si = np.cos(theta), np.sin(theta)
    aA, aB, gA, gB = c.alpha_A, c.alpha_B, c.gamma_A, c.gamma_B
    re = (gA + aA * co) * (gB + aB * co) - (omega - aA * si) * (omega - aB * si) - c.beta
    im = omega * ((gA + gB) + (aA + aB) * co) - si * (aA * gB + aB * gA + 2.0 * aA * aB * co)
    return re, im


def char_residual_jacobian(omega, theta, c: HopfCoefficients):
    """Partial derivatives ((dRe/domega, dRe/dtheta), (dIm/domega, dIm/dtheta))."""
    co, si = np.cos(theta), np.sin(theta)
    aA, aB, gA, gB = c.alpha_A, c.alpha_B, c.gamma_A, c.gamma_B
    re_w = -(2.0 * omega - (aA + aB) * si)
    re_t = (-si * (aA * (gB + aB * co) + aB * (gA + aA * co))
            + co * (aA * (omega - aB * si) + aB * (omega - aA * si)))
    im_w = (gA + gB) + (aA + aB) * co
    im_t = -omega * (aA + aB) * si - co * (aA * gB + aB * gA) - 2.0 * aA * aB * (co * co - si * si)
    return (re_w, re_t), (im_w, im_t)


def characteristic_function(mu: complex, tau: float, c: HopfCoefficients) -> complex:
    e = cmath.exp(-mu * tau)
    return (mu + c.gamma_A + c.alpha_A * e) * (mu + c.gamma_B + c.alpha_B * e) - c.beta


def _char_partials(mu: complex, tau: float, c: HopfCoefficients):
    e = cmath.exp(-mu * tau)
    PA = mu + c.gamma_A + c.alpha_A * e
    PB = mu + c.gamma_B + c.alpha_B * e
    dF_dmu = (1.0 - tau * c.alpha_A * e) * PB + PA * (1.0 - tau * c.alpha_B * e)
    dF_dtau = -mu * e * (c.alpha_A * PB + c.alpha_B * PA)
    return PA * PB - c.beta, dF_dmu, dF_dtau


def _newton_grid(w, t, c, tol, max_iter):
    """Vectorised Newton on (omega, theta) from every seed; returns final arrays."""
    w = w.astype(float).copy()
    t = t.astype(float).copy()
    alive = np.ones(w.shape, dtype=bool)
    for _ in range(max_iter):
        re, im = char_residual(w, t, c)
        err = np.maximum(np.abs(re), np.abs(im))
        active = alive & (err >= tol)
        if not active.any():
            break
        (a, b), (cc, d) = char_residual_jacobian(w, t, c)
        det = a * d - b * cc
        bad = active & ~(np.abs(det) > 1e-14)
        if bad.any():
            # finite-difference fallback where the analytic Jacobian is singular
            h = 1e-7
            idx = np.flatnonzero(bad)
            re_w, im_w = char_residual(w[idx] + h, t[idx], c)
            re_t, im_t = char_residual(w[idx], t[idx] + h, c)
            a[idx] = (re_w - re[idx]) / h
            cc[idx] = (im_w - im[idx]) / h
            b[idx] = (re_t - re[idx]) / h
            d[idx] = (im_t - im[idx]) / h
            det[idx] = a[idx] * d[idx] - b[idx] * cc[idx]
            still = np.zeros_like(bad)
            still[idx] = ~(np.abs(det[idx]) > 1e-14)
            alive &= ~still
            active &= ~still
        with np.errstate(divide="ignore", invalid="ignore"):
            dw = -(d * re - b * im) / det
            dt = -(-cc * re + a * im) / det
        w = np.where(active, w + dw, w)
        t = np.where(active, t + dt, t)
        alive &= np.isfinite(w) & np.isfinite(t) & (np.abs(w) < 1e6)
    return w, t, alive


def _polish(w, t, c, iters=8):
    for _ in range(iters):
        re, im = char_residual(w, t, c)
        (a, b), (cc, d) = char_residual_jacobian(w, t, c)
        det = a * d - b * cc
        if det == 0:
            break
        w_new = w - (d * re - b * im) / det
        t_new = t - (-cc * re + a * im) / det
        if (w_new, t_new) == (w, t):
            break
        w, t = w_new, t_new
    return float(w), float(t)


def find_hopf(c: HopfCoefficients, omega_range=(0.05, 5.0), theta_range=(0.05, math.pi - 0.05),
              grid_density: int = 60, *, branch_interval=(0.0, math.pi), newton_tol: float = 1e-12,
              max_iter: int = 50, dedup_radius: float = 1e-6) -> list[HopfPoint]:
    """Locate all Hopf points on the fundamental branch.

    Newton iterations start from a ``grid_density`` x ``grid_density``
    uniform grid of seeds over ``omega_range`` x ``theta_range``. Converged
    roots are reduced modulo 2*pi in theta, kept if theta lies
    inside the open ``branch_interval``, polished, deduplicated and
    certified (|Re|, |Im| < 1e-10). Roots whose omega leaves
    ``omega_range`` are dropped. tau = theta/omega.

    Returns
    -------
    list of HopfPoint
        Sorted by tau; the first one is labelled ``primary`` and the rest
        ``secondary``. An empty list means no root in range.
    """
    if grid_density < 10:
        raise ValueError("grid_density must be at least 10 per axis")
    if not (0 < omega_range[0] < omega_range[1] and 0 < theta_range[0] < theta_range[1]):
        raise ValueError("ranges must be positive and increasing")
    ws = np.linspace(omega_range[0], omega_range[1], grid_density)
    ts = np.linspace(theta_range[0], theta_range[1], grid_density)
    W, T = np.meshgrid(ws, ts, indexing="ij")
    w, t, alive = _newton_grid(W.ravel(), T.ravel(), c, newton_tol, max_iter)

    re, im = char_residual(w, t, c)
    ok = alive & (np.maximum(np.abs(re), np.abs(im)) < newton_tol)
    ok &= (w >= omega_range[0]) & (w <= omega_range[1])
    t = np.mod(t, 2.0 * math.pi)
    ok &= (t > branch_interval[0]) & (t < branch_interval[1])

    roots = []
    for wi, ti in sorted(zip(w[ok], t[ok])):
        wi, ti = _polish(wi, ti, c)
        if any(math.hypot(wi - wr, ti - tr) < dedup_radius for wr, tr in roots):
            continue
        roots.append((wi, ti))

    points = []
    for wi, ti in roots:
        r_re, r_im = char_residual(wi, ti, c)
        if max(abs(r_re), abs(r_im)) >= CERT_TOL:
            continue
        tau = ti / wi
        h = HopfPoint(omega_c=wi, tau_c=tau, theta_c=ti, transversality=math.nan,
                      period=2.0 * math.pi / wi, branch="secondary",
                      residual_re=float(r_re), residual_im=float(r_im))
        points.append(replace(h, transversality=transversality(c, h)))
    points.sort(key=lambda h: (h.tau_c, h.omega_c))
    if points:
        points[0] = replace(points[0], branch="primary")
    return points


def transversality(c: HopfCoefficients, h: HopfPoint) -> float:
    """d Re(mu)/d tau at the crossing, by implicit differentiation of F (1/min^2).

    Positive values mean the root pair moves into the right half-plane as
    the delay increases through ``h.tau_c``.
    """
    mu = 1j * h.omega_c
    _, dF_dmu, dF_dtau = _char_partials(mu, h.tau_c, c)
    return float((-dF_dtau / dF_dmu).real)


def _track_root(c, mu0, tau, tol=1e-14, max_iter=50):
    mu = mu0
    for _ in range(max_iter):
        F, dF, _ = _char_partials(mu, tau, c)
        step = F / dF
        mu -= step
        if abs(step) < tol * max(1.0, abs(mu)):
            break
    return mu


def numerical_transversality(c: HopfCoefficients, h: HopfPoint, delta: float = 1e-3) -> float:
    """Central difference of Re(mu) for the root followed from i*omega_c to tau_c +/- delta."""
    mu0 = 1j * h.omega_c
    plus = _track_root(c, mu0, h.tau_c + delta)
    minus = _track_root(c, mu0, h.tau_c - delta)
    return (plus.real - minus.real) / (2.0 * delta)


def replica(h: HopfPoint, k: int) -> HopfPoint:
    """The same imaginary root recurring at tau_c + 2 k pi / omega_c."""
    if k < 0:
        raise ValueError("replica index must be non-negative")
    if k == 0:
        return h
    tau = h.tau_c + 2.0 * k * math.pi / h.omega_c
    return replace(h, tau_c=tau, theta_c=h.omega_c * tau, replica_index=h.replica_index + k)


def higher_order_taus(h: HopfPoint, k_max: int, c: HopfCoefficients | None = None) -> list[float]:
    """Delays tau_c + 2 k pi / omega_c for k = 1..k_max.

    When coefficients are given each replica is re-certified against the
    characteristic residual.
    """
    taus = []
    for k in range(1, k_max + 1):
        r = replica(h, k)
        if c is not None:
            re, im = char_residual(r.omega_c, r.theta_c, c)
            if max(abs(re), abs(im)) >= CERT_TOL:
                raise ArithmeticError(f"replica k={k} failed certification ({re:.3g}, {im:.3g})")
        taus.append(r.tau_c)
    return taus


def hopf_points_to_json(points, **kwargs) -> str:
    kwargs.setdefault("indent", 2)
    kwargs.setdefault("sort_keys", True)
    return json.dumps([p.to_dict() for p in points], **kwargs)
