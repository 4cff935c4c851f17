"""Logistic and Hill primitives and the closed-form Hill -> logistic matching rules.

All evaluators accept Python floats or numpy arrays. Scalar inputs take a
``math`` fast path because the integrators call them in tight loops.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "Direction",
    "SigmoidParams",
    "HillParams",
    "WeightedMatchResult",
    "logistic",
    "logistic_deriv",
    "logistic_second_deriv",
    "logistic_inverse",
    "hill",
    "hill_deriv",
    "match_steepness",
    "match_weighted_basal_slope",
    "match_weighted_custom_threshold",
    "rescale_weight",
]


class Direction(str, enum.Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"


@dataclass(frozen=True)
class SigmoidParams:
    """Threshold and steepness of a single logistic factor.

    Parameters
    ----------
    theta : float
        Inflection point, in ``units``.
    lam : float
        Steepness, in the reciprocal of ``units``. Must be positive.
    direction : Direction
        ``increasing`` models activation, ``decreasing`` repression.
    units : str
        Unit label of ``theta``. Only compared when sigmoids are assembled
        into a model, never used in arithmetic.
    """

    theta: float
    lam: float
    direction: Direction = Direction.INCREASING
    units: str = "nM"

    def __post_init__(self):
        object.__setattr__(self, "direction", Direction(self.direction))
        if not math.isfinite(self.theta):
            raise DomainError(f"theta must be finite, got {self.theta!r}")
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise DomainError(f"lam must be positive and finite, got {self.lam!r}")

    @property
    def sign(self) -> float:
        return 1.0 if self.direction is Direction.INCREASING else -1.0


@dataclass(frozen=True)
class HillParams:
    theta: float
    n: float

    def __post_init__(self):
        if not self.theta > 0:
            raise DomainError(f"Hill threshold must be positive, got {self.theta!r}")
        if not self.n > 0:
            raise DomainError(f"Hill coefficient must be positive, got {self.n!r}")


@dataclass(frozen=True)
class WeightedMatchResult:
    """Maximal rate, threshold and steepness of a weighted activation sigmoid.

    ``theta`` is in nM/min and ``lam`` in (nM/min)^-1 because the sigmoid
    acts on the weighted signal g*x.
    """

    kappa: float
    theta: float
    lam: float

    def basal_rate(self) -> float:
        """Production at zero activator, kappa / (1 + exp(lam*theta))."""
        return self.kappa / (1.0 + math.exp(self.lam * self.theta))

    def as_sigmoid(self) -> SigmoidParams:
        return SigmoidParams(self.theta, self.lam, Direction.INCREASING, units="nM/min")


def _sigma_scalar(s: float) -> float:
    # branch on sign so exp() never sees a large positive argument
    if s >= 0.0:
        return 1.0 / (1.0 + math.exp(-s))
    e = math.exp(s)
    return e / (1.0 + e)


def _sigma(s):
    """Standard logistic 1/(1+exp(-s)), overflow-free for any finite s."""
    if np.ndim(s) == 0:
        return _sigma_scalar(float(s))
    s = np.asarray(s, dtype=float)
    e = np.exp(-np.abs(s))
    return np.where(s >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def logistic(x, p: SigmoidParams):
    """Evaluate the logistic factor.

    Increasing: 1/(1+exp(-lam(x-theta))). Decreasing: 1/(1+exp(lam(x-theta))).
    Total on the reals, output strictly inside (0, 1) up to floating-point
    saturation.
    """
    return _sigma(p.sign * p.lam * (x - p.theta))


def logistic_deriv(x, p: SigmoidParams):
    """Derivative with respect to x: +/- lam * f * (1 - f).

    ``f * (1 - f)`` is evaluated as sigma(s)*sigma(-s) so the product keeps
    full relative precision in both tails.
    """
    s = p.sign * p.lam * (x - p.theta)
    return p.sign * p.lam * _sigma(s) * _sigma(-s)


def logistic_second_deriv(x, p: SigmoidParams):
    """Second derivative, lam^2 * f(1-f)(1-2f) (same formula for both directions)."""
    s = p.sign * p.lam * (x - p.theta)
    f = _sigma(s)
    g = _sigma(-s)
    return p.lam * p.lam * f * g * (g - f)


def logistic_inverse(y, p: SigmoidParams):
    """Closed-form logit inverse of :func:`logistic`.

    Parameters
    ----------
    y : float or array_like
        Target value(s) in (0, 1). Values that rounded onto the closed
        boundary (``1 - 1e-18`` is stored as exactly 1.0) are moved to the
        nearest interior double so the result stays finite.

    Returns
    -------
    float or ndarray
        x such that ``logistic(x, p) == y``.

    Raises
    ------
    DomainError
        If any y is NaN or lies outside [0, 1].
    """
    arr = np.asarray(y, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError(f"logistic_inverse requires 0 < y < 1, got {y!r}")
    arr = np.clip(arr, np.nextafter(0.0, 1.0), np.nextafter(1.0, 0.0))
    logit = np.log(arr) - np.log1p(-arr)
    x = p.theta + p.sign * logit / p.lam
    return float(x) if np.ndim(y) == 0 else x


def hill(x, p: HillParams, direction=Direction.INCREASING, *, clamp_negative: bool = False):
    """Hill activation x^n/(x^n+theta^n) or repression theta^n/(x^n+theta^n).

    Negative inputs raise :class:`DomainError`; for non-integer n the power
    would be complex. ``clamp_negative=True`` maps x < 0 to 0 instead, which
    reproduces what legacy codes silently do.
    """
    direction = Direction(direction)
    scalar = np.ndim(x) == 0
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        if not clamp_negative:
            raise DomainError(
                f"Hill function is undefined for negative input (min {arr.min()!r}); "
                "pass clamp_negative=True to replicate legacy clamping"
            )
        arr = np.maximum(arr, 0.0)
    if scalar:
        r = (float(arr) / p.theta) ** p.n
        rep = 1.0 / (1.0 + r)
        return rep if direction is Direction.DECREASING else r / (1.0 + r)
    r = (arr / p.theta) ** p.n
    rep = 1.0 / (1.0 + r)
    return rep if direction is Direction.DECREASING else r / (1.0 + r)


def hill_deriv(x, p: HillParams, direction=Direction.INCREASING, *, clamp_negative: bool = False):
    """d/dx of :func:`hill`: +/- n theta^n x^(n-1) / (x^n + theta^n)^2."""
    direction = Direction(direction)
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        if not clamp_negative:
            raise DomainError("Hill derivative is undefined for negative input")
        arr = np.maximum(arr, 0.0)
    u = arr / p.theta
    with np.errstate(divide="ignore", invalid="ignore"):
        d = (p.n / p.theta) * u ** (p.n - 1) / (1.0 + u**p.n) ** 2
    d = d if direction is Direction.INCREASING else -d
    return float(d) if np.ndim(x) == 0 else d


def match_steepness(h: HillParams) -> float:
    """Logistic steepness whose slope at theta equals the Hill slope there.

    Both curves pass through 1/2 at x = theta with slopes n/(4 theta) and
    lam/4, hence lam = n/theta. The rule is stated for the repression term;
    it applies unchanged to activation since both directions share |slope|.
    """
    return h.n / h.theta


def match_weighted_basal_slope(g_basal: float) -> WeightedMatchResult:
    """Weighted-activation parameters from a basal rate g (nM/min).

    Places the inflection where the weighted signal equals the basal rate and
    enforces the basal identity exactly: kappa = 4g, theta = g, lam = ln3/g.
    The implied midpoint slope coefficient is kappa*lam/4 = ln 3, i.e. about
    10% above the linear model's unit slope.
    """
    if not g_basal > 0:
        raise DomainError(f"basal rate must be positive, got {g_basal!r}")
    return WeightedMatchResult(kappa=4.0 * g_basal, theta=float(g_basal), lam=math.log(3.0) / g_basal)


def match_weighted_custom_threshold(g_basal: float, theta: float) -> WeightedMatchResult:
    """Weighted-activation parameters for a caller-chosen threshold (nM/min).

    kappa = 2(g + theta) and lam = ln(1 + 2 theta/g)/theta. With theta = g
    this reduces to :func:`match_weighted_basal_slope`. As theta -> 0+,
    kappa -> 2g and lam -> 2/g, so lam*theta -> 0 and the sigmoid sits at
    half-maximum at zero signal.
    """
    if not g_basal > 0:
        raise DomainError(f"basal rate must be positive, got {g_basal!r}")
    if not theta > 0:
        raise DomainError(f"threshold must be positive, got {theta!r}")
    kappa = 2.0 * (g_basal + theta)
    lam = math.log1p(2.0 * theta / g_basal) / theta
    return WeightedMatchResult(kappa=kappa, theta=float(theta), lam=lam)


def rescale_weight(p: SigmoidParams, w: float, units: str | None = None) -> SigmoidParams:
    """Absorb a positive input weight into the sigmoid parameters.

    ``logistic(w*x, p) == logistic(x, rescale_weight(p, w))`` with
    lam' = lam*w and theta' = theta/w. ``units`` labels the new threshold;
    by default the old label is kept.
    """
    if not (w > 0 and math.isfinite(w)):
        raise DomainError(f"weight must be positive and finite, got {w!r}")
    return SigmoidParams(
        theta=p.theta / w,
        lam=p.lam * w,
        direction=p.direction,
        units=p.units if units is None else units,
    )
