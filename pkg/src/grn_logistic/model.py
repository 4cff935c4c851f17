"""Parameter containers, presets and right-hand sides for the two-gene network.

Three formulations share one core parameter set:

* ``hill`` -- linear activation (g + g_cross * x) times Hill self-repression;
* ``linear-additive`` -- the Hill repression replaced by a decreasing logistic;
* ``weighted`` -- activation replaced by kappa * f+(g_cross * x), so production
  is a product of two logistic factors.

Concentrations are in nM, time in min.
"""
from __future__ import annotations

import configparser
import enum
import math
import os
import warnings
from dataclasses import dataclass, field, fields, replace
from functools import cached_property
from pathlib import Path
from typing import ClassVar, NamedTuple, Union

import numpy as np

from .errors import DomainError, ParameterRangeWarning, UnitMismatchError
from .sigmoid import (
    Direction,
    HillParams,
    SigmoidParams,
    hill,
    hill_deriv,
    logistic,
    logistic_deriv,
    match_steepness,
    match_weighted_basal_slope,
)


class Formulation(str, enum.Enum):
    HILL = "hill"
    LINEAR_ADDITIVE = "linear-additive"
    WEIGHTED = "weighted"


class State(NamedTuple):
    A: float
    B: float


class DelayedState(NamedTuple):
    """The four delayed concentrations the right-hand sides read (nM)."""

    A_tau1: float
    B_tau2: float
    B_tau12: float
    A_tau21: float

    @classmethod
    def undelayed(cls, s) -> "DelayedState":
        A, B = s
        return cls(A, B, B, A)


# experimentally reported ranges; outside them we warn but do not refuse
REPORTED_RANGES = {
    "g_A": (10.0, 100.0),
    "g_B": (10.0, 100.0),
    "g_AB": (1.0, 5.0),
    "g_BA": (1.0, 5.0),
    "gamma_A": (0.05, 0.30),
    "gamma_B": (0.05, 0.30),
    "A0": (50.0, 200.0),
    "B0": (50.0, 200.0),
    "n": (2.0, 5.0),
    "lambda_A": (0.01, 0.1),
    "lambda_B": (0.01, 0.1),
}


def _warn_ranges(obj, names):
    for name in names:
        lo, hi = REPORTED_RANGES[name]
        v = getattr(obj, name)
        if not lo <= v <= hi:
            warnings.warn(
                f"{name}={v} lies outside the experimental range [{lo}, {hi}]",
                ParameterRangeWarning,
                stacklevel=4,
            )


@dataclass(frozen=True)
class CoreParams:
    """Parameters shared by all formulations.

    Cross-activation strengths may be zero (decoupled genes); every other
    parameter must be strictly positive.
    """

    g_A: float = 50.0
    g_B: float = 50.0
    g_AB: float = 3.0
    g_BA: float = 3.0
    gamma_A: float = 0.20
    gamma_B: float = 0.24
    A0: float = 100.0
    B0: float = 100.0
    n: float = 4.0

    UNITS: ClassVar[dict] = {
        "g_A": "nM/min", "g_B": "nM/min", "g_AB": "1/min", "g_BA": "1/min",
        "gamma_A": "1/min", "gamma_B": "1/min", "A0": "nM", "B0": "nM", "n": "1",
    }

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v):
                raise DomainError(f"{f.name} must be finite, got {v!r}")
            if f.name in ("g_AB", "g_BA"):
                if v < 0:
                    raise DomainError(f"{f.name} must be non-negative, got {v!r}")
            elif v <= 0:
                raise DomainError(f"{f.name} must be positive, got {v!r}")
        _warn_ranges(self, [f.name for f in fields(self)])

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _require_positive(obj, names):
    for name in names:
        v = getattr(obj, name)
        if not (v > 0 and math.isfinite(v)):
            raise DomainError(f"{name} must be positive and finite, got {v!r}")


class _FlatParams:
    """Flat name access over ``core`` plus the formulation's own fields."""

    def as_dict(self) -> dict:
        out = self.core.as_dict()
        out.update({f.name: getattr(self, f.name) for f in fields(self) if f.name != "core"})
        return out

    def replace(self, **updates):
        core_names = {f.name for f in fields(CoreParams)}
        core_upd = {k: v for k, v in updates.items() if k in core_names}
        own_upd = {k: v for k, v in updates.items() if k not in core_names}
        unknown = set(own_upd) - {f.name for f in fields(self)}
        if unknown:
            raise KeyError(f"unknown parameter(s): {sorted(unknown)}")
        core = replace(self.core, **core_upd) if core_upd else self.core
        return replace(self, core=core, **own_upd)


@dataclass(frozen=True)
class LogisticModelParams(_FlatParams):
    core: CoreParams = field(default_factory=CoreParams)
    lambda_A: float = 0.04
    lambda_B: float = 0.04

    UNITS: ClassVar[dict] = {"lambda_A": "1/nM", "lambda_B": "1/nM"}

    def __post_init__(self):
        _require_positive(self, ["lambda_A", "lambda_B"])
        _warn_ranges(self, ["lambda_A", "lambda_B"])

    @classmethod
    def from_core(cls, core: CoreParams) -> "LogisticModelParams":
        """Slope-matched steepness lambda = n/theta for both repression terms."""
        return cls(
            core=core,
            lambda_A=match_steepness(HillParams(core.A0, core.n)),
            lambda_B=match_steepness(HillParams(core.B0, core.n)),
        )

    @cached_property
    def repression_A(self) -> SigmoidParams:
        return SigmoidParams(self.core.A0, self.lambda_A, Direction.DECREASING)

    @cached_property
    def repression_B(self) -> SigmoidParams:
        return SigmoidParams(self.core.B0, self.lambda_B, Direction.DECREASING)


@dataclass(frozen=True)
class WeightedModelParams(_FlatParams):
    """Product-of-logistics parameters.

    ``theta_B``/``lambda_1`` shape the activation of gene A by the weighted
    signal g_AB*B (units nM/min and its reciprocal); ``theta_A``/``lambda_2``
    the activation of B by g_BA*A. ``lambda_3``/``lambda_4`` are the
    self-repression steepnesses in 1/nM.
    """

    core: CoreParams = field(default_factory=CoreParams)
    kappa_1: float = 200.0
    kappa_2: float = 200.0
    theta_A: float = 50.0
    theta_B: float = 50.0
    lambda_1: float = math.log(3.0) / 50.0
    lambda_2: float = math.log(3.0) / 50.0
    lambda_3: float = 0.04
    lambda_4: float = 0.04

    UNITS: ClassVar[dict] = {
        "kappa_1": "nM/min", "kappa_2": "nM/min", "theta_A": "nM/min", "theta_B": "nM/min",
        "lambda_1": "1/(nM/min)", "lambda_2": "1/(nM/min)", "lambda_3": "1/nM", "lambda_4": "1/nM",
    }

    def __post_init__(self):
        _require_positive(self, [f.name for f in fields(self) if f.name != "core"])

    @classmethod
    def from_core(cls, core: CoreParams) -> "WeightedModelParams":
        """Basal- and slope-matched parameters (kappa = 4g, theta = g, lambda = ln3/g)."""
        mA = match_weighted_basal_slope(core.g_A)
        mB = match_weighted_basal_slope(core.g_B)
        return cls(
            core=core,
            kappa_1=mA.kappa, theta_B=mA.theta, lambda_1=mA.lam,
            kappa_2=mB.kappa, theta_A=mB.theta, lambda_2=mB.lam,
            lambda_3=match_steepness(HillParams(core.A0, core.n)),
            lambda_4=match_steepness(HillParams(core.B0, core.n)),
        )

    @classmethod
    def assemble(cls, core: CoreParams, kappa_1: float, kappa_2: float,
                 activation_A: SigmoidParams, activation_B: SigmoidParams,
                 repression_A: SigmoidParams, repression_B: SigmoidParams) -> "WeightedModelParams":
        """Build from sigmoid objects, checking directions, units and thresholds.

        Activation sigmoids act on the weighted signals and must carry
        ``nM/min`` thresholds; a fixed-weight sigmoid (threshold in nM, e.g.
        from :func:`rescale_weight`) is rejected with UnitMismatchError.
        """
        for name, sig, direction, unit in (
            ("activation_A", activation_A, Direction.INCREASING, "nM/min"),
            ("activation_B", activation_B, Direction.INCREASING, "nM/min"),
            ("repression_A", repression_A, Direction.DECREASING, "nM"),
            ("repression_B", repression_B, Direction.DECREASING, "nM"),
        ):
            if sig.direction is not direction:
                raise DomainError(f"{name} must be {direction.value}")
            if sig.units != unit:
                raise UnitMismatchError(f"{name} threshold has units {sig.units!r}, expected {unit!r}")
        if repression_A.theta != core.A0 or repression_B.theta != core.B0:
            raise DomainError("repression thresholds must equal core A0/B0")
        return cls(
            core=core, kappa_1=kappa_1, kappa_2=kappa_2,
            theta_B=activation_A.theta, lambda_1=activation_A.lam,
            theta_A=activation_B.theta, lambda_2=activation_B.lam,
            lambda_3=repression_A.lam, lambda_4=repression_B.lam,
        )

    @cached_property
    def activation_A(self) -> SigmoidParams:
        return SigmoidParams(self.theta_B, self.lambda_1, Direction.INCREASING, units="nM/min")

    @cached_property
    def activation_B(self) -> SigmoidParams:
        return SigmoidParams(self.theta_A, self.lambda_2, Direction.INCREASING, units="nM/min")

    @cached_property
    def repression_A(self) -> SigmoidParams:
        return SigmoidParams(self.core.A0, self.lambda_3, Direction.DECREASING)

    @cached_property
    def repression_B(self) -> SigmoidParams:
        return SigmoidParams(self.core.B0, self.lambda_4, Direction.DECREASING)


@dataclass(frozen=True)
class DelayConfig:
    """Self-repression delays tau_1, tau_2 and cross-activation delays tau_12, tau_21 (min)."""

    tau_1: float = 0.0
    tau_2: float = 0.0
    tau_12: float = 0.0
    tau_21: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (v >= 0 and math.isfinite(v)):
                raise DomainError(f"{f.name} must be a finite non-negative delay, got {v!r}")

    @classmethod
    def symmetric(cls, tau_s: float) -> "DelayConfig":
        return cls(tau_1=tau_s, tau_2=tau_s)

    def as_tuple(self):
        return (self.tau_1, self.tau_2, self.tau_12, self.tau_21)

    @property
    def is_delay_free(self) -> bool:
        return not any(self.as_tuple())


Params = Union[CoreParams, LogisticModelParams, WeightedModelParams]

_PARAM_TYPES = {
    Formulation.HILL: CoreParams,
    Formulation.LINEAR_ADDITIVE: LogisticModelParams,
    Formulation.WEIGHTED: WeightedModelParams,
}


def formulation_of(params: Params) -> Formulation:
    for form, typ in _PARAM_TYPES.items():
        if type(params) is typ:
            return form
    raise TypeError(f"not a parameter set: {type(params).__name__}")


def check_formulation(formulation, params: Params) -> Formulation:
    """Coerce ``formulation`` and make sure ``params`` belongs to it."""
    form = Formulation(formulation)
    if not isinstance(params, _PARAM_TYPES[form]):
        raise TypeError(
            f"formulation {form.value!r} expects {_PARAM_TYPES[form].__name__}, "
            f"got {type(params).__name__}"
        )
    return form


# ---------------------------------------------------------------------------
# right-hand sides


def rhs_hill(s, d: DelayedState, p: CoreParams, *, clamp_negative: bool = False):
    """Linear activation with Hill self-repression.

    Raises DomainError if a delayed concentration entering a Hill power is
    negative (unless ``clamp_negative``).
    """
    A, B = s
    hA = hill(d.A_tau1, HillParams(p.A0, p.n), Direction.DECREASING, clamp_negative=clamp_negative)
    hB = hill(d.B_tau2, HillParams(p.B0, p.n), Direction.DECREASING, clamp_negative=clamp_negative)
    dA = (p.g_A + p.g_AB * d.B_tau12) * hA - p.gamma_A * A
    dB = (p.g_B + p.g_BA * d.A_tau21) * hB - p.gamma_B * B
    return dA, dB


def rhs_linear_additive(s, d: DelayedState, p: LogisticModelParams):
    """Linear activation with logistic self-repression; defined for all real states."""
    c = p.core
    A, B = s
    fA = logistic(d.A_tau1, p.repression_A)
    fB = logistic(d.B_tau2, p.repression_B)
    dA = (c.g_A + c.g_AB * d.B_tau12) * fA - c.gamma_A * A
    dB = (c.g_B + c.g_BA * d.A_tau21) * fB - c.gamma_B * B
    return dA, dB


def production_weighted(d: DelayedState, p: WeightedModelParams):
    """Production terms kappa * f+(g*x) * f-(x) of both genes; each in (0, kappa)."""
    c = p.core
    pA = p.kappa_1 * logistic(c.g_AB * d.B_tau12, p.activation_A) * logistic(d.A_tau1, p.repression_A)
    pB = p.kappa_2 * logistic(c.g_BA * d.A_tau21, p.activation_B) * logistic(d.B_tau2, p.repression_B)
    return pA, pB


def rhs_weighted(s, d: DelayedState, p: WeightedModelParams):
    A, B = s
    pA, pB = production_weighted(d, p)
    return pA - p.core.gamma_A * A, pB - p.core.gamma_B * B


def rhs(formulation, params: Params, s, d: DelayedState | None = None):
    """Dispatch to the formulation's right-hand side; ``d`` defaults to the undelayed state."""
    form = check_formulation(formulation, params)
    if d is None:
        d = DelayedState.undelayed(s)
    if form is Formulation.HILL:
        return rhs_hill(s, d, params)
    if form is Formulation.LINEAR_ADDITIVE:
        return rhs_linear_additive(s, d, params)
    return rhs_weighted(s, d, params)


# ---------------------------------------------------------------------------
# delay-free Jacobians of s -> rhs(s, s)


def jacobian_linear_additive(s, p: LogisticModelParams) -> np.ndarray:
    c = p.core
    A, B = s
    fA = logistic(A, p.repression_A)
    fB = logistic(B, p.repression_B)
    J11 = (c.g_A + c.g_AB * B) * logistic_deriv(A, p.repression_A) - c.gamma_A
    J22 = (c.g_B + c.g_BA * A) * logistic_deriv(B, p.repression_B) - c.gamma_B
    return np.array([[J11, c.g_AB * fA], [c.g_BA * fB, J22]])


def jacobian_weighted(s, p: WeightedModelParams) -> np.ndarray:
    c = p.core
    A, B = s
    f1 = logistic(c.g_AB * B, p.activation_A)
    f2 = logistic(c.g_BA * A, p.activation_B)
    f3 = logistic(A, p.repression_A)
    f4 = logistic(B, p.repression_B)
    J11 = p.kappa_1 * f1 * logistic_deriv(A, p.repression_A) - c.gamma_A
    J12 = p.kappa_1 * c.g_AB * logistic_deriv(c.g_AB * B, p.activation_A) * f3
    J21 = p.kappa_2 * c.g_BA * logistic_deriv(c.g_BA * A, p.activation_B) * f4
    J22 = p.kappa_2 * f2 * logistic_deriv(B, p.repression_B) - c.gamma_B
    return np.array([[J11, J12], [J21, J22]])


def jacobian_hill(s, p: CoreParams) -> np.ndarray:
    A, B = s
    hpA, hpB = HillParams(p.A0, p.n), HillParams(p.B0, p.n)
    dec = Direction.DECREASING
    J11 = (p.g_A + p.g_AB * B) * hill_deriv(A, hpA, dec) - p.gamma_A
    J22 = (p.g_B + p.g_BA * A) * hill_deriv(B, hpB, dec) - p.gamma_B
    return np.array([[J11, p.g_AB * hill(A, hpA, dec)], [p.g_BA * hill(B, hpB, dec), J22]])


def jacobian(formulation, params: Params, s) -> np.ndarray:
    form = check_formulation(formulation, params)
    if form is Formulation.HILL:
        return jacobian_hill(s, params)
    if form is Formulation.LINEAR_ADDITIVE:
        return jacobian_linear_additive(s, params)
    return jacobian_weighted(s, params)


# ---------------------------------------------------------------------------
# presets and config files


@dataclass(frozen=True)
class ModelConfig:
    """One core parameter set with both derived logistic formulations and delays."""

    core: CoreParams
    linear: LogisticModelParams
    weighted: WeightedModelParams
    delays: DelayConfig = field(default_factory=DelayConfig)

    @classmethod
    def from_core(cls, core: CoreParams, delays: DelayConfig | None = None) -> "ModelConfig":
        return cls(core, LogisticModelParams.from_core(core), WeightedModelParams.from_core(core),
                   delays or DelayConfig())

    def params_for(self, formulation) -> Params:
        form = Formulation(formulation)
        return {Formulation.HILL: self.core, Formulation.LINEAR_ADDITIVE: self.linear,
                Formulation.WEIGHTED: self.weighted}[form]


_PRESET_CORES = {
    "vinoth-table1": dict(),
    # illustrative comparison set: weaker coupling, lower repression thresholds
    "fig2-illustrative": dict(g_AB=2.5, g_BA=2.5, A0=70.0, B0=70.0),
}

PRESETS = tuple(_PRESET_CORES)

_SECTION_FIELDS = {
    "core": [f.name for f in fields(CoreParams)],
    "linear-additive": ["lambda_A", "lambda_B"],
    "weighted": [f.name for f in fields(WeightedModelParams) if f.name != "core"],
    "delays": [f.name for f in fields(DelayConfig)],
}


def get_preset(name: str) -> ModelConfig:
    """Return a named preset.

    If the environment variable ``GRN_PRESET_DIR`` is set and contains
    ``<name>.cfg``, that file takes precedence over the built-in definition.
    """
    preset_dir = os.environ.get("GRN_PRESET_DIR")
    if preset_dir:
        path = Path(preset_dir) / f"{name}.cfg"
        if path.is_file():
            return load_config(path)
    if name not in _PRESET_CORES:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
    return ModelConfig.from_core(CoreParams(**_PRESET_CORES[name]))


def dumps_config(cfg: ModelConfig) -> str:
    """Serialise to the flat ``key = value`` format with one section per formulation."""
    lines = []
    blocks = {
        "core": cfg.core.as_dict(),
        "linear-additive": {k: getattr(cfg.linear, k) for k in _SECTION_FIELDS["linear-additive"]},
        "weighted": {k: getattr(cfg.weighted, k) for k in _SECTION_FIELDS["weighted"]},
        "delays": {k: getattr(cfg.delays, k) for k in _SECTION_FIELDS["delays"]},
    }
    for section, values in blocks.items():
        lines.append(f"[{section}]")
        lines.extend(f"{k} = {v!r}" for k, v in values.items())
        lines.append("")
    return "\n".join(lines)


def save_config(path, cfg: ModelConfig) -> None:
    Path(path).write_text(dumps_config(cfg))


def loads_config(text: str) -> ModelConfig:
    """Parse a config document.

    ``[core]`` is required (missing keys fall back to the default parameter
    set). ``[linear-additive]`` and ``[weighted]`` are optional; when absent
    their parameters are derived from the core by the matching rules.
    Unknown sections or keys raise ValueError.
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str  # keys are case sensitive (A0 vs a0)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ValueError(f"malformed config: {exc}") from exc
    unknown = set(cp.sections()) - set(_SECTION_FIELDS)
    if unknown:
        raise ValueError(f"unknown config section(s): {sorted(unknown)}")
    if "core" not in cp:
        raise ValueError("config needs a [core] section")

    def read(section):
        if section not in cp:
            return None
        out = {}
        for key, raw in cp[section].items():
            if key not in _SECTION_FIELDS[section]:
                raise ValueError(f"unknown key {key!r} in [{section}]")
            try:
                out[key] = float(raw)
            except ValueError as exc:
                raise ValueError(f"[{section}] {key}: not a number: {raw!r}") from exc
        return out

    core = CoreParams(**read("core"))
    base = ModelConfig.from_core(core)
    lin_vals = read("linear-additive")
    wt_vals = read("weighted")
    delay_vals = read("delays")
    linear = replace(base.linear, **lin_vals) if lin_vals else base.linear
    weighted = replace(base.weighted, **wt_vals) if wt_vals else base.weighted
    delays = DelayConfig(**delay_vals) if delay_vals else DelayConfig()
    return ModelConfig(core, linear, weighted, delays)


def load_config(path) -> ModelConfig:
    return loads_config(Path(path).read_text())
