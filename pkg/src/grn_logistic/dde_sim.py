"""Fixed-step RK4 integration of the delay system (method of steps).

Delayed values are read from the stored solution through piecewise cubic
Hermite interpolation, using the right-hand side stored at every grid point
as the node derivative. The interpolant is local to one step, so delays need
not be multiples of ``dt``; they only have to be at least ``dt`` so every
lookup falls in the already computed past.
"""
from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError, SimulationError
from .model import (
    DelayConfig,
    DelayedState,
    Formulation,
    Params,
    State,
    check_formulation,
    formulation_of,
    rhs_hill,
    rhs_linear_additive,
    rhs_weighted,
)

__all__ = ["HistorySpec", "Trajectory", "OscillationMetrics", "integrate", "oscillation_metrics"]

log = logging.getLogger(__name__)

DEFAULT_DT = 0.01


@dataclass(frozen=True)
class HistorySpec:
    """Initial function on t <= 0. Only constant histories are supported.

    Values must be finite and, unless ``allow_negative`` is set, non-negative.
    The escape hatch exists for perturbation experiments that probe how each
    formulation handles negative concentrations.
    """

    value: State
    kind: str = "constant"
    allow_negative: bool = False

    def __post_init__(self):
        if self.kind != "constant":
            raise ValueError(f"unsupported history kind {self.kind!r}")
        A, B = float(self.value[0]), float(self.value[1])
        object.__setattr__(self, "value", State(A, B))
        if not (math.isfinite(A) and math.isfinite(B)):
            raise ValueError("history values must be finite")
        if not self.allow_negative and (A < 0 or B < 0):
            raise ValueError("history values must be non-negative (set allow_negative=True to override)")

    @classmethod
    def constant(cls, A: float, B: float, **kw) -> "HistorySpec":
        return cls(State(A, B), **kw)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray       # shape (N, 2): columns A, B
    derivatives: np.ndarray  # right-hand side at each grid point, same shape
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for arr in (self.times, self.states, self.derivatives):
            arr.setflags(write=False)
        if len(self.times) != len(self.states):
            raise ValueError("times and states differ in length")

    @property
    def A(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def B(self) -> np.ndarray:
        return self.states[:, 1]

    @property
    def final_state(self) -> State:
        return State(float(self.states[-1, 0]), float(self.states[-1, 1]))

    def sample(self, t) -> np.ndarray:
        """Dense output at arbitrary times inside the integration window, shape (len(t), 2)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        ts = self.times
        if t.min() < ts[0] - 1e-12 or t.max() > ts[-1] + 1e-12:
            raise ValueError("sample times outside the trajectory")
        j = np.clip(np.searchsorted(ts, t, side="right") - 1, 0, len(ts) - 2)
        h = ts[j + 1] - ts[j]
        s = ((t - ts[j]) / h)[:, None]
        y0, y1 = self.states[j], self.states[j + 1]
        f0, f1 = self.derivatives[j] * h[:, None], self.derivatives[j + 1] * h[:, None]
        return _hermite(y0, y1, f0, f1, s)

    def to_csv(self, path=None) -> str | None:
        """Write ``t,A,B`` rows with 9 significant digits; returns the text if ``path`` is None."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "A", "B"])
        for t, (a, b) in zip(self.times, self.states):
            w.writerow([f"{t:.9g}", f"{a:.9g}", f"{b:.9g}"])
        text = buf.getvalue()
        if path is None:
            return text
        Path(path).write_text(text)
        return None


def _hermite(y0, y1, f0, f1, s):
    # f0, f1 already multiplied by the interval length
    s2 = s * s
    s3 = s2 * s
    return ((2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * f0
            + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * f1)


_RHS = {
    Formulation.HILL: rhs_hill,
    Formulation.LINEAR_ADDITIVE: rhs_linear_additive,
    Formulation.WEIGHTED: rhs_weighted,
}


def integrate(formulation, params: Params, delays: DelayConfig | None = None,
              history: HistorySpec | None = None, t_end: float = 20.0,
              dt: float = DEFAULT_DT) -> Trajectory:
    """Integrate one formulation from a constant history.

    Parameters
    ----------
    formulation : Formulation or str
    params : parameter set matching the formulation
    delays : DelayConfig, optional
        Defaults to no delay, which reduces to a plain ODE solve.
    history : HistorySpec, optional
        Defaults to the constant (10, 10) nM.
    t_end : float
        Final time (min); rounded to a whole number of steps.
    dt : float
        Step size (min). Every nonzero delay must be >= dt.

    Returns
    -------
    Trajectory
        ``round(t_end/dt) + 1`` grid points starting at t = 0.

    Raises
    ------
    SimulationError
        If the state becomes NaN or infinite; ``.time`` holds the step time.
    DomainError
        From the Hill formulation if a delayed concentration turns negative.
    """
    form = check_formulation(formulation, params)
    delays = delays or DelayConfig()
    history = history or HistorySpec.constant(10.0, 10.0)
    if not (dt > 0 and math.isfinite(dt)):
        raise ValueError(f"dt must be positive, got {dt!r}")
    if not (t_end > 0 and math.isfinite(t_end)):
        raise ValueError(f"t_end must be positive, got {t_end!r}")
    positive = [tau for tau in delays.as_tuple() if tau > 0]
    if positive and min(positive) < dt * (1 - 1e-12):
        raise ValueError(f"dt={dt} exceeds the smallest positive delay {min(positive)}")

    n_steps = max(1, int(round(t_end / dt)))
    f = _RHS[form]
    tau1, tau2, tau12, tau21 = delays.as_tuple()
    hA, hB = history.value

    ya = [hA]
    yb = [hB]
    fa = []
    fb = []

    def past(t, ys, fs, h0):
        # value at t <= current time from the stored grid
        if t <= 0.0:
            return h0
        j = int(t / dt)
        if j >= len(fs) - 1:
            j = len(fs) - 2
        s = t / dt - j
        s2 = s * s
        s3 = s2 * s
        return ((2 * s3 - 3 * s2 + 1) * ys[j] + (s3 - 2 * s2 + s) * dt * fs[j]
                + (-2 * s3 + 3 * s2) * ys[j + 1] + (s3 - s2) * dt * fs[j + 1])

    def deriv(t, A, B):
        d = DelayedState(
            past(t - tau1, ya, fa, hA) if tau1 else A,
            past(t - tau2, yb, fb, hB) if tau2 else B,
            past(t - tau12, yb, fb, hB) if tau12 else B,
            past(t - tau21, ya, fa, hA) if tau21 else A,
        )
        return f((A, B), d, params)

    A, B = hA, hB
    negative = 0
    for i in range(n_steps):
        t = i * dt
        k1a, k1b = deriv(t, A, B)
        fa.append(k1a)
        fb.append(k1b)
        k2a, k2b = deriv(t + 0.5 * dt, A + 0.5 * dt * k1a, B + 0.5 * dt * k1b)
        k3a, k3b = deriv(t + 0.5 * dt, A + 0.5 * dt * k2a, B + 0.5 * dt * k2b)
        k4a, k4b = deriv(t + dt, A + dt * k3a, B + dt * k3b)
        A = A + dt * (k1a + 2.0 * k2a + 2.0 * k3a + k4a) / 6.0
        B = B + dt * (k1b + 2.0 * k2b + 2.0 * k3b + k4b) / 6.0
        if not (math.isfinite(A) and math.isfinite(B)):
            raise SimulationError(f"non-finite state at t={t + dt:.6g} min", time=t + dt)
        if A < 0 or B < 0:
            if negative == 0:
                log.warning("negative concentration at t=%.6g min: A=%.6g, B=%.6g", t + dt, A, B)
            negative += 1
        ya.append(A)
        yb.append(B)
    ka, kb = deriv(n_steps * dt, A, B)
    fa.append(ka)
    fb.append(kb)

    states = np.column_stack([ya, yb])
    meta = {
        "formulation": form.value,
        "params": params.as_dict(),
        "delays": dict(zip(("tau_1", "tau_2", "tau_12", "tau_21"), delays.as_tuple())),
        "history": {"kind": history.kind, "A": hA, "B": hB},
        "dt": dt,
        "negative_excursions": negative,
    }
    return Trajectory(np.arange(n_steps + 1) * dt, states, np.column_stack([fa, fb]), meta)


@dataclass(frozen=True)
class OscillationMetrics:
    amplitude: float
    period: float | None
    n_peaks: int


def oscillation_metrics(traj: Trajectory, t_discard: float, min_amplitude: float = 0.5) -> OscillationMetrics:
    """Half peak-to-peak amplitude of A and mean peak spacing after a transient.

    Peaks are refined by fitting a parabola through each sampled maximum and
    its neighbours. ``period`` is None when the amplitude is below
    ``min_amplitude`` nM or fewer than two peaks remain.
    """
    if not t_discard < traj.times[-1]:
        raise ValueError("t_discard must be smaller than the final time")
    keep = traj.times >= t_discard
    t = traj.times[keep]
    a = traj.A[keep]
    amplitude = 0.5 * float(a.max() - a.min())
    if amplitude < min_amplitude or len(a) < 3:
        return OscillationMetrics(amplitude, None, 0)
    mid = a[1:-1]
    idx = np.flatnonzero((mid > a[:-2]) & (mid >= a[2:])) + 1
    peaks = []
    for i in idx:
        y0, y1, y2 = a[i - 1], a[i], a[i + 1]
        denom = y0 - 2.0 * y1 + y2
        off = 0.5 * (y0 - y2) / denom if denom != 0 else 0.0
        peaks.append(t[i] + off * (t[i + 1] - t[i]))
    if len(peaks) < 2:
        return OscillationMetrics(amplitude, None, len(peaks))
    return OscillationMetrics(amplitude, float(np.mean(np.diff(peaks))), len(peaks))


def read_csv(path_or_text) -> tuple[np.ndarray, np.ndarray]:
    """Read a ``t,A,B`` CSV into (times, states). Accepts a path or the text itself."""
    if isinstance(path_or_text, (str, Path)) and Path(str(path_or_text)).is_file():
        text = Path(path_or_text).read_text()
    else:
        text = str(path_or_text)
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != ["t", "A", "B"]:
        raise ValueError("CSV must start with the header t,A,B")
    data = np.array([[float(x) for x in r] for r in rows[1:] if r], dtype=float)
    if data.ndim != 2 or data.shape[1] != 3:
        raise ValueError("CSV rows must have three columns")
    return data[:, 0], data[:, 1:]


def trajectory_formulation(traj: Trajectory) -> Formulation:
    return Formulation(traj.metadata["formulation"])


# re-exported for callers that inspect failures without importing errors
__all__ += ["read_csv", "SimulationError", "DomainError", "formulation_of"]
