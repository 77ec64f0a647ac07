"""Explicit time stepping for ``dR/dt = f(R, t)`` with invariant monitoring."""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .dynamics import MONITORS, BlochState, monitors as eval_monitors
from .field import FieldSpec

__all__ = [
    "NumericalError",
    "StepSizeUnderflow",
    "IntegrationConfig",
    "Trajectory",
    "sample_times",
    "rk4_step",
    "integrate",
]


class NumericalError(RuntimeError):
    """Non-finite values appeared during time stepping."""


class StepSizeUnderflow(NumericalError):
    """The adaptive controller could not meet the tolerance."""


@dataclass(frozen=True)
class IntegrationConfig:
    """Time span and stepping.

    For ``rk4`` ``dt`` is the step; for ``rk45`` it only fixes the output grid
    (samples every ``dt * sample_every``) and ``dt_init`` seeds the controller.
    """

    method: str = "rk4"
    dt: float = 1e-3
    t0: float = 0.0
    t1: float = 1.0
    sample_every: int = 1
    rtol: float = 1e-10
    atol: float = 1e-12
    dt_init: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "method", self.method.lower())
        if self.method not in ("rk4", "rk45"):
            raise ValueError(f"unknown method {self.method!r}")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.t1 > self.t0:
            raise ValueError("t1 must exceed t0")
        if self.sample_every < 1:
            raise ValueError("sample_every must be >= 1")
        if not (self.rtol > 0 and self.atol > 0):
            raise ValueError("tolerances must be positive")

    @property
    def n_steps(self) -> int:
        return max(1, int(round((self.t1 - self.t0) / self.dt)))


@dataclass
class Trajectory:
    system: object
    times: np.ndarray
    states: np.ndarray = dc_field(repr=False)
    monitors: dict = dc_field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.times)

    def state(self, i: int) -> BlochState:
        return BlochState(self.system, self.states[i].copy())

    def drift(self, name: str) -> float:
        values = self.monitors[name]
        return float(np.max(np.abs(values - values[0])))


def sample_times(cfg: IntegrationConfig) -> tuple:
    """Step indices that are sampled and the matching times."""
    n = cfg.n_steps
    steps = list(range(0, n + 1, cfg.sample_every))
    if steps[-1] != n:
        steps.append(n)
    return steps, np.array([cfg.t0 + k * (cfg.t1 - cfg.t0) / n for k in steps])


def rk4_step(f: Callable, y: np.ndarray, t: float, dt: float) -> np.ndarray:
    k1 = f(y, t)
    k2 = f(y + 0.5 * dt * k1, t + 0.5 * dt)
    k3 = f(y + 0.5 * dt * k2, t + 0.5 * dt)
    k4 = f(y + dt * k3, t + dt)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _fixed(rhs, y0, cfg):
    steps, times = sample_times(cfg)
    n = cfg.n_steps
    h = (cfg.t1 - cfg.t0) / n
    out = np.empty((len(steps), y0.size))
    out[0] = y0
    y = y0.copy()
    wanted = iter(enumerate(steps[1:], start=1))
    slot, target = next(wanted, (None, None))
    for k in range(n):
        y = rk4_step(rhs, y, cfg.t0 + k * h, h)
        if not np.all(np.isfinite(y)):
            raise NumericalError(f"non-finite state after step {k + 1} (t = {cfg.t0 + (k + 1) * h:g})")
        if k + 1 == target:
            out[slot] = y
            slot, target = next(wanted, (None, None))
    return times, out


def _adaptive(rhs, y0, cfg):
    _, times = sample_times(cfg)
    sol = solve_ivp(
        lambda t, y: rhs(y, t),
        (cfg.t0, cfg.t1),
        y0,
        method="RK45",
        t_eval=times,
        rtol=cfg.rtol,
        atol=cfg.atol,
        first_step=cfg.dt_init,
    )
    if sol.status != 0:
        raise StepSizeUnderflow(sol.message)
    if not np.all(np.isfinite(sol.y)):
        raise NumericalError("non-finite state in adaptive integration")
    return sol.t, sol.y.T.copy()


def integrate(rhs: Callable, initial: BlochState, cfg: IntegrationConfig, *,
              field: FieldSpec | None = None,
              monitor_names: Sequence[str] | None = None) -> Trajectory:
    """Integrate ``rhs(R, t)`` from ``initial`` and evaluate monitors at every sample.

    ``energy`` is only monitored when ``field`` is given.
    """
    y0 = np.array(initial.R, dtype=float)
    probe = np.asarray(rhs(y0, cfg.t0))
    if probe.shape != y0.shape:
        raise ValueError(f"rhs returns shape {probe.shape}, state has {y0.shape}")
    if cfg.method == "rk4":
        times, states = _fixed(rhs, y0, cfg)
    else:
        times, states = _adaptive(rhs, y0, cfg)

    if monitor_names is None:
        monitor_names = [m for m in MONITORS if m != "energy" or field is not None]
    mons = {name: np.empty(len(times)) for name in monitor_names}
    for i, t in enumerate(times):
        snap = BlochState(initial.system, states[i].copy())
        vals = eval_monitors(snap, field if field is not None else FieldSpec(), float(t), monitor_names)
        for name, v in vals.items():
            mons[name][i] = v
    return Trajectory(initial.system, np.asarray(times), states, mons)
