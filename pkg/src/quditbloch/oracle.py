"""Reference evolution of the complex density matrix, ``i d(rho)/dt = [H, rho]``.

Shares only the Hamiltonian assembly and the basis matrices with the real
Bloch path, so agreement between the two is a genuine cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import SystemSpec, bloch_from_density, build_hamiltonian, term_operator
from .field import FieldSpec, unit_profiles
from .integrator import IntegrationConfig, NumericalError, Trajectory, sample_times

__all__ = [
    "HamiltonianGenerator",
    "lvn_rhs",
    "evolve_density",
    "CrossCheckReport",
    "cross_check",
]


class HamiltonianGenerator:
    """``H(t) = H_static + sum_k f_k(t) H_k``, grouped like the real generator."""

    def __init__(self, system: SystemSpec, field: FieldSpec):
        D = system.hilbert_dim
        self.static = np.zeros((D, D), dtype=complex)
        varying: dict = {}
        for term in field.terms:
            op = 0.5 * term_operator(system, term.index)
            for unit, w in unit_profiles(term.profile).items():
                if unit.is_static:
                    self.static += w * op
                else:
                    Hk = varying.setdefault(unit, np.zeros((D, D), dtype=complex))
                    Hk += w * op
        self.varying = list(varying.items())

    def __call__(self, t: float) -> np.ndarray:
        H = self.static
        for prim, Hk in self.varying:
            f = prim.shape(t)
            if f:
                H = H + f * Hk
        return H


def lvn_rhs(rho: np.ndarray, field: FieldSpec, t: float, system: SystemSpec) -> np.ndarray:
    """``-i [H(t), rho]``."""
    H = build_hamiltonian(system, field, t)
    if rho.shape != H.shape:
        raise ValueError(f"density matrix {rho.shape} does not match Hamiltonian {H.shape}")
    return -1j * (H @ rho - rho @ H)


def evolve_density(rho0: np.ndarray, field: FieldSpec, cfg: IntegrationConfig,
                   system: SystemSpec) -> list:
    """Classical RK4 on the density matrix; returns ``[(t, rho), ...]`` on the sample grid.

    The state is re-symmetrized to its Hermitian part after every step.
    """
    rho = np.array(rho0, dtype=complex)
    if rho.shape != (system.hilbert_dim,) * 2:
        raise ValueError("initial density matrix has the wrong dimension")
    Ht = HamiltonianGenerator(system, field)

    def f(r, t):
        H = Ht(t)
        return -1j * (H @ r - r @ H)

    steps, times = sample_times(cfg)
    n = cfg.n_steps
    h = (cfg.t1 - cfg.t0) / n
    wanted = set(steps)
    out = [(float(times[0]), rho.copy())]
    for k in range(n):
        t = cfg.t0 + k * h
        k1 = f(rho, t)
        k2 = f(rho + 0.5 * h * k1, t + 0.5 * h)
        k3 = f(rho + 0.5 * h * k2, t + 0.5 * h)
        k4 = f(rho + h * k3, t + h)
        rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = 0.5 * (rho + rho.conj().T)
        if not np.all(np.isfinite(rho)):
            raise NumericalError(f"non-finite density matrix after step {k + 1}")
        if k + 1 in wanted:
            out.append((float(times[len(out)]), rho.copy()))
    return out


@dataclass
class CrossCheckReport:
    times: np.ndarray
    per_time: np.ndarray
    max_component_error: float

    def as_dict(self) -> dict:
        return {
            "max_component_error": self.max_component_error,
            "times": self.times.tolist(),
            "per_time": self.per_time.tolist(),
        }


def cross_check(bloch: Trajectory, oracle: list, *, time_tol: float = 1e-12) -> CrossCheckReport:
    """Max ``|R_bloch - R_oracle|`` with the oracle converted to Bloch form."""
    if len(bloch.times) != len(oracle) or any(
        abs(t - to) > time_tol for t, (to, _) in zip(bloch.times, oracle)
    ):
        raise ValueError("trajectories are not on the same time grid")
    errs = np.empty(len(oracle))
    for i, (_, rho) in enumerate(oracle):
        R = bloch_from_density(bloch.system, rho).R
        errs[i] = np.max(np.abs(bloch.states[i] - R))
    return CrossCheckReport(np.asarray(bloch.times), errs, float(errs.max()))
