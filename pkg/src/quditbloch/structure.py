"""Structure constants of su(2S+1) in the Hermitian tensor-operator basis.

Two independent routes are provided:

* trace route: ``e_ijk = Im Tr(C_i C_j C_k) / c``, ``g_ijk = Re Tr(C_i C_j C_k) / c``
  with ``c = S(S+1)(2S+1)/3``;
* analytic route: closed forms in 3jm and 6j symbols, evaluated for one
  representative ordering per component class and spread over all index
  permutations by (anti)symmetry.

Tables are keyed by flat canonical indices 1..n (index 0, the unit, is
excluded); see :mod:`quditbloch.basis` for the ordering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations

import numpy as np

from .basis import X, Y, Z, basis_array, basis_labels, norm_squared, unit_coefficient
from .wigner import HalfInteger, six_j, three_jm

__all__ = [
    "ZERO_THRESHOLD",
    "StructureTables",
    "ExtendedTripleTrace",
    "e_from_traces",
    "g_from_traces",
    "F_factor",
    "e_analytic",
    "g_analytic",
    "structure_tables",
    "extended_triple_trace",
    "symmetry_selftest",
    "max_table_difference",
]

ZERO_THRESHOLD = 1e-14


@dataclass(frozen=True, eq=False)
class StructureTables:
    spin: HalfInteger
    e: dict
    g: dict
    route: str = "trace"
    n: int = field(init=False)
    c_norm: float = field(init=False)
    c_unit: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "n", (self.spin.twice_value + 1) ** 2 - 1)
        object.__setattr__(self, "c_norm", norm_squared(self.spin))
        object.__setattr__(self, "c_unit", unit_coefficient(self.spin))

    def dense(self, which: str) -> np.ndarray:
        """Dense ``(n+1)**3`` array with zeros along every unit (0) index."""
        table = self.e if which == "e" else self.g
        out = np.zeros((self.n + 1,) * 3)
        for (i, j, k), v in table.items():
            out[i, j, k] = v
        return out

    def as_lists(self) -> dict:
        return {
            "e": [[i, j, k, v] for (i, j, k), v in sorted(self.e.items())],
            "g": [[i, j, k, v] for (i, j, k), v in sorted(self.g.items())],
        }


@dataclass(frozen=True, eq=False)
class ExtendedTripleTrace:
    """``Tr C_i C_j C_k`` over full indices 0..n, split in real and imaginary parts."""

    spin: HalfInteger
    real: np.ndarray
    imag: np.ndarray


def _spin(S) -> HalfInteger:
    return HalfInteger.parse(S)


def _sparse(arr: np.ndarray) -> dict:
    idx = np.argwhere(np.abs(arr) > ZERO_THRESHOLD)
    return {(int(i), int(j), int(k)): float(arr[i, j, k]) for i, j, k in idx}


@lru_cache(maxsize=None)
def _raw_triple_trace(twice_S: int) -> np.ndarray:
    C = basis_array(HalfInteger(twice_S))
    return np.einsum("aij,bjk,cki->abc", C, C, C, optimize=True)


def _traceless_block(arr: np.ndarray) -> np.ndarray:
    out = arr.copy()
    out[0, :, :] = 0
    out[:, 0, :] = 0
    out[:, :, 0] = 0
    return out


def e_from_traces(S) -> dict:
    """Antisymmetric constants from ``Im Tr(C_i C_j C_k) / c``."""
    spin = _spin(S)
    tr = _raw_triple_trace(spin.twice_value)
    return _sparse(_traceless_block(tr.imag) / norm_squared(spin))


def g_from_traces(S) -> dict:
    """Symmetric constants from ``Re Tr(C_i C_j C_k) / c``."""
    spin = _spin(S)
    tr = _raw_triple_trace(spin.twice_value)
    return _sparse(_traceless_block(tr.real) / norm_squared(spin))


def F_factor(k: int, k1: int, k2: int, S) -> float:
    """Rank-dependent prefactor shared by all analytic structure constants."""
    spin = _spin(S)
    s = float(spin)
    sixj = six_j(k, k1, k2, spin, spin, spin)
    if sixj == 0.0:
        return 0.0
    sign = -1.0 if spin.twice_value % 2 else 1.0
    return sign / math.sqrt(3) * math.sqrt(
        s * (s + 1) * (2 * s + 1) * (2 * k + 1) * (2 * k1 + 1) * (2 * k2 + 1)
    ) * sixj


def _par(q: int) -> int:
    return -1 if q % 2 else 1


def _e_xxy(a, b, c, S):
    (k, q), (k1, q1), (k2, q2) = a, b, c
    F = F_factor(k, k1, k2, S)
    if not F:
        return 0.0
    return -F / math.sqrt(2) * (
        _par(q) * three_jm(k, k1, k2, q, -q1, -q2)
        + _par(q1) * three_jm(k, k1, k2, -q, q1, -q2)
        + _par(q2) * three_jm(k, k1, k2, q, q1, -q2)
    )


def _e_yyy(a, b, c, S):
    (k, q), (k1, q1), (k2, q2) = a, b, c
    F = F_factor(k, k1, k2, S)
    if not F:
        return 0.0
    return F / math.sqrt(2) * (
        _par(q) * three_jm(k, k1, k2, -q, q1, q2)
        + _par(q1) * three_jm(k, k1, k2, q, -q1, q2)
        + _par(q2) * three_jm(k, k1, k2, q, q1, -q2)
    )


def _e_xyz(a, b, c, S):
    (k, q), (k1, q1), (k2, _) = a, b, c
    F = F_factor(k, k1, k2, S)
    if not F:
        return 0.0
    return -F * _par(q) * three_jm(k, k1, k2, q, -q1, 0)


def _g_xxx(a, b, c, S):
    (k, q), (k1, q1), (k2, q2) = a, b, c
    F = F_factor(k, k1, k2, S)
    if not F:
        return 0.0
    return F / math.sqrt(2) * (
        _par(q) * three_jm(k, k1, k2, q, -q1, -q2)
        + _par(q1) * three_jm(k, k1, k2, -q, q1, -q2)
        + _par(q2) * three_jm(k, k1, k2, q, q1, -q2)
    )


def _g_xyy(a, b, c, S):
    (k, q), (k1, q1), (k2, q2) = a, b, c
    F = F_factor(k, k1, k2, S)
    if not F:
        return 0.0
    return F / math.sqrt(2) * (
        -_par(q) * three_jm(k, k1, k2, q, -q1, -q2)
        + _par(q1) * three_jm(k, k1, k2, -q, q1, -q2)
        + _par(q2) * three_jm(k, k1, k2, -q, -q1, q2)
    )


def _g_xxz(a, b, c, S):
    # same closed form serves XX'Z'' and YY'Z''
    (k, q), (k1, q1), (k2, _) = a, b, c
    F = F_factor(k, k1, k2, S)
    if not F:
        return 0.0
    return F * _par(q) * three_jm(k, k1, k2, q, -q1, 0)


def _g_zzz(a, b, c, S):
    (k, _), (k1, _), (k2, _) = a, b, c
    F = F_factor(k, k1, k2, S)
    if not F:
        return 0.0
    return F * three_jm(k, k1, k2, 0, 0, 0)


# canonical component pattern -> (closed form, which positions must be sorted together)
_E_CLASSES = {(X, X, Y): _e_xxy, (Y, Y, Y): _e_yyy, (X, Y, Z): _e_xyz}
_G_CLASSES = {
    (X, X, X): _g_xxx,
    (X, Y, Y): _g_xyy,
    (X, X, Z): _g_xxz,
    (Y, Y, Z): _g_xxz,
    (Z, Z, Z): _g_zzz,
}


def _perm_sign(p) -> int:
    sign = 1
    p = list(p)
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                sign = -sign
    return sign


def _canonical_triples(groups: dict, pattern: tuple):
    """Index triples matching ``pattern``, non-decreasing within equal components."""
    a_list, b_list, c_list = (groups[t] for t in pattern)
    for a in a_list:
        for b in b_list:
            if pattern[1] == pattern[0] and b < a:
                continue
            for c in c_list:
                if pattern[2] == pattern[1] and c < b:
                    continue
                yield a, b, c


def _analytic(S, classes: dict, antisymmetric: bool) -> dict:
    spin = _spin(S)
    labels = basis_labels(spin)
    groups = {X: [], Y: [], Z: []}
    for idx, lab in enumerate(labels[1:], start=1):
        groups[lab.kind].append(idx)
    K_parity = 1 if antisymmetric else 0
    table = {}
    for pattern, formula in classes.items():
        for triple in _canonical_triples(groups, pattern):
            kq = [(labels[i].k, labels[i].q) for i in triple]
            if sum(k for k, _ in kq) % 2 != K_parity:
                continue
            value = formula(*kq, spin)
            if abs(value) <= ZERO_THRESHOLD:
                continue
            for p in permutations(range(3)):
                key = tuple(triple[i] for i in p)
                table[key] = value * _perm_sign(p) if antisymmetric else value
    return table


def e_analytic(S) -> dict:
    """Antisymmetric constants from the 3jm/6j closed forms (classes XXY, YYY, XYZ)."""
    return _analytic(S, _E_CLASSES, antisymmetric=True)


def g_analytic(S) -> dict:
    """Symmetric constants from the 3jm/6j closed forms (classes XXX, XYY, XXZ, YYZ, ZZZ)."""
    return _analytic(S, _G_CLASSES, antisymmetric=False)


@lru_cache(maxsize=None)
def _tables(twice_S: int, route: str) -> StructureTables:
    spin = HalfInteger(twice_S)
    if route == "trace":
        return StructureTables(spin, e_from_traces(spin), g_from_traces(spin), route)
    if route == "analytic":
        return StructureTables(spin, e_analytic(spin), g_analytic(spin), route)
    raise ValueError(f"unknown route {route!r}")


def structure_tables(S, route: str = "trace") -> StructureTables:
    """Cached, immutable tables for spin ``S``; ``route`` is ``"trace"`` or ``"analytic"``."""
    return _tables(_spin(S).twice_value, route)


def extended_triple_trace(tables: StructureTables) -> ExtendedTripleTrace:
    """Assemble ``Tr C_i C_j C_k`` for indices 0..n from the e, g tables."""
    n, cn, cu = tables.n, tables.c_norm, tables.c_unit
    real = cn * tables.dense("g")
    imag = cn * tables.dense("e")
    diag = np.arange(1, n + 1)
    val = cu * cn
    real[0, diag, diag] = val
    real[diag, 0, diag] = val
    real[diag, diag, 0] = val
    real[0, 0, 0] = cu ** 3 * (tables.spin.twice_value + 1)
    real.setflags(write=False)
    imag.setflags(write=False)
    return ExtendedTripleTrace(tables.spin, real, imag)


def symmetry_selftest(tables: StructureTables) -> dict:
    """Largest violation of total antisymmetry (e) and total symmetry (g)."""
    e, g = tables.dense("e"), tables.dense("g")
    worst_e = worst_g = 0.0
    for p in permutations(range(3)):
        sign = _perm_sign(p)
        worst_e = max(worst_e, float(np.max(np.abs(e - sign * e.transpose(p)))))
        worst_g = max(worst_g, float(np.max(np.abs(g - g.transpose(p)))))
    return {"spin": str(tables.spin), "e_antisymmetry": worst_e, "g_symmetry": worst_g}


def max_table_difference(a: dict, b: dict) -> float:
    keys = set(a) | set(b)
    return max((abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in keys), default=0.0)
