"""Irreducible tensor operators and the Hermitian (Allard-Hard) basis of one spin.

Matrices are indexed by magnetic quantum number ``m = S, S-1, ..., -S``.
The canonical flat ordering of a spin-S basis is::

    0            unit element  sqrt(S(S+1)/3) E
    then for k = 1 .. 2S:
                 (k,1,x) (k,1,y) (k,2,x) (k,2,y) ... (k,k,x) (k,k,y) (k,z)

so flat indices 1, 2, 3 are S_x, S_y, S_z for every spin.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .wigner import HalfInteger, three_jm

__all__ = [
    "BasisLabel",
    "tensor_operator",
    "hermitian_basis_element",
    "full_basis",
    "basis_labels",
    "basis_array",
    "label_index",
    "unit_coefficient",
    "norm_squared",
    "gram_check",
]

UNIT, X, Y, Z = "unit", "x", "y", "z"


@dataclass(frozen=True)
class BasisLabel:
    """One Hermitian basis element: the unit, or (rank k, projection q, component)."""

    kind: str
    k: int = 0
    q: int = 0

    def __post_init__(self):
        if self.kind not in (UNIT, X, Y, Z):
            raise ValueError(f"unknown basis component {self.kind!r}")
        if self.kind == UNIT and (self.k or self.q):
            raise ValueError("unit element carries no rank or projection")
        if self.kind == Z and self.q:
            raise ValueError("z elements carry no projection")
        if self.kind in (X, Y) and not 1 <= self.q <= self.k:
            raise ValueError(f"need 1 <= q <= k, got k={self.k}, q={self.q}")
        if self.kind != UNIT and self.k < 1:
            raise ValueError(f"rank must be >= 1, got {self.k}")

    @classmethod
    def parse(cls, text: str) -> "BasisLabel":
        """Parse the config syntax ``"unit"``, ``"k,q,x"``, ``"k,q,y"`` or ``"k,z"``."""
        s = re.sub(r"\s+", "", str(text)).lower()
        if s in ("unit", "e", "0"):
            return cls(UNIT)
        m = re.fullmatch(r"(\d+),(\d+),([xy])", s)
        if m:
            return cls(m.group(3), int(m.group(1)), int(m.group(2)))
        m = re.fullmatch(r"(\d+),z", s)
        if m:
            return cls(Z, int(m.group(1)))
        raise ValueError(f"cannot parse basis label {text!r}")

    def valid_for(self, spin: HalfInteger) -> bool:
        return self.kind == UNIT or self.k <= spin.twice_value

    def __str__(self) -> str:
        if self.kind == UNIT:
            return "unit"
        if self.kind == Z:
            return f"{self.k},z"
        return f"{self.k},{self.q},{self.kind}"

    @property
    def short(self) -> str:
        """Compact column token: ``E``, ``X2.1``, ``Y2.1``, ``Z2``."""
        if self.kind == UNIT:
            return "E"
        if self.kind == Z:
            return f"Z{self.k}"
        return f"{self.kind.upper()}{self.k}.{self.q}"


def _spin(S) -> HalfInteger:
    spin = HalfInteger.parse(S)
    if spin.twice_value < 1:
        raise ValueError(f"spin must be >= 1/2, got {spin}")
    return spin


def unit_coefficient(S) -> float:
    """``sqrt(S(S+1)/3)``, the scale of the unit element."""
    s = float(_spin(S))
    return math.sqrt(s * (s + 1) / 3)


def norm_squared(S) -> float:
    """Common ``Tr C_r C_r = S(S+1)(2S+1)/3`` of every basis element."""
    s = float(_spin(S))
    return s * (s + 1) * (2 * s + 1) / 3


@lru_cache(maxsize=None)
def _tensor_operator(twice_S: int, k: int, q: int) -> np.ndarray:
    dim = twice_S + 1
    pref = math.sqrt(dim * (2 * k + 1))
    out = np.zeros((dim, dim))
    for row in range(dim):
        tm = twice_S - 2 * row
        for col in range(dim):
            tmp = twice_S - 2 * col
            w = three_jm(HalfInteger(twice_S), k, HalfInteger(twice_S),
                         HalfInteger(-tm), q, HalfInteger(tmp))
            if w:
                sign = -1.0 if ((twice_S - tm) // 2) % 2 else 1.0
                out[row, col] = sign * pref * w
    out.setflags(write=False)
    return out


def tensor_operator(S, k: int, q: int) -> np.ndarray:
    """Matrix of the irreducible tensor operator ``T_{k,q}`` for spin ``S``.

    Entries are real; ``T_{0,0}`` is the identity.
    """
    spin = _spin(S)
    if not 0 <= k <= spin.twice_value or not -k <= q <= k:
        raise ValueError(f"invalid (k, q) = ({k}, {q}) for spin {spin}")
    return _tensor_operator(spin.twice_value, k, q)


def hermitian_basis_element(S, label: BasisLabel | str) -> np.ndarray:
    """Hermitian basis matrix for ``label`` (complex, shape ``(2S+1, 2S+1)``)."""
    spin = _spin(S)
    if isinstance(label, str):
        label = BasisLabel.parse(label)
    if not label.valid_for(spin):
        raise ValueError(f"label {label} invalid for spin {spin}")
    s = float(spin)
    if label.kind == UNIT:
        return unit_coefficient(spin) * np.eye(spin.twice_value + 1, dtype=complex)
    if label.kind == Z:
        return math.sqrt(s * (s + 1) / 3) * tensor_operator(spin, label.k, 0).astype(complex)
    a = math.sqrt(s * (s + 1) / 6)
    sign = -1 if label.q % 2 else 1
    minus = tensor_operator(spin, label.k, -label.q)
    plus = tensor_operator(spin, label.k, label.q)
    if label.kind == X:
        return a * (minus + sign * plus).astype(complex)
    return 1j * a * (minus - sign * plus)


@lru_cache(maxsize=None)
def _labels(twice_S: int) -> tuple:
    labels = [BasisLabel(UNIT)]
    for k in range(1, twice_S + 1):
        for q in range(1, k + 1):
            labels.append(BasisLabel(X, k, q))
            labels.append(BasisLabel(Y, k, q))
        labels.append(BasisLabel(Z, k))
    return tuple(labels)


def basis_labels(S) -> tuple:
    """Labels in canonical flat order; length ``(2S+1)**2``."""
    return _labels(_spin(S).twice_value)


def label_index(S, label: BasisLabel | str) -> int:
    """Flat canonical index of ``label``."""
    if isinstance(label, str):
        label = BasisLabel.parse(label)
    try:
        return basis_labels(S).index(label)
    except ValueError:
        raise ValueError(f"label {label} invalid for spin {HalfInteger.parse(S)}") from None


@lru_cache(maxsize=None)
def _basis_array(twice_S: int) -> np.ndarray:
    spin = HalfInteger(twice_S)
    arr = np.stack([hermitian_basis_element(spin, lab) for lab in _labels(twice_S)])
    arr.setflags(write=False)
    return arr


def basis_array(S) -> np.ndarray:
    """All basis matrices stacked, shape ``((2S+1)**2, 2S+1, 2S+1)``; cached, read-only."""
    return _basis_array(_spin(S).twice_value)


def full_basis(S) -> list:
    """``[(label, matrix), ...]`` in canonical order."""
    return list(zip(basis_labels(S), basis_array(S)))


def gram_check(S) -> float:
    """Max deviation of ``Tr C_r C_s`` from ``delta_rs * S(S+1)(2S+1)/3``."""
    C = basis_array(S)
    gram = np.einsum("aij,bji->ab", C, C)
    return float(np.max(np.abs(gram - norm_squared(S) * np.eye(len(C)))))
