"""Time-dependent Hamiltonian coefficients ``h(t)`` on the composite basis lattice."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = ["Constant", "Cosine", "Sine", "Pulse", "FieldTerm", "FieldSpec", "Primitive", "unit_profiles"]


@dataclass(frozen=True)
class Constant:
    amplitude: float

    def shape(self, t: float) -> float:
        return 1.0

    @property
    def key(self) -> tuple:
        return ("const",)

    @property
    def is_static(self) -> bool:
        return True

    def decompose(self) -> list:
        return [(Constant(1.0), self.amplitude)]


@dataclass(frozen=True)
class Cosine:
    amplitude: float
    omega: float
    phase: float = 0.0

    def shape(self, t: float) -> float:
        return math.cos(self.omega * t + self.phase)

    @property
    def key(self) -> tuple:
        return ("cos", self.omega, self.phase)

    @property
    def is_static(self) -> bool:
        return self.omega == 0.0

    def decompose(self) -> list:
        """``A cos(wt + p) = A cos p cos wt - A sin p sin wt``."""
        a, p = self.amplitude, self.phase
        if self.is_static:
            return [(Constant(1.0), a * math.cos(p))]
        return [(Cosine(1.0, self.omega), a * math.cos(p)), (Sine(1.0, self.omega), -a * math.sin(p))]


@dataclass(frozen=True)
class Sine:
    amplitude: float
    omega: float
    phase: float = 0.0

    def shape(self, t: float) -> float:
        return math.sin(self.omega * t + self.phase)

    @property
    def key(self) -> tuple:
        return ("sin", self.omega, self.phase)

    @property
    def is_static(self) -> bool:
        return self.omega == 0.0

    def decompose(self) -> list:
        a, p = self.amplitude, self.phase
        if self.is_static:
            return [(Constant(1.0), a * math.sin(p))]
        return [(Cosine(1.0, self.omega), a * math.sin(p)), (Sine(1.0, self.omega), a * math.cos(p))]


@dataclass(frozen=True)
class Pulse:
    """Rectangular pulse, on for ``t_on <= t < t_off``."""

    amplitude: float
    t_on: float
    t_off: float

    def __post_init__(self):
        if self.t_off < self.t_on:
            raise ValueError("pulse must switch off after it switches on")

    def shape(self, t: float) -> float:
        return 1.0 if self.t_on <= t < self.t_off else 0.0

    @property
    def key(self) -> tuple:
        return ("pulse", self.t_on, self.t_off)

    @property
    def is_static(self) -> bool:
        return False

    def decompose(self) -> list:
        return [(Pulse(1.0, self.t_on, self.t_off), self.amplitude)]


Primitive = Union[Constant, Cosine, Sine, Pulse]


def unit_profiles(profile) -> dict:
    """Collect a sum of primitives into ``{unit-amplitude primitive: weight}``.

    Oscillations sharing a frequency land on the same cosine and sine keys
    whatever their phases, so precompiled generators need at most two
    matrices per frequency.
    """
    out: dict = {}
    for prim in profile:
        for unit, w in prim.decompose():
            out[unit] = out.get(unit, 0.0) + w
    return {unit: w for unit, w in out.items() if w != 0.0}


@dataclass(frozen=True)
class FieldTerm:
    """One coefficient channel: a composite multi-index and a sum of primitives."""

    index: tuple
    profile: tuple

    def __post_init__(self):
        object.__setattr__(self, "index", tuple(int(i) for i in self.index))
        prof = self.profile
        if not isinstance(prof, tuple):
            prof = tuple(prof) if isinstance(prof, (list,)) else (prof,)
        object.__setattr__(self, "profile", prof)

    def value(self, t: float) -> float:
        return sum(p.amplitude * p.shape(t) for p in self.profile)

    @property
    def is_identity(self) -> bool:
        return all(i == 0 for i in self.index)


@dataclass(frozen=True)
class FieldSpec:
    """Sparse list of coefficient channels; repeated indices add up."""

    terms: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    @property
    def is_static(self) -> bool:
        return all(p.is_static for term in self.terms for p in term.profile)

    def coefficients(self, shape: tuple, t: float) -> np.ndarray:
        """Dense coefficient tensor ``h(t)`` of the given lattice shape."""
        h = np.zeros(shape)
        for term in self.terms:
            if len(term.index) != len(shape) or any(
                not 0 <= i < n for i, n in zip(term.index, shape)
            ):
                raise IndexError(f"field index {term.index} outside lattice {shape}")
            h[term.index] += term.value(t)
        return h

    @classmethod
    def from_array(cls, h: np.ndarray) -> "FieldSpec":
        """Constant field with one term per nonzero entry of ``h``."""
        h = np.asarray(h, dtype=float)
        return cls(tuple(
            FieldTerm(tuple(int(i) for i in idx), (Constant(float(h[tuple(idx)])),))
            for idx in np.argwhere(h != 0)
        ))
