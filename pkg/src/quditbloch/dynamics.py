"""Real Bloch-vector dynamics of one to three coupled qudits.

The composite state is ``R[a, b, c]`` over the product of per-spin basis
indices (0 = unit), stored flat in row-major order, with ``R[0, 0, 0] = 1``.
The Hamiltonian is ``H = 1/2 * sum h[a, b, c] C_a (x) C_b (x) C_c`` and

    rho = R[a, b, c] C_a (x) C_b (x) C_c / prod(c_i d_i).

Everything past the density<->Bloch conversions works in real arithmetic.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field as dc_field
from functools import lru_cache, reduce
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .basis import basis_array, basis_labels, norm_squared, unit_coefficient
from .field import Constant, FieldSpec, unit_profiles
from .structure import StructureTables, extended_triple_trace, structure_tables
from .wigner import HalfInteger

__all__ = [
    "SystemSpec",
    "BlochState",
    "system_tables",
    "build_hamiltonian",
    "term_operator",
    "bloch_from_density",
    "density_from_bloch",
    "product_state",
    "reduced_single",
    "partial_trace",
    "rhs_generic",
    "rhs_one",
    "rhs_two",
    "rhs_three",
    "rhs_explicit",
    "BlochGenerator",
    "compile_generator",
    "bloch_length",
    "purity",
    "energy",
    "min_eigenvalue",
    "monitors",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SystemSpec:
    spins: tuple

    def __post_init__(self):
        spins = tuple(HalfInteger.parse(s) for s in self.spins)
        if not 1 <= len(spins) <= 3:
            raise ValueError("a system holds one to three qudits")
        if any(s.twice_value < 1 for s in spins):
            raise ValueError("every spin must be >= 1/2")
        object.__setattr__(self, "spins", spins)

    @classmethod
    def of(cls, *spins) -> "SystemSpec":
        return cls(tuple(spins))

    @property
    def count(self) -> int:
        return len(self.spins)

    @property
    def dims(self) -> tuple:
        return tuple(s.twice_value + 1 for s in self.spins)

    @property
    def shape(self) -> tuple:
        """Lattice shape ``(n_i + 1, ...)`` with ``n_i = d_i**2 - 1``."""
        return tuple(d * d for d in self.dims)

    @property
    def size(self) -> int:
        return math.prod(self.shape)

    @property
    def hilbert_dim(self) -> int:
        return math.prod(self.dims)

    @property
    def c(self) -> tuple:
        return tuple(unit_coefficient(s) for s in self.spins)

    @property
    def c_norm(self) -> tuple:
        return tuple(norm_squared(s) for s in self.spins)

    def labels(self) -> list:
        """Per-component label tuples in flat order."""
        return list(itertools.product(*(basis_labels(s) for s in self.spins)))


@dataclass
class BlochState:
    system: SystemSpec
    R: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        R = np.asarray(self.R, dtype=float).reshape(-1)
        if R.size != self.system.size:
            raise ValueError(f"state has {R.size} components, system needs {self.system.size}")
        if abs(R[0] - 1.0) > 1e-12:
            raise ValueError(f"R at the all-unit index must be 1, got {R[0]!r}")
        self.R = R

    @property
    def tensor(self) -> np.ndarray:
        return self.R.reshape(self.system.shape)

    def copy(self) -> "BlochState":
        return BlochState(self.system, self.R.copy())


def system_tables(system: SystemSpec, route: str = "trace") -> tuple:
    return tuple(structure_tables(s, route) for s in system.spins)


def _as_tensor(state, system: SystemSpec | None = None) -> tuple:
    if isinstance(state, BlochState):
        return state.system, state.tensor
    if system is None:
        raise TypeError("raw arrays need an explicit system")
    return system, np.asarray(state, dtype=float).reshape(system.shape)


# --- Hamiltonian and conversions (the only complex-valued part) -------------

@lru_cache(maxsize=4096)
def _term_operator(spins: tuple, index: tuple) -> np.ndarray:
    mats = [basis_array(s)[i] for s, i in zip(spins, index)]
    out = reduce(np.kron, mats)
    out.setflags(write=False)
    return out


def term_operator(system: SystemSpec, index: Sequence[int]) -> np.ndarray:
    """``C_a (x) C_b (x) C_c`` for a composite multi-index."""
    if len(index) != system.count or any(
        not 0 <= i < n for i, n in zip(index, system.shape)
    ):
        raise IndexError(f"index {tuple(index)} outside lattice {system.shape}")
    return _term_operator(system.spins, tuple(int(i) for i in index))


def build_hamiltonian(system: SystemSpec, field: FieldSpec, t: float) -> np.ndarray:
    D = system.hilbert_dim
    H = np.zeros((D, D), dtype=complex)
    for term in field.terms:
        coeff = term.value(t)
        if coeff:
            H += 0.5 * coeff * term_operator(system, term.index)
    return H


def _contract_bases(system: SystemSpec, rho: np.ndarray) -> np.ndarray:
    # T[a, b, c] = Tr(rho C_a (x) C_b (x) C_c)
    N = system.count
    rows, cols, labels = "ijk"[:N], "lmn"[:N], "abc"[:N]
    subs = rows + cols + "," + ",".join(
        labels[i] + cols[i] + rows[i] for i in range(N)) + "->" + labels
    t = rho.reshape(system.dims + system.dims)
    return np.einsum(subs, t, *(basis_array(s) for s in system.spins), optimize=True)


def bloch_from_density(system: SystemSpec, rho: np.ndarray, *, trace_tol: float = 1e-10) -> BlochState:
    """Bloch/correlation components ``Tr(rho C_a (x) ...) / prod(c_i)``."""
    rho = np.asarray(rho, dtype=complex)
    D = system.hilbert_dim
    if rho.shape != (D, D):
        raise ValueError(f"density matrix must be {D}x{D}, got {rho.shape}")
    tr = np.trace(rho)
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"density matrix trace is {tr}, expected 1")
    T = _contract_bases(system, rho)
    R = (T.real / math.prod(system.c)).reshape(-1)
    R[0] = 1.0
    return BlochState(system, R)


def density_from_bloch(state: BlochState) -> np.ndarray:
    system = state.system
    dims = system.dims
    t = state.tensor.astype(complex)
    # contract each lattice axis with its basis stack, leaving (row, col) pairs
    for i, spin in enumerate(system.spins):
        t = np.tensordot(t, basis_array(spin), axes=([0], [0]))
    # axes now (r1, c1, r2, c2, ...); reorder to (r1, r2, ..., c1, c2, ...)
    N = system.count
    order = [2 * i for i in range(N)] + [2 * i + 1 for i in range(N)]
    rho = t.transpose(order).reshape(math.prod(dims), math.prod(dims))
    return rho / math.prod(c * d for c, d in zip(system.c, dims))


def product_state(system: SystemSpec, local_vectors: Sequence[Sequence[float]]) -> BlochState:
    """Composite state of independent qudits from their local Bloch vectors."""
    if len(local_vectors) != system.count:
        raise ValueError("need one local Bloch vector per qudit")
    full = []
    for vec, n in zip(local_vectors, system.shape):
        vec = np.asarray(vec, dtype=float).reshape(-1)
        if vec.size != n - 1:
            raise ValueError(f"local Bloch vector needs {n - 1} components, got {vec.size}")
        full.append(np.concatenate([[1.0], vec]))
    R = reduce(np.multiply.outer, full).reshape(-1)
    return BlochState(system, R)


def reduced_single(state: BlochState, which: int) -> np.ndarray:
    """Density matrix of qudit ``which`` alone, from its local Bloch vector."""
    system = state.system
    if not 0 <= which < system.count:
        raise IndexError(f"no qudit at position {which}")
    idx = [0] * system.count
    idx[which] = slice(None)
    local = state.tensor[tuple(idx)]
    spin = system.spins[which]
    rho = np.tensordot(local, basis_array(spin), axes=([0], [0]))
    return rho / (system.c[which] * system.dims[which])


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: int) -> np.ndarray:
    """Trace out every factor except ``keep``."""
    N = len(dims)
    t = np.asarray(rho).reshape(tuple(dims) + tuple(dims))
    letters = "abcdefgh"
    rows = list(letters[:N])
    cols = list(letters[:N])
    cols[keep] = "z"
    return np.einsum("".join(rows) + "".join(cols) + "->" + rows[keep] + "z", t)


# --- generic real right-hand side --------------------------------------------

def _imag_product_terms(N: int):
    """(mask, sign) pairs: Im of a product of N complex factors, expanded."""
    for mask in itertools.product((0, 1), repeat=N):
        k = sum(mask)
        if k % 2:
            yield mask, (1.0 if (k // 2) % 2 == 0 else -1.0)


@lru_cache(maxsize=64)
def _triple_traces(tables: tuple) -> tuple:
    return tuple(extended_triple_trace(t) for t in tables)


def _tau_factors(taus: tuple, swap: bool) -> list:
    if swap:
        return [(t.real.transpose(1, 0, 2), t.imag.transpose(1, 0, 2)) for t in taus]
    return [(t.real, t.imag) for t in taus]


def _apply(h: np.ndarray, R: np.ndarray, ops: Sequence[np.ndarray]) -> np.ndarray:
    """``sum_{b,a} h[b] R[a] prod_i ops_i[b_i, a_i, x_i]`` by pairwise contraction."""
    N = len(ops)
    B, A, X = "ABC"[:N], "DEF"[:N], "xyz"[:N]
    t = np.einsum(f"{B},{B[0]}{A[0]}{X[0]}->{B[1:]}{A[0]}{X[0]}", h, ops[0], optimize=True)
    t = np.einsum(f"{B[1:]}{A[0]}{X[0]},{A}->{B[1:]}{X[0]}{A[1:]}", t, R, optimize=True)
    done = X[0]
    for i in range(1, N):
        rest_b, rest_a = B[i + 1:], A[i + 1:]
        t = np.einsum(
            f"{B[i:]}{done}{A[i:]},{B[i]}{A[i]}{X[i]}->{rest_b}{done}{X[i]}{rest_a}", t, ops[i],
            optimize=True,
        )
        done += X[i]
    return t


def _operator(h: np.ndarray, ops: Sequence[np.ndarray]) -> np.ndarray:
    """Dense ``M[x, a]`` with ``sum_b h[b] prod_i ops_i[b_i, a_i, x_i]``."""
    N = len(ops)
    B, A, X = "ABC"[:N], "DEF"[:N], "xyz"[:N]
    t = h
    done_a = done_x = ""
    for i in range(N):
        t = np.einsum(
            f"{B[i:]}{done_x}{done_a},{B[i]}{A[i]}{X[i]}->{B[i + 1:]}{done_x}{X[i]}{done_a}{A[i]}",
            t, ops[i], optimize=True,
        )
        done_x += X[i]
        done_a += A[i]
    size = int(np.sqrt(t.size))
    return t.reshape(size, size)


def _expand_imag(taus: tuple, contract) -> np.ndarray:
    # Im[prod tau(b,a,x)] - Im[prod tau(a,b,x)], products expanded into real parts
    total = None
    for swap, weight in ((False, 1.0), (True, -1.0)):
        parts = _tau_factors(taus, swap)
        for mask, sign in _imag_product_terms(len(taus)):
            term = contract([parts[i][m] for i, m in enumerate(mask)])
            total = weight * sign * term if total is None else total + weight * sign * term
    return total


def rhs_generic(state, field: FieldSpec, t: float, *, system: SystemSpec | None = None,
                tables: Sequence[StructureTables] | None = None) -> np.ndarray:
    """``dR/dt`` derived mechanically from triple traces of the basis.

    ``dR_eta = sum h_beta R_alpha Im[prod tau(beta_i, alpha_i, eta_i)
    - prod tau(alpha_i, beta_i, eta_i)] / (2 prod c_norm_i)``, with each
    complex product expanded into real parts.
    """
    system, R = _as_tensor(state, system)
    tables = tuple(tables) if tables is not None else system_tables(system)
    taus = _triple_traces(tables)
    h = field.coefficients(system.shape, t)
    h[(0,) * system.count] = 0.0
    result = _expand_imag(taus, lambda ops: _apply(h, R, ops))
    result = result.reshape(-1) / (2.0 * math.prod(tb.c_norm for tb in tables))
    result[0] = 0.0
    return result


# --- precompiled sparse generator --------------------------------------------

def _term_matrix(taus: tuple, index: tuple) -> sp.csr_matrix:
    """Sparse ``M`` with ``dR/dt = M R`` for a unit coefficient on ``index``."""
    def kron_im(mats):
        re, im = sp.csr_matrix(mats[0][0]), sp.csr_matrix(mats[0][1])
        for r, i in mats[1:]:
            r, i = sp.csr_matrix(r), sp.csr_matrix(i)
            re, im = sp.kron(re, r, "csr") - sp.kron(im, i, "csr"), \
                sp.kron(re, i, "csr") + sp.kron(im, r, "csr")
        return im

    forward = [(tau.real[b], tau.imag[b]) for tau, b in zip(taus, index)]
    backward = [(tau.real[:, b, :], tau.imag[:, b, :]) for tau, b in zip(taus, index)]
    # rows alpha, columns eta; transpose to act on R
    M = (kron_im(forward) - kron_im(backward)).T.tocsr()
    M.eliminate_zeros()
    return M


class BlochGenerator:
    """``dR/dt = (M_static + sum_k f_k(t) M_k) R`` with sparse real matrices.

    One matrix is compiled per distinct time dependence: the constant part,
    a cosine and a sine per frequency (phases are folded in) and one per
    pulse window. Amplitudes live in the matrices.
    """

    DENSE_LIMIT = 1024

    def __init__(self, system: SystemSpec, field: FieldSpec,
                 tables: Sequence[StructureTables] | None = None):
        self.system = system
        self.field = field
        self.tables = tuple(tables) if tables is not None else system_tables(system)
        taus = _triple_traces(self.tables)
        norm = 1.0 / (2.0 * math.prod(t.c_norm for t in self.tables))

        groups: dict = {}
        for term in field.terms:
            if len(term.index) != system.count or any(
                not 0 <= i < n for i, n in zip(term.index, system.shape)
            ):
                raise IndexError(f"field index {term.index} outside lattice {system.shape}")
            if term.is_identity:
                log.warning("field term on the all-unit index is a global phase; ignored")
                continue
            for unit, w in unit_profiles(term.profile).items():
                coeffs = groups.setdefault(unit, {})
                coeffs[term.index] = coeffs.get(term.index, 0.0) + w

        compiled = {k: self._compile(taus, c) * norm for k, c in groups.items()}
        size = system.size
        self.static = compiled.pop(Constant(1.0), sp.csr_matrix((size, size))).tocsr()
        self.varying = list(compiled.items())

    def _compile(self, taus: tuple, coeffs: dict) -> sp.csr_matrix:
        system = self.system
        if system.size <= self.DENSE_LIMIT:
            h = np.zeros(system.shape)
            for idx, v in coeffs.items():
                h[idx] = v
            M = sp.csr_matrix(_expand_imag(taus, lambda ops: _operator(h, ops)))
        else:
            M = sp.csr_matrix((system.size, system.size))
            for idx, v in coeffs.items():
                if v:
                    M = M + v * _term_matrix(taus, idx)
            M = M.tocsr()
        M.eliminate_zeros()
        return M

    def matrix(self, t: float) -> sp.csr_matrix:
        M = self.static.copy()
        for prim, Mk in self.varying:
            M = M + prim.shape(t) * Mk
        return M.tocsr()

    def __call__(self, R: np.ndarray, t: float) -> np.ndarray:
        out = self.static @ R
        for prim, Mk in self.varying:
            f = prim.shape(t)
            if f:
                out = out + f * (Mk @ R)
        return out

    rhs = __call__


def compile_generator(system: SystemSpec, field: FieldSpec,
                      tables: Sequence[StructureTables] | None = None) -> BlochGenerator:
    return BlochGenerator(system, field, tables)


# --- explicit right-hand sides -----------------------------------------------

def _eg(tables: Sequence[StructureTables]):
    out = []
    for t in tables:
        out.append((t.dense("e")[1:, 1:, 1:], t.dense("g")[1:, 1:, 1:]))
    return out


_PLANS: dict = {}


def _plan(subs: str, ndims: tuple) -> list:
    """Greedy pairwise order: start from the largest operand, then absorb the
    operand sharing most indices with the running intermediate."""
    inputs, output = subs.split("->")
    terms = inputs.split(",")
    start = max(range(len(terms)), key=lambda i: (len(terms[i]), -i))
    current, remaining, steps = terms[start], [i for i in range(len(terms)) if i != start], []
    while remaining:
        nxt = max(remaining, key=lambda i: (len(set(terms[i]) & set(current)), -len(terms[i])))
        remaining.remove(nxt)
        later = set(output).union(*(terms[i] for i in remaining))
        merged = current + "".join(c for c in terms[nxt] if c not in current)
        keep = "".join(c for c in merged if c in later)
        steps.append((nxt, f"{current},{terms[nxt]}->{keep}"))
        current = keep
    return [start, steps, f"{current}->{output}"]


def _ein(subs, *ops):
    key = (subs, len(ops))
    plan = _PLANS.get(key)
    if plan is None:
        plan = _PLANS[key] = _plan(subs, tuple(o.ndim for o in ops))
    start, steps, final = plan
    x = ops[start]
    for idx, step in steps:
        x = np.einsum(step, x, ops[idx], optimize=True)
    return np.einsum(final, x)


def _triple(t1, t2, t3, h, R):
    # sum t1[j,i,m] t2[l,k,n] t3[r,q,p] h[j,l,r] R[i,k,q], contracted pairwise
    x = np.tensordot(h, t1, axes=([0], [0]))           # l r i m
    x = np.tensordot(x, R, axes=([2], [0]))            # l r m k q
    x = np.tensordot(x, t2, axes=([0, 3], [0, 1]))     # r m q n
    x = np.tensordot(x, t3, axes=([0, 2], [0, 1]))     # m n p
    return x


def rhs_one(state, field: FieldSpec, t: float, *, system: SystemSpec | None = None,
            tables: Sequence[StructureTables] | None = None) -> np.ndarray:
    """One qudit: ``dR_l = e_ijl h_i R_j``."""
    system, R = _as_tensor(state, system)
    if system.count != 1:
        raise ValueError("rhs_one needs a one-qudit system")
    tables = tables or system_tables(system)
    ((e, _),) = _eg(tables)
    h = field.coefficients(system.shape, t)
    out = np.zeros(system.shape)
    out[1:] = _ein("ijl,i,j->l", e, h[1:], R[1:])
    return out.reshape(-1)


def rhs_two(state, field: FieldSpec, t: float, *, system: SystemSpec | None = None,
            tables: Sequence[StructureTables] | None = None) -> np.ndarray:
    """Two qudits: local vectors ``R_m0``, ``R_0m`` and correlations ``R_mn``."""
    system, R = _as_tensor(state, system)
    if system.count != 2:
        raise ValueError("rhs_two needs a two-qudit system")
    tables = tables or system_tables(system)
    (e1, g1), (e2, g2) = _eg(tables)
    c1, c2 = system.c
    h = field.coefficients(system.shape, t)
    h10, h01, h11 = h[1:, 0], h[0, 1:], h[1:, 1:]
    R10, R01, R11 = R[1:, 0], R[0, 1:], R[1:, 1:]

    out = np.zeros(system.shape)
    out[1:, 0] = c2 * (_ein("pim,p,i->m", e1, h10, R10) + _ein("pim,pl,il->m", e1, h11, R11))
    out[0, 1:] = c1 * (_ein("pim,p,i->m", e2, h01, R01) + _ein("pim,lp,li->m", e2, h11, R11))
    out[1:, 1:] = (
        c2 * _ein("pim,pn,i->mn", e1, h11, R10)
        + c2 * _ein("pim,p,in->mn", e1, h10, R11)
        + _ein("pim,rln,pr,il->mn", e1, g2, h11, R11)
        + c1 * _ein("pin,mp,i->mn", e2, h11, R01)
        + c1 * _ein("pin,p,mi->mn", e2, h01, R11)
        + _ein("pin,rlm,rp,li->mn", e2, g1, h11, R11)
    )
    return out.reshape(-1)


def rhs_three(state, field: FieldSpec, t: float, *, system: SystemSpec | None = None,
              tables: Sequence[StructureTables] | None = None) -> np.ndarray:
    """Three qudits: local vectors, pair correlations and the triple correlation.

    Index placement follows the hand-expanded equations, with four slips
    corrected (see README, "Explicit three-qudit equations").
    """
    system, R = _as_tensor(state, system)
    if system.count != 3:
        raise ValueError("rhs_three needs a three-qudit system")
    tables = tables or system_tables(system)
    (e1, g1), (e2, g2), (e3, g3) = _eg(tables)
    c1, c2, c3 = system.c
    h = field.coefficients(system.shape, t)
    s = slice(1, None)
    h100, h010, h001 = h[s, 0, 0], h[0, s, 0], h[0, 0, s]
    h110, h101, h011, h111 = h[s, s, 0], h[s, 0, s], h[0, s, s], h[s, s, s]
    R100, R010, R001 = R[s, 0, 0], R[0, s, 0], R[0, 0, s]
    R110, R101, R011, R111 = R[s, s, 0], R[s, 0, s], R[0, s, s], R[s, s, s]

    out = np.zeros(system.shape)
    out[s, 0, 0] = c2 * c3 * (
        _ein("jim,j,i->m", e1, h100, R100)
        + _ein("jim,jk,ik->m", e1, h110, R110)
        + _ein("jim,jk,ik->m", e1, h101, R101)
        + _ein("jim,jkr,ikr->m", e1, h111, R111)
    )
    out[0, s, 0] = c1 * c3 * (
        _ein("ikn,i,k->n", e2, h010, R010)
        + _ein("ikn,ji,jk->n", e2, h110, R110)
        + _ein("ikn,ij,kj->n", e2, h011, R011)
        + _ein("ikn,jir,jkr->n", e2, h111, R111)
    )
    out[0, 0, s] = c1 * c2 * (
        _ein("ijp,i,j->p", e3, h001, R001)
        + _ein("ijp,ki,kj->p", e3, h101, R101)
        + _ein("ijp,ki,kj->p", e3, h011, R011)
        + _ein("ijp,lki,lkj->p", e3, h111, R111)
    )
    out[s, s, 0] = (
        c2 * c3 * _ein("jim,j,in->mn", e1, h100, R110)
        + c1 * c3 * _ein("jkn,j,mk->mn", e2, h010, R110)
        + c2 * c3 * _ein("jim,jn,i->mn", e1, h110, R100)
        + c1 * c3 * _ein("qkn,mq,k->mn", e2, h110, R010)
        + c3 * (_ein("jim,kqn,jq,ik->mn", e1, g2, h110, R110)
                + _ein("jim,qkn,jq,ik->mn", g1, e2, h110, R110))
        + c2 * c3 * _ein("jim,jq,inq->mn", e1, h101, R111)
        + c1 * c3 * _ein("jkn,jq,mkq->mn", e2, h011, R111)
        + c2 * c3 * _ein("jim,jnq,iq->mn", e1, h111, R101)
        + c1 * c3 * _ein("ikn,miq,kq->mn", e2, h111, R011)
        + c3 * (_ein("jim,lkn,jlq,ikq->mn", e1, g2, h111, R111)
                + _ein("jim,lkn,jlq,ikq->mn", g1, e2, h111, R111))
    )
    out[s, 0, s] = (
        c2 * c3 * _ein("jim,j,ip->mp", e1, h100, R101)
        + c1 * c2 * _ein("kqp,k,mq->mp", e3, h001, R101)
        + c2 * c3 * _ein("jim,jp,i->mp", e1, h101, R100)
        + c1 * c2 * _ein("kqp,mk,q->mp", e3, h101, R001)
        + c2 * (_ein("jim,kqp,jk,iq->mp", e1, g3, h101, R101)
                + _ein("jim,kqp,jk,iq->mp", g1, e3, h101, R101))
        + c2 * c3 * _ein("jim,jk,ikp->mp", e1, h110, R111)
        + c1 * c2 * _ein("lqp,kl,mkq->mp", e3, h011, R111)
        + c1 * c2 * _ein("lqp,mkl,kq->mp", e3, h111, R011)
        + c2 * c3 * _ein("jim,jkp,ik->mp", e1, h111, R110)
        + c2 * (_ein("jim,rqp,jkr,ikq->mp", e1, g3, h111, R111)
                + _ein("jim,rqp,jkr,ikq->mp", g1, e3, h111, R111))
    )
    out[0, s, s] = (
        c1 * c3 * _ein("ikn,i,kp->np", e2, h010, R011)
        + c1 * c2 * _ein("iqp,i,nq->np", e3, h001, R011)
        + c1 * c3 * _ein("ikn,ip,k->np", e2, h011, R010)
        + c1 * c2 * _ein("kqp,nk,q->np", e3, h011, R001)
        + c1 * (_ein("ikn,jqp,ij,kq->np", e2, g3, h011, R011)
                + _ein("ikn,jqp,ij,kq->np", g2, e3, h011, R011))
        + c1 * c3 * _ein("lkn,il,ikp->np", e2, h110, R111)
        + c1 * c2 * _ein("lqp,il,inq->np", e3, h101, R111)
        + c1 * c3 * _ein("qkn,iqp,ik->np", e2, h111, R110)
        + c1 * c2 * _ein("lqp,inl,iq->np", e3, h111, R101)
        + c1 * (_ein("rkn,lqp,irl,ikq->np", e2, g3, h111, R111)
                + _ein("rkn,lqp,irl,ikq->np", g2, e3, h111, R111))
    )
    out[s, s, s] = (
        c2 * c3 * _ein("jim,jnp,i->mnp", e1, h111, R100)
        + c1 * c3 * _ein("qkn,mqp,k->mnp", e2, h111, R010)
        + c1 * c2 * _ein("kqp,mnk,q->mnp", e3, h111, R001)
        + c2 * c3 * _ein("jim,jp,in->mnp", e1, h101, R110)
        + c1 * c3 * _ein("jkn,jp,mk->mnp", e2, h011, R110)
        + c3 * (_ein("jim,qkn,jqp,ik->mnp", e1, g2, h111, R110)
                + _ein("jim,qkn,jqp,ik->mnp", g1, e2, h111, R110))
        + c2 * c3 * _ein("jim,jn,ip->mnp", e1, h110, R101)
        + c1 * c2 * _ein("kqp,nk,mq->mnp", e3, h011, R101)
        + c2 * (_ein("jim,lqp,jnl,iq->mnp", e1, g3, h111, R101)
                + _ein("jim,lqp,jnl,iq->mnp", g1, e3, h111, R101))
        + c1 * c3 * _ein("ikn,mi,kp->mnp", e2, h110, R011)
        + c1 * c2 * _ein("iqp,mi,nq->mnp", e3, h101, R011)
        + c1 * (_ein("ikn,lqp,mil,kq->mnp", e2, g3, h111, R011)
                + _ein("ikn,lqp,mil,kq->mnp", g2, e3, h111, R011))
        + c2 * c3 * _ein("jim,j,inp->mnp", e1, h100, R111)
        + c1 * c3 * _ein("jkn,j,mkp->mnp", e2, h010, R111)
        + c3 * (_ein("jim,lkn,jl,ikp->mnp", e1, g2, h110, R111)
                + _ein("jim,lkn,jl,ikp->mnp", g1, e2, h110, R111))
        + c1 * c2 * _ein("jqp,j,mnq->mnp", e3, h001, R111)
        + c2 * (_ein("jim,lqp,jl,inq->mnp", e1, g3, h101, R111)
                + _ein("jim,lqp,jl,inq->mnp", g1, e3, h101, R111))
        + c1 * (_ein("jkn,lqp,jl,mkq->mnp", e2, g3, h011, R111)
                + _ein("jkn,lqp,jl,mkq->mnp", g2, e3, h011, R111))
        + _triple(e1, g2, g3, h111, R111)
        + _triple(g1, e2, g3, h111, R111)
        + _triple(g1, g2, e3, h111, R111)
        - _triple(e1, e2, e3, h111, R111)
    )
    return out.reshape(-1)


def rhs_explicit(state, field: FieldSpec, t: float, **kw) -> np.ndarray:
    """Dispatch to the hand-expanded right-hand side for the system size."""
    system = state.system if isinstance(state, BlochState) else kw["system"]
    return (rhs_one, rhs_two, rhs_three)[system.count - 1](state, field, t, **kw)


# --- invariants ---------------------------------------------------------------

def bloch_length(state: BlochState) -> float:
    return float(math.sqrt(np.dot(state.R[1:], state.R[1:])))


def purity(state: BlochState) -> float:
    return (1.0 + float(np.dot(state.R[1:], state.R[1:]))) / state.system.hilbert_dim


def energy(state: BlochState, field: FieldSpec, t: float) -> float:
    """``Tr(H rho) = 1/2 prod(c_i) sum_beta h_beta R_beta``."""
    h = field.coefficients(state.system.shape, t).reshape(-1)
    return 0.5 * math.prod(state.system.c) * float(np.dot(h, state.R))


def min_eigenvalue(state: BlochState) -> float:
    rho = density_from_bloch(state)
    return float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])


MONITORS = ("bloch_length", "purity", "energy", "min_eig")


def monitors(state: BlochState, field: FieldSpec, t: float, names: Sequence[str] = MONITORS) -> dict:
    funcs = {
        "bloch_length": lambda: bloch_length(state),
        "purity": lambda: purity(state),
        "energy": lambda: energy(state, field, t),
        "min_eig": lambda: min_eigenvalue(state),
    }
    return {name: funcs[name]() for name in names}
