import itertools
import math

import numpy as np
import pytest

from quditbloch.basis import basis_array, basis_labels, norm_squared
from quditbloch.structure import (
    F_factor,
    e_analytic,
    e_from_traces,
    extended_triple_trace,
    g_analytic,
    g_from_traces,
    max_table_difference,
    structure_tables,
    symmetry_selftest,
)
from quditbloch.wigner import HalfInteger, six_j, three_jm

SPINS = ["1/2", "1", "3/2", "2"]


def _levi_civita_half() -> dict:
    out = {}
    for p in itertools.permutations((1, 2, 3)):
        sign = 1 if p in ((1, 2, 3), (2, 3, 1), (3, 1, 2)) else -1
        out[p] = 0.5 * sign
    return out


def _rank(S, i):
    return basis_labels(S)[i].k


def test_spin_half_tables():
    tb = structure_tables("1/2")
    assert max_table_difference(tb.e, _levi_civita_half()) <= 1e-15
    assert tb.g == {}
    assert max_table_difference(e_analytic("1/2"), _levi_civita_half()) <= 1e-15
    assert g_analytic("1/2") == {}


def test_spin_half_commutator():
    C = basis_array("1/2")
    # -i [C_x, C_y] = 2 e_123 C_z
    lhs = -1j * (C[1] @ C[2] - C[2] @ C[1])
    assert np.allclose(lhs, 2 * 0.5 * C[3], atol=1e-15)


@pytest.mark.parametrize("S", SPINS)
def test_dual_route(S):
    assert max_table_difference(e_analytic(S), e_from_traces(S)) <= 1e-12
    assert max_table_difference(g_analytic(S), g_from_traces(S)) <= 1e-12


def test_dual_route_larger_spin():
    for S in ["5/2", "3"]:
        assert max_table_difference(e_analytic(S), e_from_traces(S)) <= 1e-12
        assert max_table_difference(g_analytic(S), g_from_traces(S)) <= 1e-12


@pytest.mark.parametrize("S", SPINS)
@pytest.mark.parametrize("route", ["trace", "analytic"])
def test_parity_selection(S, route):
    tb = structure_tables(S, route)
    for (i, j, k) in tb.e:
        assert (_rank(S, i) + _rank(S, j) + _rank(S, k)) % 2 == 1
    for (i, j, k) in tb.g:
        assert (_rank(S, i) + _rank(S, j) + _rank(S, k)) % 2 == 0


def test_spin_one_even_rank_e_zero():
    # (C_{1,x}, C_{1,y}, C_{2,z}): ranks sum to 4
    labels = [str(l) for l in basis_labels("1")]
    idx = tuple(labels.index(x) for x in ("1,1,x", "1,1,y", "2,z"))
    assert idx not in structure_tables("1").e


@pytest.mark.parametrize("S", SPINS)
def test_absent_component_classes(S):
    # classes XXZ, YYZ, XXX, XYY carry no e; classes XXY, YYY, XYZ carry no g
    labels = basis_labels(S)
    tb = structure_tables(S)
    for key in tb.e:
        kinds = "".join(sorted(labels[i].kind for i in key))
        assert kinds in ("xxy", "yyy", "xyz")
    for key in tb.g:
        kinds = "".join(sorted(labels[i].kind for i in key))
        assert kinds in ("xxx", "xyy", "xxz", "yyz", "zzz")


@pytest.mark.parametrize("S", SPINS)
def test_e_diagonal_vanishes(S):
    for (i, j, k) in structure_tables(S).e:
        assert i != j and j != k and i != k


@pytest.mark.parametrize("S", SPINS)
def test_symmetry_selftest(S):
    for route in ("trace", "analytic"):
        rep = symmetry_selftest(structure_tables(S, route))
        assert rep["e_antisymmetry"] <= 1e-12
        assert rep["g_symmetry"] <= 1e-12
    assert symmetry_selftest(structure_tables("1/2"))["e_antisymmetry"] == 0.0


def test_stored_entries_above_threshold():
    for S in SPINS:
        tb = structure_tables(S)
        assert all(abs(v) > 1e-14 for v in tb.e.values())
        assert all(abs(v) > 1e-14 for v in tb.g.values())


@pytest.mark.parametrize("S", ["1/2", "1", "3/2"])
def test_jacobi_identity(S):
    e = structure_tables(S).dense("e")
    # J[i,j,k,l] = sum_m e_ijm e_mkl + e_jkm e_mil + e_kim e_mjl
    term = np.einsum("ijm,mkl->ijkl", e, e)
    J = term + term.transpose(1, 2, 0, 3) + term.transpose(2, 0, 1, 3)
    assert np.max(np.abs(J)) <= 1e-12


@pytest.mark.parametrize("S", ["1/2", "1", "3/2"])
def test_algebra_reconstruction(S):
    tb = structure_tables(S)
    C = basis_array(S)
    n, d = tb.n, C.shape[1]
    z = tb.dense("g") + 1j * tb.dense("e")
    worst = 0.0
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            rebuilt = np.einsum("k,kab->ab", z[i, j, 1:], C[1:])
            if i == j:
                rebuilt = rebuilt + tb.c_norm / d * np.eye(d)
            worst = max(worst, float(np.max(np.abs(rebuilt - C[i] @ C[j]))))
    assert worst <= 1e-12


def test_F_factor_examples():
    assert F_factor(1, 1, 3, "1") == 0.0
    expected = -1 / math.sqrt(3) * math.sqrt(0.75 * 2 * 27) * six_j(1, 1, 1, "1/2", "1/2", "1/2")
    assert F_factor(1, 1, 1, "1/2") == pytest.approx(expected, abs=1e-15)


def test_spin_one_zzz_g_matches_closed_form():
    # g for three z elements is F * 3jm(k k' k''; 0 0 0) up to the (-1)^q phase, q = 0
    S = "1"
    labels = [str(l) for l in basis_labels(S)]
    z1, z2 = labels.index("1,z"), labels.index("2,z")
    g = structure_tables(S).g
    for a, b, c in [(z1, z1, z2), (z2, z2, z2)]:
        ks = [basis_labels(S)[x].k for x in (a, b, c)]
        closed = F_factor(*ks, S) * three_jm(*ks, 0, 0, 0)
        assert g[(a, b, c)] == pytest.approx(closed, abs=1e-14)


@pytest.mark.parametrize("S", SPINS)
def test_extended_triple_trace(S):
    tb = structure_tables(S)
    tau = extended_triple_trace(tb)
    C = basis_array(S)
    direct = np.einsum("aij,bjk,cki->abc", C, C, C)
    assert np.max(np.abs(tau.real - direct.real)) <= 1e-12
    assert np.max(np.abs(tau.imag - direct.imag)) <= 1e-12
    d = HalfInteger.parse(S).twice_value + 1
    assert tau.real[0, 0, 0] == pytest.approx(tb.c_unit ** 3 * d)


def test_extended_triple_trace_examples():
    tau = extended_triple_trace(structure_tables("1/2"))
    for j in (1, 2, 3):
        assert tau.real[0, j, j] == pytest.approx(0.25)
        assert tau.imag[0, j, j] == 0.0
        assert tau.real[j, j, 0] == pytest.approx(0.25)
        assert tau.real[j, 0, j] == pytest.approx(0.25)
    tb1 = structure_tables("1")
    tau1 = extended_triple_trace(tb1)
    for (i, j, k), v in tb1.e.items():
        assert tau1.imag[i, j, k] == pytest.approx(2 * v)
    assert norm_squared("1") == 2


def test_tables_are_cached_and_immutable():
    assert structure_tables("3/2") is structure_tables("3/2")
    tau = extended_triple_trace(structure_tables("1"))
    with pytest.raises(ValueError):
        tau.real[0, 0, 0] = 1.0


def test_as_lists_format():
    doc = structure_tables("1/2").as_lists()
    entry = next(row for row in doc["e"] if row[:3] == [1, 2, 3])
    assert entry[3] == pytest.approx(0.5, abs=1e-15)
    assert len(doc["e"]) == 6
    assert doc["g"] == []
