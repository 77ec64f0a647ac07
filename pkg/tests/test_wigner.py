import math
import threading
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Rational
from sympy.physics.wigner import wigner_3j, wigner_6j

from quditbloch.wigner import HalfInteger, six_j, three_jm, triangle_ok


def _h(twice):
    return HalfInteger(twice)


def _rat(twice):
    return Rational(twice, 2)


# -- HalfInteger --------------------------------------------------------------

@pytest.mark.parametrize("text,twice", [("1/2", 1), ("1", 2), ("3/2", 3), (" 5/2 ", 5), ("0", 0)])
def test_halfinteger_parse_strings(text, twice):
    assert HalfInteger.parse(text).twice_value == twice


def test_halfinteger_other_inputs():
    assert HalfInteger.parse(1.5).twice_value == 3
    assert HalfInteger.parse(Fraction(5, 2)).twice_value == 5
    assert HalfInteger.parse(2).twice_value == 4
    assert str(HalfInteger(3)) == "3/2"
    assert str(HalfInteger(4)) == "2"
    assert float(HalfInteger(7)) == 3.5


@pytest.mark.parametrize("bad", ["0.3", "1/3", "abc", 0.25])
def test_halfinteger_rejects(bad):
    with pytest.raises(ValueError):
        HalfInteger.parse(bad)


# -- triangle rule ------------------------------------------------------------

@pytest.mark.parametrize("a,b,c,ok", [
    ("1/2", "1/2", 1, True),
    (1, 1, 3, False),
    ("1/2", 1, 1, False),
    (2, 2, 4, True),
    (2, 2, 0, True),
    ("3/2", "3/2", 3, True),
])
def test_triangle_examples(a, b, c, ok):
    assert triangle_ok(a, b, c) is ok


# -- 3jm examples -------------------------------------------------------------

def test_three_jm_spin_half_singlet():
    assert three_jm("1/2", "1/2", 0, "1/2", "-1/2", 0) == pytest.approx(1 / math.sqrt(2), abs=1e-15)


def test_three_jm_closed_form_j_j_0():
    for tj in range(0, 13):
        for tm in range(-tj, tj + 1, 2):
            expected = (-1) ** ((tj - tm) // 2) / math.sqrt(tj + 1)
            assert three_jm(_h(tj), _h(tj), 0, _h(tm), _h(-tm), 0) == pytest.approx(expected, abs=1e-14)


def test_three_jm_111_10m1_sign():
    # Racah sum and the sympy oracle agree on the negative sign
    assert three_jm(1, 1, 1, 1, 0, -1) == pytest.approx(-1 / math.sqrt(6), abs=1e-15)
    assert float(wigner_3j(1, 1, 1, 1, 0, -1)) == pytest.approx(-1 / math.sqrt(6), abs=1e-15)


@pytest.mark.parametrize("args", [
    (1, 1, 3, 0, 0, 0),
    (1, 1, 1, 1, 1, -1),
    (1, 1, 1, 0, 0, 0),
    (2, 2, 2, 3, -3, 0),
])
def test_three_jm_exact_zeros(args):
    value = three_jm(*args)
    assert value == 0.0 and type(value) is float


def test_three_jm_rejects_mismatched_parity():
    with pytest.raises(ValueError):
        three_jm(1, 1, 1, "1/2", "-1/2", 0)


# -- 6j examples --------------------------------------------------------------

def test_six_j_examples():
    assert six_j(1, 1, 3, 1, 1, 1) == 0.0
    assert six_j(1, 1, 1, 1, 1, 1) == pytest.approx(1 / 6, abs=1e-15)
    assert six_j(1, 1, 0, 1, 1, 1) == pytest.approx(-1 / 3, abs=1e-15)


def test_six_j_closed_form_zero_column():
    for tj in range(0, 9):
        for tk in range(0, 9):
            for tl in range(abs(tj - tk), tj + tk + 1, 2):
                expected = (-1) ** ((tj + tk + tl) // 2) / math.sqrt((tj + 1) * (tk + 1))
                assert six_j(_h(tj), _h(tk), _h(tl), _h(tk), _h(tj), 0) == pytest.approx(expected, abs=1e-14)


# -- sympy as an independent oracle ---------------------------------------------

@st.composite
def valid_3jm(draw, jmax=12):
    tj1 = draw(st.integers(0, jmax))
    tj2 = draw(st.integers(0, jmax))
    tj3 = draw(st.integers(abs(tj1 - tj2), tj1 + tj2).filter(lambda x: (x - tj1 - tj2) % 2 == 0))
    tm1 = draw(st.sampled_from(range(-tj1, tj1 + 1, 2)))
    tm2 = draw(st.sampled_from(range(-tj2, tj2 + 1, 2)))
    tm3 = -tm1 - tm2
    if abs(tm3) > tj3:
        tm3 = draw(st.sampled_from(range(-tj3, tj3 + 1, 2)))
    return tj1, tj2, tj3, tm1, tm2, tm3


@settings(max_examples=200, deadline=None)
@given(valid_3jm())
def test_three_jm_matches_sympy(t):
    ours = three_jm(*map(_h, t))
    ref = float(wigner_3j(*map(_rat, t)))
    assert ours == pytest.approx(ref, abs=1e-13)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(0, 10), min_size=6, max_size=6))
def test_six_j_matches_sympy(t):
    ours = six_j(*map(_h, t))
    try:
        ref = float(wigner_6j(*map(_rat, t)))
    except ValueError:
        ref = 0.0  # sympy rejects non-integer triad sums
    assert ours == pytest.approx(ref, abs=1e-13)


# -- symmetry properties ------------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(valid_3jm())
def test_three_jm_symmetries(t):
    tj1, tj2, tj3, tm1, tm2, tm3 = t
    v = three_jm(*map(_h, t))
    phase = (-1) ** ((tj1 + tj2 + tj3) // 2)
    cyclic = three_jm(*map(_h, (tj2, tj3, tj1, tm2, tm3, tm1)))
    swapped = three_jm(*map(_h, (tj2, tj1, tj3, tm2, tm1, tm3)))
    negated = three_jm(*map(_h, (tj1, tj2, tj3, -tm1, -tm2, -tm3)))
    assert cyclic == pytest.approx(v, abs=1e-14)
    assert swapped == pytest.approx(phase * v, abs=1e-14)
    assert negated == pytest.approx(phase * v, abs=1e-14)


@st.composite
def six_args(draw):
    return draw(st.lists(st.integers(0, 8), min_size=6, max_size=6))


@settings(max_examples=200, deadline=None)
@given(six_args())
def test_six_j_symmetries(t):
    a, b, c, d, e, f = map(_h, t)
    v = six_j(a, b, c, d, e, f)
    for perm in [(b, a, c, e, d, f), (a, c, b, d, f, e), (c, b, a, f, e, d), (b, c, a, e, f, d)]:
        assert six_j(*perm) == pytest.approx(v, abs=1e-14)
    # upper/lower exchange in two columns
    assert six_j(d, e, c, a, b, f) == pytest.approx(v, abs=1e-14)
    assert six_j(a, e, f, d, b, c) == pytest.approx(v, abs=1e-14)


@pytest.mark.parametrize("tj1,tj2", [(1, 1), (2, 2), (2, 3), (4, 6), (8, 8), (7, 5)])
def test_three_jm_orthogonality(tj1, tj2):
    for tj3 in range(abs(tj1 - tj2), tj1 + tj2 + 1, 2):
        for tj3p in range(abs(tj1 - tj2), tj1 + tj2 + 1, 2):
            for tm3 in range(-min(tj3, tj3p), min(tj3, tj3p) + 1, 2):
                total = 0.0
                for tm1 in range(-tj1, tj1 + 1, 2):
                    tm2 = -tm1 - tm3
                    if abs(tm2) > tj2:
                        continue
                    a = three_jm(*map(_h, (tj1, tj2, tj3, tm1, tm2, tm3)))
                    b = three_jm(*map(_h, (tj1, tj2, tj3p, tm1, tm2, tm3)))
                    total += (tj3 + 1) * a * b
                assert total == pytest.approx(1.0 if tj3 == tj3p else 0.0, abs=1e-12)


def test_large_j_precision():
    # float factorial ratios would lose digits here
    t = (40, 40, 40, 10, -20, 10)
    assert three_jm(*map(_h, t)) == pytest.approx(float(wigner_3j(*map(_rat, t))), rel=1e-12, abs=1e-16)


def test_concurrent_evaluation_is_consistent():
    args = [(_h(a), _h(a), _h(2 * a), _h(0), _h(0), _h(0)) for a in range(30, 60, 2)]
    expected = [float(wigner_3j(*map(_rat, x))) for x in [(a, a, 2 * a, 0, 0, 0) for a in range(30, 60, 2)]]
    results = {}

    def work(tid):
        results[tid] = [three_jm(*x) for x in args]

    threads = [threading.Thread(target=work, args=(i,)) for i in range(8)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    for res in results.values():
        assert res == pytest.approx(expected, abs=1e-14)
