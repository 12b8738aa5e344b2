from fractions import Fraction
from itertools import combinations
from math import gcd

import pytest
import sympy
from hypothesis import given, settings, strategies as st
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from plumbcalc.exact import (
    ExactScalar,
    IntMatrix,
    determinant,
    format_scalar,
    is_negative_definite,
    leading_principal_minors,
    parse_scalar,
    smith_normal_form,
    squarefree_part,
)


def cofactor_det(rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    return sum(
        (-1) ** j * rows[0][j] * cofactor_det([r[:j] + r[j + 1:] for r in rows[1:]])
        for j in range(n)
    )


def minors_gcd_factors(rows):
    """Invariant factors from gcds of k-minors: d_k = D_k / D_{k-1}."""
    r, c = len(rows), len(rows[0])
    out, prev = [], 1
    for k in range(1, min(r, c) + 1):
        g = 0
        for ri in combinations(range(r), k):
            for ci in combinations(range(c), k):
                g = gcd(g, cofactor_det([[rows[i][j] for j in ci] for i in ri]))
        if g == 0:
            out += [0] * (min(r, c) - k + 1)
            break
        out.append(g // prev)
        prev = g
    return tuple(out)


small = st.integers(-6, 6)


def matrices(max_n=4, square=False):
    @st.composite
    def build(draw):
        n = draw(st.integers(1, max_n))
        m = n if square else draw(st.integers(1, max_n))
        return [[draw(small) for _ in range(m)] for _ in range(n)]

    return build()


# -- determinants -------------------------------------------------------------

def test_determinant_examples():
    assert determinant([[-3]]) == -3
    assert determinant(IntMatrix.identity(3)) == 1
    a3 = [[-2, 1, 0], [1, -2, 1], [0, 1, -2]]
    assert determinant(a3) == -4
    assert leading_principal_minors(a3) == (-2, 3, -4)
    assert leading_principal_minors([[-2, 1], [1, -2]]) == (-2, 3)
    assert leading_principal_minors([[-1]]) == (-1,)


def test_determinant_rejects_nonsquare():
    with pytest.raises(ValueError):
        determinant([[1, 2]])
    with pytest.raises(ValueError):
        leading_principal_minors([[1, 2]])


@given(matrices(5, square=True))
def test_determinant_matches_cofactor_expansion(rows):
    assert determinant(rows) == cofactor_det(rows)


def test_negative_definite_examples():
    assert is_negative_definite([[-2, 1], [1, -2]])
    assert not is_negative_definite([[-1, 1], [1, -1]])
    assert not is_negative_definite([[2]])
    with pytest.raises(ValueError):
        is_negative_definite([[1, 2]])


@given(st.lists(st.integers(-6, -1), min_size=1, max_size=12))
def test_negative_definite_matches_sympy_eigen_sign(e):
    n = len(e)
    rows = [[e[i] if i == j else int(abs(i - j) == 1) for j in range(n)] for i in range(n)]
    expected = sympy.Matrix(rows).is_negative_definite
    assert is_negative_definite(rows) == expected


# -- Smith normal form -------------------------------------------------------

def test_snf_examples():
    assert smith_normal_form([[4, -5], [5, -7]]) == (1, 3)
    assert smith_normal_form([[2, 0], [0, 2]]) == (2, 2)
    assert smith_normal_form([[0]]) == (0,)


@settings(max_examples=150)
@given(matrices(4))
def test_snf_matches_minor_gcds(rows):
    got = smith_normal_form(rows)
    assert got == minors_gcd_factors(rows)
    assert all(b % a == 0 for a, b in zip(got, got[1:]) if a)


@settings(max_examples=60)
@given(matrices(4))
def test_snf_matches_sympy(rows):
    ref = sympy_snf(sympy.Matrix(rows), domain=sympy.ZZ)
    diag = tuple(abs(int(ref[i, i])) for i in range(min(ref.shape)))
    assert smith_normal_form(rows) == diag


@given(matrices(4, square=True))
def test_snf_product_is_abs_det(rows):
    d = determinant(rows)
    prod = 1
    for x in smith_normal_form(rows):
        prod *= x
    assert prod == abs(d)


# -- scalars -----------------------------------------------------------------

def test_squarefree_part():
    assert squarefree_part(84) == (2, 21)
    assert squarefree_part(0) == (0, 0)
    assert squarefree_part(1) == (1, 1)


def test_scalar_canonicalization():
    assert ExactScalar(1, 2, 4) == ExactScalar(5)
    assert ExactScalar(0, 1, 8) == ExactScalar(0, 2, 2)
    assert ExactScalar(3, 0, 7).d == 0
    assert ExactScalar(3, 5, 0) == ExactScalar(3)
    assert hash(ExactScalar(1, 2, 4)) == hash(ExactScalar(5))


def test_mixed_radicands_rejected():
    with pytest.raises(ValueError):
        ExactScalar.sqrt(2) + ExactScalar.sqrt(3)


def test_scalar_sign_is_exact():
    r21 = ExactScalar.sqrt(21)
    assert ((ExactScalar(-11) + r21) / 10).sign() < 0
    # 4.58 > sqrt(21) > 4.582: a close call
    assert (r21 - Fraction(458, 100)).sign() > 0
    assert (r21 - Fraction(4583, 1000)).sign() < 0
    assert ExactScalar(0).sign() == 0


@pytest.mark.parametrize(
    "text",
    ["-3", "7/2", "(-11-1*sqrt(21))/10", "(-9+1*sqrt(21))/6", "(0+1*sqrt(2))", "(3+2*sqrt(5))/7"],
)
def test_parse_format_roundtrip(text):
    x = parse_scalar(text)
    assert parse_scalar(format_scalar(x)) == x


def test_parse_examples():
    assert parse_scalar("(-11+1*sqrt(21))/10") == (ExactScalar(-11) + ExactScalar.sqrt(21)) / 10
    assert parse_scalar("(0+1*sqrt(2))/1") == ExactScalar.sqrt(2)
    assert parse_scalar("(4+1*sqrt(4))") == ExactScalar(6)
    for bad in ("abc", "1/0", "(1+sqrt(2))", "(1+2*sqrt(-3))"):
        with pytest.raises(ValueError):
            parse_scalar(bad)


fracs = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def scalars(draw, d):
    return ExactScalar(draw(fracs), draw(fracs), d)


@settings(max_examples=200)
@given(st.sampled_from([2, 3, 5, 21]).flatmap(lambda d: st.tuples(scalars(d), scalars(d), scalars(d))))
def test_field_axioms(triple):
    x, y, z = triple
    zero, one = ExactScalar(0), ExactScalar(1)
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + y == y + x and x * y == y * x
    assert x + zero == x and x * one == x
    assert x - x == zero
    if not x.is_zero():
        assert x * x.inverse() == one
        assert (x * y) * x.inverse() == y
        assert (y / x) * x == y


@given(st.sampled_from([2, 3, 21]).flatmap(lambda d: scalars(d)))
def test_sign_agrees_with_sympy(x):
    ref = sympy.Rational(x.a.numerator, x.a.denominator) + sympy.Rational(
        x.b.numerator, x.b.denominator
    ) * sympy.sqrt(x.d or 0)
    assert x.sign() == int(sympy.sign(ref))
    assert abs(float(x) - float(ref)) < 1e-9
