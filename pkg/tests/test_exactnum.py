from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parastacks.exactnum import (
    BiTruncatedSeries,
    IntPolynomial,
    NotInvertibleError,
    OnlineComposer,
    RatPolynomial,
    RingMismatchError,
    TruncatedSeries,
    catalan,
    compose,
    kronecker_pack,
    kronecker_unpack,
    packing_bits,
    rebase_shifted,
    series_inverse,
    series_sqrt,
)

small_ints = st.integers(-20, 20)


def ser(cs, order=None, var="u"):
    return TruncatedSeries(cs, len(cs) - 1 if order is None else order, var)


def series_strategy(order=5, unit=False):
    head = st.sampled_from([1, -1]) if unit else small_ints
    return st.tuples(head, st.lists(small_ints, min_size=order, max_size=order)).map(
        lambda t: ser([t[0]] + t[1], order))


# --- polynomials -------------------------------------------------------------

def test_polynomial_basics():
    a = IntPolynomial([0, 1])
    p = (1 + a) * (1 - a)
    assert p == IntPolynomial([1, 0, -1])
    assert p.degree == 2
    assert IntPolynomial([]).degree == -1
    assert IntPolynomial([3, 0, 0]) == 3
    assert str(8 + 2 * a) == "8 + 2*a"
    assert (8 + 2 * a)(Fraction(1, 2)) == 9


def test_int_polynomial_refuses_fractions():
    with pytest.raises(ArithmeticError):
        IntPolynomial([Fraction(1, 2)])
    assert isinstance(IntPolynomial([1, 2]) / 2, RatPolynomial)


def test_foreign_variable_becomes_coefficient():
    a = IntPolynomial([0, 1], "a")
    s = IntPolynomial([0, 1], "s")
    p = s * a  # left operand's variable is outer: an s-polynomial over a
    assert p.var == "s"
    assert p.coeffs[1] == a
    assert (a * s).var == "a"
    assert (s + a).coeffs[0] == a


def test_nested_polynomials():
    inner = IntPolynomial([4, 2], "a")
    p = IntPolynomial([2, inner, 2], "s")
    assert p.min_coefficient() == 2
    assert p(1) == IntPolynomial([8, 2], "a")
    assert IntPolynomial.from_json(p.to_json(), "s", "a") == p


def test_json_round_trip():
    p = IntPolynomial([44, 24, 2])
    assert p.to_json() == ["44", "24", "2"]
    assert IntPolynomial.from_json(p.to_json()) == p


# --- rebasing ------------------------------------------------------------------

def test_rebase_examples():
    assert rebase_shifted(IntPolynomial([8, 2]), 1).coeffs == (6, 2)
    assert rebase_shifted(IntPolynomial([7]), 1).coeffs == (7,)
    assert rebase_shifted(IntPolynomial([44, 24, 2]), 1).coeffs == (22, 20, 2)


@given(st.lists(small_ints, max_size=8), st.integers(-3, 3))
def test_rebase_involution(cs, shift):
    p = IntPolynomial(cs)
    assert rebase_shifted(rebase_shifted(p, shift), -shift) == p


@given(st.lists(small_ints, max_size=6), st.integers(-5, 5))
def test_rebase_evaluates_consistently(cs, x):
    p = IntPolynomial(cs)
    q = rebase_shifted(p, 1)
    assert q(x + 1) == p(x)


# --- packing -------------------------------------------------------------------

def test_packing_bits_is_byte_multiple():
    assert packing_bits(1) == 8
    assert packing_bits(7) == 8
    assert packing_bits(8) == 16
    assert packing_bits(401) % 8 == 0


@given(st.lists(st.integers(0, 2 ** 16 - 1), max_size=10))
def test_kronecker_round_trip(cs):
    while cs and cs[-1] == 0:
        cs = cs[:-1]
    assert kronecker_unpack(kronecker_pack(cs, 16), 16) == cs


@given(st.lists(st.integers(-2 ** 11, 2 ** 11 - 1), max_size=10))
def test_kronecker_signed_round_trip(cs):
    while cs and cs[-1] == 0:
        cs = cs[:-1]
    assert kronecker_unpack(kronecker_pack(cs, 12), 12, signed=True) == cs


def test_kronecker_product_is_polynomial_product():
    p, q = [3, 0, 5], [1, 7]
    prod = kronecker_unpack(kronecker_pack(p, 16) * kronecker_pack(q, 16), 16)
    assert prod == list((IntPolynomial(p) * IntPolynomial(q)).coeffs)


# --- truncated series ------------------------------------------------------------

def test_series_mul_examples():
    assert ser([1, 1, 0]) * ser([1, -1, 0]) == ser([1, 0, -1])
    f = ser([3, 1, 4, 1])
    assert f * TruncatedSeries.one(3) == f
    cat = ser([catalan(n) for n in range(4)])
    assert (cat * cat)[3] == 14


def test_series_inverse_examples():
    assert series_inverse(ser([1, -1, 0, 0])) == ser([1, 1, 1, 1])
    assert series_inverse(ser([1, 2, 0])) == ser([1, -2, 4])
    # t^4 coefficient: 23 - 2*6 - ... by long division gives -12
    S = ser([1, 1, 2, 6, 23], var="t")
    assert series_inverse(S) == ser([1, -1, -1, -3, -12], var="t")
    assert S * series_inverse(S) == TruncatedSeries.one(4, "t")


def test_inverse_requires_unit():
    with pytest.raises(NotInvertibleError):
        series_inverse(ser([0, 1]))
    with pytest.raises(NotInvertibleError):
        series_inverse(ser([2, 1]))
    assert series_inverse(ser([Fraction(2), 1]))[0] == Fraction(1, 2)


def test_series_sqrt_examples():
    assert series_sqrt(TruncatedSeries.one(3)) == TruncatedSeries.one(3)
    assert series_sqrt(ser([1, -4, 0], var="v")) == ser([1, -2, -2], var="v")
    with pytest.raises(NotInvertibleError):
        series_sqrt(ser([4, 1]))


def test_order_and_ring_checks():
    with pytest.raises(RingMismatchError):
        ser([1, 1]) + ser([1, 1, 1])
    with pytest.raises(RingMismatchError):
        ser([1, 1], var="u") * ser([1, 1], var="t")
    a = IntPolynomial([0, 1], "a")
    b = IntPolynomial([0, 1], "b")
    with pytest.raises(RingMismatchError):
        ser([1, a]) + ser([1, b])
    with pytest.raises(RingMismatchError):
        ser([1, 1]).truncate(3)


def test_shift_and_valuation():
    f = ser([0, 0, 1, 2])
    assert f.valuation() == 2
    assert f.shift(-2) == ser([1, 2])
    assert ser([1, 2]).shift(1) == ser([0, 1], order=1)
    with pytest.raises(ArithmeticError):
        ser([1, 2]).shift(-1)


@settings(max_examples=60)
@given(series_strategy(), series_strategy(), series_strategy())
def test_ring_axioms(f, g, h):
    assert f * g == g * f
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h


@settings(max_examples=60)
@given(series_strategy(unit=True))
def test_inverse_round_trip(f):
    assert f * series_inverse(f) == TruncatedSeries.one(f.order)


@settings(max_examples=60)
@given(st.lists(small_ints, min_size=5, max_size=5))
def test_sqrt_round_trip(tail):
    g = ser([1] + tail)
    assert series_sqrt(g * g) == g
    r = series_sqrt(g)
    assert r * r == g


def test_polynomial_coefficients_in_series():
    a = IntPolynomial([0, 1])
    f = ser([1, 1 + a, a * a])
    inv = series_inverse(f)
    assert f * inv == TruncatedSeries.one(2)
    assert inv[1] == -(1 + a)


# --- bivariate -----------------------------------------------------------------

def test_bivariate_basics():
    orders = (3, 3)
    s = BiTruncatedSeries.monomial(1, 0, orders)
    t = BiTruncatedSeries.monomial(0, 1, orders)
    one = BiTruncatedSeries.one(orders)
    f = one - s - t
    g = f.inverse()
    # 1/(1-s-t) has binomial coefficients
    assert g[2, 1] == 3 and g[1, 1] == 2 and g[3, 3] == 20
    assert (f * g) == one
    h = (one + s * 2 + t * 3)
    assert h.sqrt() * h.sqrt() == h


# --- composition ---------------------------------------------------------------

def test_online_composer_matches_compose():
    F = [[1], [2, 1], [0, 3, 1], [1, 1, 1, 1]]
    A = ser([2, 1, -1, 3])
    U = ser([0, 1, 1, 2])
    ref = compose(F, A, U)
    comp = OnlineComposer(F, 3)
    out = []
    comp.push_A(A[0])
    for m in range(4):
        comp.push_U(U[m])
        out.append(comp.coefficient(m))
        if m < 3:
            comp.push_A(A[m + 1])
    assert out == list(ref.coeffs)


def test_online_composer_refuses_to_read_ahead():
    comp = OnlineComposer([[1], [1, 1]], 3)
    comp.push_A(1)
    comp.push_U(0)
    comp.push_U(1)
    assert comp.coefficient(1) == 2
    comp.push_U(0)
    with pytest.raises(ValueError):
        comp.coefficient(2)
    with pytest.raises(ValueError):
        OnlineComposer([[1, 1]], 2)
