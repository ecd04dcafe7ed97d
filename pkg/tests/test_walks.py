from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parastacks.exactnum import BiTruncatedSeries, IntPolynomial, TruncatedSeries, catalan, rebase_shifted
from parastacks.walks import (
    A_from_w00j,
    BruteBoundError,
    brute_primitive_quarter_loops,
    brute_quarter_loops,
    brute_shuffle_class_polynomial,
    brute_walk_polynomial,
    closed_forms,
    constant_term_lemma_check,
    constant_term_lemma_sides,
    corner_count,
    fixed_projection_series,
    halfplane_series,
    kernel_equation_residual,
    loop_table_oracle,
    primitive_quarter_loop_series,
    projection_closed_form,
    quarter_loop_series,
    quarter_loop_values,
    quarter_loop_words,
    refined_to_bivariate,
    shuffle_class_polynomial,
    t_series_and_A,
    unconfined_series,
    w00j,
    walk_polynomial,
)

a = IntPolynomial([0, 1], "a")
s = IntPolynomial([0, 1], "s")


def test_corner_count():
    assert corner_count("ENWS") == 1
    assert corner_count("ESNW") == 2
    assert corner_count("WNSE") == 0


def test_quarter_loop_examples():
    Q = quarter_loop_series(6)
    assert list(Q.coeffs[:4]) == [1, 2, 8 + 2 * a, 44 + 24 * a + 2 * a ** 2]
    assert Q[2](1) == 10


def test_quarter_loops_at_one_are_catalan_products():
    Q = quarter_loop_series(20)
    assert [Q[n](1) if isinstance(Q[n], IntPolynomial) else Q[n] for n in range(21)] == \
        [catalan(n) * catalan(n + 1) for n in range(21)]
    assert closed_forms("Q_at_1", 5)[5] == 42 * 132


def test_brute_quarter_loops_examples():
    assert brute_quarter_loops(1) == 2
    assert brute_quarter_loops(2) == 8 + 2 * a
    assert brute_quarter_loops(3)(1) == 70
    with pytest.raises(BruteBoundError):
        brute_quarter_loops(9)


def test_dp_matches_enumeration():
    Q = quarter_loop_series(6)
    Qr = quarter_loop_series(6, refine_s=True)
    P = primitive_quarter_loop_series(6)
    for n in range(7):
        assert Q[n] == brute_quarter_loops(n)
        assert Qr[n] == brute_quarter_loops(n, refine_s=True)
        if n:
            assert P[n] == brute_primitive_quarter_loops(n)


def test_coefficient_shape():
    Q = quarter_loop_series(12)
    for n in range(1, 13):
        assert Q[n].degree <= n - 1
        assert min(Q[n].coeffs) >= 0


def test_refined_specialises_to_plain():
    Q = quarter_loop_series(8)
    Qr = quarter_loop_series(8, refine_s=True)
    for n in range(9):
        total = IntPolynomial([], "a")
        for c in (Qr[n].coeffs if isinstance(Qr[n], IntPolynomial) else [Qr[n]]):
            total = total + c
        assert total == Q[n]
    flat = refined_to_bivariate(Qr)
    assert flat[(2, 1, 1)] == 2 and flat[(0, 0, 0)] == 1


def test_numeric_regimes_agree():
    Q = quarter_loop_series(15)
    for x in (Fraction(1, 3), Fraction(-2, 5), Fraction(3)):
        vals = quarter_loop_values(15, x)
        assert vals == [Q[n](x) if isinstance(Q[n], IntPolynomial) else Q[n] for n in range(16)]
    floats = quarter_loop_values(15, 0.5)
    exact = quarter_loop_values(15, Fraction(1, 2))
    assert all(abs(f - float(e)) <= 1e-12 * float(e) for f, e in zip(floats, exact))


def test_primitive_examples():
    P = primitive_quarter_loop_series(2)
    assert list(P.coeffs) == [0, 2, 4 + 2 * a]


def test_refined_at_minus_one_matches_closed_form():
    Qr = quarter_loop_series(10, refine_s=True)
    closed = closed_forms("Q_at_minus1", 10)
    assert closed[2][1] == 2
    for n in range(11):
        row = Qr[n] if isinstance(Qr[n], IntPolynomial) else IntPolynomial([Qr[n]], "s")
        at = IntPolynomial([c(-1) if isinstance(c, IntPolynomial) else c for c in row.coeffs], "s")
        assert at == closed[n]


def test_shuffle_identity_at_one():
    Qr = quarter_loop_series(15, refine_s=True)
    closed = closed_forms("Q_refined_at_1", 15)
    for n in range(16):
        row = Qr[n] if isinstance(Qr[n], IntPolynomial) else IntPolynomial([Qr[n]], "s")
        at = IntPolynomial([c(1) if isinstance(c, IntPolynomial) else c for c in row.coeffs], "s")
        assert at == closed[n]


def test_closed_forms_start_at_one():
    for name in ("Q_at_1", "Q_refined_at_1", "Q_at_minus1"):
        assert closed_forms(name, 0)[0] == 1
    for name in ("W00_at_1", "W00_at_minus1", "H00_at_1", "H00_at_minus1"):
        assert closed_forms(name, 0)[0, 0] == 1
    with pytest.raises(ValueError):
        closed_forms("nope", 3)


def test_walk_polynomials_match_enumeration():
    for region in ("unconfined", "quadrant", "halfplane", "halfplane_x"):
        for end in ((0, 0), (1, 1), (-1, 2), (2, 0)):
            for length in range(7):
                assert walk_polynomial(length, end, region) == brute_walk_polynomial(length, end, region)


def test_loop_tables():
    W = unconfined_series(8)
    H = halfplane_series(8)
    assert W == loop_table_oracle(8, "unconfined")
    assert H == loop_table_oracle(8, "halfplane")
    # W00(1, u, u) at u^2: binom(2,1)**2 loops of length 2
    assert sum(W[i, 2 - i](1) for i in range(3)) == 4
    assert W[2, 2](-1) == 8
    assert H[0, 2] == 1


def test_loop_tables_closed_forms():
    N = 12
    for table, name in ((unconfined_series(N), "W00"), (halfplane_series(N), "H00")):
        for val, tag in ((1, "1"), (-1, "minus1")):
            closed = closed_forms(f"{name}_at_{tag}", N)
            for i in range(N + 1):
                for j in range(N + 1):
                    c = table[i, j]
                    assert (c(val) if isinstance(c, IntPolynomial) else c) == closed[i, j]


def test_w00j_examples():
    first = w00j(0, 8)
    assert [first[m] for m in range(9)] == [comb(m, m // 2) if m % 2 == 0 else 0 for m in range(9)]
    for j in range(5):
        assert w00j(j, 0) == [1]


def test_T_and_A():
    T, A = t_series_and_A(6, 6)
    assert A[0, 0] == 1
    for j in range(0, 7, 2):
        assert T[2, j] == 1
    assert A == A_from_w00j(6, 6)
    at_minus1 = A.map(lambda c: c(-1) if hasattr(c, "coeffs") else c)
    orders = (6, 6)
    t2 = BiTruncatedSeries.monomial(0, 2, orders)
    s2 = BiTruncatedSeries.monomial(2, 0, orders)
    one = BiTruncatedSeries.one(orders)
    expected = ((one - t2) * (one - s2 * 4 - t2)).sqrt().inverse()
    assert at_minus1 == expected


def test_constant_term_lemma():
    assert constant_term_lemma_check(10)
    lhs, rhs = constant_term_lemma_sides(3)
    assert lhs[1] == 2 * s and lhs[0] == 0 and lhs[2] == 0


def test_fixed_projection_examples():
    N3 = fixed_projection_series("SSNN", 7, "halfplane_x")
    assert list(N3.coeffs) == [0, 0, 0, 0, 1, 0, 4 * a ** 2 + 6 * a + 5, 0]
    empty = fixed_projection_series("", 10)
    assert [empty[n] for n in range(11)] == [catalan(n // 2) if n % 2 == 0 else 0 for n in range(11)]


def test_fixed_projection_matches_enumeration():
    for v in ("NS", "NNSS", "NSNS"):
        ser = fixed_projection_series(v, 8)
        counts = [IntPolynomial([], "a") for _ in range(9)]
        for n in range(5):
            for w in quarter_loop_words(n):
                if "".join(c for c in w if c in "NS") == v:
                    counts[2 * n] = counts[2 * n] + a ** corner_count(w)
        assert list(ser.coeffs) == counts


def test_projection_closed_form_unconfined():
    assert fixed_projection_series("NS", 10, "unconfined") == projection_closed_form(1, 1, 10)


def test_fixed_projection_rejects_bad_words():
    with pytest.raises(ValueError):
        fixed_projection_series("SN", 6)
    with pytest.raises(ValueError):
        fixed_projection_series("NNS", 6, "unconfined")


def test_shuffle_class_examples():
    assert shuffle_class_polynomial("EWEWEW", "NNNSSS") == 62 * a ** 3 + 292 * a ** 2 + 390 * a + 180
    assert shuffle_class_polynomial("EW", "NS", a=-1) == comb(2, 1)
    assert brute_shuffle_class_polynomial("EW", "NS")(1) == 6


dyck_ew = st.sampled_from(["", "EW", "EEWW", "EWEW", "EEWEWW", "EWEEWW"])
dyck_ns = st.sampled_from(["", "NS", "NNSS", "NSNS", "NNSNSS", "NSNNSS"])


@settings(max_examples=40)
@given(dyck_ew, dyck_ns)
def test_shuffle_dp_matches_listing(w, v):
    assert shuffle_class_polynomial(w, v) == brute_shuffle_class_polynomial(w, v)


def test_kernel_equation():
    assert kernel_equation_residual(8) == {}


def test_quarter_loops_are_positive_in_shifted_basis():
    Q = quarter_loop_series(20)
    for n in range(1, 21):
        assert min(rebase_shifted(Q[n], 1).coeffs) >= 0
