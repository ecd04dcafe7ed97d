"""The fourteen acceptance criteria, each at its stated tolerance and time budget."""

import math
import time

import pytest

from parastacks.analysis import (
    cached_Q,
    counterexample_suite,
    eager_growth_constant,
    growth_bounds,
    positivity_check,
    prop4_asymptotics_check,
    standard_growth_constant,
    tc_bracket,
)
from parastacks.arches import canonicalize, is_canonical
from parastacks.equations import (
    appendixB_inequality_check,
    brute_connected_standard,
    inversion_checks,
    residual_QC,
    residual_S_tilde,
    residual_SC,
    residual_Sprim,
    solve_C,
    solve_S_tilde,
    solve_S_via_C,
    solve_Sprim_via_Q,
)
from parastacks.exactnum import IntPolynomial, catalan
from parastacks.machine import canonical_sequence, enumerate_achievable, execute, valid_words
from parastacks.walks import (
    brute_quarter_loops,
    closed_forms,
    constant_term_lemma_check,
    quarter_loop_series,
)

a = IntPolynomial([0, 1], "a")
b = IntPolynomial([0, 1], "b")
S_8 = [1, 1, 2, 6, 23, 103, 513, 2760, 15741]


def _eval(p, x):
    return p(x) if isinstance(p, IntPolynomial) else p


def test_c01_S_coefficients(record):
    t0 = time.perf_counter()
    Q = quarter_loop_series(8)
    via_C = solve_S_via_C(solve_C(Q, 8), 8).series
    via_Sprim = solve_Sprim_via_Q(Q, 8).extra["S"]
    secs = time.perf_counter() - t0
    ok = list(via_C.coeffs) == S_8 and list(via_Sprim.coeffs) == S_8 and secs < 10
    assert record(1, ok, f"S to t^8 = {list(via_C.coeffs)}; routes agree; {secs:.2f}s < 10s")


def test_c02_enumeration_oracle(record):
    t0 = time.perf_counter()
    counts = [enumerate_achievable(n) for n in range(9)]
    secs = time.perf_counter() - t0
    ok = counts == S_8 and secs < 300
    assert record(2, ok, f"Even-Itai scan n<=8: {counts}; {secs:.1f}s < 300s")


def test_c03_quarter_loops(record):
    t0 = time.perf_counter()
    Q = quarter_loop_series(6)
    Qr = quarter_loop_series(6, refine_s=True)
    head = list(Q.coeffs[:4]) == [1, 2, 8 + 2 * a, 44 + 24 * a + 2 * a ** 2]
    dp = all(Q[n] == brute_quarter_loops(n) and Qr[n] == brute_quarter_loops(n, refine_s=True)
             for n in range(7))
    secs = time.perf_counter() - t0
    ok = head and dp and secs < 60
    assert record(3, ok, f"q0..q3 exact; DP = enumeration (plain and s-refined) to n=6; {secs:.1f}s < 60s")


def test_c04_closed_forms_at_pm1(record):
    t0 = time.perf_counter()
    Q = quarter_loop_series(25)
    plus = all(_eval(Q[n], 1) == catalan(n) * catalan(n + 1) for n in range(26))
    Qr = quarter_loop_series(12, refine_s=True)
    closed = closed_forms("Q_at_minus1", 12)
    minus = True
    for n in range(13):
        row = Qr[n] if isinstance(Qr[n], IntPolynomial) else IntPolynomial([Qr[n]], "s")
        at = IntPolynomial([_eval(c, -1) for c in row.coeffs], "s")
        minus = minus and at == closed[n]
    secs = time.perf_counter() - t0
    ok = plus and minus and secs < 60
    assert record(4, ok, f"Q(1,u) = C_n C_(n+1) to n=25; Q(-1,s,u) closed form to order 12; {secs:.1f}s")


def test_c05_C_series(record):
    C = solve_C(quarter_loop_series(5), 5).series
    head = list(C.coeffs[:4]) == [0, 1, b, b * (b + 2)]
    brute = all(C[n] == brute_connected_standard(n) for n in range(1, 6))
    assert record(5, head and brute, "C = v + b v^2 + b(b+2) v^3 + ...; connected standard systems match to n=5")


def test_c06_canonical_bijection(record):
    ok = True
    for n in range(7):
        canon = [w for w in valid_words(n) if is_canonical(w)]
        ok = ok and len(canon) == S_8[n] and len({execute(w) for w in canon}) == S_8[n]
    checked = 0
    for n in range(6):
        for w in valid_words(n):
            ok = ok and canonicalize(w) == canonical_sequence(execute(w))
            checked += 1
    assert record(6, ok, f"canonical words = s_n with distinct outputs for n<=6; "
                         f"canonicalize = canonical_sequence on {checked} words of length <= 10")


def test_c07_positivity(record):
    t0 = time.perf_counter()
    reports = [positivity_check("Q", 50), positivity_check("Q_refined", 25),
               positivity_check("Q_primitive", 25), positivity_check("Q_primitive_refined", 25),
               positivity_check("W00", 12), positivity_check("H00", 12)]
    secs = time.perf_counter() - t0
    failed = [r.series for r in reports if not r.passed]
    ok = not failed and secs < 1800
    assert record(7, ok, f"(a+1)-positive: Q@50, Q(a,s,u)@25, Q•@25 (plain and refined), W00/H00@12"
                         f"{'; FAILED ' + ', '.join(failed) if failed else ''}; {secs:.1f}s")


def test_c08_tc_bracket(record):
    t0 = time.perf_counter()
    r100 = tc_bracket(100)
    r40 = tc_bracket(40)
    secs = time.perf_counter() - t0
    a_lo, a_hi = r100["a_interval"]
    i_lo, i_hi = r100["inv_tc_interval"]
    in100 = -0.15 <= a_lo <= a_hi <= -0.148 and 8.25 <= i_lo <= i_hi <= 8.29
    b_lo, b_hi = r40["a_bracket"]
    ib_lo, ib_hi = r40["inv_tc_bracket"]
    contains40 = b_lo <= -0.15 and b_hi >= -0.148 and ib_lo <= 8.25 and ib_hi >= 8.29
    ok = in100 and contains40 and secs < 1800
    assert record(8, ok, f"N=100: a in [{a_lo:.6f}, {a_hi:.6f}], 1/t_c in [{i_lo:.4f}, {i_hi:.4f}]; "
                         f"N=40 bracket a in [{b_lo:.4f}, {b_hi:.4f}] contains [-0.15, -0.148]; {secs:.1f}s")


@pytest.fixture(scope="module")
def series_100():
    sol = solve_Sprim_via_Q(cached_Q(100), 100, residual_order=4)
    return list(sol.extra["S"].coeffs), list(sol.series.coeffs)


def test_c09_growth_bounds(record, series_100):
    S, Sp = series_100
    rep = growth_bounds(S, Sp)
    rep40 = growth_bounds(S, Sp, N=40)
    eager = eager_growth_constant()
    standard = standard_growth_constant()["inverse"]
    sig3 = lambda x: float(f"{x:.3g}")
    ok = (rep["nth_root"] >= 7.2 and rep["nth_root_increasing"]
          and rep["truncation_bound"] >= 7.38
          and sig3(eager) == 11.7 and sig3(standard) == 13.3)
    assert record(9, ok, f"s_100^(1/100) = {rep['nth_root']:.4f} >= 7.2; truncation bound at degree 100 = "
                         f"{rep['truncation_bound']:.4f} >= 7.38 (degree 40: {rep40['truncation_bound']:.4f}); "
                         f"(2+sqrt2)^2 = {eager:.4f}; 1/t~_c = {standard:.4f}")


@pytest.mark.xfail(strict=True, reason="exact truncation bound at degree 40 is 6.4831; 7.0 is first passed at degree 64")
def test_c09_degree40_truncation_gate(series_100):
    S, Sp = series_100
    assert growth_bounds(S, Sp, N=40)["truncation_bound"] >= 7.0


def test_c10_counterexamples(record):
    t0 = time.perf_counter()
    rep = counterexample_suite()
    secs = time.perf_counter() - t0
    ok = rep["pass"] and secs < 60
    assert record(10, ok, f"2a+1, 15a+12, 62a^3+292a^2+390a+180, u^4+(4a^2+6a+5)u^6 reproduced; {secs:.2f}s")


def test_c11_arch_inequality(record):
    C = solve_C(quarter_loop_series(20), 20).series
    rep = appendixB_inequality_check(C, 20)
    assert record(11, rep["pass"], f"C - v - b v^2 - 2C(C-v) >= 0 through order 20 (min {rep['min_coefficient']})")


def test_c12_constant_term_lemma(record):
    assert record(12, constant_term_lemma_check(10), "both sides agree through u^10")


def test_c13_inversion_and_residuals(record):
    Q = quarter_loop_series(12)
    Csol = solve_C(Q, 12)
    C = Csol.series
    S = solve_S_via_C(Csol, 12).series
    Sp = solve_Sprim_via_Q(Q, 12).series
    St = solve_S_tilde(Csol, 12).series
    inv = inversion_checks(Q, C, 12)
    res = {"QC": residual_QC(Q, C, 12), "SC": residual_SC(S, C, 12),
           "S•": residual_Sprim(Q, Sp, 12), "S~": residual_S_tilde(St, C, 12)}
    ok = all(inv.values()) and all(res.values())
    assert record(13, ok, f"inversion identities {sorted(k for k, v in inv.items() if v)}; "
                          f"residuals vanish through order 12: {sorted(k for k, v in res.items() if v)}")


def test_c14_asymptotics(record):
    t0 = time.perf_counter()
    rep = prop4_asymptotics_check(100)
    secs = time.perf_counter() - t0
    ok = rep["pass"] and secs < 300
    assert record(14, ok, f"n=100: q_n(1) 16^-n n^3 = {rep['normalized_a_plus1']:.4f} vs 4/pi = "
                          f"{4 / math.pi:.4f}; q_n(-1) 8^-(n+1) n^3 = {rep['normalized_a_minus1']:.4f} vs "
                          f"1/pi = {1 / math.pi:.4f}; {secs:.2f}s")
