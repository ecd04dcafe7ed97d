"""Order-by-order solvers linking Q, C, S, S• and S̃.

Relations used (b, v for connected standard arch systems; a, u for loops):

* ``Q(A, U) = 1 + 2C`` with ``A = 1 + (1+2C)(b-1)``, ``U = v/(1+2C)**2``;
* ``Q = 1 + 2 C(B, V)`` with ``B = 1 - (1-a)/Q``, ``V = u Q**2``;
* ``S = 1 + C(1 - 1/S, t S**2)``;
* ``Q(-S•, t/(1+S•)**2) = (1+S•)/(1-S•)`` with ``S = 1/(1-S•)``;
* ``S̃ = 1 + C(1, t S̃**2)``.

Every solver reads order m of a composition ``sum_n F_n(A) U**n`` before
the order-m unknown is known; :class:`~parastacks.exactnum.OnlineComposer`
refuses to do that unless ``A`` is only needed to order m-1, which is the
runtime form of the "explicit recursion" claim.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any

from .arches import components, is_standard, left_right_pairs
from .exactnum import (
    IntPolynomial,
    OnlineComposer,
    TruncatedSeries,
    compose,
    kronecker_unpack,
    packing_bits,
    poly_rows,
    series_inverse,
)
from .machine import valid_words

__all__ = [
    "ContractViolation",
    "EquationSolution",
    "solve_C",
    "solve_S_via_C",
    "solve_Sprim_via_Q",
    "solve_S_tilde",
    "change_of_variables",
    "inversion_checks",
    "appendixB_inequality_check",
    "residual_QC",
    "residual_SC",
    "residual_Sprim",
    "residual_S_tilde",
    "brute_connected_standard",
    "brute_standard_count",
]


class ContractViolation(ArithmeticError):
    """An exactness assumption failed (non-integral coefficient, degree bound...)."""


@dataclass
class EquationSolution:
    series: TruncatedSeries
    route: str
    residual_order: int = -1
    extra: dict[str, Any] = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def order(self) -> int:
        return self.series.order

    def __getitem__(self, k):
        return self.series[k]


def _series_of(x) -> TruncatedSeries:
    return x.series if isinstance(x, EquationSolution) else x


def _halve(value: int, what: str) -> int:
    if value % 2:
        raise ContractViolation(f"{what}: odd value cannot be halved")
    return value // 2


# ---------------------------------------------------------------------------
# C from Q
# ---------------------------------------------------------------------------


def solve_C(Q, N: int, residual_order: int | None = None) -> EquationSolution:
    """C(b, v) to order N from Q(a, u).

    Works in the integers by substituting ``b = 2**B``: the coefficient of
    ``v**m`` in C then becomes one integer whose base-``2**B`` digits are
    the coefficients in ``b`` (they are nonnegative and below ``16**m``).
    """
    t0 = time.perf_counter()
    Q = _series_of(Q)
    if Q.order < N:
        raise ValueError(f"Q known to order {Q.order}, need {N}")
    bits = packing_bits(4 * N + 1)
    b = 1 << bits
    rows = [[int(c) for c in r] for r in poly_rows(Q.truncate(N))]
    comp = OnlineComposer(rows, N)
    C = [0]
    P2 = [1]  # (1 + 2C)**2
    W = [1]   # 1 / (1 + 2C)**2
    comp.push_A(b)  # A_0 = 1 + (b - 1)
    comp.push_U(0)
    for m in range(1, N + 1):
        if m >= 2:
            # W_{m-1} needs (1+2C)**2 through order m-1
            k = m - 1
            P = [1] + [2 * c for c in C[1:]]
            P2.append(sum(P[i] * P[k - i] for i in range(k + 1) if i < len(P) and k - i < len(P)))
            W.append(-sum(P2[i] * W[k - i] for i in range(1, k + 1)))
        comp.push_U(W[m - 1])
        cm = _halve(comp.coefficient(m), f"C at order {m}")
        C.append(cm)
        comp.push_A(2 * cm * (b - 1))
    polys = [IntPolynomial([], "b")]
    for m in range(1, N + 1):
        if C[m] < 0:
            raise ContractViolation(f"C at order {m} has negative packed value")
        p = IntPolynomial(kronecker_unpack(C[m], bits), "b")
        if p.degree > m - 1:
            raise ContractViolation(f"C at order {m} has b-degree {p.degree} > {m - 1}")
        polys.append(p)
    series = TruncatedSeries(polys, N, "v")
    sol = EquationSolution(series, "Q(A,U)=1+2C", seconds=time.perf_counter() - t0)
    r = min(N, 10) if residual_order is None else residual_order
    if r > 0:
        if not residual_QC(Q, series, r):
            raise ContractViolation(f"C fails Q = 1 + 2C(B, V) through order {r}")
        sol.residual_order = r
    return sol


# ---------------------------------------------------------------------------
# S from C, S̃ from C
# ---------------------------------------------------------------------------


def _c_rows(C: TruncatedSeries, N: int, b_value=None) -> list[list[int]]:
    rows = poly_rows(C.truncate(N))
    if b_value is None:
        return [[int(x) for x in r] for r in rows]
    return [[sum(int(x) * b_value ** k for k, x in enumerate(r))] if r else [] for r in rows]


def _check_counting(values: list[int], name: str):
    for n, x in enumerate(values):
        if x < 0:
            raise ContractViolation(f"{name} coefficient {n} is negative: {x}")


def solve_S_via_C(C, N: int, residual_order: int | None = None) -> EquationSolution:
    """S(t) from S = 1 + C(1 - 1/S, t S**2), one coefficient per order."""
    t0 = time.perf_counter()
    Cs = _series_of(C)
    if Cs.order < N:
        raise ValueError(f"C known to order {Cs.order}, need {N}")
    comp = OnlineComposer(_c_rows(Cs, N), N)
    S = [1]
    Sinv = [1]   # 1/S
    S2 = [1]     # S**2
    comp.push_U(0)
    comp.push_A(0)  # B_0 = 1 - 1/S_0 = 0
    for m in range(1, N + 1):
        comp.push_U(S2[m - 1])  # V = t S**2
        sm = comp.coefficient(m)
        S.append(sm)
        Sinv.append(-sum(S[i] * Sinv[m - i] for i in range(1, m + 1)))
        S2.append(sum(S[i] * S[m - i] for i in range(m + 1)))
        comp.push_A(-Sinv[m])
    _check_counting(S, "S")
    series = TruncatedSeries(S, N, "t")
    sol = EquationSolution(series, "S=1+C(1-1/S,tS^2)", seconds=time.perf_counter() - t0)
    r = min(N, 20) if residual_order is None else residual_order
    if r > 0:
        if not residual_SC(series, Cs, r):
            raise ContractViolation(f"S fails its equation through order {r}")
        sol.residual_order = r
    return sol


def solve_S_tilde(C, N: int, residual_order: int | None = None) -> EquationSolution:
    """S̃(t) from S̃ = 1 + C(1, t S̃**2)."""
    t0 = time.perf_counter()
    Cs = _series_of(C)
    if Cs.order < N:
        raise ValueError(f"C known to order {Cs.order}, need {N}")
    comp = OnlineComposer(_c_rows(Cs, N, b_value=1), N)
    S = [1]
    S2 = [1]
    comp.push_U(0)
    comp.push_A(1)
    for m in range(1, N + 1):
        comp.push_U(S2[m - 1])
        S.append(comp.coefficient(m))
        S2.append(sum(S[i] * S[m - i] for i in range(m + 1)))
        comp.push_A(0)
    _check_counting(S, "S-tilde")
    series = TruncatedSeries(S, N, "t")
    sol = EquationSolution(series, "S~=1+C(1,tS~^2)", seconds=time.perf_counter() - t0)
    r = min(N, 20) if residual_order is None else residual_order
    if r > 0:
        if not residual_S_tilde(series, Cs, r):
            raise ContractViolation(f"S-tilde fails its equation through order {r}")
        sol.residual_order = r
    return sol


# ---------------------------------------------------------------------------
# S• directly from Q
# ---------------------------------------------------------------------------


def solve_Sprim_via_Q(Q, N: int, residual_order: int | None = None) -> EquationSolution:
    """S•(t) from Q(-S•, t/(1+S•)**2) = (1+S•)/(1-S•).

    At order m the left side does not involve the unknown s•_m (it enters
    only through A, which the composition reads to order m-1), while the
    right side is ``2 s•_m + r`` with ``r`` known: the relation is affine in
    the unknown with linear coefficient 2.  S = 1/(1-S•) is returned in
    ``extra['S']``.
    """
    t0 = time.perf_counter()
    Q = _series_of(Q)
    if Q.order < N:
        raise ValueError(f"Q known to order {Q.order}, need {N}")
    rows = [[int(c) for c in r] for r in poly_rows(Q.truncate(N))]
    comp = OnlineComposer(rows, N)
    P = [0]       # S•
    S = [1]       # 1/(1-S•)
    Wd = [1]      # 1/(1+S•)**2
    D2 = [1]      # (1+S•)**2
    comp.push_A(0)
    comp.push_U(0)
    linear = 2
    for m in range(1, N + 1):
        comp.push_U(Wd[m - 1])
        lhs = comp.coefficient(m)
        r0 = 2 * sum(P[i] * S[m - i] for i in range(1, m))
        num = lhs - r0
        if num % linear:
            raise ContractViolation(f"S• at order {m} is not integral ({num}/{linear})")
        P.append(num // linear)
        S.append(sum(P[i] * S[m - i] for i in range(1, m + 1)))
        onep = [1] + P[1:]
        D2.append(sum(onep[i] * onep[m - i] for i in range(m + 1)))
        Wd.append(-sum(D2[i] * Wd[m - i] for i in range(1, m + 1)))
        comp.push_A(-P[m])
    _check_counting(P, "S•")
    _check_counting(S, "S")
    series = TruncatedSeries(P, N, "t")
    sol = EquationSolution(series, "Q(-S*,t/(1+S*)^2)=(1+S*)/(1-S*)", seconds=time.perf_counter() - t0)
    sol.extra["S"] = TruncatedSeries(S, N, "t")
    sol.extra["linear_coefficient"] = linear
    r = min(N, 12) if residual_order is None else residual_order
    if r > 0:
        if not residual_Sprim(Q, series, r):
            raise ContractViolation(f"S• fails its equation through order {r}")
        sol.residual_order = r
    return sol


# ---------------------------------------------------------------------------
# residuals (generic composition, independent of the online solvers)
# ---------------------------------------------------------------------------


def _one(order, var):
    return TruncatedSeries.one(order, var)


def _var(order, var):
    return TruncatedSeries.variable(order, var)


def _int_rows(series: TruncatedSeries) -> list[list]:
    return poly_rows(series)


def _const_poly_series(order, var, poly):
    return TruncatedSeries([poly], order, var)


def change_of_variables(Q, C, N: int) -> dict[str, TruncatedSeries]:
    """The four substitution series: A, U in (b, v) and B, V in (a, u)."""
    Q = _series_of(Q).truncate(N)
    C = _series_of(C).truncate(N)
    bpoly = IntPolynomial([0, 1], "b")
    P = (C * 2 + IntPolynomial([1], "b"))
    A = P * (bpoly - 1) + IntPolynomial([1], "b")
    U = TruncatedSeries([0] + list(series_inverse(P * P).coeffs[:N]), N, "v")
    apoly = IntPolynomial([0, 1], "a")
    Qinv = series_inverse(Q)
    B = Qinv * (apoly - 1) + IntPolynomial([1], "a")
    V = TruncatedSeries([0] + list((Q * Q).coeffs[:N]), N, "u")
    return {"A": A.map(_intify), "U": U.map(_intify), "B": B.map(_intify), "V": V.map(_intify)}


def _intify(c):
    if isinstance(c, IntPolynomial):
        return c.to_int()
    return int(c)


def residual_QC(Q, C, N: int) -> bool:
    """Q = 1 + 2 C(B, V) through order N."""
    cv = change_of_variables(Q, C, N)
    rhs = compose(poly_rows(_series_of(C).truncate(N)), cv["B"], cv["V"]) * 2 + 1
    return rhs == _series_of(Q).truncate(N).map(lambda c: c)


def residual_SC(S, C, N: int) -> bool:
    S = _series_of(S).truncate(N)
    B = 1 - series_inverse(S)
    V = (S * S).shift(1)
    V = TruncatedSeries(V.coeffs, N, "t")
    rhs = compose(_c_rows(_series_of(C), N), B, V) + 1
    return rhs == S


def residual_S_tilde(St, C, N: int) -> bool:
    St = _series_of(St).truncate(N)
    V = TruncatedSeries((St * St).shift(1).coeffs, N, "t")
    rhs = compose(_c_rows(_series_of(C), N, b_value=1), _one(N, "t"), V) + 1
    return rhs == St


def residual_Sprim(Q, Sp, N: int) -> bool:
    Sp = _series_of(Sp).truncate(N)
    A = -Sp
    onep = Sp + 1
    U = TruncatedSeries(series_inverse(onep * onep).shift(1).coeffs, N, "t")
    lhs = compose([[int(x) for x in r] for r in poly_rows(_series_of(Q).truncate(N))], A, U)
    rhs = onep * series_inverse(1 - Sp)
    return lhs == rhs


def inversion_checks(Q, C, N: int) -> dict[str, bool]:
    """A(B,V) = a, U(B,V) = u, B(A,U) = b, V(A,U) = v, and B(a, 0) = a."""
    cv = change_of_variables(Q, C, N)
    A, U, B, V = cv["A"], cv["U"], cv["B"], cv["V"]
    a = IntPolynomial([0, 1], "a")
    b = IntPolynomial([0, 1], "b")
    out = {}
    out["A(B,V)=a"] = compose(poly_rows(A), B, V) == TruncatedSeries([a], N, "u")
    out["U(B,V)=u"] = compose(poly_rows(U), B, V) == TruncatedSeries([0, 1], N, "u")
    out["B(A,U)=b"] = compose(poly_rows(B), A, U) == TruncatedSeries([b], N, "v")
    out["V(A,U)=v"] = compose(poly_rows(V), A, U) == TruncatedSeries([0, 1], N, "v")
    out["B(a,0)=a"] = B[0] == a
    return out


def appendixB_inequality_check(C, N: int) -> dict:
    """Coefficients of C - v - b v**2 - 2C(C - v); pass iff all are >= 0."""
    C = _series_of(C)
    if C.order < N:
        raise ValueError(f"C known to order {C.order}, need {N}")
    C = C.truncate(N)
    b = IntPolynomial([0, 1], "b")
    v = TruncatedSeries([0, 1], N, "v")
    bv2 = TruncatedSeries([0, 0, b], N, "v")
    expr = C - v - bv2 - C * (C - v) * 2
    rows = []
    minimum = None
    for n, c in enumerate(expr.coeffs):
        c = c if isinstance(c, IntPolynomial) else IntPolynomial([c], "b")
        rows.append(c)
        if c.coeffs:
            mc = min(c.coeffs)
            minimum = mc if minimum is None else min(minimum, mc)
    minimum = 0 if minimum is None else minimum
    return {"order": N, "min_coefficient": minimum, "pass": minimum >= 0, "coefficients": rows}


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------


def brute_connected_standard(n: int) -> IntPolynomial:
    """Connected standard arch systems with n arches, by left-right pairs (variable b)."""
    counts: dict[int, int] = {}
    for w in valid_words(n):
        comps = components(w)
        if len(comps) == 1 and is_standard(w):
            k = left_right_pairs(w)
            counts[k] = counts.get(k, 0) + 1
    top = max(counts, default=-1)
    return IntPolynomial([counts.get(k, 0) for k in range(top + 1)], "b")


def brute_standard_count(n: int) -> int:
    return sum(1 for w in valid_words(n) if is_standard(w))
