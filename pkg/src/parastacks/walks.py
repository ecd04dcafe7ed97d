"""Corner-weighted square-lattice walks.

A corner is an NW or ES factor; the variable ``a`` counts them.  Variable
conventions (see the README table):

* quarter-plane loop series ``Q``: ``u`` marks half-length, optional ``s``
  marks E steps;
* unconfined / half-plane loop tables ``W00`` / ``H00``: ``s`` marks
  horizontal steps and ``t`` vertical steps (so only even exponents occur);
* fixed-projection series: ``u`` marks the length.

Exact symbolic DPs pack the polynomial in ``a`` into one integer (its value
at ``2**B``) so each cell update is a big-integer shift and add.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterable, Iterator

import numpy as np

from .exactnum import (
    BiTruncatedSeries,
    IntPolynomial,
    RatPolynomial,
    TruncatedSeries,
    catalan,
    kronecker_unpack,
    packing_bits,
    series_inverse,
    series_sqrt,
)

__all__ = [
    "BruteBoundError",
    "corner_count",
    "quarter_loop_series",
    "quarter_loop_values",
    "quarter_loop_words",
    "brute_quarter_loops",
    "primitive_quarter_loop_series",
    "brute_primitive_quarter_loops",
    "corner_walks",
    "walk_polynomial",
    "brute_walk_polynomial",
    "w00j",
    "unconfined_series",
    "halfplane_series",
    "loop_table_oracle",
    "t_series_and_A",
    "A_from_w00j",
    "closed_forms",
    "CLOSED_FORMS",
    "constant_term_lemma_sides",
    "constant_term_lemma_check",
    "fixed_projection_series",
    "projection_closed_form",
    "shuffle_class_polynomial",
    "brute_shuffle_class_polynomial",
    "kernel_equation_residual",
    "refined_to_bivariate",
]

DEFAULT_BRUTE_BOUND = 8
A = IntPolynomial([0, 1], "a")


class BruteBoundError(ValueError):
    pass


def corner_count(word: str) -> int:
    """Number of NW plus ES factors."""
    return sum(1 for x, y in zip(word, word[1:]) if (x, y) in (("N", "W"), ("E", "S")))


def _decode_a(value: int, bits: int) -> IntPolynomial:
    return IntPolynomial(kronecker_unpack(value, bits), "a")


def _decode_as(value: int, bits: int, n_slots: int) -> IntPolynomial:
    """Packed (a, s) value -> polynomial in s with polynomial-in-a coefficients."""
    flat = kronecker_unpack(value, bits)
    rows = [IntPolynomial(flat[k:k + n_slots], "a") for k in range(0, len(flat), n_slots)]
    return IntPolynomial(rows, "s")


# ---------------------------------------------------------------------------
# quarter-plane loops
# ---------------------------------------------------------------------------


def _quarter_dp(N: int, e_op, corner_op, plain_op, dtype=object, one=1) -> list:
    """Loop totals at half-lengths 0..N for the quarter-plane corner DP.

    Three arrays hold walks ending with E, with N, and with anything else.
    ``corner_op`` weights a W after N or an S after E; ``plain_op`` weights
    the other W/S steps; ``e_op`` weights E steps.  Cells that cannot get
    back to the origin in the remaining steps are never filled.
    """
    L = N + 1
    FE = np.zeros((L, L), dtype=dtype)
    FN = np.zeros((L, L), dtype=dtype)
    FO = np.zeros((L, L), dtype=dtype)
    FO[0, 0] = one
    out = [FO[0, 0]]
    for k in range(1, 2 * N + 1):
        # window holding every cell that is reachable now and can still return
        R = min(k, 2 * N - k + 1) + 1
        fe, fn, fo = FE[:R, :R], FN[:R, :R], FO[:R, :R]
        tot = fe + fn + fo
        nE = np.zeros((L, L), dtype=dtype)
        nN = np.zeros((L, L), dtype=dtype)
        nO = np.zeros((L, L), dtype=dtype)
        nE[1:R, :R] = e_op(tot[:R - 1, :])
        nN[:R, 1:R] = tot[:, :R - 1]
        # W: (x, y) -> (x-1, y); S: (x, y) -> (x, y-1)
        nO[:R - 1, :R] += plain_op(fe + fo)[1:, :] + corner_op(fn)[1:, :]
        nO[:R, :R - 1] += plain_op(fn + fo)[:, 1:] + corner_op(fe)[:, 1:]
        FE, FN, FO = nE, nN, nO
        if k % 2 == 0:
            out.append(FE[0, 0] + FN[0, 0] + FO[0, 0])
    return out


def quarter_loop_series(N: int, refine_s: bool = False) -> TruncatedSeries:
    """Q(a, u) (or Q(a, s, u)) to order N, exact.

    Coefficients are polynomials in ``a``; with ``refine_s`` each coefficient
    is a polynomial in ``s`` whose coefficients are polynomials in ``a``.
    """
    if N < 0:
        raise ValueError("N must be nonnegative")
    bits = packing_bits(4 * N + 1)  # every coefficient is below 16**N
    if not refine_s:
        raw = _quarter_dp(N, lambda x: x, lambda x: x << bits, lambda x: x)
        return TruncatedSeries([_decode_a(int(v), bits) for v in raw], N, "u")
    slots = N + 1
    sbits = bits * slots
    raw = _quarter_dp(N, lambda x: x << sbits, lambda x: x << bits, lambda x: x)
    return TruncatedSeries([_decode_as(int(v), bits, slots) for v in raw], N, "u")


def quarter_loop_values(N: int, a) -> list:
    """q_n(a) for n <= N at a numeric value of ``a``.

    Rational ``a = p/q`` is handled exactly with integers by weighting
    corner pops with ``p`` and other pops with ``q`` (every loop of
    half-length n has n pops), then dividing by ``q**n``.  Float ``a`` runs
    the same DP in floating point.
    """
    if isinstance(a, float):
        raw = _quarter_dp(N, lambda x: x, lambda x: x * a, lambda x: x, dtype=float, one=1.0)
        return [float(v) for v in raw]
    a = Fraction(a)
    p, q = a.numerator, a.denominator
    raw = _quarter_dp(N, lambda x: x, lambda x: x * p, lambda x: x * q)
    return [Fraction(int(v), q ** n) for n, v in enumerate(raw)]


def quarter_loop_words(n: int, region: str = "quadrant") -> Iterator[str]:
    """Depth-first generation of all loops of half-length n in a region."""
    length = 2 * n
    buf: list[str] = []
    steps = (("E", 1, 0), ("N", 0, 1), ("W", -1, 0), ("S", 0, -1))

    def ok(x, y):
        if region == "quadrant":
            return x >= 0 and y >= 0
        if region == "halfplane":
            return y >= 0
        if region == "halfplane_x":
            return x >= 0
        return True

    def rec(k, x, y):
        if k == length:
            if x == 0 and y == 0:
                yield "".join(buf)
            return
        rem = length - k - 1
        for ch, dx, dy in steps:
            nx, ny = x + dx, y + dy
            if ok(nx, ny) and abs(nx) + abs(ny) <= rem:
                buf.append(ch)
                yield from rec(k + 1, nx, ny)
                buf.pop()

    yield from rec(0, 0, 0)


def _check_bound(n, bound):
    if n > bound:
        raise BruteBoundError(f"half-length {n} exceeds brute-force bound {bound}")


def brute_quarter_loops(n: int, refine_s: bool = False, bound: int = DEFAULT_BRUTE_BOUND,
                        primitive: bool = False) -> IntPolynomial:
    """Exhaustive count of quarter-plane loops of half-length n, weighted by a**corners."""
    _check_bound(n, bound)
    counts: dict[tuple[int, int], int] = {}
    for w in quarter_loop_words(n):
        if primitive and n > 0 and _touches_origin(w):
            continue
        key = (w.count("E") if refine_s else 0, corner_count(w))
        counts[key] = counts.get(key, 0) + 1
    if primitive and n == 0:
        counts = {}
    if not refine_s:
        coeffs = [0] * (max((k for _, k in counts), default=-1) + 1)
        for (_, k), c in counts.items():
            coeffs[k] += c
        return IntPolynomial(coeffs, "a")
    rows: dict[int, list[int]] = {}
    for (e, k), c in counts.items():
        row = rows.setdefault(e, [0] * (n + 1))
        row[k] += c
    return IntPolynomial([IntPolynomial(rows.get(e, []), "a") for e in range(n + 1)], "s")


def _touches_origin(w: str) -> bool:
    x = y = 0
    for ch in w[:-1]:
        x += (ch == "E") - (ch == "W")
        y += (ch == "N") - (ch == "S")
        if x == 0 and y == 0:
            return True
    return False


def primitive_quarter_loop_series(N: int, refine_s: bool = False, Q: TruncatedSeries | None = None
                                  ) -> TruncatedSeries:
    """Q• = 1 - 1/Q (loops that visit the origin only at their ends)."""
    if N < 1:
        raise ValueError("N must be at least 1")
    if Q is None:
        Q = quarter_loop_series(N, refine_s)
    elif Q.order != N:
        Q = Q.truncate(N)
    P = 1 - series_inverse(Q)
    return TruncatedSeries([_integral(c) for c in P.coeffs], N, "u")


def brute_primitive_quarter_loops(n: int, refine_s: bool = False, bound: int = DEFAULT_BRUTE_BOUND):
    return brute_quarter_loops(n, refine_s, bound, primitive=True)


def _integral(c):
    if isinstance(c, IntPolynomial) and not isinstance(c, RatPolynomial):
        if all(not isinstance(x, IntPolynomial) or x.is_integral() for x in c):
            return c.to_int() if not c.is_integral() else IntPolynomial(
                [x.to_int() if isinstance(x, IntPolynomial) else x for x in c], c.var)
    if hasattr(c, "to_int"):
        return c.to_int()
    f = Fraction(c)
    if f.denominator != 1:
        raise ArithmeticError(f"non-integral coefficient {c}")
    return int(f)


def refined_to_bivariate(series: TruncatedSeries) -> dict[tuple[int, int, int], int]:
    """Flatten Q(a, s, u) into {(n, e, k): coefficient of u^n s^e a^k}."""
    out = {}
    for n, poly in enumerate(series.coeffs):
        if not isinstance(poly, IntPolynomial):
            if poly:
                out[(n, 0, 0)] = int(poly)
            continue
        for e, inner in enumerate(poly.coeffs):
            inner = inner if isinstance(inner, IntPolynomial) else IntPolynomial([inner])
            for k, c in enumerate(inner.coeffs):
                if c:
                    out[(n, e, k)] = c
    return out


# ---------------------------------------------------------------------------
# generic oracle DP
# ---------------------------------------------------------------------------

_STEPS = {"E": (1, 0), "N": (0, 1), "W": (-1, 0), "S": (0, -1)}


def _in_region(region: str, x: int, y: int) -> bool:
    if region == "quadrant":
        return x >= 0 and y >= 0
    if region == "halfplane":
        return y >= 0
    if region == "halfplane_x":
        return x >= 0
    if region == "unconfined":
        return True
    raise ValueError(f"unknown region {region!r}")


def corner_walks(length: int, region: str = "unconfined", endpoint: tuple[int, int] | None = None,
                 track_horizontal: bool = False, all_lengths: bool = False) -> dict:
    """Walks from the origin weighted by a**corners.

    Returns ``{(x, y, h): IntPolynomial}`` for walks of exactly ``length``
    steps (``h`` = number of horizontal steps, 0 unless tracked).  With
    ``endpoint`` only walks ending there are kept (and the DP prunes states
    that cannot reach it).  With ``all_lengths`` the keys gain a leading
    length component and every length up to ``length`` is reported.
    """
    bits = packing_bits(2 * length + 1)
    states: dict[tuple, int] = {(0, 0, "", 0): 1}
    results: dict[tuple, IntPolynomial] = {}

    def harvest(k, st):
        for (x, y, _last, h), v in st.items():
            if endpoint is not None and (x, y) != endpoint:
                continue
            key = (k, x, y, h) if all_lengths else (x, y, h)
            prev = results.get(key, 0)
            results[key] = prev + v

    if all_lengths:
        harvest(0, states)
    for k in range(1, length + 1):
        rem = length - k
        new: dict[tuple, int] = {}
        for (x, y, last, h), v in states.items():
            for ch, (dx, dy) in _STEPS.items():
                nx, ny = x + dx, y + dy
                if not _in_region(region, nx, ny):
                    continue
                if endpoint is not None and not all_lengths and abs(nx - endpoint[0]) + abs(ny - endpoint[1]) > rem:
                    continue
                w = v << bits if (last, ch) in (("N", "W"), ("E", "S")) else v
                nh = h + (1 if track_horizontal and ch in "EW" else 0)
                key = (nx, ny, ch, nh)
                new[key] = new.get(key, 0) + w
        states = new
        if all_lengths:
            harvest(k, states)
    if not all_lengths:
        harvest(length, states)
    return {key: _decode_a(v, bits) for key, v in results.items()}


def walk_polynomial(length: int, endpoint: tuple[int, int], region: str = "unconfined") -> IntPolynomial:
    """Corner polynomial of walks with given length and endpoint."""
    res = corner_walks(length, region, endpoint)
    total = IntPolynomial([], "a")
    for (x, y, _h), p in res.items():
        total = total + p
    return total


def brute_walk_polynomial(length: int, endpoint: tuple[int, int], region: str = "unconfined") -> IntPolynomial:
    """Same as :func:`walk_polynomial` by listing all 4**length words."""
    coeffs: dict[int, int] = {}

    def rec(word, x, y):
        if len(word) == length:
            if (x, y) == endpoint:
                k = corner_count(word)
                coeffs[k] = coeffs.get(k, 0) + 1
            return
        for ch, (dx, dy) in _STEPS.items():
            nx, ny = x + dx, y + dy
            if _in_region(region, nx, ny):
                rec(word + ch, nx, ny)

    rec("", 0, 0)
    top = max(coeffs, default=-1)
    return IntPolynomial([coeffs.get(k, 0) for k in range(top + 1)], "a")


# ---------------------------------------------------------------------------
# unconfined and half-plane loops
# ---------------------------------------------------------------------------


def _poly_mul(p: list[int], q: list[int]) -> list[int]:
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        if x:
            for j, y in enumerate(q):
                out[i + j] += x * y
    return out


def _poly_add_into(target: list[int], p: list[int], scale: int = 1):
    if len(target) < len(p):
        target.extend([0] * (len(p) - len(target)))
    for i, x in enumerate(p):
        target[i] += scale * x


_A_MINUS_1 = [-1, 1]


def _laurent_mul(f: dict, g: dict, s_order: int) -> dict:
    """Product of {(s_exp, x_exp): a-coefficient list} truncated in s."""
    out: dict[tuple[int, int], list[int]] = {}
    for (i, xi), p in f.items():
        for (j, xj), q in g.items():
            if i + j > s_order:
                continue
            key = (i + j, xi + xj)
            _poly_add_into(out.setdefault(key, []), _poly_mul(p, q))
    return {k: v for k, v in out.items() if any(v)}


def _laurent_pow(f: dict, k: int, s_order: int) -> dict:
    out = {(0, 0): [1]}
    for _ in range(k):
        out = _laurent_mul(out, f, s_order)
    return out


def _inverse_power_kernel(power: int, s_order: int) -> dict:
    """1/(1 - s(x + 1/x))**power as {(s_exp, x_exp): [coeff]}."""
    out = {}
    for m in range(s_order + 1):
        c = comb(m + power - 1, power - 1)
        for r in range(m + 1):
            out[(m, m - 2 * r)] = [c * comb(m, r)]
    return out


def w00j(j: int, s_order: int) -> list[IntPolynomial]:
    """[x^0] (1+sx(a-1))^j (1+s/x(a-1))^j / (1-s(x+1/x))^(2j+1), by s-degree 0..s_order."""
    plus = {(0, 0): [1], (1, 1): list(_A_MINUS_1)}
    minus = {(0, 0): [1], (1, -1): list(_A_MINUS_1)}
    num = _laurent_mul(_laurent_pow(plus, j, s_order), _laurent_pow(minus, j, s_order), s_order)
    full = _laurent_mul(num, _inverse_power_kernel(2 * j + 1, s_order), s_order)
    return [IntPolynomial(full.get((m, 0), []), "a") for m in range(s_order + 1)]


def _loop_table(N: int, half_plane: bool) -> BiTruncatedSeries:
    rows = [[IntPolynomial([], "a")] * (N + 1) for _ in range(N + 1)]
    for j in range(N // 2 + 1):
        weight = comb(2 * j, j) // (j + 1) if half_plane else comb(2 * j, j)
        for i, p in enumerate(w00j(j, N)):
            rows[i][2 * j] = p * weight
    return BiTruncatedSeries(rows, (N, N), ("s", "t"))


def unconfined_series(N: int) -> BiTruncatedSeries:
    """W00(a, s, t): loops by horizontal (s) and vertical (t) steps, degrees <= N each."""
    return _loop_table(N, half_plane=False)


def halfplane_series(N: int) -> BiTruncatedSeries:
    """H00(a, s, t): loops confined to y >= 0."""
    return _loop_table(N, half_plane=True)


def loop_table_oracle(N: int, region: str) -> BiTruncatedSeries:
    """Loop table from the step-by-step DP (region 'unconfined' or 'halfplane')."""
    rows = [[IntPolynomial([], "a")] * (N + 1) for _ in range(N + 1)]
    res = corner_walks(2 * N, region, track_horizontal=True, all_lengths=True)
    for (k, x, y, h), p in res.items():
        if x == 0 and y == 0 and h <= N and k - h <= N:
            rows[h][k - h] = rows[h][k - h] + p
    return BiTruncatedSeries(rows, (N, N), ("s", "t"))


def _even_table(table: BiTruncatedSeries) -> BiTruncatedSeries:
    """Re-index a table with only even exponents by (s**2, t**2)."""
    ns, nt = table.orders
    rows = [[table[2 * i, 2 * j] for j in range(nt // 2 + 1)] for i in range(ns // 2 + 1)]
    return BiTruncatedSeries(rows, (ns // 2, nt // 2), ("s2", "t2"))


def _spread_table(table: BiTruncatedSeries, orders) -> BiTruncatedSeries:
    ns, nt = orders
    rows = [[0] * (nt + 1) for _ in range(ns + 1)]
    for i in range(table.orders[0] + 1):
        for j in range(table.orders[1] + 1):
            if 2 * i <= ns and 2 * j <= nt:
                rows[2 * i][2 * j] = table[i, j]
    return BiTruncatedSeries(rows, orders, ("s", "t"))


def t_series_and_A(Ns: int, Nt: int) -> tuple[BiTruncatedSeries, BiTruncatedSeries]:
    """The series T and A in (s, t) with coefficients rational polynomials in a.

    Both only involve even powers of s and t, so the work is done in
    ``sigma = s**2`` and ``tau = t**2`` and spread back at the end.
    """
    if Ns < 1 or Nt < 1:
        raise ValueError("orders must be at least 1")
    orders = (Ns // 2, Nt // 2)
    vars2 = ("s2", "t2")
    one = RatPolynomial([1], "a")
    a = RatPolynomial([0, 1], "a")
    sigma = BiTruncatedSeries.monomial(1, 0, orders, one, vars2)
    tau = BiTruncatedSeries.monomial(0, 1, orders, one, vars2)
    zero = BiTruncatedSeries.zero(orders, vars2)
    am1sq = (a - 1) * (a - 1)
    ap1sq = (a + 1) * (a + 1)

    # fixed point: each pass fixes one more power of sigma
    T = zero
    for _ in range(orders[0] + 2):
        num = 1 + T * 4 - tau * T * am1sq
        den = 1 - tau - tau * T * ap1sq
        new = sigma * num * den.inverse()
        if new == T:
            break
        T = new
    else:
        check = sigma * (1 + T * 4 - tau * T * am1sq) * (1 - tau - tau * T * ap1sq).inverse()
        if check != T:
            raise ArithmeticError("fixed-point iteration for T did not stabilise")

    tT = tau * T
    rat_num = 1 + tT * (1 - a * a)
    d1 = 1 - tT * (a * a - 1)
    d2 = 1 + T * (a + 1) * 2
    rat_den = d1 * d1 - tau * d2 * d2
    root = ((1 + T * 4 - tT * am1sq) * (1 - tT * am1sq).inverse()).sqrt()
    Aser = rat_num * rat_den.inverse() * root
    return _spread_table(T, (Ns, Nt)), _spread_table(Aser, (Ns, Nt))


def A_from_w00j(Ns: int, Nt: int) -> BiTruncatedSeries:
    """sum_j t^(2j) W00j(a, s) as a table (reference for the closed form of A)."""
    rows = [[RatPolynomial([], "a")] * (Nt + 1) for _ in range(Ns + 1)]
    for j in range(Nt // 2 + 1):
        for i, p in enumerate(w00j(j, Ns)):
            rows[i][2 * j] = p.to_rat()
    return BiTruncatedSeries(rows, (Ns, Nt), ("s", "t"))


# ---------------------------------------------------------------------------
# closed forms at a = +-1
# ---------------------------------------------------------------------------


def _q_closed(N: int, weight) -> TruncatedSeries:
    coeffs = []
    for n in range(N + 1):
        coeffs.append(IntPolynomial([weight(i, n - i) * catalan(i) * catalan(n - i) for i in range(n + 1)], "s"))
    return TruncatedSeries(coeffs, N, "u")


def _loop_closed(N: int, weight) -> BiTruncatedSeries:
    rows = [[0] * (N + 1) for _ in range(N + 1)]
    for i in range(N // 2 + 1):
        for j in range(N // 2 + 1):
            rows[2 * i][2 * j] = weight(i, j)
    return BiTruncatedSeries(rows, (N, N), ("s", "t"))


CLOSED_FORMS = {
    # Q(1, u): product of consecutive Catalan numbers
    "Q_at_1": lambda N: TruncatedSeries([catalan(n) * catalan(n + 1) for n in range(N + 1)], N, "u"),
    # Q(1, s, u): shuffles of two Dyck words; s marks E steps
    "Q_refined_at_1": lambda N: _q_closed(N, lambda i, j: comb(2 * i + 2 * j, 2 * i)),
    "Q_at_minus1": lambda N: _q_closed(N, lambda i, j: comb(i + j, i)),
    "W00_at_1": lambda N: _loop_closed(N, lambda i, j: comb(2 * i + 2 * j, 2 * i) * comb(2 * i, i) * comb(2 * j, j)),
    "W00_at_minus1": lambda N: _loop_closed(N, lambda i, j: comb(i + j, i) * comb(2 * i, i) * comb(2 * j, j)),
    "H00_at_1": lambda N: _loop_closed(
        N, lambda i, j: comb(2 * i + 2 * j, 2 * i) * comb(2 * i, i) * comb(2 * j, j) // (j + 1)),
    "H00_at_minus1": lambda N: _loop_closed(
        N, lambda i, j: comb(i + j, i) * comb(2 * i, i) * comb(2 * j, j) // (j + 1)),
}


def closed_forms(which: str, N: int):
    try:
        return CLOSED_FORMS[which](N)
    except KeyError:
        raise ValueError(f"unknown closed form {which!r}; choose from {sorted(CLOSED_FORMS)}") from None


# ---------------------------------------------------------------------------
# constant-term identity
# ---------------------------------------------------------------------------


def _sx(n_s: int, coeff: int = 1) -> IntPolynomial:
    return IntPolynomial([0] * n_s + [coeff], "s")


def constant_term_lemma_sides(N: int) -> tuple[list[IntPolynomial], list[IntPolynomial]]:
    """Both sides of the constant-term identity as u-coefficient lists (polynomials in s).

    Left: expand R(s,u;x) = (4su - x - 1/x)(1 - su(x+1/x)) / D in u with
    Laurent-polynomial coefficients in x and read off x**0.  Right:
    (1 - sqrt(1 - 4u^2 s^2/(1-u^2))) / (us), expanding the root first and
    then dividing the resulting multiple of u^2 s^2 by us.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    M = N + 1  # one extra order is consumed by the final division on the right
    # Laurent polys in x: dict x_exp -> IntPolynomial in s
    X = {1: _sx(0), -1: _sx(0)}

    def lmul(f, g):
        out = {}
        for i, p in f.items():
            for j, q in g.items():
                out[i + j] = out.get(i + j, IntPolynomial([], "s")) + p * q
        return {k: v for k, v in out.items() if v}

    def lscale(f, c):
        return {k: v * c for k, v in f.items() if v * c}

    def ladd(*fs):
        out = {}
        for f in fs:
            for k, v in f.items():
                out[k] = out.get(k, IntPolynomial([], "s")) + v
        return {k: v for k, v in out.items() if v}

    X2 = lmul(X, X)
    # D = 1 + u d1 + u^2 d2 + u^3 d3 + u^4 d4
    d = {
        1: lscale(X, _sx(1, -2)),
        2: ladd(lscale(X2, _sx(2)), {0: _sx(0, -1)}),
        3: lscale(X, _sx(1, 2)),
        4: {0: _sx(2, -4)},
    }
    inv = [{0: _sx(0)}]
    for m in range(1, M + 1):
        acc = {}
        for k in range(1, 5):
            if m - k >= 0:
                acc = ladd(acc, lmul(d[k], inv[m - k]))
        inv.append(lscale(acc, -1))
    # numerator (4su - X)(1 - suX) = -X + u(4s + sX^2) - 4s^2 u^2 X
    num = {0: lscale(X, -1), 1: ladd({0: _sx(1, 4)}, lscale(X2, _sx(1))), 2: lscale(X, _sx(2, -4))}
    lhs = []
    for m in range(N + 1):
        acc = {}
        for k, f in num.items():
            if m - k >= 0:
                acc = ladd(acc, lmul(f, inv[m - k]))
        lhs.append(acc.get(0, IntPolynomial([], "s")))

    # right side as a series in u with coefficients in Q[s]
    z = IntPolynomial([], "s")
    geo = [(_sx(0) if k % 2 == 0 else z) for k in range(M + 1)]  # 1/(1-u^2)
    arg = [z, z] + [g * _sx(2, -4) for g in geo[: M - 1]]  # -4u^2 s^2 / (1-u^2)
    arg[0] = _sx(0)
    root = series_sqrt(TruncatedSeries(arg, M, "u"))
    one_minus = [(-c if k else 1 - c) for k, c in enumerate(root.coeffs)]
    if one_minus[0] != 0:
        raise ArithmeticError("1 - sqrt(...) must vanish at u = 0")
    rhs = []
    for m in range(N + 1):
        c = one_minus[m + 1]
        c = c if isinstance(c, RatPolynomial) else RatPolynomial([c] if not isinstance(c, IntPolynomial) else c.coeffs, "s")
        if c and c[0] != 0:
            raise ArithmeticError("numerator not divisible by s")
        rhs.append(RatPolynomial(c.coeffs[1:], "s").to_int())
    return lhs, rhs


def constant_term_lemma_check(N: int) -> bool:
    lhs, rhs = constant_term_lemma_sides(N)
    return all(x == y for x, y in zip(lhs, rhs))


# ---------------------------------------------------------------------------
# fixed vertical projection, shuffle classes
# ---------------------------------------------------------------------------


def _check_projection(v: str, region: str):
    if any(c not in "NS" for c in v):
        raise ValueError(f"projection word must use N and S only: {v!r}")
    if v.count("N") != v.count("S"):
        raise ValueError(f"projection word {v!r} is not balanced")
    if region == "quadrant":
        h = 0
        for c in v:
            h += 1 if c == "N" else -1
            if h < 0:
                raise ValueError(f"{v!r} is not a Dyck word; quadrant loops cannot project on it")


def fixed_projection_series(v: str, N: int, region: str = "quadrant") -> TruncatedSeries:
    """Loops whose N/S letters read ``v``, by length (u) and corners (a).

    DP state: abscissa, number of letters of ``v`` used, last step.  The
    ordinate is a function of the index into ``v``, so confinement to
    ``y >= 0`` is decided by ``v`` alone.
    """
    if region not in ("quadrant", "halfplane_x", "unconfined"):
        raise ValueError(f"unknown region {region!r}")
    _check_projection(v, region)
    x_confined = region in ("quadrant", "halfplane_x")
    bits = packing_bits(2 * N + 1)
    nv = len(v)
    states: dict[tuple[int, int, str], int] = {(0, 0, ""): 1}
    out = [0] * (N + 1)
    out[0] = 1 if nv == 0 else 0
    for k in range(1, N + 1):
        rem = N - k
        new: dict[tuple[int, int, str], int] = {}
        for (x, idx, last), val in states.items():
            moves = [("E", x + 1, idx), ("W", x - 1, idx)]
            if idx < nv:
                moves.append((v[idx], x, idx + 1))
            for ch, nx, nidx in moves:
                if x_confined and nx < 0:
                    continue
                if abs(nx) + (nv - nidx) > rem:
                    continue
                w = val << bits if (last, ch) in (("N", "W"), ("E", "S")) else val
                key = (nx, nidx, ch)
                new[key] = new.get(key, 0) + w
        states = new
        out[k] = sum(val for (x, idx, _l), val in states.items() if x == 0 and idx == nv)
    return TruncatedSeries([_decode_a(c, bits) for c in out], N, "u")


def projection_closed_form(n_north: int, n_south: int, N: int) -> TruncatedSeries:
    """[x^0] A B^nN C^nS by length, with A = 1/(1-s(x+1/x)), B, C the corner-weighted factors.

    Counts unconfined loops with a fixed vertical projection, weighting NW and
    SE factors.  ``u`` marks the length, i.e. ``s`` steps plus ``nN + nS``.
    """
    L = N - n_north - n_south
    rows = [IntPolynomial([], "a")] * (N + 1)
    if L >= 0:
        b = {(0, 0): [1], (1, -1): list(_A_MINUS_1)}
        c = {(0, 0): [1], (1, 1): list(_A_MINUS_1)}
        num = _laurent_mul(_laurent_pow(b, n_north, L), _laurent_pow(c, n_south, L), L)
        full = _laurent_mul(num, _inverse_power_kernel(1 + n_north + n_south, L), L)
        for m in range(L + 1):
            rows[m + n_north + n_south] = IntPolynomial(full.get((m, 0), []), "a")
    return TruncatedSeries(rows, N, "u")


def shuffle_class_polynomial(w: str, v: str, a=None):
    """Corner polynomial of all shuffles of ``w`` (E/W letters) with ``v`` (N/S letters).

    DP over (letters of w used, letters of v used, last letter).  With a
    numeric ``a`` the value is returned instead of the polynomial.
    """
    if any(c not in "EW" for c in w) or any(c not in "NS" for c in v):
        raise ValueError("w must be on {E, W} and v on {N, S}")
    if a is None:
        bits = packing_bits(len(w) + len(v) + 1)
        corner = lambda x: x << bits
    else:
        corner = lambda x: x * a
    # table[i][j] = {last: value}
    cur: dict[tuple[int, int, str], object] = {(0, 0, ""): 1}
    for _ in range(len(w) + len(v)):
        nxt: dict[tuple[int, int, str], object] = {}
        for (i, j, last), val in cur.items():
            for ch, ni, nj in ((w[i] if i < len(w) else None, i + 1, j), (v[j] if j < len(v) else None, i, j + 1)):
                if ch is None:
                    continue
                x = corner(val) if (last, ch) in (("N", "W"), ("E", "S")) else val
                key = (ni, nj, ch)
                nxt[key] = nxt.get(key, 0) + x
        cur = nxt
    total = sum(cur.values()) if cur else 1
    if a is None:
        return _decode_a(int(total), bits)
    return total


def brute_shuffle_class_polynomial(w: str, v: str) -> IntPolynomial:
    """Listing every shuffle of ``w`` and ``v``."""
    n = len(w) + len(v)
    counts: dict[int, int] = {}
    for pos in combinations(range(n), len(v)):
        word = []
        iw = iv = 0
        pset = set(pos)
        for p in range(n):
            if p in pset:
                word.append(v[iv])
                iv += 1
            else:
                word.append(w[iw])
                iw += 1
        k = corner_count("".join(word))
        counts[k] = counts.get(k, 0) + 1
    top = max(counts, default=-1)
    return IntPolynomial([counts.get(k, 0) for k in range(top + 1)], "a")


# ---------------------------------------------------------------------------
# kernel equation
# ---------------------------------------------------------------------------


def kernel_equation_residual(L: int) -> dict:
    """Residual of the kernel functional equation for quarter-plane walks with endpoints.

    The DP supplies Q(x, y) (u marks length) up to length ``L``; both sides
    of ``K(x,y) Q(x,y) = 1 - u/y (1 + ux(a-1)) Q(x,0) - u/x (1 + uy(a-1)) Q(0,y)``
    are expanded as Laurent polynomials and compared through ``u**L``.
    Returns the nonzero residual terms (empty means the equation holds).
    """
    walks = corner_walks(L, "quadrant", all_lengths=True)
    Qd: dict[tuple[int, int, int], IntPolynomial] = {}
    for (k, x, y, _h), p in walks.items():
        Qd[(k, x, y)] = Qd.get((k, x, y), IntPolynomial([], "a")) + p
    am1 = IntPolynomial([-1, 1], "a")

    def add(target, key, val):
        if key[0] <= L:
            target[key] = target.get(key, IntPolynomial([], "a")) + val

    lhs: dict = {}
    for (k, x, y), p in Qd.items():
        add(lhs, (k, x, y), p)
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            add(lhs, (k + 1, x + dx, y + dy), -p)
        for dx, dy in ((1, -1), (-1, 1)):
            add(lhs, (k + 2, x + dx, y + dy), -(p * am1))
    rhs: dict = {}
    add(rhs, (0, 0, 0), IntPolynomial([1], "a"))
    for (k, x, y), p in Qd.items():
        if y == 0:
            add(rhs, (k + 1, x, -1), -p)
            add(rhs, (k + 2, x + 1, -1), -(p * am1))
        if x == 0:
            add(rhs, (k + 1, -1, y), -p)
            add(rhs, (k + 2, -1, y + 1), -(p * am1))
    keys = set(lhs) | set(rhs)
    residual = {}
    for key in keys:
        diff = lhs.get(key, IntPolynomial([], "a")) - rhs.get(key, IntPolynomial([], "a"))
        if diff:
            residual[key] = diff
    return residual
