"""Exact arithmetic kernel.

Dense polynomials with arbitrary-precision coefficients, truncated power
series whose coefficients live in such a ring, and the handful of series
operations the solvers need (product, inverse, square root, composition).

Large computations do not go through :class:`IntPolynomial` at all: a
polynomial with nonnegative coefficients below ``2**bits`` is packed into a
single Python integer (its value at ``2**bits``), which turns polynomial
addition and multiplication into big-integer addition and multiplication.
See :func:`kronecker_pack` / :func:`kronecker_unpack`.
"""

from __future__ import annotations

import json
from fractions import Fraction
from math import comb
from numbers import Rational
from typing import Any, Callable, Iterable, Sequence

__all__ = [
    "RingMismatchError",
    "NotInvertibleError",
    "Polynomial",
    "IntPolynomial",
    "RatPolynomial",
    "TruncatedSeries",
    "BiTruncatedSeries",
    "series_mul",
    "series_inverse",
    "series_sqrt",
    "rebase_shifted",
    "compose",
    "OnlineComposer",
    "kronecker_pack",
    "kronecker_unpack",
    "packing_bits",
    "catalan",
]


class RingMismatchError(ValueError):
    """Operands live in different rings (variable names or truncation orders)."""


class NotInvertibleError(ArithmeticError):
    """Constant term is not a unit of the coefficient ring."""


def catalan(n: int) -> int:
    return comb(2 * n, n) // (n + 1)


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------


class Polynomial:
    """Dense univariate polynomial; coefficients in ascending degree.

    Coefficients may themselves be polynomials in another variable, which
    gives the nested representation used for bivariate weights such as
    ``Q(a, s, u)``.
    """

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Iterable[Any] = (), var: str = "a"):
        cs = [self._norm(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)
        self.var = var

    # subclasses decide how scalars are stored
    @staticmethod
    def _norm(c):
        return c

    # -- construction helpers ------------------------------------------------
    @classmethod
    def constant(cls, c, var: str = "a"):
        return cls([c], var)

    @classmethod
    def monomial(cls, k: int, c=1, var: str = "a"):
        return cls([0] * k + [c], var)

    # -- basic protocol --------------------------------------------------------
    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, k: int):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return 0

    def __iter__(self):
        return iter(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            if not self.coeffs and not other.coeffs:
                return True
            return self.var == other.var and self.coeffs == other.coeffs
        if isinstance(other, (int, Rational)):
            if other == 0:
                return not self.coeffs
            return len(self.coeffs) == 1 and self.coeffs[0] == other
        return NotImplemented

    def __hash__(self):
        if len(self.coeffs) <= 1:
            return hash(self.coeffs[0] if self.coeffs else 0)
        return hash((self.var, self.coeffs))

    def __repr__(self):
        return f"{type(self).__name__}({list(self.coeffs)!r}, var={self.var!r})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            cs = f"({c})" if isinstance(c, Polynomial) and len(c) > 1 else str(c)
            if k == 0:
                parts.append(cs)
            else:
                mono = self.var if k == 1 else f"{self.var}^{k}"
                parts.append(mono if c == 1 else f"{cs}*{mono}")
        return " + ".join(parts)

    # -- arithmetic ------------------------------------------------------------
    def _result_type(self, other):
        if isinstance(other, RatPolynomial) or isinstance(self, RatPolynomial):
            return RatPolynomial
        if isinstance(other, Fraction) and other.denominator != 1:
            return RatPolynomial
        return type(self)

    def _check_var(self, other: "Polynomial"):
        if self.var != other.var and len(self.coeffs) > 1 and len(other.coeffs) > 1:
            raise RingMismatchError(f"variable mismatch: {self.var!r} vs {other.var!r}")

    def _var_with(self, other: "Polynomial") -> str:
        return self.var if len(self.coeffs) > 1 else other.var

    def __add__(self, other):
        if isinstance(other, Polynomial) and (other.var == self.var or len(other) <= 1 or len(self) <= 1):
            self._check_var(other)
            a, b = self.coeffs, other.coeffs
            if len(a) < len(b):
                a, b = b, a
            out = list(a)
            for i, c in enumerate(b):
                out[i] = out[i] + c
            return self._result_type(other)(out, self._var_with(other))
        if isinstance(other, (int, Rational, Polynomial)):
            out = list(self.coeffs) or [0]
            out[0] = out[0] + other
            return self._result_type(other)(out, self.var)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return type(self)([-c for c in self.coeffs], self.var)

    def __sub__(self, other):
        if isinstance(other, (int, Rational, Polynomial)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Polynomial) and (other.var == self.var or len(other) <= 1 or len(self) <= 1):
            self._check_var(other)
            a, b = self.coeffs, other.coeffs
            if not a or not b:
                return self._result_type(other)([], self._var_with(other))
            out = [0] * (len(a) + len(b) - 1)
            for i, x in enumerate(a):
                if x == 0:
                    continue
                for j, y in enumerate(b):
                    out[i + j] = out[i + j] + x * y
            return self._result_type(other)(out, self._var_with(other))
        if isinstance(other, (int, Rational, Polynomial)):
            return self._result_type(other)([c * other for c in self.coeffs], self.var)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            f = Fraction(other)
            return RatPolynomial([Fraction(c) / f if not isinstance(c, Polynomial) else c / f for c in self.coeffs], self.var)
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = type(self)([1], self.var)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __call__(self, x):
        """Horner evaluation; ``x`` may be any ring element (numbers, series...)."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    # -- misc ----------------------------------------------------------------------
    def is_integral(self) -> bool:
        for c in self.coeffs:
            if isinstance(c, Polynomial):
                if not c.is_integral():
                    return False
            elif Fraction(c).denominator != 1:
                return False
        return True

    def to_int(self) -> "IntPolynomial":
        if not self.is_integral():
            raise ArithmeticError(f"non-integral coefficients in {self}")
        return IntPolynomial(
            [c.to_int() if isinstance(c, Polynomial) else int(c) for c in self.coeffs], self.var
        )

    def to_rat(self) -> "RatPolynomial":
        return RatPolynomial(
            [c.to_rat() if isinstance(c, Polynomial) else c for c in self.coeffs], self.var
        )

    def min_coefficient(self):
        """Smallest scalar coefficient, looking through nested polynomials."""
        vals = [c.min_coefficient() if isinstance(c, Polynomial) else c for c in self.coeffs]
        return min(vals) if vals else 0

    def to_json(self) -> list:
        return [c.to_json() if isinstance(c, Polynomial) else str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data, var: str = "a", inner_var: str | None = None):
        out = []
        for c in data:
            if isinstance(c, list):
                out.append(cls.from_json(c, inner_var or "a"))
            else:
                out.append(Fraction(c))
        return cls(out, var)


class IntPolynomial(Polynomial):
    """Polynomial with arbitrary-precision integer coefficients."""

    __slots__ = ()

    @staticmethod
    def _norm(c):
        if isinstance(c, Polynomial):
            return c
        if isinstance(c, int):
            return c
        f = Fraction(c)
        if f.denominator != 1:
            raise ArithmeticError(f"non-integral coefficient {c!r} for IntPolynomial")
        return int(f)


class RatPolynomial(Polynomial):
    """Polynomial with rational coefficients (kept in lowest terms by ``Fraction``)."""

    __slots__ = ()

    @staticmethod
    def _norm(c):
        if isinstance(c, Polynomial):
            return c.to_rat() if isinstance(c, IntPolynomial) else c
        return Fraction(c)


def rebase_shifted(p: Polynomial, shift: int) -> Polynomial:
    """Coefficients of ``p`` in the basis ``(var + shift)**k``.

    ``rebase_shifted(8 + 2a, 1)`` gives ``[6, 2]``, i.e. ``6 + 2(a+1)``.
    Implemented as a Taylor shift: substitute ``var -> x - shift``.
    """
    cs = list(p.coeffs)
    n = len(cs)
    # synthetic division by (x + shift) repeated n times
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            cs[j] = cs[j] - shift * cs[j + 1]
    return type(p)(cs, p.var)


# ---------------------------------------------------------------------------
# Kronecker packing
# ---------------------------------------------------------------------------


def packing_bits(max_coefficient_bits: int) -> int:
    """Slot width (a multiple of 8) able to hold coefficients of the given size."""
    return ((max_coefficient_bits + 1 + 7) // 8) * 8


def kronecker_pack(coeffs: Sequence[int], bits: int) -> int:
    """Value of the polynomial at ``2**bits``."""
    acc = 0
    for c in reversed(coeffs):
        acc = (acc << bits) + c
    return acc


def kronecker_unpack(value: int, bits: int, signed: bool = False) -> list[int]:
    """Inverse of :func:`kronecker_pack`.

    With ``signed=False`` the packed polynomial must have coefficients in
    ``[0, 2**bits)``; with ``signed=True`` in ``[-2**(bits-1), 2**(bits-1))``.
    """
    if value < 0 and not signed:
        raise ValueError("negative packed value with unsigned decoding")
    if bits % 8 == 0 and not signed:
        nbytes = (value.bit_length() + 7) // 8
        raw = value.to_bytes(nbytes, "little")
        step = bits // 8
        out = [int.from_bytes(raw[i:i + step], "little") for i in range(0, nbytes, step)]
    else:
        mask = (1 << bits) - 1
        half = 1 << (bits - 1)
        out = []
        v = value
        while v:
            c = v & mask
            if signed and c >= half:
                c -= 1 << bits
            out.append(c)
            v = (v - c) >> bits
    while out and out[-1] == 0:
        out.pop()
    return out


# ---------------------------------------------------------------------------
# truncated series
# ---------------------------------------------------------------------------


def _poly_var(c) -> str | None:
    if isinstance(c, Polynomial) and len(c) > 1:
        return c.var
    return None


def _ring_vars(coeffs) -> set[str]:
    out = set()
    for c in coeffs:
        v = _poly_var(c)
        if v is not None:
            out.add(v)
    return out


def _half(c):
    if isinstance(c, Polynomial):
        return c / 2
    return Fraction(c) / 2


class TruncatedSeries:
    """Power series in ``mainvar`` known up to and including degree ``order``."""

    __slots__ = ("coeffs", "order", "mainvar")

    def __init__(self, coeffs: Iterable[Any], order: int, mainvar: str = "u"):
        cs = list(coeffs)[: order + 1]
        cs += [0] * (order + 1 - len(cs))
        self.coeffs = tuple(cs)
        self.order = order
        self.mainvar = mainvar

    @classmethod
    def one(cls, order: int, mainvar: str = "u"):
        return cls([1], order, mainvar)

    @classmethod
    def variable(cls, order: int, mainvar: str = "u"):
        return cls([0, 1], order, mainvar)

    def __getitem__(self, k):
        return self.coeffs[k]

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __repr__(self):
        return f"TruncatedSeries({list(self.coeffs)!r}, order={self.order}, mainvar={self.mainvar!r})"

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries):
            return (self.order, self.mainvar) == (other.order, other.mainvar) and all(
                x == y for x, y in zip(self.coeffs, other.coeffs)
            )
        return NotImplemented

    __hash__ = None

    def _check(self, other: "TruncatedSeries"):
        if self.mainvar != other.mainvar:
            raise RingMismatchError(f"main variable mismatch: {self.mainvar} vs {other.mainvar}")
        if self.order != other.order:
            raise RingMismatchError(f"order mismatch: {self.order} vs {other.order}")
        va, vb = _ring_vars(self.coeffs), _ring_vars(other.coeffs)
        if va and vb and va != vb:
            raise RingMismatchError(f"coefficient ring mismatch: {sorted(va)} vs {sorted(vb)}")

    def __add__(self, other):
        if isinstance(other, TruncatedSeries):
            self._check(other)
            return TruncatedSeries([x + y for x, y in zip(self.coeffs, other.coeffs)], self.order, self.mainvar)
        cs = list(self.coeffs)
        cs[0] = cs[0] + other
        return TruncatedSeries(cs, self.order, self.mainvar)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries([-c for c in self.coeffs], self.order, self.mainvar)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return series_mul(self, other)
        return TruncatedSeries([c * other for c in self.coeffs], self.order, self.mainvar)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = TruncatedSeries.one(self.order, self.mainvar)
        for _ in range(k):
            result = result * self
        return result

    def map(self, fn: Callable[[Any], Any]) -> "TruncatedSeries":
        return TruncatedSeries([fn(c) for c in self.coeffs], self.order, self.mainvar)

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise RingMismatchError("cannot extend a truncated series")
        return TruncatedSeries(self.coeffs[: order + 1], order, self.mainvar)

    def shift(self, k: int) -> "TruncatedSeries":
        """Multiply by ``mainvar**k`` (k may be negative if the low terms vanish)."""
        if k >= 0:
            return TruncatedSeries([0] * k + list(self.coeffs), self.order, self.mainvar)
        if any(c != 0 for c in self.coeffs[:-k]):
            raise ArithmeticError("division by the main variable leaves a pole")
        return TruncatedSeries(list(self.coeffs[-k:]), self.order + k, self.mainvar)

    def valuation(self) -> int:
        for k, c in enumerate(self.coeffs):
            if c != 0:
                return k
        return self.order + 1

    def inverse(self) -> "TruncatedSeries":
        return series_inverse(self)

    def sqrt(self) -> "TruncatedSeries":
        return series_sqrt(self)

    def to_json(self) -> list:
        return [c.to_json() if isinstance(c, Polynomial) else str(c) for c in self.coeffs]


def series_mul(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    f._check(g)
    n = f.order
    a, b = f.coeffs, g.coeffs
    out = [0] * (n + 1)
    for i in range(n + 1):
        x = a[i]
        if x == 0:
            continue
        for j in range(n + 1 - i):
            y = b[j]
            if y == 0:
                continue
            out[i + j] = out[i + j] + x * y
    return TruncatedSeries(out, n, f.mainvar)


def _unit_inverse(c):
    if isinstance(c, Polynomial):
        if len(c) != 1:
            raise NotInvertibleError(f"constant term {c} is not a unit")
        c = c.coeffs[0]
        if isinstance(c, Polynomial):
            return _unit_inverse(c)
    if c == 0:
        raise NotInvertibleError("constant term is zero")
    if isinstance(c, int) and not isinstance(c, bool):
        if c in (1, -1):
            return c
        return Fraction(1, c)
    return 1 / Fraction(c)


def series_inverse(f: TruncatedSeries) -> TruncatedSeries:
    """Multiplicative inverse; the constant term must be a unit."""
    inv0 = _unit_inverse(f.coeffs[0])
    if isinstance(inv0, Fraction) and _ring_is_integral(f):
        raise NotInvertibleError(f"constant term {f.coeffs[0]} is not a unit of the integers")
    n = f.order
    a = f.coeffs
    g = [0] * (n + 1)
    g[0] = inv0
    for m in range(1, n + 1):
        acc = 0
        for i in range(1, m + 1):
            if a[i] != 0:
                acc = acc + a[i] * g[m - i]
        g[m] = -acc * inv0
    return TruncatedSeries(g, n, f.mainvar)


def _ring_is_integral(f: TruncatedSeries) -> bool:
    for c in f.coeffs:
        if isinstance(c, RatPolynomial) or isinstance(c, Fraction):
            return False
    return True


def series_sqrt(f):
    """Square root with constant term 1 (term recurrence, rational ring)."""
    if isinstance(f, BiTruncatedSeries):
        return f.sqrt()
    if f.coeffs[0] != 1:
        raise NotInvertibleError("series_sqrt needs constant term 1")
    n = f.order
    a = f.coeffs
    g = [0] * (n + 1)
    g[0] = 1
    for m in range(1, n + 1):
        acc = a[m]
        for i in range(1, m):
            acc = acc - g[i] * g[m - i]
        g[m] = _half(acc)
    return TruncatedSeries(g, n, f.mainvar)


# ---------------------------------------------------------------------------
# bivariate truncated series
# ---------------------------------------------------------------------------


class BiTruncatedSeries:
    """Series in two variables with a rectangular truncation ``(Ns, Nt)``."""

    __slots__ = ("coeffs", "orders", "vars")

    def __init__(self, coeffs, orders: tuple[int, int], vars: tuple[str, str] = ("s", "t")):
        ns, nt = orders
        rows = [list(r)[: nt + 1] for r in list(coeffs)[: ns + 1]]
        rows += [[] for _ in range(ns + 1 - len(rows))]
        self.coeffs = tuple(tuple(r + [0] * (nt + 1 - len(r))) for r in rows)
        self.orders = (ns, nt)
        self.vars = tuple(vars)

    @classmethod
    def zero(cls, orders, vars=("s", "t")):
        return cls([], orders, vars)

    @classmethod
    def one(cls, orders, vars=("s", "t")):
        return cls([[1]], orders, vars)

    @classmethod
    def monomial(cls, i: int, j: int, orders, c=1, vars=("s", "t")):
        rows = [[0] * (orders[1] + 1) for _ in range(orders[0] + 1)]
        if i <= orders[0] and j <= orders[1]:
            rows[i][j] = c
        return cls(rows, orders, vars)

    def __getitem__(self, ij):
        i, j = ij
        return self.coeffs[i][j]

    def __repr__(self):
        return f"BiTruncatedSeries(orders={self.orders}, vars={self.vars})"

    def __eq__(self, other):
        if isinstance(other, BiTruncatedSeries):
            return self.orders == other.orders and all(
                x == y for r1, r2 in zip(self.coeffs, other.coeffs) for x, y in zip(r1, r2)
            )
        return NotImplemented

    __hash__ = None

    def _check(self, other):
        if self.orders != other.orders:
            raise RingMismatchError(f"order mismatch: {self.orders} vs {other.orders}")
        if self.vars != other.vars:
            raise RingMismatchError(f"variable mismatch: {self.vars} vs {other.vars}")

    def __add__(self, other):
        if isinstance(other, BiTruncatedSeries):
            self._check(other)
            return BiTruncatedSeries(
                [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(self.coeffs, other.coeffs)],
                self.orders, self.vars,
            )
        rows = [list(r) for r in self.coeffs]
        rows[0][0] = rows[0][0] + other
        return BiTruncatedSeries(rows, self.orders, self.vars)

    __radd__ = __add__

    def __neg__(self):
        return self.map(lambda c: -c)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, BiTruncatedSeries):
            return self.map(lambda c: c * other)
        self._check(other)
        ns, nt = self.orders
        out = [[0] * (nt + 1) for _ in range(ns + 1)]
        a, b = self.coeffs, other.coeffs
        nz_b = [(k, l, b[k][l]) for k in range(ns + 1) for l in range(nt + 1) if b[k][l] != 0]
        for i in range(ns + 1):
            for j in range(nt + 1):
                x = a[i][j]
                if x == 0:
                    continue
                for k, l, y in nz_b:
                    if i + k <= ns and j + l <= nt:
                        out[i + k][j + l] = out[i + k][j + l] + x * y
        return BiTruncatedSeries(out, self.orders, self.vars)

    __rmul__ = __mul__

    def map(self, fn):
        return BiTruncatedSeries([[fn(c) for c in r] for r in self.coeffs], self.orders, self.vars)

    def inverse(self) -> "BiTruncatedSeries":
        inv0 = _unit_inverse(self.coeffs[0][0])
        rest = self - self.coeffs[0][0]
        # 1/(c + R) = c^{-1} * sum (-R/c)^k ; R has no constant term
        term = BiTruncatedSeries.one(self.orders, self.vars) * inv0
        acc = term
        step = rest * (-inv0)
        for _ in range(sum(self.orders)):
            term = term * step
            acc = acc + term
        return acc

    def sqrt(self) -> "BiTruncatedSeries":
        if self.coeffs[0][0] != 1:
            raise NotInvertibleError("sqrt needs constant term 1")
        # (1 + R)^{1/2} = sum binom(1/2, k) R^k
        rest = self - 1
        acc = BiTruncatedSeries.one(self.orders, self.vars)
        term = BiTruncatedSeries.one(self.orders, self.vars)
        coef = Fraction(1)
        for k in range(1, sum(self.orders) + 1):
            coef = coef * (Fraction(1, 2) - (k - 1)) / k
            term = term * rest
            acc = acc + term * coef
        return acc

    def to_json(self) -> list:
        return [[c.to_json() if isinstance(c, Polynomial) else str(c) for c in r] for r in self.coeffs]


# ---------------------------------------------------------------------------
# composition
# ---------------------------------------------------------------------------


class OnlineComposer:
    """Incremental coefficients of ``sum_n F_n(A) U**n``.

    ``F`` is a list of coefficient lists: ``F[n][k]`` is the coefficient of
    ``a**k u**n``.  ``U`` must have no constant term.  The coefficient of
    order ``m`` only reads ``A[0..m-1]`` and ``U[0..m]`` (plus ``F_0(A)``,
    which must therefore be constant), so an order-by-order solver can feed
    the series as it learns them.
    """

    def __init__(self, F: Sequence[Sequence[Any]], order: int):
        self.order = order
        self.F = [list(F[n]) if n < len(F) else [] for n in range(order + 1)]
        while self.F[0] and self.F[0][-1] == 0:
            self.F[0].pop()
        if len(self.F[0]) > 1:
            raise ValueError("F_0 must be constant for online composition")
        self.maxdeg = max((len(f) - 1 for f in self.F), default=0)
        self.A: list = []
        self.U: list = []
        # PA[k][i] = [x^i] A^k ; PU[n][j] = [x^j] U^n ; G[n][i] = [x^i] F_n(A)
        self.PA: list[list] = [[] for _ in range(self.maxdeg + 1)]
        self.PU: list[list] = [[] for _ in range(order + 1)]
        self.G: list[list] = [[] for _ in range(order + 1)]

    def push_A(self, value) -> None:
        i = len(self.A)
        self.A.append(value)
        A = self.A
        for k in range(self.maxdeg + 1):
            if k == 0:
                v = 1 if i == 0 else 0
            else:
                prev = self.PA[k - 1]
                v = 0
                for r in range(i + 1):
                    if A[r] != 0 and prev[i - r] != 0:
                        v = v + A[r] * prev[i - r]
            self.PA[k].append(v)
        for n in range(self.order + 1):
            acc = 0
            for k, c in enumerate(self.F[n]):
                if c != 0:
                    acc = acc + c * self.PA[k][i]
            self.G[n].append(acc)

    def push_U(self, value) -> None:
        j = len(self.U)
        if j == 0 and value != 0:
            raise ValueError("U must have zero constant term")
        self.U.append(value)
        U = self.U
        for n in range(self.order + 1):
            if n == 0:
                v = 1 if j == 0 else 0
            else:
                prev = self.PU[n - 1]
                v = 0
                for r in range(1, j + 1):
                    if U[r] != 0 and prev[j - r] != 0:
                        v = v + U[r] * prev[j - r]
            self.PU[n].append(v)

    def coefficient(self, m: int):
        """``[x^m] sum_n F_n(A) U^n`` given ``A[:m]`` and ``U[:m+1]``."""
        if len(self.U) < m + 1 or len(self.A) < max(m, 1):
            raise ValueError(f"order {m} needs A to order {m - 1} and U to order {m}")
        acc = self.F[0][0] if (m == 0 and self.F[0]) else 0
        for n in range(1, m + 1):
            Gn, PUn = self.G[n], self.PU[n]
            for i in range(0, m - n + 1):
                g = Gn[i]
                if g != 0:
                    p = PUn[m - i]
                    if p != 0:
                        acc = acc + g * p
        return acc


def compose(F: Sequence[Sequence[Any]], A: TruncatedSeries, U: TruncatedSeries) -> TruncatedSeries:
    """``sum_n F_n(A) U**n`` truncated at the common order (``U`` has valuation >= 1)."""
    A._check(U) if A.mainvar == U.mainvar else None
    order = A.order
    if U.order != order:
        raise RingMismatchError("order mismatch in composition")
    if U.coeffs[0] != 0:
        raise ValueError("inner series U must have zero constant term")
    F = list(F)
    maxdeg = max((len(f) - 1 for f in F[: order + 1]), default=0)
    powers_A = [TruncatedSeries.one(order, A.mainvar)]
    for _ in range(maxdeg):
        powers_A.append(powers_A[-1] * A)
    total = TruncatedSeries([0], order, A.mainvar)
    Un = TruncatedSeries.one(order, A.mainvar)
    for n in range(min(order, len(F) - 1) + 1):
        if n > 0:
            Un = Un * U
        Gn = TruncatedSeries([0], order, A.mainvar)
        for k, c in enumerate(F[n]):
            if c != 0:
                Gn = Gn + powers_A[k] * c
        total = total + Gn * Un
    return total


def poly_rows(series: TruncatedSeries) -> list[list]:
    """Coefficient lists of a series with polynomial (or scalar) coefficients."""
    rows = []
    for c in series.coeffs:
        if isinstance(c, Polynomial):
            rows.append(list(c.coeffs))
        else:
            rows.append([c] if c != 0 else [])
    return rows


def dumps(obj) -> str:
    return json.dumps(obj.to_json())
