"""Two stacks working in parallel.

Items 1..n arrive in increasing order.  Each operation either pushes the
next item on one of the stacks or pops the top of one stack to the output.
Operation words are written in the walk alphabet::

    E = push on stack 1     W = pop stack 1
    N = push on stack 2     S = pop stack 2

so that a valid program is exactly a quarter-plane loop.
"""

from __future__ import annotations

from collections import deque
from concurrent.futures import ProcessPoolExecutor
from itertools import permutations
from typing import Iterable, Iterator

__all__ = [
    "InvalidWordError",
    "NotAchievableError",
    "BruteForceBoundError",
    "Permutation",
    "EvenItaiGraph",
    "OP_LETTERS",
    "to_walk",
    "to_ops",
    "check_word",
    "is_valid",
    "execute",
    "even_itai_graph",
    "is_achievable",
    "achievable_colouring",
    "canonical_sequence",
    "enumerate_achievable",
    "valid_words",
]

DEFAULT_BRUTE_BOUND = 10

# machine-operation spelling of the walk letters
OP_LETTERS = {"E": "I1", "N": "I2", "W": "O1", "S": "O2"}
_FROM_OPS = {v: k for k, v in OP_LETTERS.items()}
_PUSH = {"E": 0, "N": 1}
_POP = {"W": 0, "S": 1}


class InvalidWordError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        super().__init__(message if position is None else f"{message} (position {position})")
        self.position = position


class NotAchievableError(ValueError):
    pass


class BruteForceBoundError(ValueError):
    pass


class Permutation(tuple):
    """One-line notation of a permutation of 1..n."""

    def __new__(cls, entries: Iterable[int]):
        t = tuple(int(e) for e in entries)
        if sorted(t) != list(range(1, len(t) + 1)):
            raise ValueError(f"not a permutation of 1..{len(t)}: {t}")
        return super().__new__(cls, t)

    @classmethod
    def parse(cls, text: str | Iterable[str]) -> "Permutation":
        """Space separated integers, or a compact digit string when n <= 9."""
        if not isinstance(text, str):
            parts = [p for chunk in text for p in chunk.split()]
            if len(parts) == 1:
                return cls.parse(parts[0])
            return cls(int(p) for p in parts)
        parts = text.split()
        if len(parts) == 1 and len(parts[0]) > 1:
            if not parts[0].isdigit():
                raise ValueError(f"bad permutation text {text!r}")
            return cls(int(ch) for ch in parts[0])
        return cls(int(p) for p in parts)

    @property
    def n(self) -> int:
        return len(self)

    def __str__(self):
        if len(self) <= 9:
            return "".join(map(str, self))
        return " ".join(map(str, self))

    def positions(self) -> list[int]:
        """pos[v] = index of value v (0-based); pos[0] unused."""
        pos = [0] * (len(self) + 1)
        for i, v in enumerate(self):
            pos[v] = i
        return pos

    def pattern(self, values: Iterable[int]) -> "Permutation":
        """Sub-permutation formed by the given values, standardised."""
        keep = set(values)
        sub = [v for v in self if v in keep]
        order = {v: r + 1 for r, v in enumerate(sorted(sub))}
        return Permutation(order[v] for v in sub)


def to_walk(word: str | Iterable[str]) -> str:
    """Accept E/N/W/S or I1/I2/O1/O2 spellings; return the walk spelling."""
    if isinstance(word, str):
        w = word.replace(" ", "").upper()
        if any(ch in w for ch in "IO"):
            letters = [w[i:i + 2] for i in range(0, len(w), 2)]
            try:
                return "".join(_FROM_OPS[x] for x in letters)
            except KeyError as exc:
                raise InvalidWordError(f"unknown operation {exc.args[0]!r}") from None
        return w
    return "".join(_FROM_OPS.get(x, x) for x in word)


def to_ops(word: str) -> list[str]:
    return [OP_LETTERS[ch] for ch in word]


def check_word(word: str) -> None:
    """Raise InvalidWordError unless ``word`` is a shuffle of two Dyck words."""
    h = [0, 0]
    for i, ch in enumerate(word):
        if ch in _PUSH:
            h[_PUSH[ch]] += 1
        elif ch in _POP:
            k = _POP[ch]
            if h[k] == 0:
                raise InvalidWordError(f"pop from empty stack {k + 1}", i)
            h[k] -= 1
        else:
            raise InvalidWordError(f"unknown letter {ch!r}", i)
    if h != [0, 0]:
        raise InvalidWordError(f"stacks not empty at end (heights {h[0]}, {h[1]})", len(word))


def is_valid(word: str) -> bool:
    try:
        check_word(word)
    except InvalidWordError:
        return False
    return True


def execute(word: str) -> Permutation:
    """Output permutation of a valid operation word."""
    word = to_walk(word)
    stacks: tuple[list[int], list[int]] = ([], [])
    nxt = 1
    out = []
    for i, ch in enumerate(word):
        if ch in _PUSH:
            stacks[_PUSH[ch]].append(nxt)
            nxt += 1
        elif ch in _POP:
            st = stacks[_POP[ch]]
            if not st:
                raise InvalidWordError(f"pop from empty stack {_POP[ch] + 1}", i)
            out.append(st.pop())
        else:
            raise InvalidWordError(f"unknown letter {ch!r}", i)
    if stacks[0] or stacks[1]:
        raise InvalidWordError("stacks not empty at end", len(word))
    return Permutation(out)


class EvenItaiGraph:
    """Conflict graph: {i, j} (i < j) is an edge iff some k > j precedes i, and i precedes j."""

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        self.n = n
        self.edges = frozenset((min(e), max(e)) for e in edges)

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n + 1)]
        for i, j in sorted(self.edges):
            adj[i].append(j)
            adj[j].append(i)
        return adj

    def two_colouring(self) -> dict[int, int] | None:
        """0/1 colouring with the smallest vertex of each component coloured 0, or None."""
        adj = self.adjacency()
        colour: dict[int, int] = {}
        for root in range(1, self.n + 1):
            if root in colour:
                continue
            colour[root] = 0
            queue = deque([root])
            while queue:
                v = queue.popleft()
                for w in adj[v]:
                    if w not in colour:
                        colour[w] = 1 - colour[v]
                        queue.append(w)
                    elif colour[w] == colour[v]:
                        return None
        return colour

    def __eq__(self, other):
        return isinstance(other, EvenItaiGraph) and (self.n, self.edges) == (other.n, other.edges)

    def __repr__(self):
        return f"EvenItaiGraph(n={self.n}, edges={sorted(self.edges)})"


def even_itai_graph(p: Permutation | Iterable[int]) -> EvenItaiGraph:
    p = p if isinstance(p, Permutation) else Permutation(p)
    n = len(p)
    # prefix maxima make the k-test O(1): need max(p[:pos(i)]) > j
    before_max = [0] * (n + 1)
    m = 0
    for idx, v in enumerate(p):
        before_max[idx] = m
        m = max(m, v)
    edges = []
    for a in range(n):
        i = p[a]
        bound = before_max[a]
        if bound <= i + 1:
            continue
        for b in range(a + 1, n):
            j = p[b]
            if i < j < bound:
                edges.append((i, j))
    return EvenItaiGraph(n, edges)


def even_itai_graph_naive(p: Permutation | Iterable[int]) -> EvenItaiGraph:
    """Direct cubic scan of the defining pattern; used as an oracle."""
    p = tuple(p)
    n = len(p)
    edges = set()
    for x in range(n):
        for y in range(x + 1, n):
            for z in range(y + 1, n):
                k, i, j = p[x], p[y], p[z]
                if k > j > i:
                    edges.add((i, j))
    return EvenItaiGraph(n, edges)


def achievable_colouring(p) -> dict[int, int] | None:
    return even_itai_graph(p).two_colouring()


def is_achievable(p, with_colouring: bool = False):
    colouring = achievable_colouring(p)
    if with_colouring:
        return colouring is not None, colouring
    return colouring is not None


def canonical_sequence(p) -> str:
    """The canonical operation word producing ``p``.

    Items are popped as soon as they are the next output; otherwise the next
    item is pushed on the stack given by its colour (colour 0 = stack 1).
    """
    p = p if isinstance(p, Permutation) else Permutation(p)
    colour = achievable_colouring(p)
    if colour is None:
        raise NotAchievableError(f"{p} cannot be produced by two parallel stacks")
    n = len(p)
    stacks: tuple[list[int], list[int]] = ([], [])
    out_idx = 0
    nxt = 1
    word = []
    while out_idx < n:
        target = p[out_idx]
        if stacks[0] and stacks[0][-1] == target:
            stacks[0].pop()
            word.append("W")
            out_idx += 1
        elif stacks[1] and stacks[1][-1] == target:
            stacks[1].pop()
            word.append("S")
            out_idx += 1
        elif nxt <= n:
            k = colour[nxt]
            stacks[k].append(nxt)
            word.append("EN"[k])
            nxt += 1
        else:  # pragma: no cover - excluded by the colouring test
            raise NotAchievableError(f"simulation stuck on {p}")
    return "".join(word)


def _count_with_first(args) -> int:
    n, first = args
    rest = [v for v in range(1, n + 1) if v != first]
    return sum(1 for tail in permutations(rest) if achievable_colouring((first,) + tail) is not None)


def enumerate_achievable(n: int, brute_bound: int = DEFAULT_BRUTE_BOUND, listing: bool = False,
                         jobs: int = 1):
    """Count (and optionally list) achievable permutations of length n by exhaustive testing."""
    if n > brute_bound:
        raise BruteForceBoundError(f"n={n} exceeds brute-force bound {brute_bound}")
    if n < 0:
        raise ValueError("n must be nonnegative")
    if listing:
        perms = [Permutation(q) for q in permutations(range(1, n + 1)) if is_achievable(q)]
        return len(perms), perms
    if n == 0:
        return 1
    tasks = [(n, f) for f in range(1, n + 1)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return sum(ex.map(_count_with_first, tasks))
    return sum(map(_count_with_first, tasks))


def valid_words(n: int) -> Iterator[str]:
    """All valid operation words with n pushes (length 2n), in lexicographic E<N<S<W order."""
    buf: list[str] = []

    def rec(pushed: int, h0: int, h1: int):
        if pushed == n and h0 == 0 and h1 == 0:
            yield "".join(buf)
            return
        if pushed < n:
            for ch, d0, d1 in (("E", 1, 0), ("N", 0, 1)):
                buf.append(ch)
                yield from rec(pushed + 1, h0 + d0, h1 + d1)
                buf.pop()
        if h1:
            buf.append("S")
            yield from rec(pushed, h0, h1 - 1)
            buf.pop()
        if h0:
            buf.append("W")
            yield from rec(pushed, h0 - 1, h1)
            buf.pop()

    yield from rec(0, 0, 0)
