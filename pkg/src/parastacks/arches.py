"""Arch systems and their walk encodings.

Position p of a word of length 2n is an endpoint of one arch; arch k opens at
the k-th push and closes when item k is popped.  Red arches come from stack 1
(letters E/W), blue ones from stack 2 (N/S).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

from .machine import InvalidWordError, check_word, to_walk

__all__ = [
    "RED",
    "BLUE",
    "Arch",
    "ArchSystem",
    "opword_to_arches",
    "arches_to_opword",
    "crossing_graph",
    "components",
    "left_right_pairs",
    "is_standard",
    "is_canonical",
    "outputs_eagerly",
    "eager_normal_form",
    "eager_normal_form_by_swaps",
    "canonicalize",
    "primitive_factorization",
    "corner_involution",
    "count_factor",
    "shuffle_class_key",
]

RED = "red"
BLUE = "blue"


@dataclass(frozen=True)
class Arch:
    open: int
    close: int
    colour: str

    def crosses(self, other: "Arch") -> bool:
        if self.colour == other.colour:
            return False
        a, b = self, other
        return a.open < b.open < a.close < b.close or b.open < a.open < b.close < a.close


class ArchSystem:
    """Bicoloured arch system; arches numbered 1..n by left endpoint."""

    def __init__(self, arches: Iterable[Arch | tuple]):
        arcs = [a if isinstance(a, Arch) else Arch(int(a[0]), int(a[1]), str(a[2])) for a in arches]
        arcs.sort(key=lambda a: a.open)
        self.arches: tuple[Arch, ...] = tuple(arcs)
        self.n = len(arcs)
        self._validate()

    def _validate(self):
        ends = sorted(p for a in self.arches for p in (a.open, a.close))
        if ends != list(range(1, 2 * self.n + 1)):
            raise ValueError("arch endpoints must cover 1..2n exactly once")
        for a in self.arches:
            if a.colour not in (RED, BLUE):
                raise ValueError(f"bad colour {a.colour!r}")
            if not a.open < a.close:
                raise ValueError(f"arch {a} has open >= close")
        for i, a in enumerate(self.arches):
            for b in self.arches[i + 1:]:
                if a.colour == b.colour and (a.open < b.open < a.close < b.close):
                    raise ValueError(f"arches {a} and {b} of the same colour cross")

    def arch(self, k: int) -> Arch:
        """Arch number k (1-based)."""
        return self.arches[k - 1]

    def __eq__(self, other):
        return isinstance(other, ArchSystem) and self.arches == other.arches

    def __hash__(self):
        return hash(self.arches)

    def __repr__(self):
        return f"ArchSystem({[tuple(vars(a).values()) for a in self.arches]})"

    def to_json(self) -> list:
        return [[a.open, a.close, a.colour] for a in self.arches]

    @classmethod
    def from_json(cls, data: str | list) -> "ArchSystem":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(tuple(x) for x in data)

    def reflect(self, arch_numbers: Iterable[int]) -> "ArchSystem":
        flip = set(arch_numbers)
        return ArchSystem(
            Arch(a.open, a.close, (BLUE if a.colour == RED else RED) if k in flip else a.colour)
            for k, a in enumerate(self.arches, start=1)
        )


def _system(x) -> ArchSystem:
    return x if isinstance(x, ArchSystem) else opword_to_arches(x)


def opword_to_arches(word: str) -> ArchSystem:
    word = to_walk(word)
    check_word(word)
    stacks: tuple[list[int], list[int]] = ([], [])
    opens: list[int] = []
    closes: dict[int, int] = {}
    for pos, ch in enumerate(word, start=1):
        if ch in "EN":
            opens.append(pos)
            stacks["EN".index(ch)].append(len(opens))
        else:
            k = stacks["WS".index(ch)].pop()
            closes[k] = pos
    colours = {}
    for k, pos in enumerate(opens, start=1):
        colours[k] = RED if word[pos - 1] == "E" else BLUE
    return ArchSystem(Arch(opens[k - 1], closes[k], colours[k]) for k in range(1, len(opens) + 1))


def arches_to_opword(x: ArchSystem) -> str:
    letters = [""] * (2 * x.n)
    for a in x.arches:
        red = a.colour == RED
        letters[a.open - 1] = "E" if red else "N"
        letters[a.close - 1] = "W" if red else "S"
    return "".join(letters)


def crossing_graph(x) -> list[tuple[int, int]]:
    """Edges (k, l), k < l, between crossing arches (arch numbers are 1-based)."""
    x = _system(x)
    out = []
    arcs = x.arches
    for k in range(x.n):
        for l in range(k + 1, x.n):
            if arcs[k].crosses(arcs[l]):
                out.append((k + 1, l + 1))
    return out


def components(x) -> list[list[int]]:
    """Connected components of the crossing graph, each sorted, ordered by first arch."""
    x = _system(x)
    parent = list(range(x.n + 1))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for k, l in crossing_graph(x):
        rk, rl = find(k), find(l)
        if rk != rl:
            parent[max(rk, rl)] = min(rk, rl)
    groups: dict[int, list[int]] = {}
    for k in range(1, x.n + 1):
        groups.setdefault(find(k), []).append(k)
    return sorted(groups.values(), key=lambda g: g[0])


def count_factor(word: str, factor: str) -> int:
    return sum(1 for i in range(len(word) - len(factor) + 1) if word.startswith(factor, i))


def left_right_pairs(x) -> int:
    """Left endpoint immediately followed by a right endpoint of the other colour."""
    if isinstance(x, ArchSystem):
        word = arches_to_opword(x)
    else:
        word = to_walk(x)
    return count_factor(word, "ES") + count_factor(word, "NW")


def outputs_eagerly(x) -> bool:
    return left_right_pairs(x) == 0


def is_standard(x) -> bool:
    x = _system(x)
    return all(x.arch(comp[0]).colour == RED for comp in components(x))


def is_canonical(x) -> bool:
    x = _system(x)
    return left_right_pairs(x) == 0 and is_standard(x)


def eager_normal_form(word: str) -> str:
    """Push every pop as early as the other stack allows (one left-to-right pass).

    ES becomes SE and NW becomes WN until neither factor remains; an S slides
    left over the run of E's just before it, a W over the run of N's.
    """
    out: list[str] = []
    for ch in word:
        slide = {"S": "E", "W": "N"}.get(ch)
        if slide is None:
            out.append(ch)
            continue
        k = len(out)
        while k and out[k - 1] == slide:
            k -= 1
        out.insert(k, ch)
    return "".join(out)


def eager_normal_form_by_swaps(word: str) -> str:
    """Reference implementation: repeated adjacent rewriting."""
    w = word
    while True:
        nw = w.replace("ES", "SE").replace("NW", "WN")
        if nw == w:
            return w
        w = nw


def canonicalize(word: str) -> str:
    """Canonical word with the same output: eager rewriting, then make every component start red."""
    word = to_walk(word)
    check_word(word)
    x = opword_to_arches(eager_normal_form(word))
    blue_first = [k for comp in components(x) if x.arch(comp[0]).colour == BLUE for k in comp]
    if blue_first:
        x = x.reflect(blue_first)
    return arches_to_opword(x)


def primitive_factorization(word: str) -> list[str]:
    """Split a loop at its interior returns to the origin."""
    word = to_walk(word)
    check_word(word)
    out = []
    h0 = h1 = 0
    start = 0
    for i, ch in enumerate(word):
        if ch == "E":
            h0 += 1
        elif ch == "W":
            h0 -= 1
        elif ch == "N":
            h1 += 1
        else:
            h1 -= 1
        if h0 == 0 and h1 == 0:
            out.append(word[start:i + 1])
            start = i + 1
    return out


def corner_involution(word: str) -> str:
    """Reverse every maximal block of letters from {N, W}."""
    out = []
    block: list[str] = []
    for ch in word:
        if ch in "NW":
            block.append(ch)
        else:
            out.extend(reversed(block))
            block = []
            out.append(ch)
    out.extend(reversed(block))
    return "".join(out)


def shuffle_class_key(word: str) -> tuple[str, str]:
    """(vertical projection, horizontal projection)."""
    return "".join(c for c in word if c in "NS"), "".join(c for c in word if c in "EW")
