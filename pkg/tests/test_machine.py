from itertools import combinations, permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parastacks.arches import components, is_standard, outputs_eagerly
from parastacks.machine import (
    BruteForceBoundError,
    InvalidWordError,
    NotAchievableError,
    Permutation,
    canonical_sequence,
    check_word,
    enumerate_achievable,
    even_itai_graph,
    even_itai_graph_naive,
    execute,
    is_achievable,
    is_valid,
    to_ops,
    to_walk,
    valid_words,
)

# achievable counts; from two independent solver routes, frozen
S_COUNTS = [1, 1, 2, 6, 23, 103, 513, 2760, 15741]

perm_strategy = st.integers(1, 8).flatmap(lambda n: st.permutations(list(range(1, n + 1))))


def test_execute_examples():
    assert execute("EW") == (1,)
    assert str(execute("ENEEWWWESWNENSSW")) == "43125867"
    assert str(execute("ENEWWS")) == "312"
    assert execute("I1 I2 I1 O1 O1 O2") == (3, 1, 2)


def test_invalid_words():
    with pytest.raises(InvalidWordError) as exc:
        execute("EWW")
    assert exc.value.position == 2
    with pytest.raises(InvalidWordError):
        check_word("EN")
    with pytest.raises(InvalidWordError):
        check_word("EX")
    assert not is_valid("SN")
    assert is_valid("")


def test_spellings_round_trip():
    assert to_walk(to_ops("ENWS")) == "ENWS"
    assert to_walk("I1O1") == "EW"
    with pytest.raises(InvalidWordError):
        to_walk("I3O1")


def test_permutation_parsing():
    assert Permutation.parse("3 1 2") == (3, 1, 2)
    assert Permutation.parse("312") == (3, 1, 2)
    assert Permutation.parse(["3", "1", "2"]) == (3, 1, 2)
    assert Permutation.parse("10 1 2 3 4 5 6 7 8 9")[0] == 10
    with pytest.raises(ValueError):
        Permutation.parse("113")
    assert Permutation((3, 1, 4, 2)).pattern([1, 3, 4]) == (2, 1, 3)


def test_even_itai_examples():
    assert even_itai_graph((3, 1, 2)).edges == {(1, 2)}
    assert even_itai_graph(range(1, 7)).edges == frozenset()
    assert even_itai_graph((2, 4, 1, 3)) == even_itai_graph_naive((2, 4, 1, 3))


@given(perm_strategy)
def test_even_itai_matches_naive(p):
    assert even_itai_graph(p) == even_itai_graph_naive(p)


def test_achievability_small():
    assert is_achievable((3, 1, 2))
    assert all(is_achievable(p) for n in range(4) for p in permutations(range(1, n + 1)))
    bad = [p for p in permutations(range(1, 5)) if not is_achievable(p)]
    assert bad == [(4, 1, 2, 3)]


def test_canonical_examples():
    assert canonical_sequence((1, 2)) == "EWEW"
    assert canonical_sequence((3, 1, 2)) == "ENEWWS"
    w = canonical_sequence(Permutation.parse("43125867"))
    assert str(execute(w)) == "43125867"
    with pytest.raises(NotAchievableError):
        canonical_sequence((4, 1, 2, 3))


def test_canonical_312_is_the_only_canonical_producer():
    producers = [w for w in valid_words(3) if execute(w) == (3, 1, 2)]
    canon = [w for w in producers if outputs_eagerly(w) and is_standard(w)]
    assert canon == ["ENEWWS"]


@settings(max_examples=80)
@given(perm_strategy)
def test_canonical_sequence_properties(p):
    if not is_achievable(p):
        return
    w = canonical_sequence(p)
    assert execute(w) == tuple(p)
    assert outputs_eagerly(w)
    assert is_standard(w)
    assert len(components(w)) >= 1


@settings(max_examples=60)
@given(perm_strategy, st.data())
def test_closed_under_patterns(p, data):
    if not is_achievable(p):
        return
    n = len(p)
    k = data.draw(st.integers(1, n))
    values = data.draw(st.lists(st.integers(1, n), min_size=k, max_size=k, unique=True))
    assert is_achievable(Permutation(p).pattern(values))


def test_execute_gives_permutations():
    for n in range(5):
        for w in valid_words(n):
            assert sorted(execute(w)) == list(range(1, n + 1))


def test_valid_words_count():
    # shuffles of two Dyck words: sum_k binom(2n, 2k) C_k C_{n-k}
    from parastacks.exactnum import catalan
    from math import comb
    for n in range(6):
        expected = sum(comb(2 * n, 2 * k) * catalan(k) * catalan(n - k) for k in range(n + 1))
        assert sum(1 for _ in valid_words(n)) == expected


def test_enumerate_achievable():
    assert [enumerate_achievable(n) for n in range(8)] == S_COUNTS[:8]
    count, perms = enumerate_achievable(4, listing=True)
    assert count == 23 and (4, 1, 2, 3) not in perms
    with pytest.raises(BruteForceBoundError):
        enumerate_achievable(11)


def test_enumerate_achievable_parallel_agrees():
    assert enumerate_achievable(6, jobs=2) == 513


def test_supermultiplicative():
    for m, n in combinations(range(1, 9), 2):
        if m + n <= 8:
            assert S_COUNTS[m + n] >= S_COUNTS[m] * S_COUNTS[n]
