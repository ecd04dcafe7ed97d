import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parastacks.arches import (
    BLUE,
    RED,
    Arch,
    ArchSystem,
    arches_to_opword,
    canonicalize,
    components,
    corner_involution,
    count_factor,
    crossing_graph,
    eager_normal_form,
    eager_normal_form_by_swaps,
    is_canonical,
    is_standard,
    left_right_pairs,
    opword_to_arches,
    outputs_eagerly,
    primitive_factorization,
    shuffle_class_key,
)
from parastacks.machine import canonical_sequence, execute, valid_words

FIG5 = "ENEEWWWESWNENSSW"


def random_valid_word(rng: random.Random, n: int) -> str:
    """Uniform-ish random shuffle of two random Dyck words."""
    k = rng.randint(0, n)
    def dyck(m, up, down):
        seq = [up] * m + [down] * m
        while True:
            rng.shuffle(seq)
            h = 0
            for c in seq:
                h += 1 if c == up else -1
                if h < 0:
                    break
            else:
                return seq
    a, b = dyck(k, "E", "W"), dyck(n - k, "N", "S")
    slots = sorted(rng.sample(range(2 * n), 2 * k))
    out, ia, ib = [], 0, 0
    for i in range(2 * n):
        if ia < len(slots) and slots[ia] == i:
            out.append(a[ia]); ia += 1
        else:
            out.append(b[ib]); ib += 1
    return "".join(out)


words_strategy = st.builds(lambda seed, n: random_valid_word(random.Random(seed), n),
                           st.integers(0, 10 ** 9), st.integers(0, 10))


def test_single_arch():
    x = opword_to_arches("EW")
    assert x.arches == (Arch(1, 2, RED),)
    assert ArchSystem.from_json(x.to_json()) == x


def test_fig5_system():
    x = opword_to_arches(FIG5)
    assert x.n == 8
    assert len(components(x)) == 5
    assert left_right_pairs(x) == 1
    assert not is_canonical(x)
    assert str(execute(FIG5)) == "43125867"


def test_components_small():
    nested = ArchSystem([(1, 4, RED), (2, 3, RED)])
    assert components(nested) == [[1], [2]]
    crossing = ArchSystem([(1, 3, RED), (2, 4, BLUE)])
    assert components(crossing) == [[1, 2]]
    assert crossing_graph(crossing) == [(1, 2)]


def test_invalid_systems():
    with pytest.raises(ValueError):
        ArchSystem([(1, 3, RED), (2, 4, RED)])
    with pytest.raises(ValueError):
        ArchSystem([(1, 2, RED), (2, 3, BLUE)])
    with pytest.raises(ValueError):
        ArchSystem([(1, 2, "green")])


def test_left_right_pair_examples():
    assert left_right_pairs("ENSW") == 0
    assert left_right_pairs("ENWS") == 1
    assert count_factor("ESES", "ES") == 2


def test_standard_and_canonical_examples():
    assert not is_standard("NS")
    assert is_standard("EW")
    c = canonicalize(FIG5)
    assert is_canonical(c)
    assert str(execute(c)) == "43125867"
    assert canonicalize(c) == c
    assert c == canonical_sequence(execute(FIG5))


def test_primitive_factorization_examples():
    assert primitive_factorization("EWEW") == ["EW", "EW"]
    assert primitive_factorization("ENWS") == ["ENWS"]
    assert primitive_factorization("") == []


def test_involution_examples():
    assert corner_involution("ENWWSSNWES") == "EWWNSSWNES"
    assert corner_involution("EESSEW") == "EESSEW"


@settings(max_examples=200)
@given(words_strategy)
def test_word_arch_round_trip(w):
    assert arches_to_opword(opword_to_arches(w)) == w


@settings(max_examples=200)
@given(words_strategy)
def test_involution_is_involution(w):
    assert corner_involution(corner_involution(w)) == w


@settings(max_examples=200)
@given(words_strategy)
def test_crossing_graph_is_bipartite_by_colour(w):
    x = opword_to_arches(w)
    for k, l in crossing_graph(x):
        assert x.arch(k).colour != x.arch(l).colour


@settings(max_examples=200)
@given(words_strategy)
def test_canonicalize_preserves_output_random(w):
    c = canonicalize(w)
    assert execute(c) == execute(w)
    assert is_canonical(c)


def test_eager_forms_agree():
    for n in range(6):
        for w in valid_words(n):
            e = eager_normal_form(w)
            assert e == eager_normal_form_by_swaps(w)
            assert outputs_eagerly(e)
            assert execute(e) == execute(w)


def test_canonicalize_matches_machine_exhaustive():
    for n in range(6):
        for w in valid_words(n):
            assert canonicalize(w) == canonical_sequence(execute(w))


def test_connected_implies_primitive():
    for n in range(1, 7):
        for w in valid_words(n):
            if len(components(w)) == 1:
                assert primitive_factorization(w) == [w]


def test_canonical_count_equals_achievable_count():
    expected = [1, 1, 2, 6, 23, 103, 513]
    for n, s in enumerate(expected):
        canon = [w for w in valid_words(n) if is_canonical(w)]
        assert len(canon) == s
        assert len({execute(w) for w in canon}) == s


def test_involution_equidistribution():
    classes: dict = {}
    for n in range(6):
        for w in valid_words(n):
            classes.setdefault(shuffle_class_key(w), []).append(w)
    for words in classes.values():
        before = Counter((count_factor(w, "NW"), count_factor(w, "ES")) for w in words)
        images = [corner_involution(w) for w in words]
        assert all(shuffle_class_key(v) == shuffle_class_key(words[0]) for v in images)
        after = Counter((count_factor(v, "WN"), count_factor(v, "ES")) for v in images)
        assert before == after
