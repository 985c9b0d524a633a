import pytest

from gbstrees.ball import expand_ball, fixed_sets_meet, min_displacement_in_ball
from gbstrees.britton import (
    _pinch, britton_reduce, fix_overlap, is_elliptic, is_identity, reduce_path, translation_length,
)
from gbstrees.model import ModelError, PathWord, TreeHandle
from gbstrees.moves import relations
from gbstrees.sampling import random_gbs, random_word, rng_for, word_set

from conftest import two_edge_loop_master, word

X = PathWord(1)
T = word(("t", 1, 0))
TINV = word(("t", -1, 0))


def test_defining_relation_bs12(bs12):
    r = britton_reduce(T * X * TINV, bs12)
    assert r.word == PathWord(2)
    assert r.length == 0 and r.word.base_exp == 2


def test_bs23_conjugate_of_generator(bs23):
    g = T * X * TINV
    assert britton_reduce(g, bs23).length == 2  # 2 does not divide 1: no pinch
    r = britton_reduce(g, bs23, cyclic=True)
    assert r.word == X and r.length == 0
    assert r.conjugator == T
    assert is_elliptic(g, bs23)
    ball = expand_ball(bs23, 6, toward=[g])
    d = min_displacement_in_ball(g, ball)
    assert (d.value, d.certified) == (0, True)


def test_no_pinch_t_x_t(bs12):
    g = T * X * T
    r = britton_reduce(g, bs12, cyclic=True)
    assert r.length == 2 and r.is_cyclically_reduced
    syl = r.word.syllables
    # every rotation: no adjacent inverse letters at all
    for i in range(len(syl)):
        a, b = syl[i], syl[(i + 1) % len(syl)]
        assert b.letter != a.letter.inverse()


def test_lengths_examples(bs12):
    assert translation_length(PathWord(), TreeHandle.full(bs12)) == 0
    assert translation_length(T, TreeHandle(bs12, {"t"})) == 1


def test_collapse_counts_kept_letters():
    g = two_edge_loop_master()
    w = word(("e", 1, 1), ("f", 1, 1), ("e", 1, 1), ("f", 1, 1))
    assert translation_length(w, TreeHandle.full(g)) == 4
    H = TreeHandle(g, {"e"})
    assert translation_length(w, H) == 2
    ball = expand_ball(H, 8, toward=[w])
    d = min_displacement_in_ball(w, ball, H)
    assert (d.value, d.certified) == (2, True)


def test_vertex_generator_elliptic(bs12, bs23):
    for g in (bs12, bs23, two_edge_loop_master()):
        assert is_elliptic(X, TreeHandle.full(g))


def test_fix_overlap_matches_ball(bs23):
    g, h = X, T * X * TINV
    ans = fix_overlap(g, h, bs23)
    ball = expand_ball(bs23, 8, toward=[g, h])
    f = fixed_sets_meet(g, h, ball)
    assert f.certified and f.meet == ans


def test_fix_overlap_rejects_hyperbolic(bs23):
    with pytest.raises(ValueError):
        fix_overlap(X, T, bs23)


def test_open_path_rejected(bs12):
    from gbstrees.model import GbsGraph
    g = GbsGraph.build(["a", "b"], [("e", "a", "b", 2, 3)])
    with pytest.raises(ModelError):
        britton_reduce(word(("e", -1, 0)), g)


def test_relations_reduce_to_identity():
    for i in range(100):
        g = random_gbs(rng_for(5, i))
        for _, rel in relations(g):
            assert is_identity(rel, g)


def test_reduced_forms_are_sound():
    for i in range(150):
        rng = rng_for(6, i)
        g = random_gbs(rng)
        w = random_word(g, rng)
        r = britton_reduce(w, g, cyclic=True)
        # no pinch left inside the word
        syl = r.word.syllables
        for a, b in zip(syl, syl[1:]):
            assert _pinch(g, a, b.letter) is None
        # conj * word * conj^-1 equals the input
        back = r.conjugator * r.word * r.conjugator.inverse() * w.inverse()
        assert is_identity(back, g)
        assert r.word.problems(g, r.vertex) == []


def test_conjugacy_and_inverse_invariance():
    for i in range(100):
        rng = rng_for(7, i)
        g = random_gbs(rng)
        T_ = TreeHandle(g, {e for e in g.edge_ids if rng.random() < 0.6})
        w, c = random_word(g, rng), random_word(g, rng)
        lw = translation_length(w, T_)
        assert translation_length(c * w * c.inverse(), T_) == lw
        assert translation_length(w.inverse(), T_) == lw


def test_reduction_deterministic(bs23):
    ws = word_set(bs23, 20, seed=3)
    assert [britton_reduce(w, bs23, cyclic=True) for w in ws] == [britton_reduce(w, bs23, cyclic=True) for w in ws]


def test_reduce_path_open():
    from gbstrees.model import GbsGraph
    g = GbsGraph.build(["a", "b"], [("e", "a", "b", 2, 3)])
    # e^-1 goes a -> b; e^-1 y^3 e pinches to x^2
    w = word(("e", -1, 3), ("e", 1, 0))
    assert reduce_path(w, g) == PathWord(2)
