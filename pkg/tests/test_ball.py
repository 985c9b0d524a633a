import pytest

from gbstrees.ball import (
    BallLimitError, act, bridge_distance, displacement_formula, distance, expand_ball, fixed_sets_meet,
    min_displacement_in_ball,
)
from gbstrees.britton import is_elliptic, translation_length
from gbstrees.model import PathWord, TreeHandle
from gbstrees.sampling import random_gbs, random_word, rng_for

from conftest import word

X = PathWord(1)
T = word(("t", 1, 0))
TINV = word(("t", -1, 0))


def valence(ball, vid):
    return sum(vid in (e.src, e.dst) for e in ball.tree.edges)


def test_bs12_radius1_valence3(bs12):
    b = expand_ball(bs12, 1)
    assert valence(b, b.tree.center) == 3 and len(b) == 4


def test_bs23_radius1_valence5(bs23):
    b = expand_ball(bs23, 1)
    assert valence(b, b.tree.center) == 5


def test_radius0_single_vertex(bs23):
    b = expand_ball(bs23, 0)
    assert len(b) == 1 and b.tree.edges == ()


def test_negative_radius(bs12):
    with pytest.raises(ValueError):
        expand_ball(bs12, -1)


def test_cap(bs23):
    with pytest.raises(BallLimitError):
        expand_ball(bs23, 6, max_vertices=100)


def test_t_displacement_certified(bs12):
    b = expand_ball(bs12, 4)
    d = min_displacement_in_ball(T, b)
    assert (d.value, d.certified) == (1, True)
    assert d.value == translation_length(T, bs12)


def test_conjugate_elliptic_displacement(bs23):
    g = T * X * TINV
    b = expand_ball(bs23, 6, toward=[g])
    d = min_displacement_in_ball(g, b)
    assert (d.value, d.certified) == (0, True)


def test_uncertified_when_too_small(bs12):
    g = word(("t", 1, 1), ("t", 1, 1), ("t", 1, 1), ("t", 1, 1))
    b = expand_ball(bs12, 1, toward=[g])
    assert not min_displacement_in_ball(g, b).certified


def test_action_is_a_tree_isometry(bs23):
    rng = rng_for(1, "iso")
    pts = list(expand_ball(bs23, 3).nf.values())
    for _ in range(40):
        g = random_word(bs23, rng, 6)
        a, b = rng.choice(pts), rng.choice(pts)
        assert distance(act(bs23, g, a), act(bs23, g, b)) == distance(a, b)
        # action respects multiplication
        h = random_word(bs23, rng, 6)
        assert act(bs23, g * h, a) == act(bs23, g, act(bs23, h, a))


def test_full_ball_agrees_with_hull():
    for i in range(30):
        rng = rng_for(2, i)
        g = random_gbs(rng, max_edges=3, max_label=3)
        w = random_word(g, rng, 3, 2)
        n = len(w)
        full = expand_ball(g, n)
        hull = expand_ball(g, n, toward=[w])
        a, b = min_displacement_in_ball(w, full), min_displacement_in_ball(w, hull)
        assert a.certified and b.certified and a.value == b.value
        assert a.value == displacement_formula(w, g) == translation_length(w, g)


def test_fixed_sets_and_bridge(bs23):
    g, h = X, T * X * TINV
    b = expand_ball(bs23, 6, toward=[g, h])
    f = fixed_sets_meet(g, h, b)
    # x and t x t^-1 have disjoint fixed sets in BS(2,3): their product is hyperbolic
    assert f.certified and not f.meet
    assert not is_elliptic(g * h, bs23)
    f2 = fixed_sets_meet(g, PathWord(3), expand_ball(bs23, 2, toward=[g]))
    assert f2.meet and f2.certified
    y = word(("t", 1, 0), ("t", 1, 0))
    b2 = expand_ball(bs23, 4, toward=[T, y])
    br = bridge_distance(T, y, b2)
    assert br.certified


def test_collapse_distances(bs12):
    T0 = TreeHandle(bs12, frozenset())
    b = expand_ball(T0, 2, toward=[T])
    d = min_displacement_in_ball(T, b, T0)
    assert (d.value, d.certified) == (0, True)
