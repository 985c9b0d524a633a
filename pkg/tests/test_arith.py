import itertools

import pytest

from gbstrees import corpus
from gbstrees.arith import (
    Evaluator, compat_falsify, compat_verify, const1_evaluator, dichotomy, gcd_handles, lcm_cleanup, lcm_family,
    lcm_handles, pair_values, prime_factors, tree_evaluator, verify_certificate,
)
from gbstrees.britton import is_elliptic, translation_length
from gbstrees.model import TreeHandle
from gbstrees.moves import MarkingError
from gbstrees.sampling import random_gbs, rng_for, word_set

from conftest import full


def lengths(T, ws):
    return [translation_length(w, T) for w in ws]


def sub(g, *edges):
    return TreeHandle(g, frozenset(edges))


def test_primes_one_edge(bs23):
    (p,) = prime_factors(full(bs23))
    assert p.handle == full(bs23) and p.source_edge == "t" and not p.trivial_splitting


def test_primes_trivial_handle(bs23):
    assert prime_factors(sub(bs23)) == []


def test_primes_sum_two_edge():
    g = corpus.load("two_edge")
    ps = prime_factors(full(g))
    assert [p.source_edge for p in ps] == ["e", "f"]
    for w in word_set(g, 100, seed=1):
        assert translation_length(w, full(g)) == sum(translation_length(w, p.handle) for p in ps)


def test_trivial_splittings_flagged():
    assert prime_factors(corpus.load("h_segment_1_5"))[0].trivial_splitting
    assert not prime_factors(corpus.load("h_segment_2_3"))[0].trivial_splitting
    flags = {p.source_edge: p.trivial_splitting for p in prime_factors(corpus.load("h_chain"))}
    assert flags == {"e": True, "f": True, "g": False, "h": False}


def test_trivial_flag_matches_lengths():
    for i in range(60):
        g = random_gbs(rng_for(9, i))
        ws = word_set(g, 60, seed=i)
        for p in prime_factors(full(g)):
            assert p.trivial_splitting == all(translation_length(w, p.handle) == 0 for w in ws)


def test_squarefree_on_corpus():
    # non-trivial prime factors carry distinct length functions
    for name in corpus.masters():
        g = corpus.load(name)
        ws = word_set(g, 500, seed=0)
        sigs = [tuple(lengths(p.handle, ws)) for p in prime_factors(full(g)) if not p.trivial_splitting]
        assert len(set(sigs)) == len(sigs), name


def test_gcd_lcm_examples():
    g = corpus.load("three_edge")
    T1, T2 = sub(g, "e", "f"), sub(g, "f", "g")
    assert gcd_handles(T1, T2).kept == {"f"}
    assert lcm_handles(T1, T2).kept == {"e", "f", "g"}
    triv = sub(g)
    assert lcm_handles(T1, T1) == T1
    assert gcd_handles(T1, triv) == triv and lcm_handles(T1, triv).kept == T1.kept
    gc, lc = gcd_handles(T1, T2), lcm_handles(T1, T2)
    for w in word_set(g, 100, seed=2):
        assert (translation_length(w, gc) + translation_length(w, lc)
                == translation_length(w, T1) + translation_length(w, T2))


def test_different_masters_rejected(bs12, bs23):
    with pytest.raises(MarkingError):
        gcd_handles(full(bs12), full(bs23))
    with pytest.raises(MarkingError):
        compat_verify(full(bs12), full(bs12), full(bs23))


def test_lcm_family():
    g = corpus.load("four_edge")
    T = full(g)
    assert lcm_family([T]) == T
    assert lcm_family([p.handle for p in prime_factors(T)]) == T
    with pytest.raises(ValueError):
        lcm_family([])


def test_lcm_family_ellipticity():
    for i in range(5):
        rng = rng_for(10, i)
        g = random_gbs(rng, max_edges=4)
        while len(g.edges) != 4:
            g = random_gbs(rng, max_edges=4)
        fam = [sub(g, *[e for e in g.edge_ids if rng.random() < 0.5]) for _ in range(3)]
        L = lcm_family(fam)
        for w in word_set(g, 200, seed=i):
            assert is_elliptic(w, L) == all(is_elliptic(w, T) for T in fam)


def test_refinement_is_subset_logic():
    g = corpus.load("four_edge")
    subsets = [frozenset(c) for k in range(5) for c in itertools.combinations(g.edge_ids, k)]
    rng = rng_for(11)
    for _ in range(50):
        fam = [sub(g, *rng.choice(subsets)) for _ in range(3)]
        S = sub(g, *rng.choice(subsets))
        L = lcm_family(fam)
        assert (L.kept <= S.kept) == all(T.kept <= S.kept for T in fam)


def test_lcm_cleanup_reports_only():
    T = corpus.load("h_three_edge")
    c = lcm_cleanup(T)
    assert "unchanged" in c.note
    assert lcm_handles(T, T).kept == T.kept


def test_compat_verify_examples():
    g = corpus.load("three_edge")
    T1, T2 = sub(g, "e", "f"), sub(g, "f", "g")
    rep = compat_verify(T1, T2, lcm_handles(T1, T2))
    assert rep.verdict == "compatible" and rep.certificate["refinement"].kept == {"e", "f", "g"}
    rep = compat_verify(T1, T2, sub(g, "f", "g"))
    assert rep.verdict == "unknown" and "T1" in rep.explanation and "['e']" in rep.explanation
    T, Tp, Tpp = full(g), sub(g, "e", "g"), sub(g, "g")
    assert compat_verify(Tp, Tpp, T).verdict == "compatible"


def test_dichotomy_branches():
    assert dichotomy(1, 1, 3, 3) == "disjoint"
    assert dichotomy(1, 1, 2, 0) == "meeting"
    assert dichotomy(2, 2, 3, 3) is None


def test_falsify_tree_with_itself(bs23):
    l = tree_evaluator(full(bs23))
    rep = compat_falsify(l, l, budget=1500, seed=0)
    assert rep.verdict == "unknown" and rep.certificate is None and rep.samples_used == 1500


def test_falsify_const1(bs23):
    l1, l2 = tree_evaluator(full(bs23)), const1_evaluator(bs23)
    rep = compat_falsify(l1, l2, budget=5000, seed=7)
    assert rep.verdict == "incompatible"
    c = rep.certificate
    v = c["values"]
    # hand check: both branches fail on the recorded values
    s = v["g"] + v["h"]
    assert not (v["gh"] == v["ginvh"] > s) and max(v["gh"], v["ginvh"]) != s
    assert verify_certificate(l1, l2, c)
    # values are engine lengths plus one
    assert v["g"] == translation_length(c["g"], bs23) + 1
    tampered = dict(c, values=dict(v, gh=v["gh"] + 1))
    assert not verify_certificate(l1, l2, tampered)


def test_falsify_two_collapses():
    g = corpus.load("three_edge")
    rep = compat_falsify(tree_evaluator(sub(g, "e", "f")), tree_evaluator(sub(g, "f", "g")), budget=1000, seed=3)
    assert rep.verdict == "unknown"


def test_falsify_never_says_compatible():
    g = corpus.load("two_edge")
    for seed in range(3):
        rep = compat_falsify(tree_evaluator(full(g)), const1_evaluator(g), budget=300, seed=seed)
        assert rep.verdict in ("unknown", "incompatible")


def test_falsify_thread_independent(bs23):
    l1, l2 = tree_evaluator(full(bs23)), const1_evaluator(bs23)
    a = compat_falsify(l1, l2, budget=800, seed=4, threads=1)
    b = compat_falsify(l1, l2, budget=800, seed=4, threads=4)
    assert a == b


def test_falsify_rejects_mixed_graphs(bs12, bs23):
    with pytest.raises(MarkingError):
        compat_falsify(tree_evaluator(full(bs12)), const1_evaluator(bs23), budget=10)


def test_generic_evaluator_sum(bs12):
    T = full(bs12)
    half = Evaluator("custom", bs12, lambda w: translation_length(w, T))
    ws = word_set(bs12, 10, seed=5)
    for g, h in zip(ws, ws[1:]):
        assert pair_values(half, half, g, h) == pair_values(tree_evaluator(T), tree_evaluator(T), g, h)
