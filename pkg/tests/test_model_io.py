import json

import pytest
from hypothesis import given, settings, strategies as st

from gbstrees import corpus
from gbstrees.io import DocumentError, parse, serialize, to_data, validate
from gbstrees.model import (
    INF, BallEdge, BallTree, BallVertex, GbsGraph, Move, PathWord, SubgroupTable, Symbol, TreeHandle,
)
from gbstrees.moves import apply_move
from gbstrees.sampling import random_gbs, random_word, rng_for


def test_bs12_valid(bs12):
    assert validate(bs12).valid
    assert bs12.edges[0].label_from == 1 and bs12.edges[0].label_to == 2


def test_open_path_rejected(bs12):
    g = GbsGraph.build(["a", "b"], [("e", "a", "b", 1, 1)])
    r = validate(PathWord.of(0, ("e", -1, 0)), g)
    assert not r.valid
    assert any("path not closed" in e for e in r.errors)


def test_equiv_on_finite_symbol():
    t = SubgroupTable([Symbol("F", 2), Symbol("Z")], equiv={"K": ["F", "Z"]})
    r = validate(t)
    assert not r.valid
    assert any("equiv on finite symbol" in e for e in r.errors)


def test_roundtrip_bs23(bs23):
    assert parse(serialize(bs23)) == bs23


def test_identity_serialization():
    assert serialize(PathWord(), tagged=False) == '{"base_exp":0,"syllables":[]}'


def test_handle_serialization_deterministic(bs23):
    T = TreeHandle(bs23, {"t"}, (Move("collapse", edges=("t",)),))
    assert serialize(T) == serialize(TreeHandle(bs23, frozenset(["t"]), T.lineage))


def test_big_integers_as_strings():
    w = PathWord.of(2**60, ("t", 1, -(2**70)))
    text = serialize(w)
    assert '"1152921504606846976"' in text
    assert parse(text) == w


@pytest.mark.parametrize("bad, fragment", [
    ("{", "malformed JSON"),
    ('{"kind": "gbs", "vertices": ["v"], "edges": [{"id": "t", "from": "v", "to": "w", '
     '"label_from": 1, "label_to": 2}]}', "dangling"),
    ('{"kind": "gbs", "vertices": ["v"], "edges": [{"id": "t", "from": "v", "to": "v", '
     '"label_from": 0, "label_to": 2}]}', "zero label"),
    ('{"kind": "spoon"}', "kind"),
])
def test_malformed(bad, fragment):
    r = validate(bad)
    assert not r.valid
    assert any(fragment in e for e in r.errors), r.errors


def test_disconnected_graph():
    g = GbsGraph.build(["a", "b"], [("e", "a", "a", 1, 2)])
    assert any("connected" in e for e in validate(g).errors)


def test_table_inclusion_order_and_cycle():
    t = SubgroupTable([Symbol("A", 4), Symbol("B", 2)], inclusions=[("A", "B")])
    assert not validate(t).valid
    t = SubgroupTable([Symbol("A"), Symbol("B")], inclusions=[("A", "B"), ("B", "A")])
    assert any("cycle" in e for e in validate(t).errors)


def test_ball_edge_stab_must_include():
    t = SubgroupTable([Symbol("A"), Symbol("B")])
    b = BallTree([BallVertex("x", "A"), BallVertex("y", "A")], [BallEdge("e", "x", "y", "B")], t)
    assert any("not included" in e for e in validate(b).errors)


def test_every_corpus_document_validates():
    for name in corpus.names():
        doc = corpus.load(name)
        if isinstance(doc, dict):
            assert doc["kind"] == "evaluator"
            continue
        assert validate(doc).valid, name


# -- property: parse . serialize = id --------------------------------------

seeds = st.integers(0, 10**6)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_roundtrip_graphs_and_words(seed):
    rng = rng_for(seed)
    g = random_gbs(rng)
    assert parse(serialize(g)) == g
    w = random_word(g, rng)
    assert validate(w, g).valid
    assert parse(serialize(w)) == w
    kept = frozenset(e for e in g.edge_ids if rng.random() < 0.5)
    T = TreeHandle(g, kept)
    v = g.vertices[0]
    T = apply_move(T, Move("expansion", vertex=v, factor=1, moved=()))
    assert parse(serialize(T)) == T
    assert validate(T).valid


big = st.integers(-(2**80), 2**80)


@settings(max_examples=60, deadline=None)
@given(big, st.lists(st.tuples(st.sampled_from([1, -1]), big), max_size=6))
def test_roundtrip_words_big(base, steps):
    w = PathWord.of(base, *(("t", d, a) for d, a in steps))
    assert parse(serialize(w)) == w
    assert json.loads(serialize(w))["kind"] == "word"


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 6), st.booleans()), min_size=1, max_size=6))
def test_roundtrip_tables(spec):
    syms = [Symbol(f"S{i}", INF if inf else o, bool(o % 2)) for i, (o, inf) in enumerate(spec)]
    infinite = [s.name for s in syms if s.infinite]
    t = SubgroupTable(syms, equiv={"K": infinite} if infinite else {},
                      class_stab={"K": infinite[0]} if infinite else {},
                      intersect_order={(syms[0].name, syms[-1].name): 1})
    assert parse(serialize(t)) == t


def test_roundtrip_three_tori(three_tori):
    assert parse(serialize(three_tori)) == three_tori
    assert to_data(parse(serialize(three_tori))) == to_data(three_tori)


def test_bad_ball_without_table():
    with pytest.raises(DocumentError):
        parse('{"kind": "ball", "vertices": [], "edges": []}')


def test_word_str():
    assert str(PathWord()) == "1"
    assert str(PathWord.of(0, ("t", 1, 1), ("t", -1, 0))) == "t x t^-1"
    assert str(PathWord.of(-2, ("e", -1, 3))) == "x^-2 e^-1 x^3"
