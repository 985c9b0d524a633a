import dataclasses

import pytest

from gbstrees import corpus
from gbstrees.cylinders import (
    CylinderError, build_tree_of_cylinders, check_acylindricity, check_admissibility, check_c_virtually_cyclic,
    check_idempotence, collapse_star, compute_cylinders, path_stabilizer_order, quotient_pattern,
    tree_of_cylinders_star,
)
from gbstrees.io import parse, serialize
from gbstrees.model import INF, BallEdge, BallTree, BallVertex, SubgroupTable, Symbol


def star(k, same_class=False, radius=1):
    """Center ``c`` with ``k`` leaves; edge ``i`` has stabilizer ``Ei``."""
    syms = [Symbol("V", INF, False)]
    incl, equiv, cstab = [], {}, {}
    verts, edges = [BallVertex("c", "V")], []
    for i in range(1, k + 1):
        syms += [Symbol(f"E{i}"), Symbol(f"L{i}", INF, False)]
        incl += [(f"E{i}", "V"), (f"E{i}", f"L{i}")]
        cls = "K" if same_class else f"K{i}"
        equiv.setdefault(cls, []).append(f"E{i}")
        cstab[cls] = "E1" if same_class else f"E{i}"
        verts.append(BallVertex(f"l{i}", f"L{i}"))
        edges.append(BallEdge(f"e{i}", "c", f"l{i}", f"E{i}"))
    return BallTree(verts, edges, SubgroupTable(syms, incl, equiv, cstab), radius, "c")


def line(stabs, table, radius):
    """A path ``p0 - p1 - ...`` centered at ``p0`` with the given edge stabilizers."""
    verts = [BallVertex(f"p{i}", "V") for i in range(len(stabs) + 1)]
    edges = [BallEdge(f"d{i}", f"p{i}", f"p{i + 1}", s) for i, s in enumerate(stabs)]
    return BallTree(verts, edges, table, radius, "p0")


@pytest.fixture
def csa_path():
    return corpus.load("csa_path_ball")


# -- admissibility ----------------------------------------------------------

def test_three_tori_admissible(three_tori):
    rep = check_admissibility(three_tori)
    assert rep.passed and rep.unchecked and "axiom 1" in rep.unchecked[0]


def test_axiom2_violation(csa_path):
    bad = dataclasses.replace(csa_path, table=corpus.load("bad_axiom2_table"))
    rep = check_admissibility(bad)
    assert not rep.passed and any(v.startswith("axiom 2") for v in rep.violations)


def test_single_edge_ball_passes():
    assert check_admissibility(star(1)).passed


def test_axiom3_violation():
    # A fixes both ends but the edge between them is in the class of B
    t = SubgroupTable([Symbol("V", INF, False), Symbol("A"), Symbol("B")], [("A", "V"), ("B", "V")],
                      {"KA": ["A"], "KB": ["B"]}, {"KA": "A", "KB": "B"})
    b = line(["B"], t, 1)
    rep = check_admissibility(b)
    assert not rep.passed and rep.violations[0].startswith("axiom 3")


# -- cylinders --------------------------------------------------------------

def test_one_class_one_cylinder():
    b = star(3, same_class=True)
    (c,) = compute_cylinders(b).cylinders
    assert c.edges == ("e1", "e2", "e3") and c.is_subtree and len(c.vertices) == 4


def test_k_classes_k_cylinders():
    dec = compute_cylinders(star(4))
    assert len(dec.cylinders) == 4
    assert all(len(c.edges) == 1 for c in dec.cylinders)
    assert all("c" in c.vertices for c in dec.cylinders)
    assert len(dec.containing("c")) == 4


def test_three_tori_cylinders(three_tori):
    dec = compute_cylinders(three_tori)
    by = {c.cls: c for c in dec.cylinders}
    assert set(by) == {"K0", "K1", "K2", "K3"}
    # the commensurability class of the boundary subgroup carries the t-line and the three torus edges
    assert set(by["K0"].edges) >= {e.id for e in three_tori.edges if e.stab == "C"}
    assert by["K0"].stab == "Z2"


def test_cylinder_must_be_subtree():
    t = SubgroupTable([Symbol("V", INF, False), Symbol("A"), Symbol("B")], [("A", "V"), ("B", "V")],
                      {"KA": ["A"], "KB": ["B"]}, {"KA": "A", "KB": "B"})
    with pytest.raises(CylinderError, match="subtree"):
        compute_cylinders(line(["A", "B", "A"], t, 3))


def test_missing_class_stab():
    t = SubgroupTable([Symbol("V", INF, False), Symbol("A")], [("A", "V")], {"KA": ["A"]}, {})
    with pytest.raises(CylinderError, match="class stabilizer"):
        compute_cylinders(line(["A"], t, 1))


# -- tree of cylinders ------------------------------------------------------

def test_one_cylinder_degenerate():
    tc = build_tree_of_cylinders(star(3, same_class=True))
    assert tc.degenerate and tc.v0 == () and len(tc.v1) == 1


def test_two_cylinders_path(csa_path):
    tc = build_tree_of_cylinders(csa_path)
    g = tc.graph()
    assert len(tc.v1) == 2 and len(tc.v0) == 1
    (v,) = tc.v0
    assert sorted(g.neighbors(v)) == sorted(tc.v1) and g.number_of_edges() == 2


def test_three_tori_star(three_tori):
    tc = build_tree_of_cylinders(three_tori)
    g = tc.graph()
    for a, b in g.edges:
        assert {tc.node(a).role, tc.node(b).role} == {"v0", "v1"}
    dec = compute_cylinders(three_tori)
    for v in tc.v0:
        assert len(dec.containing(v)) >= 2
    st = collapse_star(tc)
    q = quotient_pattern(st)
    assert q.star_center() == "Z2"
    assert len(q.edges) == 3 and len(st.qh) == 3
    assert tree_of_cylinders_star(three_tori) == st


def test_missing_intersection_names_pair(three_tori):
    t = three_tori.table
    stripped = dataclasses.replace(t, meet={})
    with pytest.raises(CylinderError, match=r"\(F1, Z2\)|\(Z2, F1\)"):
        build_tree_of_cylinders(dataclasses.replace(three_tori, table=stripped))


def test_output_round_trips(three_tori):
    b = tree_of_cylinders_star(three_tori).to_ball()
    assert b.derived == "tree_of_cylinders"
    assert parse(serialize(b)) == b


# -- acylindricity ----------------------------------------------------------

def test_large_k_vacuous(three_tori):
    rep = check_acylindricity(three_tori, 50, 0)
    assert rep.passed and rep.paths_checked == 0


def test_three_tori_star_acylindrical(three_tori):
    st = tree_of_cylinders_star(three_tori)
    rep = check_acylindricity(st, 2, 1)
    assert rep.passed and rep.paths_checked > 0


def test_infinite_path_fails(three_tori):
    rep = check_acylindricity(three_tori, 2, 1)
    assert not rep.passed
    path, order = rep.witness
    assert order == INF and len(path) == 4


def test_acylindricity_monotone(three_tori):
    st = tree_of_cylinders_star(three_tori)
    for tree in (three_tori, st):
        verdicts = {(k, C): check_acylindricity(tree, k, C).passed for k in range(4) for C in range(3)}
        for (k, C), ok in verdicts.items():
            if ok:
                assert all(verdicts[k2, C2] for k2 in range(k, 4) for C2 in range(C, 3))


def test_path_order_fold(three_tori):
    t = three_tori.table
    assert path_stabilizer_order(t, ["C", "C"]) == INF
    assert path_stabilizer_order(t, ["C", "C^a1"]) == 1
    assert path_stabilizer_order(t, ["F1", "Z2", "C^a1"]) == 1


# -- idempotence ------------------------------------------------------------

def test_idempotence_examples(three_tori, csa_path):
    assert check_idempotence(three_tori).passed
    assert check_idempotence(csa_path).passed
    one = check_idempotence(star(3, same_class=True))
    assert one.passed and "degenerate" in one.detail
    assert check_idempotence(star(3)).passed


def test_idempotence_needs_interior():
    b = dataclasses.replace(star(2), interior=frozenset())
    rep = check_idempotence(b)
    assert not rep.passed and "interior_radius" in rep.detail


def test_idempotence_on_corpus_balls():
    for name in corpus.names():
        doc = corpus.load(name)
        if isinstance(doc, BallTree):
            assert check_idempotence(doc).passed, name


# -- virtually cyclic -------------------------------------------------------

def test_c_virtually_cyclic():
    t = SubgroupTable([Symbol("Z", INF, True, vc_kernel=1), Symbol("F", 4), Symbol("W", INF, True, vc_kernel=1,
                                                                                      finite_subgroups=(3,))])
    assert all(check_c_virtually_cyclic("Z", t, C) for C in (1, 2, 5))
    assert not check_c_virtually_cyclic("F", t, 3)
    with pytest.raises(CylinderError):
        check_c_virtually_cyclic("W", t, 1)
