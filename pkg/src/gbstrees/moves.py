"""Moves between presentations, and the reducedness / domination checks.

A :class:`~gbstrees.model.Move` on a handle either collapses edge orbits
(same master, smaller ``kept``) or rewrites the master presentation
(expansion, slide, contract).  Presentation-changing moves come with a
:class:`Translator` that rewrites words of the old graph into words of the
new one; it is checked on every defining relation when the move is built.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Optional

from .britton import is_elliptic, is_identity
from .model import (
    Edge, GbsGraph, Letter, Move, PathWord, Syllable, TreeHandle, power, require_valid,
)


class MoveError(ValueError):
    """The move does not apply to the handle."""


class TranslatorError(RuntimeError):
    """A translator failed to send a relation to the identity (an internal bug)."""


class MarkingError(ValueError):
    """Trees over different masters were compared without a verified marking."""


# -- paths in a graph -------------------------------------------------------

def letter_word(letter: Letter) -> PathWord:
    return PathWord(0, (Syllable(letter.edge, letter.direction, 0),))


def spanning_paths(graph: GbsGraph, prefer: frozenset = frozenset()) -> tuple:
    """Path words from the base to every vertex along a spanning tree.

    Edges in ``prefer`` are used first: each connected piece of ``prefer``
    gets its own subtree, so a tree path enters such a piece only once.
    Returns ``(paths, tree_edge_ids)``.
    """
    parent = {v: v for v in graph.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    tree = set()
    for group in (lambda e: e.id in prefer, lambda e: e.id not in prefer):
        for e in graph.edges:
            if group(e) and not e.is_loop and find(e.src) != find(e.dst):
                parent[find(e.src)] = find(e.dst)
                tree.add(e.id)
    paths = {graph.base: PathWord()}
    todo = [graph.base]
    while todo:
        v = todo.pop()
        for letter in graph.letters_from(v):
            if letter.edge not in tree:
                continue
            w = graph.geometry(letter).arr
            if w not in paths:
                paths[w] = paths[v] * letter_word(letter)
                todo.append(w)
    return paths, frozenset(tree)


def relations(graph: GbsGraph) -> list:
    """Defining relations as closed paths at the base.

    For an edge ``e``: ``P t_e x_from^p t_e^-1 x_to^-q P^-1`` where ``P`` is
    the tree path to ``e.to``.
    """
    paths, _ = spanning_paths(graph)
    out = []
    for e in graph.edges:
        p = paths[e.dst]
        rel = PathWord(0, (Syllable(e.id, 1, e.label_from), Syllable(e.id, -1, -e.label_to)))
        out.append((e.id, p * rel * p.inverse()))
    return out


# -- translators ------------------------------------------------------------

@dataclass(frozen=True)
class Translator:
    """Letter-by-letter rewriting of paths from ``source`` into ``target``.

    ``vertex_map`` sends old vertices to new ones; ``power`` multiplies the
    exponent of an old vertex generator; ``letters`` maps an old letter to a
    new path (absent means unchanged).
    """

    source: GbsGraph
    target: GbsGraph
    vertex_map: Mapping = field(default_factory=dict)
    power: Mapping = field(default_factory=dict)
    letters: Mapping = field(default_factory=dict)

    def vertex(self, v: str) -> str:
        return self.vertex_map.get(v, v)

    def __call__(self, w: PathWord) -> PathWord:
        pw = self.power
        out = PathWord(w.base_exp * pw.get(self.source.base, 1))
        for s in w.syllables:
            arr = self.source.geometry(s.letter).arr
            image = self.letters.get(s.letter, letter_word(s.letter))
            out = out * image * PathWord(s.exp * pw.get(arr, 1))
        return out

    def verify(self) -> None:
        for eid, rel in relations(self.source):
            image = self(rel)
            errs = image.problems(self.target, self.vertex(self.source.base))
            if errs or not is_identity(image, self.target, start=self.vertex(self.source.base)):
                raise TranslatorError(f"relation of edge {eid} does not map to the identity")

    def rebase(self, w: PathWord) -> PathWord:
        """Translate and conjugate back to the target's base point."""
        image = self(w)
        start = self.vertex(self.source.base)
        if start == self.target.base:
            return image
        paths, _ = spanning_paths(self.target)
        return paths[start] * image * paths[start].inverse()


def _identity_translator(g: GbsGraph) -> Translator:
    return Translator(g, g)


def _end_vertex(e: Edge, end: str) -> str:
    if end == "from":
        return e.src
    if end == "to":
        return e.dst
    raise MoveError(f"edge end must be 'from' or 'to', got {end!r}")


def _relabel(e: Edge, end: str, vertex: str, label: int) -> Edge:
    if end == "from":
        return Edge(e.id, vertex, e.dst, label, e.label_to)
    return Edge(e.id, e.src, vertex, e.label_from, label)


def _arrives_through(letter: Letter, end: str) -> bool:
    """Whether ``letter`` arrives at the ``end`` side of its edge."""
    return (letter.direction == 1) == (end == "from")


def expansion(graph: GbsGraph, m: Move) -> tuple:
    """Blow the vertex ``m.vertex`` up into an edge with labels ``(factor, 1)``.

    Ends listed in ``m.moved`` must carry labels divisible by ``factor``;
    they move to the new vertex with their labels divided by it.
    """
    v, k = m.vertex, m.factor
    if v not in graph.vertices:
        raise MoveError(f"expansion: unknown vertex {v!r}")
    if not k:
        raise MoveError("expansion: factor must be nonzero")
    new_v = m.new_vertex or _fresh(graph.vertices, v + "'")
    new_e = m.new_edge or _fresh(graph.edge_ids, "f")
    if new_v in graph.vertices or new_e in graph.edge_ids:
        raise MoveError("expansion: new ids collide with existing ones")
    moved = set(m.moved)
    edges = []
    for e in graph.edges:
        ne = e
        for end in ("from", "to"):
            if (e.id, end) in moved:
                if _end_vertex(e, end) != v:
                    raise MoveError(f"expansion: end {end} of {e.id} is not at {v}")
                lab = e.label_from if end == "from" else e.label_to
                if lab % k:
                    raise MoveError(f"expansion: label {lab} of {e.id} not divisible by {k}")
                ne = _relabel(ne, end, new_v, lab // k)
        edges.append(ne)
    edges.append(Edge(new_e, v, new_v, k, 1))
    target = GbsGraph(graph.vertices + (new_v,), tuple(edges), graph.base)
    # t_f^-1 leads from v to the new vertex.
    down, up = letter_word(Letter(new_e, -1)), letter_word(Letter(new_e, 1))
    letters = {}
    for e, end in moved:
        for d in (1, -1):
            letter = Letter(e, d)
            if _arrives_through(letter, end):
                letters[letter] = letters.get(letter, letter_word(letter)) * up
            else:
                letters[letter] = down * letters.get(letter, letter_word(letter))
    move = Move("expansion", vertex=v, factor=k, moved=tuple(sorted(moved)), new_vertex=new_v, new_edge=new_e)
    return target, Translator(graph, target, {}, {}, letters), move


def contraction(graph: GbsGraph, edge_id: str) -> tuple:
    """Contract a non-loop edge carrying a label of ``+-1``.

    The vertex on the ``+-1`` side is absorbed: ``x_u = x_k^(label_k * s)``.
    """
    e = graph.edge(edge_id)
    if e.is_loop:
        raise MoveError(f"contract: {edge_id} is a loop")
    if abs(e.label_to) == 1:
        gone, keep, s, lab_keep = e.dst, e.src, e.label_to, e.label_from
    elif abs(e.label_from) == 1:
        gone, keep, s, lab_keep = e.src, e.dst, e.label_from, e.label_to
    else:
        raise MoveError(f"contract: {edge_id} has no label +-1")
    factor = lab_keep * s
    edges = []
    for f in graph.edges:
        if f.id == edge_id:
            continue
        nf = f
        if f.src == gone:
            nf = Edge(nf.id, keep, nf.dst, nf.label_from * factor, nf.label_to)
        if f.dst == gone:
            nf = Edge(nf.id, nf.src, keep, nf.label_from, nf.label_to * factor)
        edges.append(nf)
    verts = tuple(x for x in graph.vertices if x != gone)
    base = keep if graph.base == gone else graph.base
    target = GbsGraph(verts, tuple(edges), base)
    letters = {Letter(edge_id, 1): PathWord(), Letter(edge_id, -1): PathWord()}
    tr = Translator(graph, target, {gone: keep}, {gone: factor}, letters)
    return target, tr, Move("contract", edge=edge_id)


def slide(graph: GbsGraph, edge_id: str, end: str, over: str) -> tuple:
    """Slide the ``end`` of ``edge_id`` across the edge ``over``.

    The end sits at a vertex ``u`` of ``over``; the label of ``over`` at ``u``
    must divide it.  The end moves to the far vertex of ``over`` with label
    ``(label / label_over_at_u) * label_over_far``.
    """
    if edge_id == over:
        raise MoveError("slide: an edge cannot slide over itself")
    e, f = graph.edge(edge_id), graph.edge(over)
    u = _end_vertex(e, end)
    lab = e.label_from if end == "from" else e.label_to
    if f.src == u:
        sigma, a, b, far = Letter(over, -1), f.label_from, f.label_to, f.dst
    elif f.dst == u:
        sigma, a, b, far = Letter(over, 1), f.label_to, f.label_from, f.src
    else:
        raise MoveError(f"slide: {over} is not incident to {u}")
    if lab % a:
        raise MoveError(f"slide: label {a} of {over} does not divide {lab}")
    ne = _relabel(e, end, far, lab // a * b)
    target = GbsGraph(graph.vertices, tuple(ne if x.id == edge_id else x for x in graph.edges), graph.base)
    sig, sig_inv = letter_word(sigma), letter_word(sigma.inverse())
    letters = {}
    for d in (1, -1):
        letter = Letter(edge_id, d)
        if _arrives_through(letter, end):
            letters[letter] = letter_word(letter) * sig_inv
        else:
            letters[letter] = sig * letter_word(letter)
    return target, Translator(graph, target, {}, {}, letters), Move("slide", edge=edge_id, end=end, over=over)


def _fresh(taken, stem: str) -> str:
    taken = set(taken)
    if stem not in taken:
        return stem
    i = 1
    while f"{stem}{i}" in taken:
        i += 1
    return f"{stem}{i}"


def build_move(graph: GbsGraph, m: Move) -> tuple:
    """``(new graph, translator, normalized move)``; the translator is verified."""
    if m.kind == "collapse":
        unknown = set(m.edges) - set(graph.edge_ids)
        if unknown:
            raise MoveError(f"collapse: unknown edges {sorted(unknown)}")
        return graph, _identity_translator(graph), m
    if m.kind == "expansion":
        target, tr, m = expansion(graph, m)
    elif m.kind == "contract":
        target, tr, m = contraction(graph, m.edge)
    elif m.kind == "slide":
        target, tr, m = slide(graph, m.edge, m.end, m.over)
    else:
        raise MoveError(f"unknown move kind {m.kind!r}")
    tr.verify()
    return target, tr, m


def apply_move(T: TreeHandle, m: Move) -> TreeHandle:
    """Apply a move; presentation moves keep the tree's kept edges as they were."""
    target, tr, m = build_move(T.master, m)
    lineage = T.lineage + (m,)
    if m.kind == "collapse":
        return TreeHandle(T.master, T.kept - set(m.edges), lineage)
    if m.kind == "expansion":
        return TreeHandle(target, T.kept | {m.new_edge}, lineage)
    if m.kind == "contract":
        if m.edge in T.kept:
            raise MoveError(f"contract: {m.edge} is kept; collapse it first")
        return TreeHandle(target, T.kept, lineage)
    return TreeHandle(target, T.kept, lineage)


def translator(T: TreeHandle, m: Move) -> Translator:
    return build_move(T.master, m)[1]


# -- components of the collapse ---------------------------------------------

@dataclass(frozen=True)
class Component:
    """A vertex of the collapsed graph: master vertices joined by collapsed edges."""

    vertices: tuple
    edges: tuple


def components(T: TreeHandle) -> list:
    g = T.master
    parent = {v: v for v in g.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in g.edges:
        if e.id not in T.kept:
            parent[find(e.src)] = find(e.dst)
    groups: dict = {}
    for v in g.vertices:
        groups.setdefault(find(v), []).append(v)
    out = []
    for vs in groups.values():
        vset = set(vs)
        es = tuple(e.id for e in g.edges if e.id not in T.kept and e.src in vset)
        out.append(Component(tuple(vs), es))
    out.sort(key=lambda c: g.vertices.index(c.vertices[0]))
    return out


def cyclic_component(graph: GbsGraph, comp: Component) -> Optional[dict]:
    """If the component's group is infinite cyclic, ``x_v = z^f(v)`` for its vertices.

    Contracts edges with a ``+-1`` label (at either end) until none is left;
    the group is cyclic iff this ends on a single vertex with no edge left.
    Returns ``None`` when the group is not cyclic.
    """
    rep = {v: v for v in comp.vertices}
    fac = {v: 1 for v in comp.vertices}
    todo = [graph.edge(e) for e in comp.edges]
    progress = True
    while progress:
        progress = False
        for e in list(todo):
            ru, rw = rep[e.src], rep[e.dst]
            if ru == rw:
                continue
            p, q = e.label_from * fac[e.src], e.label_to * fac[e.dst]
            if abs(q) == 1:
                gone, keep, mult = rw, ru, p * q
            elif abs(p) == 1:
                gone, keep, mult = ru, rw, q * p
            else:
                continue
            for v in comp.vertices:
                if rep[v] == gone:
                    rep[v], fac[v] = keep, fac[v] * mult
            todo.remove(e)
            progress = True
    if todo or len(set(rep.values())) != 1:
        return None
    return fac


@dataclass(frozen=True)
class ReducedReport:
    reduced: bool
    witness: Optional[tuple] = None  # (edge id, "from" | "to")

    def to_data(self) -> dict:
        return {"reduced": self.reduced, "witness": None if self.witness is None else list(self.witness)}


def is_reduced(T: TreeHandle) -> ReducedReport:
    """Reducedness of the collapsed tree, by the graph-of-groups criterion.

    Not reduced iff some kept edge with distinct endpoints in the collapsed
    graph includes onto one endpoint group.  The witness is the first such
    edge (by id) and the onto side.
    """
    require_valid(T)
    g = T.master
    comp_of = {}
    comps = components(T)
    for i, c in enumerate(comps):
        for v in c.vertices:
            comp_of[v] = i
    cyclic = [cyclic_component(g, c) for c in comps]
    for eid in sorted(T.kept):
        e = g.edge(eid)
        if comp_of[e.src] == comp_of[e.dst]:
            continue
        for end, v, lab in (("from", e.src, e.label_from), ("to", e.dst, e.label_to)):
            fac = cyclic[comp_of[v]]
            if fac is not None and abs(lab * fac[v]) == 1:
                return ReducedReport(False, (eid, end))
    return ReducedReport(True)


def onto_witness_holds(T: TreeHandle, witness: tuple) -> bool:
    """Recheck a non-reducedness witness ``(edge id, end)`` directly."""
    eid, end = witness
    if eid not in T.kept:
        return False
    e = T.master.edge(eid)
    comps = components(T)
    comp_of = {v: i for i, c in enumerate(comps) for v in c.vertices}
    if comp_of[e.src] == comp_of[e.dst]:
        return False
    v, lab = (e.src, e.label_from) if end == "from" else (e.dst, e.label_to)
    fac = cyclic_component(T.master, comps[comp_of[v]])
    return fac is not None and abs(lab * fac[v]) == 1


def reduce_handle(T: TreeHandle) -> TreeHandle:
    """Collapse witnesses until reduced (lowest edge id first; not canonical)."""
    while True:
        r = is_reduced(T)
        if r.reduced:
            return T
        T = apply_move(T, Move("collapse", edges=(r.witness[0],)))


# -- domination -------------------------------------------------------------

def vertex_group_generators(T: TreeHandle) -> list:
    """Generators of one conjugate of each vertex stabilizer of ``T``.

    For each component: its vertex generators and its collapsed letters,
    conjugated into closed paths at the base along a spanning tree that
    enters the component once.
    """
    g = T.master
    collapsed = frozenset(e for e in g.edge_ids if e not in T.kept)
    paths, tree = spanning_paths(g, collapsed)
    out = []
    for comp in components(T):
        gens = []
        for v in comp.vertices:
            gens.append((f"x_{v}", paths[v] * PathWord(1) * paths[v].inverse()))
        for eid in comp.edges:
            if eid in tree:
                continue
            letter = Letter(eid, 1)
            geo = g.geometry(letter)
            gens.append((f"t_{eid}", paths[geo.dep] * letter_word(letter) * paths[geo.arr].inverse()))
        out.append((comp, gens))
    return out


def generated_subgroup_elliptic(gens: list, T: TreeHandle) -> Optional[PathWord]:
    """``None`` if ``<gens>`` fixes a point of ``T``; otherwise a hyperbolic witness.

    Serre's lemma: finitely many elliptic elements with pairwise elliptic
    products generate an elliptic subgroup.
    """
    for w in gens:
        if not is_elliptic(w, T):
            return w
    for a, b in combinations(gens, 2):
        if not is_elliptic(a * b, T):
            return a * b
    return None


@dataclass(frozen=True)
class DominationReport:
    dominates: bool
    witness: Optional[PathWord] = None
    component: Optional[tuple] = None


def _marked(w: PathWord, marking) -> PathWord:
    return w if marking is None else marking(w)


def dominates(T1: TreeHandle, T2: TreeHandle, marking=None) -> DominationReport:
    """Whether every vertex stabilizer of ``T1`` fixes a point of ``T2``.

    Handles over different masters need ``marking``: a callable (e.g. from
    :func:`marking_map`) sending words over ``T1.master`` to words over
    ``T2.master``.
    """
    if marking is None and T1.master != T2.master:
        raise MarkingError("handles have different masters; supply a verified marking")
    for comp, gens in vertex_group_generators(T1):
        w = generated_subgroup_elliptic([_marked(x, marking) for _, x in gens], T2)
        if w is not None:
            return DominationReport(False, w, comp.vertices)
    return DominationReport(True)


def same_deformation_space(T1: TreeHandle, T2: TreeHandle, marking=None, inverse_marking=None) -> bool:
    if marking is not None and inverse_marking is None:
        raise MarkingError("mutual domination across masters needs markings both ways")
    return dominates(T1, T2, marking).dominates and dominates(T2, T1, inverse_marking).dominates


# -- markings ---------------------------------------------------------------

def generator_names(graph: GbsGraph) -> list:
    return [f"x_{v}" for v in graph.vertices] + [f"t_{e.id}" for e in graph.edges]


def marking_map(images: Mapping, A: GbsGraph):
    """Word map ``A -> B`` defined by closed images of the generators.

    A closed path over ``A`` is read as a product of generators: vertex
    generators and stable letters (tree letters included).
    """
    def apply(w: PathWord) -> PathWord:
        out = power(images[f"x_{A.base}"], w.base_exp)
        for s in w.syllables:
            arr = A.geometry(s.letter).arr
            t = images[f"t_{s.edge}"]
            out = out * (t if s.direction == 1 else t.inverse()) * power(images[f"x_{arr}"], s.exp)
        return out
    return apply


@dataclass(frozen=True)
class MarkingReport:
    valid: bool
    failures: tuple = ()
    note: str = "surjectivity and injectivity are not checked"


def verify_marking(images: Mapping, A: GbsGraph, B: GbsGraph) -> MarkingReport:
    """Check that generator images over ``B`` satisfy every relation of ``A``.

    Relations: ``t_e = 1`` for edges of a spanning tree of ``A``, and
    ``t_e x_from^p t_e^-1 = x_to^q`` for every edge.
    """
    missing = [n for n in generator_names(A) if n not in images]
    if missing:
        raise MarkingError(f"marking is not total: missing {missing}")
    for name, w in images.items():
        errs = w.problems(B)
        if errs:
            raise MarkingError(f"image of {name}: {'; '.join(errs)}")
    _, tree = spanning_paths(A)
    failures = []
    for eid in sorted(tree):
        if not is_identity(images[f"t_{eid}"], B):
            failures.append(f"tree letter t_{eid} is not trivial")
    for e in A.edges:
        t = images[f"t_{e.id}"]
        rel = t * power(images[f"x_{e.src}"], e.label_from) * t.inverse() * power(images[f"x_{e.dst}"], -e.label_to)
        if not is_identity(rel, B):
            failures.append(f"relation of edge {e.id} fails")
    return MarkingReport(not failures, tuple(failures))


def identity_images(A: GbsGraph) -> dict:
    """Generator images of the identity marking ``A -> A``."""
    paths, _ = spanning_paths(A)
    out = {}
    for v in A.vertices:
        out[f"x_{v}"] = paths[v] * PathWord(1) * paths[v].inverse()
    for e in A.edges:
        letter = Letter(e.id, 1)
        geo = A.geometry(letter)
        out[f"t_{e.id}"] = paths[geo.dep] * letter_word(letter) * paths[geo.arr].inverse()
    return out


# -- small domination -------------------------------------------------------

@dataclass(frozen=True)
class SmallDominationReport:
    dominates: bool
    edge_groups_elliptic: bool
    new_elliptic: tuple  # component vertex tuples of Tstar not elliptic in T
    unflagged: tuple  # those not flagged small by the caller
    holds: Optional[bool]
    note: str = "smallness of the listed vertex groups is not decided"


def verify_small_domination(T: TreeHandle, Tstar: TreeHandle, small_flags: Mapping = None,
                            marking=None) -> SmallDominationReport:
    """Check the mechanical parts of "``T`` smally dominates ``Tstar``".

    (i) ``T`` dominates ``Tstar``; (ii) edge groups of ``Tstar`` are
    elliptic in ``T``; (iii) the vertex groups of ``Tstar`` not elliptic in
    ``T`` are listed, to be flagged small by the caller.  ``holds`` is
    ``True`` when (i), (ii) hold and every listed group is flagged.
    """
    small_flags = small_flags or {}
    if marking is None and T.master != Tstar.master:
        raise MarkingError("handles have different masters; supply a verified marking")
    dom = dominates(T, Tstar, marking).dominates
    g = Tstar.master
    paths, _ = spanning_paths(g)
    edges_ok = True
    for eid in sorted(Tstar.kept):
        e = g.edge(eid)
        gen = paths[e.src] * PathWord(e.label_from) * paths[e.src].inverse()
        if not is_elliptic(gen, T):
            edges_ok = False
    new = []
    for comp, gens in vertex_group_generators(Tstar):
        if generated_subgroup_elliptic([_marked(w, marking) for _, w in gens], T) is not None:
            new.append(comp.vertices)
    unflagged = tuple(c for c in new if not any(small_flags.get(v) for v in c))
    return SmallDominationReport(dom, edges_ok, tuple(new), unflagged, dom and edges_ok and not unflagged)
