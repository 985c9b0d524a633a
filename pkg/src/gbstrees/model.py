"""Data model: GBS graphs, path words, tree handles, subgroup tables, ball trees.

Conventions for a GBS graph
---------------------------
Every vertex ``v`` carries an infinite cyclic group generated by ``x_v``.  An
edge ``e`` with end labels ``(p, q) = (label_from, label_to)`` contributes a
stable letter ``t_e`` and the relation::

    t_e  x_from^p  t_e^-1  =  x_to^q

so the edge group has index ``|p|`` in the ``from`` vertex group and ``|q|``
in the ``to`` vertex group.  Group elements are closed edge paths: the letter
``t_e`` (a syllable with ``direction=+1``) leads from ``e.to`` to ``e.from``
and ``t_e^-1`` (``direction=-1``) leads back.  The exponent attached to a
syllable is a power of the generator of the vertex the letter arrives at.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Union

INF = float("inf")
Order = Union[int, float]  # a positive int, or INF


class ModelError(ValueError):
    """Raised when a document violates an invariant of its type."""


@dataclass(frozen=True)
class Edge:
    id: str
    src: str
    dst: str
    label_from: int
    label_to: int

    @property
    def is_loop(self) -> bool:
        return self.src == self.dst


@dataclass(frozen=True)
class Letter:
    """An oriented stable letter ``t_edge ** direction``."""

    edge: str
    direction: int

    def inverse(self) -> "Letter":
        return Letter(self.edge, -self.direction)


@dataclass(frozen=True)
class LetterGeometry:
    dep: str
    arr: str
    dep_label: int
    arr_label: int


@dataclass(frozen=True)
class GbsGraph:
    vertices: tuple
    edges: tuple
    base: str

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "_by_id", {e.id: e for e in self.edges})
        geo, out = {}, {}
        for e in self.edges:
            geo[(e.id, 1)] = LetterGeometry(e.dst, e.src, e.label_to, e.label_from)
            geo[(e.id, -1)] = LetterGeometry(e.src, e.dst, e.label_from, e.label_to)
            out.setdefault(e.dst, []).append(Letter(e.id, 1))
            out.setdefault(e.src, []).append(Letter(e.id, -1))
        object.__setattr__(self, "_geo", geo)
        object.__setattr__(self, "_out", out)

    @classmethod
    def build(cls, vertices: Iterable[str], edges: Iterable[tuple], base: Optional[str] = None) -> "GbsGraph":
        """Build from ``(id, from, to, label_from, label_to)`` tuples."""
        vertices = tuple(vertices)
        es = tuple(Edge(str(i), str(a), str(b), int(p), int(q)) for i, a, b, p, q in edges)
        return cls(vertices, es, vertices[0] if base is None else base)

    def edge(self, edge_id: str) -> Edge:
        try:
            return self._by_id[edge_id]
        except KeyError:
            raise ModelError(f"unknown edge {edge_id!r}") from None

    @property
    def edge_ids(self) -> tuple:
        return tuple(e.id for e in self.edges)

    def geometry(self, letter: Letter) -> LetterGeometry:
        try:
            return self._geo[(letter.edge, letter.direction)]
        except KeyError:
            if letter.direction not in (1, -1):
                raise ModelError(f"direction must be +1 or -1, got {letter.direction}") from None
            raise ModelError(f"unknown edge {letter.edge!r}") from None

    def letters_from(self, vertex: str) -> list:
        """All oriented letters departing ``vertex``, in a fixed order."""
        return list(self._out.get(vertex, ()))

    def with_base(self, base: str) -> "GbsGraph":
        return GbsGraph(self.vertices, self.edges, base)

    def problems(self) -> list:
        errs = []
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            errs.append("vertices: duplicate vertex id")
        if self.base not in vs:
            errs.append(f"base: unknown vertex {self.base!r}")
        ids = [e.id for e in self.edges]
        if len(set(ids)) != len(ids):
            errs.append("edges: duplicate edge id")
        for e in self.edges:
            for end in (e.src, e.dst):
                if end not in vs:
                    errs.append(f"edges[{e.id}]: dangling vertex {end!r}")
            if e.label_from == 0 or e.label_to == 0:
                errs.append(f"edges[{e.id}]: zero label")
        if not errs and vs:
            adj = {v: set() for v in vs}
            for e in self.edges:
                adj[e.src].add(e.dst)
                adj[e.dst].add(e.src)
            seen, todo = {self.base}, [self.base]
            while todo:
                for w in adj[todo.pop()]:
                    if w not in seen:
                        seen.add(w)
                        todo.append(w)
            if seen != vs:
                errs.append("graph is not connected")
        return errs


@dataclass(frozen=True)
class Syllable:
    edge: str
    direction: int
    exp: int

    @property
    def letter(self) -> Letter:
        return Letter(self.edge, self.direction)


@dataclass(frozen=True)
class PathWord:
    """``x_start^base_exp * t_1 x^a_1 * ... * t_n x^a_n`` as an edge path."""

    base_exp: int = 0
    syllables: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "syllables", tuple(self.syllables))

    @classmethod
    def of(cls, base_exp: int = 0, *steps: tuple) -> "PathWord":
        """``PathWord.of(0, ("t", 1, 1), ("t", -1, 0))``."""
        return cls(base_exp, tuple(Syllable(str(e), int(d), int(a)) for e, d, a in steps))

    @property
    def letters(self) -> list:
        return [s.letter for s in self.syllables]

    def __len__(self) -> int:
        return len(self.syllables)

    def __str__(self) -> str:
        """Readable form such as ``x^2 t t^-1 x``; the empty word is ``1``."""
        def power(name, n):
            return name if n == 1 else f"{name}^{n}"
        parts = [power("x", self.base_exp)] if self.base_exp else []
        for s in self.syllables:
            parts.append(power(s.edge, s.direction))
            if s.exp:
                parts.append(power("x", s.exp))
        return " ".join(parts) or "1"

    def __mul__(self, other: "PathWord") -> "PathWord":
        if not self.syllables:
            return PathWord(self.base_exp + other.base_exp, other.syllables)
        last = self.syllables[-1]
        joined = self.syllables[:-1] + (Syllable(last.edge, last.direction, last.exp + other.base_exp),)
        return PathWord(self.base_exp, joined + other.syllables)

    def inverse(self) -> "PathWord":
        exps = [self.base_exp] + [s.exp for s in self.syllables]
        out = []
        for i in range(len(self.syllables) - 1, -1, -1):
            s = self.syllables[i]
            out.append(Syllable(s.edge, -s.direction, -exps[i]))
        return PathWord(-exps[-1], tuple(out))

    def endpoint(self, graph: GbsGraph, start: Optional[str] = None) -> str:
        """Vertex reached from ``start``; raises if the path is broken."""
        cur = graph.base if start is None else start
        for i, s in enumerate(self.syllables):
            g = graph.geometry(s.letter)
            if g.dep != cur:
                raise ModelError(f"syllables[{i}]: letter {s.edge}^{s.direction:+d} does not leave vertex {cur!r}")
            cur = g.arr
        return cur

    def problems(self, graph: GbsGraph, start: Optional[str] = None, end: Optional[str] = None) -> list:
        start = graph.base if start is None else start
        try:
            reached = self.endpoint(graph, start)
        except ModelError as exc:
            return [str(exc)]
        target = start if end is None else end
        if reached != target:
            return [f"path not closed: ends at {reached!r}, expected {target!r}"]
        return []


IDENTITY = PathWord()


def power(word: PathWord, n: int) -> PathWord:
    if n < 0:
        return power(word.inverse(), -n)
    out, sq = IDENTITY, word
    while n:
        if n & 1:
            out = out * sq
        sq = sq * sq
        n >>= 1
    return out


# Moves are declared here so TreeHandle can carry its lineage without a cycle.
@dataclass(frozen=True)
class Move:
    """A presentation move.

    ``kind`` is one of ``collapse`` (``edges``), ``expansion`` (``vertex``,
    ``factor``, ``moved`` ends, ``new_vertex``, ``new_edge``), ``slide``
    (``edge``, ``end``, ``over``) or ``contract`` (``edge``).
    """

    kind: str
    edges: tuple = ()
    vertex: Optional[str] = None
    factor: Optional[int] = None
    moved: tuple = ()  # ((edge id, "from" | "to"), ...)
    new_vertex: Optional[str] = None
    new_edge: Optional[str] = None
    edge: Optional[str] = None
    end: Optional[str] = None
    over: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "moved", tuple(tuple(m) for m in self.moved))


@dataclass(frozen=True)
class TreeHandle:
    """The Bass-Serre tree of ``master`` with every edge outside ``kept`` collapsed."""

    master: GbsGraph
    kept: frozenset
    lineage: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "kept", frozenset(self.kept))
        object.__setattr__(self, "lineage", tuple(self.lineage))

    @classmethod
    def full(cls, master: GbsGraph) -> "TreeHandle":
        return cls(master, frozenset(master.edge_ids))

    @classmethod
    def trivial(cls, master: GbsGraph) -> "TreeHandle":
        return cls(master, frozenset())

    def with_kept(self, kept: Iterable[str]) -> "TreeHandle":
        return TreeHandle(self.master, frozenset(kept), self.lineage)

    @property
    def is_trivial(self) -> bool:
        return not self.kept

    def problems(self) -> list:
        errs = self.master.problems()
        unknown = sorted(set(self.kept) - set(self.master.edge_ids))
        if unknown:
            errs.append(f"kept: unknown edges {unknown}")
        return errs

    def same_tree(self, other: "TreeHandle") -> bool:
        return self.master == other.master and self.kept == other.kept


@dataclass(frozen=True)
class Symbol:
    name: str
    order: Order = INF
    in_A: bool = True
    conj: Optional[str] = None
    vc_kernel: Optional[int] = None
    finite_subgroups: tuple = ()

    @property
    def infinite(self) -> bool:
        return self.order == INF


def _pair(a: str, b: str) -> tuple:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class SubgroupTable:
    """Symbolic subgroup data.

    ``equiv`` maps a class id to its member symbols; ``class_stab`` maps a
    class id to the symbol of its stabilizer.  ``intersect_order`` and
    ``meet`` are keyed by unordered pairs; ``meet`` names the intersection
    subgroup itself when it is one of the table's symbols, ``join`` names
    the subgroup generated by a pair.
    """

    symbols: tuple
    inclusions: frozenset = frozenset()
    equiv: Mapping = field(default_factory=dict)
    class_stab: Mapping = field(default_factory=dict)
    intersect_order: Mapping = field(default_factory=dict)
    meet: Mapping = field(default_factory=dict)
    join: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        object.__setattr__(self, "inclusions", frozenset(tuple(p) for p in self.inclusions))
        object.__setattr__(self, "equiv", {k: tuple(v) for k, v in dict(self.equiv).items()})
        object.__setattr__(self, "class_stab", dict(self.class_stab))
        for name in ("intersect_order", "meet", "join"):
            object.__setattr__(self, name, {_pair(*k): v for k, v in dict(getattr(self, name)).items()})
        object.__setattr__(self, "_sym", {s.name: s for s in self.symbols})
        object.__setattr__(self, "_class_of", {m: c for c, ms in self.equiv.items() for m in ms})
        object.__setattr__(self, "_up", _closure(self.inclusions))

    def symbol(self, name: str) -> Symbol:
        try:
            return self._sym[name]
        except KeyError:
            raise ModelError(f"unknown symbol {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._sym

    def order(self, name: str) -> Order:
        return self.symbol(name).order

    def class_of(self, name: str) -> Optional[str]:
        return self._class_of.get(name)

    def equivalent(self, a: str, b: str) -> bool:
        ca = self.class_of(a)
        return ca is not None and ca == self.class_of(b)

    def included(self, sub: str, sup: str) -> bool:
        """Reflexive-transitive closure of the declared inclusions."""
        return sub == sup or sup in self._up.get(sub, ())

    def intersection(self, a: str, b: str) -> Optional[str]:
        """Symbol of ``a ∩ b`` if the table determines one."""
        if self.included(a, b):
            return a
        if self.included(b, a):
            return b
        return self.meet.get(_pair(a, b))

    def intersection_order(self, a: str, b: str) -> Optional[Order]:
        sym = self.intersection(a, b)
        if sym is not None:
            return self.order(sym)
        return self.intersect_order.get(_pair(a, b))

    def generated(self, a: str, b: str) -> Optional[str]:
        if self.included(a, b):
            return b
        if self.included(b, a):
            return a
        return self.join.get(_pair(a, b))

    def extended(self, symbols: Iterable[Symbol] = (), inclusions: Iterable[tuple] = ()) -> "SubgroupTable":
        have = {s.name for s in self.symbols}
        new = tuple(s for s in symbols if s.name not in have)
        return SubgroupTable(self.symbols + new, self.inclusions | frozenset(inclusions), self.equiv,
                             self.class_stab, self.intersect_order, self.meet, self.join)

    def problems(self) -> list:
        errs = []
        names = [s.name for s in self.symbols]
        if len(set(names)) != len(names):
            errs.append("symbols: duplicate name")
        known = set(names)
        for s in self.symbols:
            if s.order != INF and (not isinstance(s.order, int) or s.order < 1):
                errs.append(f"symbols[{s.name}]: order must be a positive integer or infinite")
        for a, b in sorted(self.inclusions):
            if a not in known or b not in known:
                errs.append(f"inclusions: unknown symbol in ({a}, {b})")
                continue
            oa, ob = self._sym[a].order, self._sym[b].order
            if ob != INF and (oa == INF or oa > ob or ob % oa):
                errs.append(f"inclusions: order of {a} does not fit inside {b}")
        for a in sorted(known):
            if a in self._up.get(a, ()):
                errs.append(f"inclusions: cycle through {a}")
        seen = {}
        for cid, members in sorted(self.equiv.items()):
            for m in members:
                if m not in known:
                    errs.append(f"equiv[{cid}]: unknown symbol {m}")
                elif not self._sym[m].infinite:
                    errs.append(f"equiv on finite symbol {m} (class {cid})")
                if m in seen and seen[m] != cid:
                    errs.append(f"equiv: symbol {m} in classes {seen[m]} and {cid}")
                seen[m] = cid
        for cid, s in sorted(self.class_stab.items()):
            if cid not in self.equiv:
                errs.append(f"class_stab: unknown class {cid}")
            if s not in known:
                errs.append(f"class_stab[{cid}]: unknown symbol {s}")
        for name in ("intersect_order", "meet", "join"):
            for (a, b), v in sorted(getattr(self, name).items(), key=lambda kv: kv[0]):
                if a not in known or b not in known:
                    errs.append(f"{name}: unknown symbol in ({a}, {b})")
                if name != "intersect_order" and v not in known:
                    errs.append(f"{name}[{a},{b}]: unknown symbol {v}")
        return errs


def _closure(pairs: Iterable[tuple]) -> dict:
    up: dict = {}
    for a, b in pairs:
        up.setdefault(a, set()).add(b)
    changed = True
    while changed:
        changed = False
        for a, sups in up.items():
            extra = set()
            for b in sups:
                extra |= up.get(b, set())
            if not extra <= sups:
                sups |= extra
                changed = True
    return {a: frozenset(s) for a, s in up.items()}


@dataclass(frozen=True)
class BallVertex:
    id: str
    stab: str
    tags: tuple = ()


@dataclass(frozen=True)
class BallEdge:
    id: str
    src: str
    dst: str
    stab: str


@dataclass(frozen=True)
class BallTree:
    """A finite tree with symbolic stabilizers.

    Vertices within ``interior_radius`` of ``center`` are trusted; an
    explicit ``interior`` set overrides the radius.  ``derived`` marks
    outputs of other operations (e.g. ``"tree_of_cylinders"``).
    """

    vertices: tuple
    edges: tuple
    table: SubgroupTable
    interior_radius: int = 0
    center: Optional[str] = None
    interior: Optional[frozenset] = None
    derived: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        if self.center is None and self.vertices:
            object.__setattr__(self, "center", self.vertices[0].id)
        if self.interior is not None:
            object.__setattr__(self, "interior", frozenset(self.interior))
        adj: dict = {v.id: [] for v in self.vertices}
        for e in self.edges:
            adj.setdefault(e.src, []).append((e.dst, e))
            adj.setdefault(e.dst, []).append((e.src, e))
        object.__setattr__(self, "_adj", adj)
        object.__setattr__(self, "_vertex", {v.id: v for v in self.vertices})

    def vertex(self, vid: str) -> BallVertex:
        return self._vertex[vid]

    def neighbors(self, vid: str) -> list:
        """``(neighbor id, edge)`` pairs."""
        return self._adj.get(vid, [])

    def distances(self, source: Optional[str] = None) -> dict:
        source = self.center if source is None else source
        dist = {source: 0}
        todo = [source]
        while todo:
            nxt = []
            for v in todo:
                for w, _ in self.neighbors(v):
                    if w not in dist:
                        dist[w] = dist[v] + 1
                        nxt.append(w)
            todo = nxt
        return dist

    def interior_vertices(self) -> frozenset:
        if self.interior is not None:
            return self.interior
        return frozenset(v for v, d in self.distances().items() if d <= self.interior_radius)

    def path(self, a: str, b: str) -> list:
        """Edges on the geodesic from ``a`` to ``b``."""
        prev = {a: None}
        todo = [a]
        while todo and b not in prev:
            nxt = []
            for v in todo:
                for w, e in self.neighbors(v):
                    if w not in prev:
                        prev[w] = (v, e)
                        nxt.append(w)
            todo = nxt
        if b not in prev:
            raise ModelError(f"no path from {a} to {b}")
        out = []
        while prev[b] is not None:
            b, e = prev[b]
            out.append(e)
        return out[::-1]

    def problems(self) -> list:
        errs = self.table.problems()
        ids = [v.id for v in self.vertices]
        if len(set(ids)) != len(ids):
            errs.append("vertices: duplicate id")
        eids = [e.id for e in self.edges]
        if len(set(eids)) != len(eids):
            errs.append("edges: duplicate id")
        known = set(ids)
        for v in self.vertices:
            if v.stab not in self.table:
                errs.append(f"vertices[{v.id}]: unknown symbol {v.stab}")
        for e in self.edges:
            if e.src not in known or e.dst not in known:
                errs.append(f"edges[{e.id}]: dangling vertex")
                continue
            if e.stab not in self.table:
                errs.append(f"edges[{e.id}]: unknown symbol {e.stab}")
                continue
            for end in (e.src, e.dst):
                vs = self._vertex[end].stab
                if vs in self.table and not self.table.included(e.stab, vs):
                    errs.append(f"edges[{e.id}]: stabilizer {e.stab} not included in {vs} at {end}")
        if self.center is not None and self.center not in known:
            errs.append(f"center: unknown vertex {self.center}")
        if known and not errs:
            if len(self.edges) != len(known) - 1 or len(self.distances(ids[0])) != len(known):
                errs.append("underlying graph is not a tree")
        if self.interior is not None and not self.interior <= known:
            errs.append("interior: unknown vertices")
        return errs


def require_valid(obj, *args) -> None:
    errs = obj.problems(*args)
    if errs:
        raise ModelError("; ".join(errs))


__all__ = [
    "INF", "ModelError", "Edge", "Letter", "LetterGeometry", "GbsGraph", "Syllable", "PathWord",
    "IDENTITY", "power", "Move", "TreeHandle", "Symbol", "SubgroupTable", "BallVertex", "BallEdge",
    "BallTree", "require_valid",
]
