"""Trees of cylinders on finite ball trees with symbolic stabilizers.

Universal checks only range over a ball's interior (``BallTree.interior_vertices``);
every report records the interior it used.  Conjugation invariance of the
equivalence relation cannot be checked from a symbolic table and is always
reported as unchecked.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import networkx as nx

from .model import BallEdge, BallTree, BallVertex, SubgroupTable, require_valid

TREE_OF_CYLINDERS = "tree_of_cylinders"


class CylinderError(ValueError):
    """Input data that is not admissible, or a table missing a needed entry."""


def _in_E(table: SubgroupTable, name: str) -> bool:
    s = table.symbol(name)
    return s.in_A and s.infinite


def _classes_inside(table: SubgroupTable, name: str) -> frozenset:
    """Equivalence classes of the infinite allowed subgroups of ``name``."""
    out = set()
    for s in table.symbols:
        if _in_E(table, s.name) and table.included(s.name, name):
            c = table.class_of(s.name)
            if c is not None:
                out.add(c)
    return frozenset(out)


# -- admissibility ----------------------------------------------------------

@dataclass(frozen=True)
class AdmissibilityReport:
    violations: tuple
    interior: tuple
    unchecked: tuple = ("axiom 1: conjugation invariance needs action data",)

    @property
    def passed(self) -> bool:
        return not self.violations


def check_admissibility(ball: BallTree) -> AdmissibilityReport:
    require_valid(ball)
    t = ball.table
    errs = []
    E = [s.name for s in t.symbols if _in_E(t, s.name)]
    for a in E:
        if t.class_of(a) is None:
            errs.append(f"unclassified: infinite allowed symbol {a} is in no class")
    # Inclusion implies equivalence.
    for a in E:
        for b in E:
            if a != b and t.included(a, b) and not t.equivalent(a, b):
                errs.append(f"axiom 2: {a} is included in {b} but they are not equivalent")
    for e in ball.edges:
        if not _in_E(t, e.stab):
            errs.append(f"edge {e.id}: stabilizer {e.stab} is not an infinite allowed group")
    # Equivalent subgroups fixing a and b force every edge between them into their class.
    inner = sorted(ball.interior_vertices())
    inside = {v: _classes_inside(t, ball.vertex(v).stab) for v in inner}
    for i, a in enumerate(inner):
        for b in inner[i + 1:]:
            common = inside[a] & inside[b]
            if not common:
                continue
            for e in ball.path(a, b):
                bad = sorted(c for c in common if t.class_of(e.stab) != c)
                if bad:
                    ids = [x.id for x in ball.path(a, b)]
                    errs.append(f"axiom 3: class {bad[0]} fixes {a} and {b} but edge {e.id} "
                                f"({e.stab}) on the path {ids} is not in it")
                    break
    return AdmissibilityReport(tuple(errs), tuple(inner))


# -- cylinders --------------------------------------------------------------

@dataclass(frozen=True)
class Cylinder:
    id: str
    cls: str
    edges: tuple
    vertices: tuple
    stab: str
    is_subtree: bool


@dataclass(frozen=True)
class CylinderDecomposition:
    ball: BallTree
    cylinders: tuple

    def containing(self, v: str) -> list:
        return [c for c in self.cylinders if v in c.vertices]


def _cylinder_id(cls: str) -> str:
    return f"Y[{cls}]"


def compute_cylinders(ball: BallTree) -> CylinderDecomposition:
    """Partition the ball's edges by the class of their stabilizers."""
    require_valid(ball)
    t = ball.table
    groups: dict = {}
    for e in ball.edges:
        c = t.class_of(e.stab)
        if c is None:
            raise CylinderError(f"edge {e.id}: stabilizer {e.stab} is in no equivalence class")
        groups.setdefault(c, []).append(e)
    cyls = []
    for cls in sorted(groups):
        es = groups[cls]
        if cls not in t.class_stab:
            raise CylinderError(f"class {cls}: no class stabilizer in the table")
        g = nx.Graph()
        g.add_edges_from((e.src, e.dst) for e in es)
        connected = nx.is_connected(g)
        if not connected:
            raise CylinderError(f"class {cls}: its edges {sorted(e.id for e in es)} do not span a subtree")
        cyls.append(Cylinder(_cylinder_id(cls), cls, tuple(sorted(e.id for e in es)),
                             tuple(sorted(g.nodes)), t.class_stab[cls], connected))
    for i, a in enumerate(cyls):
        for b in cyls[i + 1:]:
            shared = set(a.vertices) & set(b.vertices)
            if len(shared) > 1:
                raise CylinderError(f"cylinders {a.id} and {b.id} share {len(shared)} vertices {sorted(shared)}")
    return CylinderDecomposition(ball, tuple(cyls))


# -- tree of cylinders ------------------------------------------------------

@dataclass(frozen=True)
class CTNode:
    id: str
    role: str  # "v0" | "v1" | "merged"
    stab: str
    parts: tuple = ()


@dataclass(frozen=True)
class CTEdge:
    id: str
    src: str
    dst: str
    stab: str
    collapsed: bool = False


@dataclass(frozen=True)
class CylinderTree:
    nodes: tuple
    edges: tuple
    table: SubgroupTable
    interior: frozenset
    degenerate: bool = False
    collapsed: bool = False
    qh: tuple = field(default=())  # node ids carrying the "qh" tag

    def node(self, nid: str) -> CTNode:
        for n in self.nodes:
            if n.id == nid:
                return n
        raise KeyError(nid)

    @property
    def v0(self) -> tuple:
        return tuple(n.id for n in self.nodes if n.role == "v0")

    @property
    def v1(self) -> tuple:
        return tuple(n.id for n in self.nodes if n.role == "v1")

    def graph(self, interior_only: bool = False) -> nx.Graph:
        g = nx.Graph()
        keep = self.interior if interior_only else {n.id for n in self.nodes}
        for n in self.nodes:
            if n.id in keep:
                g.add_node(n.id, stab=n.stab, role=n.role)
        for e in self.edges:
            if e.src in keep and e.dst in keep:
                g.add_edge(e.src, e.dst, stab=e.stab, id=e.id)
        return g

    def to_ball(self) -> BallTree:
        tags = set(self.qh)
        verts = tuple(BallVertex(n.id, n.stab, (n.role, "qh") if n.id in tags else (n.role,)) for n in self.nodes)
        edges = tuple(BallEdge(e.id, e.src, e.dst, e.stab) for e in self.edges)
        center = next((n.id for n in self.nodes if n.id in self.interior and n.role != "v0"),
                      self.nodes[0].id if self.nodes else None)
        return BallTree(verts, edges, self.table, 0, center, self.interior, TREE_OF_CYLINDERS)


def _interior_edge(ball: BallTree, eid: str, inner: frozenset) -> bool:
    e = next(x for x in ball.edges if x.id == eid)
    return e.src in inner and e.dst in inner


def build_tree_of_cylinders(ball: BallTree, dec: Optional[CylinderDecomposition] = None) -> CylinderTree:
    """Bipartite tree: vertices in at least two cylinders, and the cylinders."""
    dec = dec or compute_cylinders(ball)
    t = ball.table
    inner = ball.interior_vertices()
    qh_ids = {v.id for v in ball.vertices if "qh" in v.tags}
    nodes, edges = [], []
    interior = set()
    for c in dec.cylinders:
        nodes.append(CTNode(c.id, "v1", c.stab))
        if any(_interior_edge(ball, e, inner) for e in c.edges):
            interior.add(c.id)
    for v in ball.vertices:
        cs = dec.containing(v.id)
        if len(cs) < 2:
            continue
        nodes.append(CTNode(v.id, "v0", v.stab))
        if v.id in inner:
            interior.add(v.id)
        for c in cs:
            s = t.intersection(v.stab, c.stab)
            if s is None:
                raise CylinderError(f"table has no intersection entry for ({v.stab}, {c.stab}); "
                                    f"needed for the edge ({v.id}, {c.id})")
            edges.append(CTEdge(f"{v.id}~{c.id}", v.id, c.id, s, not t.symbol(s).in_A))
    return CylinderTree(tuple(nodes), tuple(edges), t, frozenset(interior),
                        degenerate=len(dec.cylinders) <= 1,
                        qh=tuple(sorted(n.id for n in nodes if n.id in qh_ids)))


def collapse_star(tc: CylinderTree) -> CylinderTree:
    """Contract every edge whose stabilizer is not an allowed group."""
    t = tc.table
    parent = {n.id: n.id for n in tc.nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    flagged = []
    for e in tc.edges:
        if e.collapsed or not t.symbol(e.stab).in_A:
            parent[find(e.src)] = find(e.dst)
            flagged.append(e.id)
    groups: dict = {}
    for n in tc.nodes:
        groups.setdefault(find(n.id), []).append(n)
    nodes, rename = [], {}
    interior = set()
    for members in groups.values():
        members.sort(key=lambda n: n.id)
        if len(members) == 1:
            n = members[0]
            nodes.append(n)
            rename[n.id] = n.id
            if n.id in tc.interior:
                interior.add(n.id)
            continue
        stab = members[0].stab
        for m in members[1:]:
            s = t.generated(stab, m.stab)
            if s is None:
                raise CylinderError(f"table has no join entry for ({stab}, {m.stab}); needed to merge "
                                    f"{[x.id for x in members]}")
            stab = s
        nid = "+".join(m.id for m in members)
        nodes.append(CTNode(nid, "merged", stab, tuple(m.id for m in members)))
        for m in members:
            rename[m.id] = nid
        if all(m.id in tc.interior for m in members):
            interior.add(nid)
    drop = set(flagged)
    edges = tuple(CTEdge(e.id, rename[e.src], rename[e.dst], e.stab) for e in tc.edges if e.id not in drop)
    qh = tuple(sorted({rename[q] for q in tc.qh}))
    return CylinderTree(tuple(nodes), edges, t, frozenset(interior), tc.degenerate, True, qh)


def tree_of_cylinders_star(ball: BallTree) -> CylinderTree:
    """The collapsed tree of cylinders of ``ball``."""
    return collapse_star(build_tree_of_cylinders(ball))


# -- acylindricity ----------------------------------------------------------

@dataclass(frozen=True)
class AcylindricityReport:
    k: int
    C: int
    passed: bool
    paths_checked: int
    witness: Optional[tuple] = None  # (vertex path, stabilizer order)
    interior: tuple = ()


def _as_ball(tree) -> BallTree:
    return tree.to_ball() if isinstance(tree, CylinderTree) else tree


def path_stabilizer_order(table: SubgroupTable, stabs: list):
    """Order of the intersection of the given edge stabilizers.

    Folds left to right, keeping a symbol while the table names the
    intersection and an order bound once it only gives an order.
    """
    cur, bound = stabs[0], table.order(stabs[0])
    for s in stabs[1:]:
        if cur is not None:
            meet = table.intersection(cur, s)
            if meet is not None:
                cur = meet
                bound = min(bound, table.order(meet))
                continue
            o = table.intersection_order(cur, s)
            if o is None:
                raise CylinderError(f"table has no intersection entry for ({cur}, {s})")
            cur, bound = None, min(bound, o)
        else:
            bound = min(bound, table.order(s))
    return bound


def _paths(ball: BallTree, inner: frozenset, length: int):
    """Simple paths with ``length`` edges in the interior, each listed once."""
    for start in sorted(inner):
        stack = [(start, [start], [])]
        while stack:
            v, vs, es = stack.pop()
            if len(es) == length:
                if vs[0] < vs[-1]:
                    yield vs, es
                continue
            for w, e in ball.neighbors(v):
                if w in inner and w not in vs:
                    stack.append((w, vs + [w], es + [e]))


def check_acylindricity(tree, k: int, C: int) -> AcylindricityReport:
    """Every interior arc with ``k + 1`` edges has stabilizer of order at most ``C``."""
    ball = _as_ball(tree)
    require_valid(ball)
    inner = ball.interior_vertices()
    n = 0
    for vs, es in _paths(ball, inner, k + 1):
        n += 1
        order = path_stabilizer_order(ball.table, [e.stab for e in es])
        if order > C:
            return AcylindricityReport(k, C, False, n, (tuple(vs), order), tuple(sorted(inner)))
    return AcylindricityReport(k, C, True, n, None, tuple(sorted(inner)))


# -- idempotence ------------------------------------------------------------

@dataclass(frozen=True)
class IdempotenceReport:
    passed: bool
    interior_nodes: int
    detail: str = ""


def _matcher(a, b):
    return a.get("stab") == b.get("stab")


def check_idempotence(ball: BallTree) -> IdempotenceReport:
    """The collapsed tree of cylinders of ``ball`` equals its own, on the interior."""
    star = tree_of_cylinders_star(ball)
    if not star.interior:
        return IdempotenceReport(False, 0, f"interior of the collapsed tree of cylinders is empty; "
                                           f"use interior_radius >= {ball.interior_radius + 1}")
    if not star.edges and len(star.nodes) == 1:
        # A single point is its own tree of cylinders.
        return IdempotenceReport(True, 1, "degenerate: the collapsed tree of cylinders is one vertex")
    again = tree_of_cylinders_star(star.to_ball())
    g1, g2 = star.graph(True), again.graph(True)
    ok = nx.is_isomorphic(g1, g2, node_match=_matcher, edge_match=_matcher)
    detail = "" if ok else (f"interiors differ: {g1.number_of_nodes()} nodes / {g1.number_of_edges()} edges vs "
                            f"{g2.number_of_nodes()} / {g2.number_of_edges()}")
    return IdempotenceReport(ok, g1.number_of_nodes(), detail)


# -- virtually cyclic groups ------------------------------------------------

def check_c_virtually_cyclic(symbol: str, table: SubgroupTable, C: int) -> bool:
    """Whether the declared data make ``symbol`` ``C``-virtually cyclic.

    Needs an infinite order and a declared kernel bound ``<= C``.  A
    declared finite subgroup larger than twice the kernel bound
    contradicts the declaration and raises :class:`CylinderError`.
    """
    s = table.symbol(symbol)
    if s.vc_kernel is not None:
        for f in s.finite_subgroups:
            if f > 2 * s.vc_kernel:
                raise CylinderError(f"{symbol}: declared finite subgroup of order {f} exceeds "
                                    f"twice the kernel bound {s.vc_kernel}")
    if not s.infinite or s.vc_kernel is None:
        return False
    return s.vc_kernel <= C


# -- quotient pattern -------------------------------------------------------

@dataclass(frozen=True)
class QuotientPattern:
    """Interior nodes and edges grouped by the conjugacy labels of their stabilizers."""

    nodes: tuple  # labels
    edges: tuple  # (label, edge label, label)

    def star_center(self) -> Optional[str]:
        deg: dict = {n: 0 for n in self.nodes}
        for a, _, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        if len(self.nodes) < 2:
            return None
        centers = [n for n, d in deg.items() if d == len(self.edges)]
        leaves = [n for n, d in deg.items() if d == 1]
        if len(self.nodes) == 2 and len(self.edges) == 1:
            return None  # a single edge has no distinguished center
        if len(centers) == 1 and len(leaves) == len(self.nodes) - 1:
            return centers[0]
        return None


def _label(table: SubgroupTable, name: str) -> str:
    return table.symbol(name).conj or name


def quotient_pattern(tree) -> QuotientPattern:
    ball = _as_ball(tree)
    t = ball.table
    inner = ball.interior_vertices()
    nodes = sorted({_label(t, ball.vertex(v).stab) for v in inner})
    edges = set()
    for e in ball.edges:
        if e.src in inner and e.dst in inner:
            a, b = sorted((_label(t, ball.vertex(e.src).stab), _label(t, ball.vertex(e.dst).stab)))
            edges.add((a, _label(t, e.stab), b))
    return QuotientPattern(tuple(nodes), tuple(sorted(edges)))


__all__ = [
    "CylinderError", "AdmissibilityReport", "check_admissibility", "Cylinder", "CylinderDecomposition",
    "compute_cylinders", "CTNode", "CTEdge", "CylinderTree", "build_tree_of_cylinders", "collapse_star",
    "tree_of_cylinders_star", "AcylindricityReport", "path_stabilizer_order", "check_acylindricity",
    "IdempotenceReport", "check_idempotence", "check_c_virtually_cyclic", "QuotientPattern",
    "quotient_pattern", "TREE_OF_CYLINDERS",
]
