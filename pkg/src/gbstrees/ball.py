"""Brute-force oracle: explicit pieces of the Bass-Serre tree.

A vertex of the Bass-Serre tree of a GBS graph is a coset ``w <x_v>`` where
``w`` is a path from the base to ``v``.  Each coset has a unique normal
form ``x^c_0 t_1 x^c_1 ... t_n`` in which ``0 <= c_i < |departure label of
t_(i+1)|`` and no ``t_(i+1)`` undoes ``t_i`` with ``c_i = 0``.  The tree is
the prefix tree of normal forms.  Group elements act by left
multiplication, computed here letter by letter with carries, without
calling the Britton engine.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .model import (
    INF, BallEdge, BallTree, BallVertex, GbsGraph, Letter, PathWord, SubgroupTable, Symbol, Syllable, TreeHandle,
)

DEFAULT_MAX_VERTICES = 1_000_000


class BallLimitError(RuntimeError):
    """The requested ball exceeds the vertex cap."""


# A normal form is a tuple of (exponent, Letter) pairs; the root is ().


def _carry(graph: GbsGraph, body: list, start: int = 0) -> None:
    """Bring exponents into their transversals, left to right, in place."""
    for i in range(start, len(body)):
        c, letter = body[i]
        geo = graph.geometry(letter)
        m = abs(geo.dep_label)
        r = c % m
        if r == c:
            return
        k = (c - r) // geo.dep_label
        body[i] = (r, letter)
        if i + 1 < len(body):
            nc, nl = body[i + 1]
            body[i + 1] = (nc + k * geo.arr_label, nl)


def _prepend_power(graph: GbsGraph, body: list, a: int) -> None:
    if a and body:
        c, letter = body[0]
        body[0] = (c + a, letter)
        _carry(graph, body)


def _prepend_letter(graph: GbsGraph, body: list, letter: Letter) -> list:
    if body and body[0][0] == 0 and body[0][1] == letter.inverse():
        return body[1:]
    return [(0, letter)] + body


def act(graph: GbsGraph, g: PathWord, nf: tuple) -> tuple:
    """Normal form of ``g . nf``."""
    body = list(nf)
    exps = [g.base_exp] + [s.exp for s in g.syllables]
    for i in range(len(g.syllables) - 1, -1, -1):
        _prepend_power(graph, body, exps[i + 1])
        body = _prepend_letter(graph, body, g.syllables[i].letter)
    _prepend_power(graph, body, exps[0])
    return tuple(body)


def endpoint(graph: GbsGraph, nf: tuple) -> str:
    return graph.geometry(nf[-1][1]).arr if nf else graph.base


def common_prefix(a: tuple, b: tuple) -> int:
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return n


def distance(a: tuple, b: tuple, kept=None) -> int:
    """Tree distance; with ``kept``, only edges in surviving orbits count."""
    n = common_prefix(a, b)
    if kept is None:
        return len(a) + len(b) - 2 * n
    return sum(1 for _, l in a[n:] if l.edge in kept) + sum(1 for _, l in b[n:] if l.edge in kept)


def children(graph: GbsGraph, nf: tuple) -> list:
    v = endpoint(graph, nf)
    back = nf[-1][1].inverse() if nf else None
    out = []
    for letter in graph.letters_from(v):
        m = abs(graph.geometry(letter).dep_label)
        for c in range(m):
            if c == 0 and letter == back:
                continue
            out.append(nf + ((c, letter),))
    return out


def vertex_id(nf: tuple) -> str:
    if not nf:
        return "."
    return ".".join(f"{c}{l.edge}{'+' if l.direction == 1 else '-'}" for c, l in nf)


def nf_word(nf: tuple) -> PathWord:
    """A path word representing the coset (trailing exponent 0)."""
    if not nf:
        return PathWord()
    exps = [c for c, _ in nf] + [0]
    return PathWord(exps[0], tuple(Syllable(l.edge, l.direction, exps[i + 1]) for i, (_, l) in enumerate(nf)))


def geodesic(a: tuple, b: tuple) -> list:
    """Vertices on the geodesic from ``a`` to ``b``, both included."""
    n = common_prefix(a, b)
    up = [a[:k] for k in range(len(a), n, -1)]
    down = [b[:k] for k in range(n, len(b) + 1)]
    return up + down


@dataclass
class Ball:
    """A finite subtree of a Bass-Serre tree, with its normal forms.

    ``tree`` is the symbolic :class:`BallTree`; ``nf`` maps its vertex ids
    to normal forms, ``radius`` is the search radius from ``center``.
    """

    handle: TreeHandle
    center: tuple
    radius: int
    nf: dict
    tree: BallTree
    hull: bool = False
    index: dict = field(default_factory=dict)

    def __contains__(self, nf: tuple) -> bool:
        return vertex_id(nf) in self.nf

    def __len__(self) -> int:
        return len(self.nf)


def _stab_symbols(graph: GbsGraph, nfs: Sequence[tuple], edges: Sequence[tuple]) -> tuple:
    """Stabilizer symbols: vertex ``w`` has ``w <x_v> w^-1``; the edge to a
    child ``w x^c t`` has the conjugate of the departure edge group."""
    syms, incl, index = [], [], {}
    for nf in nfs:
        syms.append(Symbol(f"G[{vertex_id(nf)}]", INF, True, conj=f"x_{endpoint(graph, nf)}"))
    for parent, child in edges:
        letter = child[-1][1]
        geo = graph.geometry(letter)
        name = f"G[{vertex_id(parent)}|{vertex_id(child)}]"
        syms.append(Symbol(name, INF, True, conj=f"c_{letter.edge}"))
        incl.append((name, f"G[{vertex_id(parent)}]"))
        incl.append((name, f"G[{vertex_id(child)}]"))
        index[(name, f"G[{vertex_id(parent)}]")] = abs(geo.dep_label)
        index[(name, f"G[{vertex_id(child)}]")] = abs(geo.arr_label)
    members = tuple(s.name for s in syms)
    # Every stabilizer in a GBS tree is commensurable with every other one:
    # a single equivalence class, stabilized by the whole group.
    syms.append(Symbol("G", INF, False))
    table = SubgroupTable(tuple(syms), frozenset(incl), {"commensurable": members} if members else {},
                          {"commensurable": "G"} if members else {})
    return table, index


def _build(handle: TreeHandle, center: tuple, radius: int, order: list, parents: dict,
           interior_margin: int, hull: bool) -> Ball:
    graph = handle.master
    tree_edges = [(parents[vertex_id(nf)], nf) for nf in order if vertex_id(nf) in parents]
    table, index = _stab_symbols(graph, order, tree_edges)
    verts = tuple(BallVertex(vertex_id(nf), f"G[{vertex_id(nf)}]") for nf in order)
    edges = tuple(BallEdge(f"{vertex_id(p)}|{vertex_id(c)}", vertex_id(p), vertex_id(c),
                           f"G[{vertex_id(p)}|{vertex_id(c)}]") for p, c in tree_edges)
    bt = BallTree(verts, edges, table, max(radius - interior_margin, 0), vertex_id(center))
    return Ball(handle, center, radius, {vertex_id(nf): nf for nf in order}, bt, hull, index)


def expand_ball(T, radius: int, center: tuple = (), max_vertices: int = DEFAULT_MAX_VERTICES,
                toward: Iterable[PathWord] = None, interior_margin: int = 1) -> Ball:
    """The radius-``radius`` ball of the master Bass-Serre tree around ``center``.

    With ``toward``, only the vertices on the geodesics from ``center`` to
    ``g . center`` (for each given ``g``) are kept, truncated at the radius:
    a thin but exact hull that makes the displacement oracle cheap.
    Distances in a collapse are read off the master tree, so the ball is
    always a piece of the master tree.
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    handle = T if isinstance(T, TreeHandle) else TreeHandle.full(T)
    graph = handle.master
    center = tuple(center)
    parents: dict = {}
    order = [center]
    seen = {vertex_id(center)}
    if toward is not None:
        for g in toward:
            for nf in geodesic(center, act(graph, g, center)):
                if distance(center, nf) > radius or vertex_id(nf) in seen:
                    continue
                seen.add(vertex_id(nf))
                order.append(nf)
        for nf in order[1:]:
            parents[vertex_id(nf)] = _toward(center, nf)
        if len(order) > max_vertices:
            raise BallLimitError(f"hull has {len(order)} vertices, cap is {max_vertices}")
        return _build(handle, center, radius, order, parents, interior_margin, True)

    frontier = [center]
    for _ in range(radius):
        nxt = []
        for nf in frontier:
            for nb in _neighbors(graph, nf):
                vid = vertex_id(nb)
                if vid in seen:
                    continue
                seen.add(vid)
                parents[vid] = nf
                order.append(nb)
                nxt.append(nb)
                if len(order) > max_vertices:
                    raise BallLimitError(f"ball exceeds {max_vertices} vertices; raise max_vertices to continue")
        frontier = nxt
    return _build(handle, center, radius, order, parents, interior_margin, False)


def _toward(center: tuple, nf: tuple) -> tuple:
    """The neighbor of ``nf`` one step closer to ``center``."""
    if common_prefix(center, nf) == len(nf):
        return center[:len(nf) + 1]
    return nf[:-1]


def _neighbors(graph: GbsGraph, nf: tuple) -> list:
    out = [nf[:-1]] if nf else []
    return out + children(graph, nf)


@dataclass(frozen=True)
class Displacement:
    value: int
    certified: bool
    witness: Optional[str] = None


def _kept(T) -> Optional[frozenset]:
    if isinstance(T, TreeHandle) and T.kept != frozenset(T.master.edge_ids):
        return T.kept
    return None


def _midpoints(graph: GbsGraph, g: PathWord, center: tuple, kept) -> list:
    """Vertices of ``[c, g c]`` mapping to the midpoint of its image in the collapse."""
    path = geodesic(center, act(graph, g, center))
    total = distance(center, path[-1], kept)
    half = (total + 1) // 2
    return [x for x in path if distance(center, x, kept) == half] or [path[0]]


def min_displacement(g: PathWord, ball: Ball, T=None) -> Displacement:
    """``min d(x, g x)`` over the ball's vertices.

    Always an upper bound for the translation length.  Certified exact when
    the ball contains a vertex of ``[c, g c]`` over the midpoint of its image:
    that vertex lies on the characteristic set of ``g``.
    """
    T = ball.handle if T is None else T
    graph, kept = ball.handle.master, _kept(T)
    cand = list(ball.nf.values())
    if not cand:
        return Displacement(0, False)
    best, where = None, None
    for x in cand:
        d = distance(x, act(graph, g, x), kept)
        if best is None or d < best:
            best, where = d, x
    certified = any(m in ball for m in _midpoints(graph, g, ball.center, kept))
    return Displacement(best, certified, vertex_id(where))


def min_displacement_in_ball(g: PathWord, ball: Ball, T=None) -> Displacement:
    return min_displacement(g, ball, T)


def displacement_formula(g: PathWord, graph: GbsGraph, x: tuple = (), kept=None) -> int:
    """``max(d(x, g^2 x) - d(x, g x), 0)``, valid at every point."""
    gx = act(graph, g, x)
    ggx = act(graph, g, gx)
    return max(distance(x, ggx, kept) - distance(x, gx, kept), 0)


@dataclass(frozen=True)
class AxisData:
    element: PathWord
    length: int
    axis_segment: Optional[tuple] = None
    characteristic_point: Optional[str] = None
    certified: bool = True


def characteristic_vertices(g: PathWord, ball: Ball, T=None) -> tuple:
    """Ball vertices on the characteristic set, and the certified length."""
    T = ball.handle if T is None else T
    graph, kept = ball.handle.master, _kept(T)
    disp = min_displacement(g, ball, T)
    on = [x for x in ball.nf.values() if distance(x, act(graph, g, x), kept) == disp.value]
    on.sort(key=lambda x: (len(x), vertex_id(x)))
    return on, disp


def axis_in_ball(g: PathWord, ball: Ball, T=None) -> AxisData:
    on, disp = characteristic_vertices(g, ball, T)
    if disp.value == 0:
        return AxisData(g, 0, None, vertex_id(on[0]), disp.certified)
    return AxisData(g, disp.value, tuple(vertex_id(x) for x in on), None, disp.certified)


@dataclass(frozen=True)
class Bridge:
    distance: int
    certified: bool


def bridge_distance(g: PathWord, h: PathWord, ball: Ball, T=None) -> Bridge:
    """Distance between the characteristic sets of ``g`` and ``h`` in the ball.

    Certified when the ball holds the midpoint vertices of ``[c, g c]`` and
    ``[c, h c]`` (balls are prefix closed, so it then holds the paths from
    ``c`` to both characteristic sets, which contain the bridge).
    """
    T = ball.handle if T is None else T
    kept = _kept(T)
    a, da = characteristic_vertices(g, ball, T)
    b, db = characteristic_vertices(h, ball, T)
    if not a or not b:
        return Bridge(0, False)
    if not (da.certified and db.certified):
        return Bridge(0, False)
    bset = {vertex_id(y) for y in b}
    if any(vertex_id(x) in bset for x in a):
        return Bridge(0, True)
    best = min(distance(x, y, kept) for x in a for y in b)
    return Bridge(best, True)


@dataclass(frozen=True)
class FixedSetCheck:
    meet: bool
    certified: bool
    witness: Optional[str] = None


def fixed_sets_meet(g: PathWord, h: PathWord, ball: Ball, T=None) -> FixedSetCheck:
    """Whether ``Fix g`` and ``Fix h`` share a vertex, by search in the ball.

    A common vertex found in the ball settles ``meet``.  Otherwise the answer
    "disjoint" is certified when both midpoint vertices are in the ball: if
    the fixed sets met, the farther of the two projections of ``c`` would be
    a common fixed point, and the projections are those midpoints.
    """
    T = ball.handle if T is None else T
    graph, kept = ball.handle.master, _kept(T)
    for w, name in ((g, "g"), (h, "h")):
        if displacement_formula(w, graph, ball.center, kept):
            raise ValueError(f"fixed_sets_meet: {name} is hyperbolic")
    for vid, x in ball.nf.items():
        if distance(x, act(graph, g, x), kept) == 0 and distance(x, act(graph, h, x), kept) == 0:
            return FixedSetCheck(True, True, vid)
    certified = (any(m in ball for m in _midpoints(graph, g, ball.center, kept))
                 and any(m in ball for m in _midpoints(graph, h, ball.center, kept)))
    return FixedSetCheck(False, certified)
