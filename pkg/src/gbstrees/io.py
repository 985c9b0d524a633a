"""Canonical JSON documents.

Every document is a JSON object with a top-level ``"kind"``: ``gbs``,
``word``, ``handle``, ``table`` or ``ball``.  Ids are strings.  Integers
whose magnitude exceeds 2**53 - 1 are written as decimal strings; infinite
orders are written as ``"inf"``.  Output is canonical: sorted keys, no
insignificant whitespace, ids and pairs in sorted order where the model
treats them as sets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from .model import (
    INF, BallEdge, BallTree, BallVertex, Edge, GbsGraph, ModelError, Move, PathWord, SubgroupTable,
    Syllable, Symbol, TreeHandle,
)

SAFE_INT = 2**53 - 1
KINDS = ("gbs", "word", "handle", "table", "ball")


class DocumentError(ValueError):
    """Malformed JSON or a document that does not match its schema."""


def _int_out(n: int):
    return str(n) if abs(n) > SAFE_INT else n


def _int_in(v, where: str) -> int:
    if isinstance(v, bool):
        raise DocumentError(f"{where}: expected integer, got boolean")
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        try:
            return int(v)
        except ValueError:
            pass
    raise DocumentError(f"{where}: expected integer, got {v!r}")


def _order_out(o):
    return "inf" if o == INF else _int_out(o)


def _order_in(v, where: str):
    if v == "inf" or v is None:
        return INF
    return _int_in(v, where)


def _get(d: dict, key: str, where: str):
    if not isinstance(d, dict):
        raise DocumentError(f"{where}: expected object")
    if key not in d:
        raise DocumentError(f"{where}: missing field {key!r}")
    return d[key]


# -- encoding ---------------------------------------------------------------

def graph_body(g: GbsGraph) -> dict:
    return {
        "base": g.base,
        "vertices": list(g.vertices),
        "edges": [
            {"id": e.id, "from": e.src, "to": e.dst,
             "label_from": _int_out(e.label_from), "label_to": _int_out(e.label_to)}
            for e in g.edges
        ],
    }


def word_body(w: PathWord) -> dict:
    return {
        "base_exp": _int_out(w.base_exp),
        "syllables": [{"edge": s.edge, "dir": s.direction, "exp": _int_out(s.exp)} for s in w.syllables],
    }


def move_body(m: Move) -> dict:
    out: dict = {"type": m.kind}
    if m.kind == "collapse":
        out["edges"] = sorted(m.edges)
    elif m.kind == "expansion":
        out.update(vertex=m.vertex, factor=_int_out(m.factor), new_vertex=m.new_vertex, new_edge=m.new_edge,
                   moved=[{"edge": e, "end": end} for e, end in sorted(m.moved)])
    elif m.kind == "slide":
        out.update(edge=m.edge, end=m.end, over=m.over)
    elif m.kind == "contract":
        out["edge"] = m.edge
    return out


def handle_body(h: TreeHandle) -> dict:
    return {"master": graph_body(h.master), "kept": sorted(h.kept), "lineage": [move_body(m) for m in h.lineage]}


def table_body(t: SubgroupTable) -> dict:
    syms = []
    for s in t.symbols:
        d: dict = {"name": s.name, "order": _order_out(s.order), "in_A": s.in_A}
        if s.conj is not None:
            d["conj"] = s.conj
        if s.vc_kernel is not None:
            d["vc_kernel"] = s.vc_kernel
        if s.finite_subgroups:
            d["finite_subgroups"] = list(s.finite_subgroups)
        syms.append(d)
    out = {
        "symbols": syms,
        "inclusions": [list(p) for p in sorted(t.inclusions)],
        "equiv": [{"id": c, "members": sorted(ms)} for c, ms in sorted(t.equiv.items())],
        "class_stab": dict(sorted(t.class_stab.items())),
        "intersect_order": [{"pair": list(p), "order": _order_out(o)} for p, o in sorted(t.intersect_order.items())],
    }
    if t.meet:
        out["meet"] = [{"pair": list(p), "symbol": s} for p, s in sorted(t.meet.items())]
    if t.join:
        out["join"] = [{"pair": list(p), "symbol": s} for p, s in sorted(t.join.items())]
    return out


def ball_body(b: BallTree) -> dict:
    verts = []
    for v in b.vertices:
        d = {"id": v.id, "stab": v.stab}
        if v.tags:
            d["tags"] = list(v.tags)
        verts.append(d)
    out = {
        "vertices": verts,
        "edges": [{"id": e.id, "from": e.src, "to": e.dst, "stab": e.stab} for e in b.edges],
        "interior_radius": b.interior_radius,
        "center": b.center,
        "table": table_body(b.table),
    }
    if b.interior is not None:
        out["interior"] = sorted(b.interior)
    if b.derived is not None:
        out["derived"] = b.derived
    return out


_BODY = {GbsGraph: ("gbs", graph_body), PathWord: ("word", word_body), TreeHandle: ("handle", handle_body),
         SubgroupTable: ("table", table_body), BallTree: ("ball", ball_body)}


def kind_of(obj) -> str:
    try:
        return _BODY[type(obj)][0]
    except KeyError:
        raise TypeError(f"not a document type: {type(obj).__name__}") from None


def to_data(obj, tagged: bool = True) -> dict:
    kind, body = _BODY[type(obj)]
    d = body(obj)
    if tagged:
        d["kind"] = kind
    return d


def dumps(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def serialize(obj, tagged: bool = True) -> str:
    """Canonical UTF-8 JSON text for a document (untagged for embedding)."""
    return dumps(to_data(obj, tagged))


# -- decoding ---------------------------------------------------------------

def graph_from(d: dict, where: str = "gbs") -> GbsGraph:
    edges = []
    for i, e in enumerate(_get(d, "edges", where)):
        w = f"{where}.edges[{i}]"
        edges.append(Edge(str(_get(e, "id", w)), str(_get(e, "from", w)), str(_get(e, "to", w)),
                          _int_in(_get(e, "label_from", w), w + ".label_from"),
                          _int_in(_get(e, "label_to", w), w + ".label_to")))
    verts = tuple(str(v) for v in _get(d, "vertices", where))
    base = d.get("base", verts[0] if verts else None)
    return GbsGraph(verts, tuple(edges), str(base))


def word_from(d: dict, where: str = "word") -> PathWord:
    syl = []
    for i, s in enumerate(_get(d, "syllables", where)):
        w = f"{where}.syllables[{i}]"
        direction = _int_in(_get(s, "dir", w), w + ".dir")
        if direction not in (1, -1):
            raise DocumentError(f"{w}.dir: must be 1 or -1")
        syl.append(Syllable(str(_get(s, "edge", w)), direction, _int_in(s.get("exp", 0), w + ".exp")))
    return PathWord(_int_in(d.get("base_exp", 0), where + ".base_exp"), tuple(syl))


def move_from(d: dict, where: str = "move") -> Move:
    kind = _get(d, "type", where)
    if kind == "collapse":
        return Move("collapse", edges=tuple(str(e) for e in _get(d, "edges", where)))
    if kind == "expansion":
        moved = tuple((str(m["edge"]), str(m["end"])) for m in d.get("moved", []))
        return Move("expansion", vertex=str(_get(d, "vertex", where)), factor=_int_in(_get(d, "factor", where), where),
                    moved=moved, new_vertex=d.get("new_vertex"), new_edge=d.get("new_edge"))
    if kind == "slide":
        return Move("slide", edge=str(_get(d, "edge", where)), end=str(_get(d, "end", where)),
                    over=str(_get(d, "over", where)))
    if kind == "contract":
        return Move("contract", edge=str(_get(d, "edge", where)))
    raise DocumentError(f"{where}.type: unknown move {kind!r}")


def handle_from(d: dict, where: str = "handle") -> TreeHandle:
    master = graph_from(_get(d, "master", where), where + ".master")
    kept = d.get("kept")
    kept = master.edge_ids if kept is None else tuple(str(e) for e in kept)
    lineage = tuple(move_from(m, f"{where}.lineage[{i}]") for i, m in enumerate(d.get("lineage", [])))
    return TreeHandle(master, frozenset(kept), lineage)


def _pairs(items, value_key, where, conv=lambda v, w: v):
    out = {}
    for i, it in enumerate(items or []):
        w = f"{where}[{i}]"
        pair = _get(it, "pair", w)
        if not isinstance(pair, list) or len(pair) != 2:
            raise DocumentError(f"{w}.pair: expected two symbols")
        out[(str(pair[0]), str(pair[1]))] = conv(_get(it, value_key, w), w)
    return out


def table_from(d: dict, where: str = "table") -> SubgroupTable:
    syms = []
    for i, s in enumerate(_get(d, "symbols", where)):
        w = f"{where}.symbols[{i}]"
        syms.append(Symbol(str(_get(s, "name", w)), _order_in(s.get("order", "inf"), w + ".order"),
                           bool(s.get("in_A", True)), s.get("conj"), s.get("vc_kernel"),
                           tuple(s.get("finite_subgroups", ()))))
    incl = []
    for i, p in enumerate(d.get("inclusions", [])):
        if not isinstance(p, list) or len(p) != 2:
            raise DocumentError(f"{where}.inclusions[{i}]: expected [sub, super]")
        incl.append((str(p[0]), str(p[1])))
    equiv = {}
    for i, c in enumerate(d.get("equiv", [])):
        w = f"{where}.equiv[{i}]"
        equiv[str(_get(c, "id", w))] = tuple(str(m) for m in _get(c, "members", w))
    return SubgroupTable(
        tuple(syms), frozenset(incl), equiv, {str(k): str(v) for k, v in d.get("class_stab", {}).items()},
        _pairs(d.get("intersect_order"), "order", where + ".intersect_order", _order_in),
        _pairs(d.get("meet"), "symbol", where + ".meet"),
        _pairs(d.get("join"), "symbol", where + ".join"),
    )


def ball_from(d: dict, where: str = "ball", table: SubgroupTable = None) -> BallTree:
    verts = []
    for i, v in enumerate(_get(d, "vertices", where)):
        w = f"{where}.vertices[{i}]"
        verts.append(BallVertex(str(_get(v, "id", w)), str(_get(v, "stab", w)), tuple(v.get("tags", ()))))
    edges = []
    for i, e in enumerate(_get(d, "edges", where)):
        w = f"{where}.edges[{i}]"
        edges.append(BallEdge(str(_get(e, "id", w)), str(_get(e, "from", w)), str(_get(e, "to", w)),
                              str(_get(e, "stab", w))))
    if "table" in d and isinstance(d["table"], dict):
        table = table_from(d["table"], where + ".table")
    if table is None:
        raise DocumentError(f"{where}: no subgroup table (embed one or supply it separately)")
    interior = d.get("interior")
    return BallTree(tuple(verts), tuple(edges), table, _int_in(d.get("interior_radius", 0), where),
                    d.get("center"), None if interior is None else frozenset(interior), d.get("derived"))


_FROM = {"gbs": graph_from, "word": word_from, "handle": handle_from, "table": table_from, "ball": ball_from}


def from_data(d: Any, kind: str = None):
    if not isinstance(d, dict):
        raise DocumentError("document must be a JSON object")
    kind = d.get("kind", kind)
    if kind not in _FROM:
        raise DocumentError(f"unknown or missing document kind {kind!r}")
    try:
        return _FROM[kind](d)
    except (KeyError, TypeError, ModelError) as exc:
        raise DocumentError(f"{kind}: {exc}") from exc


def parse(text: str, kind: str = None):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"malformed JSON: {exc}") from exc
    return from_data(data, kind)


def load(path, kind: str = None):
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), kind)


# -- validation -------------------------------------------------------------

@dataclass
class ValidationReport:
    kind: str
    errors: list

    @property
    def valid(self) -> bool:
        return not self.errors

    def to_data(self) -> dict:
        return {"kind": self.kind, "valid": self.valid, "errors": list(self.errors)}


def validate(doc, graph: GbsGraph = None) -> ValidationReport:
    """Check a parsed document (or raw JSON text / dict) against its invariants.

    A word is checked as a closed path at the base of ``graph``; without a
    graph only its shape is checked.
    """
    if isinstance(doc, (str, dict)):
        try:
            doc = parse(doc) if isinstance(doc, str) else from_data(doc)
        except DocumentError as exc:
            return ValidationReport("unknown", [str(exc)])
    kind = kind_of(doc)
    if isinstance(doc, PathWord):
        errs = [] if graph is None else doc.problems(graph)
    else:
        errs = doc.problems()
    return ValidationReport(kind, errs)
