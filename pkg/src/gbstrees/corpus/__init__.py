"""Shipped example documents."""

from __future__ import annotations

import json
from importlib import resources

from ..io import DocumentError, ball_from, from_data, parse
from ..model import GbsGraph, TreeHandle


def path(name: str):
    if not name.endswith(".json"):
        name += ".json"
    p = resources.files(__name__) / name
    if not p.is_file():
        raise DocumentError(f"no corpus file {name!r}")
    return p


def names() -> list:
    """Loadable documents (templates excluded)."""
    return sorted(p.name[:-5] for p in resources.files(__name__).iterdir()
                  if p.name.endswith(".json") and not p.name.endswith(".template.json"))


def text(name: str) -> str:
    return path(name).read_text(encoding="utf-8")


def load(name: str, table=None):
    data = json.loads(text(name))
    if data.get("kind") == "ball" and "table" not in data:
        return ball_from(data, name, table if table is not None else load(name.replace("_ball", "_table")))
    if data.get("kind") == "evaluator":
        return data
    return from_data(data)


def _kind(name: str):
    try:
        return json.loads(text(name)).get("kind")
    except json.JSONDecodeError:
        return None


def masters() -> dict:
    """Every GBS graph in the corpus, plus handle masters not shipped on their own."""
    out = {n: load(n) for n in names() if _kind(n) == "gbs"}
    for n, h in handles().items():
        if h.master not in out.values():
            out[n] = h.master
    return out


def handles() -> dict:
    return {n: load(n) for n in names() if _kind(n) == "handle"}


def baumslag_solitar(r: int, s: int) -> GbsGraph:
    """Fill the ``bs_r_s`` template."""
    raw = text("bs_r_s.template").replace('"{r}"', str(int(r))).replace('"{s}"', str(int(s)))
    return parse(raw)


__all__ = ["path", "names", "text", "load", "masters", "handles", "baumslag_solitar", "TreeHandle"]
