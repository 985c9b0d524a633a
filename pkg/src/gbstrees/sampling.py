"""Seeded samplers for words and GBS graphs.

All randomness goes through :class:`random.Random` instances built from an
explicit seed, so every sample set is reproducible.
"""

from __future__ import annotations

import random
from collections import deque
from typing import Optional

from .model import GbsGraph, PathWord, Syllable

MAX_SYLLABLES = 12
MAX_EXP = 6


def rng_for(seed: int, *stream) -> random.Random:
    """Independent generator for ``(seed, stream...)``; stable across runs."""
    return random.Random(repr((seed,) + tuple(stream)))


def _distances_to(graph: GbsGraph, target: str) -> dict:
    dist = {target: 0}
    todo = deque([target])
    adj: dict = {v: set() for v in graph.vertices}
    for e in graph.edges:
        adj[e.src].add(e.dst)
        adj[e.dst].add(e.src)
    while todo:
        v = todo.popleft()
        for w in adj[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                todo.append(w)
    return dist


def random_path(graph: GbsGraph, rng: random.Random, length: int, start: Optional[str] = None,
                end: Optional[str] = None, max_exp: int = MAX_EXP) -> PathWord:
    """A random edge path of at most ``length`` syllables from ``start`` to ``end``.

    Each step picks uniformly among letters that still allow reaching
    ``end`` in the remaining steps; exponents are uniform in
    ``[-max_exp, max_exp]``.
    """
    start = graph.base if start is None else start
    end = start if end is None else end
    dist = _distances_to(graph, end)
    if dist[start] > length:
        raise ValueError(f"no path of length {length} from {start} to {end}")
    cur, syl = start, []
    base_exp = rng.randint(-max_exp, max_exp)
    for remaining in range(length, 0, -1):
        options = [l for l in graph.letters_from(cur) if dist[graph.geometry(l).arr] <= remaining - 1]
        if not options:
            break
        letter = rng.choice(options)
        cur = graph.geometry(letter).arr
        syl.append(Syllable(letter.edge, letter.direction, rng.randint(-max_exp, max_exp)))
    # The walk only stalls at ``end`` with one step left and no loop there.
    assert cur == end
    return PathWord(base_exp, tuple(syl))


def random_word(graph: GbsGraph, rng: random.Random, max_syllables: int = MAX_SYLLABLES,
                max_exp: int = MAX_EXP) -> PathWord:
    """Closed path at the base with a uniform syllable budget in ``[0, max_syllables]``."""
    return random_path(graph, rng, rng.randint(0, max_syllables), max_exp=max_exp)


def word_set(graph: GbsGraph, n: int, seed: int = 0, max_syllables: int = MAX_SYLLABLES,
             max_exp: int = MAX_EXP) -> list:
    rng = rng_for(seed, "words")
    return [random_word(graph, rng, max_syllables, max_exp) for _ in range(n)]


def random_elliptic(graph: GbsGraph, rng: random.Random, max_syllables: int = 6, max_exp: int = MAX_EXP) -> PathWord:
    """A conjugate ``w x_v^a w^-1`` of a vertex generator power."""
    v = rng.choice(graph.vertices)
    dist = _distances_to(graph, v)
    w = random_path(graph, rng, dist[graph.base] + rng.randint(0, max_syllables), end=v, max_exp=max_exp)
    a = rng.choice([i for i in range(-max_exp, max_exp + 1) if i])
    return w * PathWord(a) * w.inverse()


def random_gbs(rng: random.Random, max_edges: int = 5, max_label: int = 5, max_vertices: int = 3,
               signed: bool = True) -> GbsGraph:
    """A random connected GBS graph: a spanning tree plus extra edges and loops."""
    nv = rng.randint(1, max_vertices)
    verts = [f"v{i}" for i in range(nv)]
    ne = rng.randint(max(nv - 1, 1), max(max_edges, nv - 1))

    def label():
        n = rng.randint(1, max_label)
        return -n if signed and rng.random() < 0.25 else n

    edges = []
    for i in range(1, nv):
        a, b = verts[rng.randrange(i)], verts[i]
        if rng.random() < 0.5:
            a, b = b, a
        edges.append((f"e{len(edges)}", a, b, label(), label()))
    while len(edges) < ne:
        a, b = rng.choice(verts), rng.choice(verts)
        edges.append((f"e{len(edges)}", a, b, label(), label()))
    return GbsGraph.build(verts, edges)
