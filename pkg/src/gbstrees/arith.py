"""Arithmetic of trees inside a collapse family, and compatibility tests.

Every tree here is a collapse of one master, so it is determined by its
kept edge set; gcd and lcm are intersection and union.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .britton import britton_reduce, is_identity, translation_length
from .model import GbsGraph, PathWord, TreeHandle, require_valid
from .moves import MarkingError, components, cyclic_component
from .sampling import MAX_EXP, MAX_SYLLABLES, random_word, rng_for

SHARDS = 16


@dataclass(frozen=True)
class PrimeFactor:
    handle: TreeHandle
    source_edge: str
    # True if the one-edge splitting has a global fixed point (a separating edge onto one side).
    trivial_splitting: bool = False


def _same_master(*Ts: TreeHandle) -> GbsGraph:
    m = Ts[0].master
    for T in Ts[1:]:
        if T.master != m:
            raise MarkingError("handles have different masters; arithmetic needs a common collapse family")
    return m


def prime_factors(T: TreeHandle) -> list:
    """One-edge collapses of ``T``, one per kept edge, sorted by edge id.

    Factors whose tree is trivial (no hyperbolic element) are kept but flagged.
    """
    require_valid(T)
    out = []
    for eid in sorted(T.kept):
        H = TreeHandle(T.master, frozenset([eid]), T.lineage)
        out.append(PrimeFactor(H, eid, _is_trivial_splitting(H)))
    return out


def _is_trivial_splitting(H: TreeHandle) -> bool:
    (eid,) = H.kept
    e = H.master.edge(eid)
    comps = components(H)
    if len(comps) == 1:
        return False  # a loop in the quotient: its stable letter is hyperbolic
    comp_of = {v: i for i, c in enumerate(comps) for v in c.vertices}
    for v, lab in ((e.src, e.label_from), (e.dst, e.label_to)):
        fac = cyclic_component(H.master, comps[comp_of[v]])
        if fac is not None and abs(lab * fac[v]) == 1:
            return True
    return False


def gcd_handles(T1: TreeHandle, T2: TreeHandle) -> TreeHandle:
    _same_master(T1, T2)
    return TreeHandle(T1.master, T1.kept & T2.kept)


def lcm_handles(T1: TreeHandle, T2: TreeHandle) -> TreeHandle:
    _same_master(T1, T2)
    return TreeHandle(T1.master, T1.kept | T2.kept)


def lcm_family(Ts: Sequence[TreeHandle]) -> TreeHandle:
    if not Ts:
        raise ValueError("lcm of an empty family")
    _same_master(*Ts)
    if len(Ts) == 1:
        return Ts[0]
    kept = frozenset().union(*(T.kept for T in Ts))
    return TreeHandle(Ts[0].master, kept)


@dataclass(frozen=True)
class LcmCleanup:
    """Display-only notes on the lcm's quotient graph; the kept set is untouched."""

    redundant_vertices: tuple  # collapsed vertices of valence 2 whose both edges are onto it
    note: str = "kept-set representation left unchanged"


def lcm_cleanup(T: TreeHandle) -> LcmCleanup:
    g = T.master
    comps = components(T)
    comp_of = {v: i for i, c in enumerate(comps) for v in c.vertices}
    ends: dict = {}
    for eid in sorted(T.kept):
        e = g.edge(eid)
        ends.setdefault(comp_of[e.src], []).append((e.src, e.label_from))
        ends.setdefault(comp_of[e.dst], []).append((e.dst, e.label_to))
    redundant = []
    for i, es in sorted(ends.items()):
        fac = cyclic_component(g, comps[i])
        if len(es) == 2 and fac is not None and all(abs(lab * fac[v]) == 1 for v, lab in es):
            redundant.append(comps[i].vertices)
    return LcmCleanup(tuple(redundant))


# -- compatibility ----------------------------------------------------------

@dataclass(frozen=True)
class CompatReport:
    verdict: str  # "compatible" | "incompatible" | "unknown"
    certificate: Optional[dict] = None
    samples_used: int = 0
    explanation: str = ""


def compat_verify(T1: TreeHandle, T2: TreeHandle, That: TreeHandle) -> CompatReport:
    _same_master(T1, T2, That)
    missing = sorted((T1.kept | T2.kept) - That.kept)
    if missing:
        which = [n for n, T in (("T1", T1), ("T2", T2)) if not T.kept <= That.kept]
        return CompatReport("unknown", None, 0,
                            f"candidate is not a refinement of {' and '.join(which)}: missing edges {missing}")
    return CompatReport("compatible", {"refinement": That}, 0, "both trees are collapses of the candidate")


@dataclass(frozen=True)
class Evaluator:
    """A named function from words to nonnegative integers."""

    name: str
    graph: GbsGraph
    fn: Callable = field(compare=False)
    spec: dict = field(default_factory=dict, compare=False)
    kept: Optional[frozenset] = None  # set for tree evaluators: lengths count these letters

    def __call__(self, w: PathWord) -> int:
        return self.fn(w)


def tree_evaluator(T: TreeHandle) -> Evaluator:
    return Evaluator("tree", T.master, lambda w: translation_length(w, T), {"kind": "handle", "handle": T}, T.kept)


def const1_evaluator(graph: GbsGraph) -> Evaluator:
    """1 on every nontrivial element, 0 on the identity; not a length function."""
    return Evaluator("const1", graph, lambda w: 0 if is_identity(w, graph) else 1,
                     {"kind": "evaluator", "evaluator": "const1"})


def dichotomy(lg: int, lh: int, lgh: int, lginvh: int) -> Optional[str]:
    """Which case of the axis dichotomy the four values fit, if any.

    ``"disjoint"``: ``l(gh) = l(g^-1 h) > l(g) + l(h)``;
    ``"meeting"``: ``max(l(gh), l(g^-1 h)) = l(g) + l(h)``.
    """
    s = lg + lh
    if lgh == lginvh and lgh > s:
        return "disjoint"
    if max(lgh, lginvh) == s:
        return "meeting"
    return None


def summed(l1: Evaluator, l2: Evaluator) -> Callable:
    """``w -> l1(w) + l2(w)``; two tree evaluators share one cyclic reduction."""
    if l1.kept is None or l2.kept is None:
        return lambda w: l1(w) + l2(w)
    graph, k1, k2 = l1.graph, l1.kept, l2.kept

    def ell(w):
        syl = britton_reduce(w, graph, cyclic=True).word.syllables
        return sum((s.edge in k1) + (s.edge in k2) for s in syl)
    return ell


def pair_values(l1: Evaluator, l2: Evaluator, g: PathWord, h: PathWord, ell: Callable = None) -> dict:
    ell = ell or summed(l1, l2)
    return {"g": ell(g), "h": ell(h), "gh": ell(g * h), "ginvh": ell(g.inverse() * h)}


def _shard(l1: Evaluator, l2: Evaluator, seed: int, shard: int, n: int, max_syllables: int, max_exp: int):
    """First violating pair among ``n`` samples of one shard, and hyperbolic pairs tried."""
    rng = rng_for(seed, "compat", shard)
    graph = l1.graph
    ell = summed(l1, l2)
    tried = 0
    for i in range(n):
        g = random_word(graph, rng, max_syllables, max_exp)
        h = random_word(graph, rng, max_syllables, max_exp)
        lg = ell(g)
        if lg == 0:
            continue
        lh = ell(h)
        if lh == 0:
            continue
        tried += 1
        vals = {"g": lg, "h": lh, "gh": ell(g * h), "ginvh": ell(g.inverse() * h)}
        if dichotomy(lg, lh, vals["gh"], vals["ginvh"]) is None:
            return (shard, i, g, h, vals), tried
    return None, tried


def _shard_sizes(budget: int) -> list:
    q, r = divmod(budget, SHARDS)
    return [q + (1 if s < r else 0) for s in range(SHARDS)]


def compat_falsify(l1: Evaluator, l2: Evaluator, budget: int = 5000, seed: int = 0, threads: int = 1,
                   max_syllables: int = MAX_SYLLABLES, max_exp: int = MAX_EXP) -> CompatReport:
    """Search for a pair ``(g, h)`` on which ``l1 + l2`` breaks the axis dichotomy.

    ``budget`` pairs are drawn across fixed shards with their own seeds, so
    the verdict does not depend on ``threads``.  The reported violation is
    the first in (shard, index) order.  Never answers "compatible".
    """
    if l1.graph != l2.graph:
        raise MarkingError("evaluators must be defined over the same presentation")
    sizes = _shard_sizes(budget)
    args = [(l1, l2, seed, s, n, max_syllables, max_exp) for s, n in enumerate(sizes)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(lambda a: _shard(*a), args))
    else:
        results = [_shard(*a) for a in args]
    hits = [r for r, _ in results if r is not None]
    if not hits:
        return CompatReport("unknown", None, budget, f"no violation in {budget} sampled pairs")
    shard, i, g, h, vals = min(hits, key=lambda x: (x[0], x[1]))
    used = sum(sizes[:shard]) + i + 1
    cert = {"g": g, "h": h, "values": vals, "shard": shard, "index": i}
    return CompatReport("incompatible", cert, used,
                        "l1 + l2 violates both cases of the axis dichotomy on (g, h)")


def verify_certificate(l1: Evaluator, l2: Evaluator, cert: dict) -> bool:
    """Recompute the values on the certified pair and recheck the violation."""
    g, h = cert["g"], cert["h"]
    for w in (g, h):
        if w.problems(l1.graph):
            return False
    vals = pair_values(l1, l2, g, h)
    if vals != dict(cert["values"]):
        return False
    if vals["g"] == 0 or vals["h"] == 0:
        return False
    return dichotomy(vals["g"], vals["h"], vals["gh"], vals["ginvh"]) is None
