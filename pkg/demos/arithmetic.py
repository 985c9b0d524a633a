"""Prime factors, gcd and lcm of collapses of one three-edge master.

    python demos/arithmetic.py
"""

from gbstrees import corpus
from gbstrees.arith import (
    compat_falsify, const1_evaluator, gcd_handles, lcm_handles, prime_factors, tree_evaluator,
)
from gbstrees.britton import translation_length
from gbstrees.model import TreeHandle
from gbstrees.moves import is_reduced, reduce_handle
from gbstrees.sampling import word_set

g = corpus.load("three_edge")
T = TreeHandle.full(g)
for p in prime_factors(T):
    note = " (trivial splitting)" if p.trivial_splitting else ""
    print("prime factor over edge", p.source_edge + note)

r = is_reduced(T)
print("reduced:", r.reduced, "witness:", r.witness)
print("one reduced collapse keeps", sorted(reduce_handle(T).kept))

T1, T2 = TreeHandle(g, frozenset("ef")), TreeHandle(g, frozenset("fg"))
G, L = gcd_handles(T1, T2), lcm_handles(T1, T2)
print("gcd keeps", sorted(G.kept), "and lcm keeps", sorted(L.kept))
ws = word_set(g, 500, seed=0)
bad = sum(translation_length(w, G) + translation_length(w, L)
          != translation_length(w, T1) + translation_length(w, T2) for w in ws)
print("gcd + lcm = l1 + l2 fails on", bad, "of", len(ws), "words")

bs = corpus.load("bs_2_3")
rep = compat_falsify(tree_evaluator(TreeHandle.full(bs)), const1_evaluator(bs), budget=5000, seed=7)
print("l_T + const1 on BS(2,3):", rep.verdict, rep.certificate["values"] if rep.certificate else "")
