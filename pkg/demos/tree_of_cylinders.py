"""Tree of cylinders of the shipped three-torus example.

    python demos/tree_of_cylinders.py
"""

from gbstrees import corpus
from gbstrees.cylinders import (
    check_acylindricity, check_admissibility, check_idempotence, compute_cylinders, quotient_pattern,
    tree_of_cylinders_star,
)

ball = corpus.load("figure1_ball")
print("admissible:", check_admissibility(ball).passed)
for c in compute_cylinders(ball).cylinders:
    print(f"cylinder {c.id}: stabilizer {c.stab}, {len(c.edges)} edges")

star = tree_of_cylinders_star(ball)
q = quotient_pattern(star)
print("quotient edges:")
for a, e, b in q.edges:
    print(f"  {a} --{e}-- {b}")
print("star center:", q.star_center())

for tree, name in ((ball, "input"), (star, "collapsed tree of cylinders")):
    rep = check_acylindricity(tree, 2, 1)
    print(f"(2,1)-acylindrical, {name}: {rep.passed}", "" if rep.passed else f"witness {rep.witness}")
print("idempotent:", check_idempotence(ball).passed)
