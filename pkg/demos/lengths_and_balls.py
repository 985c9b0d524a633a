"""Translation lengths in BS(2,3) two ways: the Britton engine and an explicit ball.

    python demos/lengths_and_balls.py
"""

from gbstrees import corpus
from gbstrees.ball import act, distance, expand_ball, min_displacement_in_ball
from gbstrees.britton import britton_reduce, translation_length
from gbstrees.model import PathWord, TreeHandle
from gbstrees.sampling import word_set

g = corpus.load("bs_2_3")
T = TreeHandle.full(g)
t = PathWord.of(0, ("t", 1, 0))
x = PathWord(1)

# t x t^-1 does not pinch (2 does not divide 1), but it is conjugate to x
w = t * x * t.inverse()
r = britton_reduce(w, g, cyclic=True)
print(f"{w} reduces cyclically to {r.word} with conjugator {r.conjugator}")

ball = expand_ball(g, 1)
print("radius-1 ball:", len(ball), "vertices; the center has valence", len(ball) - 1)

print(f"{'word':>4} {'engine':>6} {'ball':>4} certified")
for i, w in enumerate(word_set(g, 8, seed=1, max_syllables=6)):
    radius = distance((), act(g, w, ()))
    d = min_displacement_in_ball(w, expand_ball(T, radius, toward=[w]))
    print(f"{i:>4} {translation_length(w, T):>6} {d.value:>4} {d.certified}")
