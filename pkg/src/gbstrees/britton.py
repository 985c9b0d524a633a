"""Britton reduction and translation lengths in GBS groups."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .model import IDENTITY, GbsGraph, ModelError, PathWord, Syllable, TreeHandle


@dataclass(frozen=True)
class ReducedForm:
    """``conjugator * word * conjugator^-1`` equals the input element.

    ``word`` is a closed path at ``vertex``; ``conjugator`` is a path from the
    graph's base to ``vertex`` (the empty path unless cyclic reduction moved
    the base point).
    """

    word: PathWord
    vertex: str
    is_cyclically_reduced: bool
    conjugator: PathWord = IDENTITY

    @property
    def length(self) -> int:
        return len(self.word.syllables)


def _pinch(graph: GbsGraph, before: Syllable, after_letter) -> Optional[int]:
    """Exponent produced by ``before.letter x^before.exp after_letter`` if it pinches.

    ``after_letter`` may be a Letter or a Syllable; only its edge and direction are read.
    """
    if after_letter.edge != before.edge or after_letter.direction != -before.direction:
        return None
    geo = graph.geometry(before)
    if before.exp % geo.arr_label:
        return None
    return before.exp // geo.arr_label * geo.dep_label


def reduce_path(word: PathWord, graph: GbsGraph) -> PathWord:
    """Remove Britton pinches until none is left.

    Works on open paths too; the result is the same element of the
    fundamental groupoid.
    """
    head = word.base_exp
    stack: list = []
    for s in word.syllables:
        if stack:
            gained = _pinch(graph, stack[-1], s)
            if gained is not None:
                stack.pop()
                if stack:
                    top = stack[-1]
                    stack[-1] = Syllable(top.edge, top.direction, top.exp + gained + s.exp)
                else:
                    head += gained + s.exp
                continue
        stack.append(s)
    return PathWord(head, tuple(stack))


def britton_reduce(g: PathWord, graph: GbsGraph, cyclic: bool = False, start: Optional[str] = None) -> ReducedForm:
    start = graph.base if start is None else start
    errs = g.problems(graph, start)
    if errs:
        raise ModelError("; ".join(errs))
    w = reduce_path(g, graph)
    if not cyclic:
        return ReducedForm(w, start, _cyclically_reduced(w, graph), IDENTITY)

    vertex, conj = start, IDENTITY
    while True:
        syl = w.syllables
        if not syl:
            return ReducedForm(w, vertex, True, conj)
        # Conjugate the head exponent onto the tail: x^b W x^-b.
        b = w.base_exp
        if b:
            last = syl[-1]
            syl = syl[:-1] + (Syllable(last.edge, last.direction, last.exp + b),)
            conj = conj * PathWord(b)
        w = PathWord(0, syl)
        gained = _pinch(graph, syl[-1], syl[0].letter)
        if gained is None:
            return ReducedForm(w, vertex, True, conj)
        # t1 W tn x^a with tn = t1^-1: conjugating by t1 leaves W x^gained.
        first = syl[0]
        conj = conj * PathWord(0, (Syllable(first.edge, first.direction, 0),))
        vertex = graph.geometry(first.letter).arr
        inner = syl[1:-1]
        if inner:
            tail = inner[-1]
            w = PathWord(first.exp, inner[:-1] + (Syllable(tail.edge, tail.direction, tail.exp + gained),))
        else:
            w = PathWord(first.exp + gained, ())


def _cyclically_reduced(w: PathWord, graph: GbsGraph) -> bool:
    syl = w.syllables
    if not syl:
        return True
    if w.base_exp:
        last = syl[-1]
        syl = syl[:-1] + (Syllable(last.edge, last.direction, last.exp + w.base_exp),)
    return _pinch(graph, syl[-1], syl[0].letter) is None


def is_identity(g: PathWord, graph: GbsGraph, start: Optional[str] = None) -> bool:
    r = britton_reduce(g, graph, start=start)
    return not r.word.syllables and r.word.base_exp == 0


def _master(T) -> TreeHandle:
    return T if isinstance(T, TreeHandle) else TreeHandle.full(T)


def translation_length(g: PathWord, T) -> int:
    """Translation length of ``g`` in the tree ``T`` (a handle or a bare graph).

    Counts letters of the cyclically reduced form whose edge survives the
    collapse.
    """
    T = _master(T)
    r = britton_reduce(g, T.master, cyclic=True)
    return sum(1 for s in r.word.syllables if s.edge in T.kept)


def is_elliptic(g: PathWord, T) -> bool:
    return translation_length(g, T) == 0


def fix_overlap(g: PathWord, h: PathWord, T) -> bool:
    """Whether the fixed point sets of elliptic ``g`` and ``h`` meet.

    By Serre's lemma this is equivalent to ``g h`` being elliptic.
    """
    for name, w in (("g", g), ("h", h)):
        if not is_elliptic(w, T):
            raise ValueError(f"fix_overlap: {name} is hyperbolic")
    return is_elliptic(g * h, T)
