"""Exact tools for GBS groups acting on trees.

Translation lengths by Britton reduction with a brute-force ball oracle,
presentation moves and deformation-space checks, the arithmetic of trees in
a collapse family, and trees of cylinders on symbolic ball trees.
"""

from .model import (
    INF, BallEdge, BallTree, BallVertex, Edge, GbsGraph, Letter, ModelError, Move, PathWord, SubgroupTable,
    Syllable, Symbol, TreeHandle,
)
from .io import DocumentError, load, parse, serialize, validate
from .britton import ReducedForm, britton_reduce, fix_overlap, is_elliptic, is_identity, translation_length
from .ball import (
    BallLimitError, axis_in_ball, bridge_distance, expand_ball, fixed_sets_meet, min_displacement_in_ball,
)
from .moves import (
    MarkingError, MoveError, apply_move, dominates, is_reduced, same_deformation_space, verify_marking,
    verify_small_domination,
)
from .arith import (
    CompatReport, PrimeFactor, compat_falsify, compat_verify, const1_evaluator, gcd_handles, lcm_family,
    lcm_handles, prime_factors, tree_evaluator,
)
from .cylinders import (
    CylinderError, build_tree_of_cylinders, check_acylindricity, check_admissibility, check_c_virtually_cyclic,
    check_idempotence, collapse_star, compute_cylinders, quotient_pattern,
)

__version__ = "0.1.0"
