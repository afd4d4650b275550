"""Triangulations of the 4-cube: exact circuits, bistellar flips, symmetry
reduced flip-graph enumeration and a constructive connectivity driver."""

from .complex import Triangulation, corner_cut_triangulations, is_corner_cut, make_corner_cut, validate
from .driver import FlipPath, ParadoxError, flip_to_corner_cut, insert_corner, random_walk
from .enumeration import explore_flip_graph, flip_graph_triangulations
from .flips import FlipMove, apply_flip, flippable_moves, is_flippable
from .kernel import CUBE3, CUBE4, Circuit, Config, circuits_through, radon_partition
from .regularity import is_regular, verify_certificate

__all__ = [
    "CUBE3", "CUBE4", "Circuit", "Config", "FlipMove", "FlipPath", "ParadoxError", "Triangulation",
    "apply_flip", "circuits_through", "corner_cut_triangulations", "explore_flip_graph",
    "flip_graph_triangulations", "flip_to_corner_cut", "flippable_moves", "insert_corner",
    "is_corner_cut", "is_flippable", "is_regular", "make_corner_cut", "radon_partition",
    "random_walk", "validate", "verify_certificate",
]
