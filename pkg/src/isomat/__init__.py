"""Isotropic matroids of forests: construction, isomorphism search and reconstruction."""

from .gf2 import BitMatrix
from .isotropic import Graph, ia_matroid, ias_matroid, parse_graph
from .matroid import BinaryMatroid, ElementLabel, find_isomorphism, verify_map
from .reconstruct import reconstruct_forest_iso_ia, reconstruct_forest_iso_ias

__all__ = [
    "BitMatrix",
    "BinaryMatroid",
    "ElementLabel",
    "Graph",
    "ia_matroid",
    "ias_matroid",
    "parse_graph",
    "find_isomorphism",
    "verify_map",
    "reconstruct_forest_iso_ia",
    "reconstruct_forest_iso_ias",
]
