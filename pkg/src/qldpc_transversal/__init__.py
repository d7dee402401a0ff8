"""Transversal diagonal phase gates on CSS and quantum LDPC codes."""

from .css import CssCode, DistanceCertificate, assemble, compute_logicals, distance_search
from .gf2 import BitMatrix, BitVector
from .transversality import PhaseVector, TransversalityReport, check_conditions, find_phase_vector

__all__ = [
    "BitMatrix",
    "BitVector",
    "CssCode",
    "DistanceCertificate",
    "PhaseVector",
    "TransversalityReport",
    "assemble",
    "check_conditions",
    "compute_logicals",
    "distance_search",
    "find_phase_vector",
]
