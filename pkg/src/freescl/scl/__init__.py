"""Exact scl of rational chains in free groups via the gluing LP."""
from .fatgraph import Fatgraph, VerificationReport, extract_fatgraph, glue_pieces, verify_fatgraph
from .gluing import (EXACT_LENGTH_LIMIT, GluingLP, SclResult, build_lp, heuristic_value, scl, solve,
                     theory_value)
from .oracle import NoWitness, scl_oracle_small
from .pieces import NotABoundaryError, PieceSystem, enumerate_pieces
from .simplex import LinearProgram, LPError, solve_exact, solve_float

__all__ = [
    "EXACT_LENGTH_LIMIT", "Fatgraph", "GluingLP", "LPError", "LinearProgram", "NoWitness",
    "NotABoundaryError", "PieceSystem", "SclResult", "VerificationReport", "build_lp",
    "enumerate_pieces", "extract_fatgraph", "glue_pieces", "heuristic_value", "scl",
    "scl_oracle_small", "solve", "solve_exact", "solve_float", "theory_value", "verify_fatgraph",
]
