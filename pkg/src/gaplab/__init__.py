"""Exact gap statistics of two-dimensional Kronecker point sets ``{n alpha + m beta}``."""
__version__ = "0.1.0"

from .cf_core import CFReal, LinearForm, PartialQuotientStream, Sign, certified_sign, theta_form
from .constructions import PairConstruction, bounded_family, unbounded_family, verify_family_invariants
from .gap_engine import GapSet, NeighborTable, distinct_count, gap_set, primitive_gaps
from .neighbor_theory import (
    CaseTable,
    ReturnTimeProfile,
    delta_k,
    exchange_table,
    induced_table_qkN,
    phi_induction_map,
    prop42_table,
    seven_table,
    three_gap_return,
    unbounded_witnesses,
)

__all__ = [
    "CFReal", "LinearForm", "PartialQuotientStream", "Sign", "certified_sign", "theta_form",
    "PairConstruction", "bounded_family", "unbounded_family", "verify_family_invariants",
    "GapSet", "NeighborTable", "distinct_count", "gap_set", "primitive_gaps",
    "CaseTable", "ReturnTimeProfile", "delta_k", "exchange_table", "induced_table_qkN",
    "phi_induction_map", "prop42_table", "seven_table", "three_gap_return", "unbounded_witnesses",
]
