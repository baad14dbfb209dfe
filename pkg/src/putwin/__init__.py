"""Parallel-universes tiebreaking winners for STV and Ranked Pairs."""
from .profiles import (
    Ballot, Profile, ProfileError, PreflibFormatError, WeightedMajorityGraph, TierPartition,
    impartial_culture, mcgarvey_profile, nonneg_tiers, parse_preflib, plurality_scores,
    serialize_preflib, wmg,
)
from .stv import Heuristic, PriorityHeuristic, put_stv, stv_fixed_order
from .rp import LockedGraph, RPPriority, max_children, put_rp, rp_fixed_order, scc_max_children
from .oracle import OracleBudget, brute_rp, brute_stv
from .trace import Budget, DiscoveryTrace, SolveResult

__version__ = "0.1.0"
