from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Limits:
    """Size caps; exceeding any of them raises ResourceExceeded."""

    automaton_cap: int = 400000
    herbst_terms: int = 4000
    oracle_nodes: int = 200000
    witness_nodes: int = 20000


DEFAULT_LIMITS = Limits()
