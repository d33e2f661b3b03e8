"""Prefix monoid membership for one-relator groups.

The pieces fit together as follows: ``words`` and ``fsa`` are the basic data,
``rational`` and ``stallings`` give rational subsets and subgroups of free
groups, ``herbst`` transports rational sets along subgroup isomorphisms,
``amalgam`` and ``hnn`` decide submonoid membership in the two kinds of
extension, and ``solvers`` classifies a presentation and dispatches.
"""

from .config import DEFAULT_LIMITS, Limits
from .errors import HerbstError, ResourceExceeded, Unsupported
from .factorise import Factorisation, adjan_factorisation, adjan_overlap, benois_pieces, refines
from .munn import fim_equal, munn_tree
from .oracle import oracle_member
from .solvers import (
    ClassTag, Presentation, classify, find_witness, ohare_rewrite, prefix_member, right_invertible,
    solver_for, verify_witness,
)
from .words import Word, free_reduce, invert, rho, word

__version__ = "0.1.0"

__all__ = [
    "Limits", "DEFAULT_LIMITS", "ResourceExceeded", "Unsupported", "HerbstError", "Word", "word",
    "free_reduce", "invert", "rho", "Factorisation", "benois_pieces", "adjan_factorisation", "adjan_overlap",
    "refines", "fim_equal", "munn_tree", "oracle_member", "Presentation", "ClassTag", "classify",
    "prefix_member", "right_invertible", "solver_for", "find_witness", "verify_witness", "ohare_rewrite",
]
