"""Bipartite coset graphs of PSL_2(F_p) built from two conjugate cyclic subgroups.

Search for a good conjugating parameter, then check girth, spectral gap and
random-walk behaviour on explicit instances.
"""

from .errors import DomainError, NonConvergenceError, ResourceError
from .field import FieldCtx
from .group import PSL2, GroupIndex, enumerate_group
from .subgroups import DOUBLE_COMMUTATOR, PairCertificate, WordSpec, search

__version__ = "0.1.0"

__all__ = [
    "DomainError", "NonConvergenceError", "ResourceError", "FieldCtx", "PSL2", "GroupIndex",
    "enumerate_group", "DOUBLE_COMMUTATOR", "PairCertificate", "WordSpec", "search",
]
