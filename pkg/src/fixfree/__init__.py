"""Fix-free codes: builders, de Bruijn machinery, pi-systems and an exhaustive verifier."""

from .constructors import BuildReport, construct
from .errors import FixFreeError, Impossible, Unsupported
from .verifier import SearchResult, counterexample, search
from .words import LevelSet, Profile, Word, is_free, kraft_sum

__version__ = "0.1.0"

__all__ = [
    "BuildReport",
    "FixFreeError",
    "Impossible",
    "LevelSet",
    "Profile",
    "SearchResult",
    "Unsupported",
    "Word",
    "construct",
    "counterexample",
    "is_free",
    "kraft_sum",
    "search",
]
