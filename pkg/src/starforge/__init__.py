"""Star operations on semilocal finite-dimensional Bezout domains."""
from .ordgroups import RankOneGroup, LexGroup, Cut, ValueVector, compare, make_cut
from .forest import SpectralForest, standard_decomposition, is_h_local
from .ideals import IdealFamily, PrincipalWitness, colon, parse_ideal, render_ideal

__all__ = ["RankOneGroup", "LexGroup", "Cut", "ValueVector", "compare", "make_cut",
           "SpectralForest", "standard_decomposition", "is_h_local",
           "IdealFamily", "PrincipalWitness", "colon", "parse_ideal", "render_ideal"]
