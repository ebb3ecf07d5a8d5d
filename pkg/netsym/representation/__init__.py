from .algebra import (
    COMPLEX, QUATERNIONIC, REAL, EndoAlgebra, division_type, endomorphism_basis,
    quotient_structure, radical, span_algebra,
)
from .decomposition import (
    DecompositionReport, Summand, are_isomorphic, decompose, endo_algebra,
    hom_space, krull_schmidt_check, make_summand,
)
