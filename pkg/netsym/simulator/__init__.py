from .field import NetworkVectorField
from .integrate import RK4, Trajectory, integrate
from .verify import (
    EquilibriumCheck, as_monoid, semiconjugacy_report, verify_equilibrium_correspondence,
    verify_semiconjugacy, verify_synchrony_invariance,
)
