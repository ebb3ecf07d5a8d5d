from .classify import (
    COMPOSITE, NONE_GENERIC, PITCHFORK, SADDLE_NODE, TRANSCRITICAL,
    BifurcationClass, Branch, ClassificationReport, InstanceReport,
    classify_codim1, classify_instance, classify_summand, leading_branches,
)
from .continuation import (
    ContinuationRun, continuation_summary, continue_branches, match_predictions,
)
from .jordan import JordanChevalley, jordan_chevalley
from .lift import LiftReport, LiftedBranch, lift_equilibria, lift_to_original
from .reduction import ReducedSystem, ReducedTaylor, ls_reduce, reduced_taylor
from .taylor import TaylorFamily, equivariant_taylor_family
