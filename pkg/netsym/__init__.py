# ================================================
# File: netsym/__init__.py
# ================================================
# Dynamics of homogeneous coupled-cell networks whose input maps form a monoid:
# closure and fundamental networks, robust synchrony, representation
# decomposition and codimension-one steady-state bifurcations.
from .errors import NetsymError
from .network import NetworkSpec, fundamental_network, monoid_completion, rep_matrices, semigroup_closure

__version__ = "0.1.0"
