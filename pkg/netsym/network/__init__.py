from .monoid import (
    CellMap, NetworkSpec, MonoidTable, canonical_form, composition_table,
    enumerate_monoids, is_closed, monoid_completion, monoid_isomorphic,
    semigroup_closure,
)
from .fundamental import (
    FundamentalNetwork, Representation, conjugation_maps, fundamental_network,
    left_action_maps, rep_matrices,
)
