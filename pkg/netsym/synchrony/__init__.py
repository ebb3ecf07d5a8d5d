from .balanced import (
    Partition, SynchronySpace, all_partitions, closure_preserves_synchrony,
    enumerate_balanced, is_balanced,
)
from .symmetry import polydiagonal_partition, symmetry_coverage, synchrony_from_symmetry
