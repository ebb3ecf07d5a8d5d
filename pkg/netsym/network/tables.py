# ================================================
# File: netsym/network/tables.py
# ================================================
# Named small monoids, each given by its maps on as many cells as it has
# elements (rows of the composition table, 1-indexed).

RUNNING_EXAMPLE = {"cells": 3, "maps": [[1, 2, 3], [1, 2, 1], [1, 1, 1]]}

TWO_CELL = {
    "sigma1": [[1, 2], [2, 1]],  # Z2
    "sigma2": [[1, 2], [2, 2]],
}

THREE_CELL = {
    "sigma1": [[1, 2, 3], [2, 2, 2], [3, 2, 2]],
    "sigma2": [[1, 2, 3], [2, 2, 3], [3, 3, 2]],
    "sigma3": [[1, 2, 3], [2, 2, 3], [3, 3, 3]],
    "sigma4": [[1, 2, 3], [2, 2, 2], [3, 3, 3]],
    "sigma5": [[1, 2, 3], [2, 2, 3], [3, 2, 3]],
    "sigma6": [[1, 2, 3], [2, 3, 1], [3, 1, 2]],  # Z3
    "sigma7": [[1, 2, 3], [2, 1, 3], [3, 3, 3]],
}

CATALOGUE = {2: TWO_CELL, 3: THREE_CELL}

def named_network(size: int, name: str) -> dict:
    return {"cells": size, "maps": [list(m) for m in CATALOGUE[size][name]]}
