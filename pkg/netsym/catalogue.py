# ================================================
# File: netsym/catalogue.py
# ================================================
from typing import Any, Dict, List, Optional, Tuple

from .bifurcation.classify import classify_codim1
from .config import MONOID_ENUMERATION_BOUND
from .errors import NetsymError
from .network.fundamental import fundamental_network, rep_matrices
from .network.monoid import (
    MonoidTable, NetworkSpec, composition_table, enumerate_monoids, monoid_isomorphic, semigroup_closure,
)
from .network.tables import CATALOGUE
from .representation.decomposition import decompose
from .utils.helpers import log, resolve_seed, warn


def named_tables() -> List[Tuple[str, MonoidTable]]:
    """('three_cell/sigma4', table) for every worked example."""
    prefixes = {2: "two_cell", 3: "three_cell"}
    out = []
    for size, entries in sorted(CATALOGUE.items()):
        for name, maps in entries.items():
            spec = NetworkSpec.from_external(size, maps)
            out.append((f"{prefixes[size]}/{name}", composition_table(spec)))
    return out


def identify(table: MonoidTable) -> Tuple[Optional[str], Optional[List[int]]]:
    """Name of the isomorphic worked example and the witness (1-indexed, this table -> named table)."""
    for name, named in named_tables():
        same, witness = monoid_isomorphic(table, named)
        if same:
            return name, [w + 1 for w in witness]
    return None, None


def cayley_network(table: MonoidTable) -> NetworkSpec:
    """The monoid acting on itself: map j is row j of the table."""
    return NetworkSpec.from_external(table.size, table.rows_external())


def analyze_table(table: MonoidTable, dim: int = 1, seed: Optional[int] = None) -> Dict[str, Any]:
    spec, _ = semigroup_closure(cayley_network(table))
    fund = fundamental_network(spec)
    rep = rep_matrices(fund, dim)
    decomposition = decompose(rep, seed)
    classification = classify_codim1(rep, decomposition)
    return {
        "decomposition": decomposition.to_dict(),
        "classification": classification.to_dict(),
        "kinds": classification.kinds,
    }


def catalogue_report(n: int, dim: int = 1, seed: Optional[int] = None,
                     bound: int = MONOID_ENUMERATION_BOUND) -> Dict[str, Any]:
    """
    Runs the full pipeline for every monoid with n elements. A failure on one
    monoid is recorded in its entry and does not stop the others.
    """
    seed = resolve_seed(seed)
    tables = enumerate_monoids(n, bound)
    entries = []
    for index, table in enumerate(tables):
        name, witness = identify(table)
        entry: Dict[str, Any] = {"index": index + 1, "table": table.to_dict(), "name": name, "witness": witness}
        try:
            entry.update(analyze_table(table, dim, seed))
        except NetsymError as e:
            warn("Catalogue", f"Monoid {index + 1} of size {n}: {e.message}")
            entry["error"] = e.to_dict()
        entries.append(entry)
    log("Catalogue", f"Analyzed {len(entries)} monoid(s) of size {n}.")
    return {"n": n, "dim": dim, "seed": seed, "count": len(entries), "monoids": entries}
