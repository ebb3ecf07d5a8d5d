# ================================================
# File: netsym/analysis.py
# ================================================
# Report builders shared by the CLI, the job queue and the HTTP routes.
# Inputs are already-validated domain objects; outputs are JSON-ready dicts.
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .bifurcation.classify import classify_codim1, classify_instance
from .bifurcation.continuation import ContinuationRun, continuation_summary, continue_branches, match_predictions
from .bifurcation.lift import lift_to_original
from .catalogue import identify
from .config import MONOID_ENUMERATION_BOUND
from .dsl.expression import ResponseFunction, parse, parse_constants
from .dsl.network_ops import extend_arity
from .errors import InvalidConfig, InvalidNetwork, NetsymError
from .network.fundamental import conjugation_maps, describe_linear_map, fundamental_network, rep_matrices
from .network.monoid import NetworkSpec, enumerate_monoids, monoid_completion, semigroup_closure
from .network.tables import CATALOGUE, RUNNING_EXAMPLE, named_network
from .representation.decomposition import decompose
from .simulator.field import NetworkVectorField
from .simulator.integrate import Trajectory, integrate
from .simulator.verify import semiconjugacy_report
from .synchrony.balanced import SynchronySpace, closure_preserves_synchrony, enumerate_balanced
from .synchrony.symmetry import symmetry_coverage, synchrony_from_symmetry
from .utils.helpers import log, resolve_seed, validate_network_dict, warn


def network_from_payload(data: Any) -> NetworkSpec:
    return NetworkSpec.from_dict(validate_network_dict(data))

def network_by_name(name: str) -> NetworkSpec:
    """Worked example by name: "running", "two_cell/sigma1" .. "three_cell/sigma7"."""
    if name == "running":
        return network_from_payload(RUNNING_EXAMPLE)
    prefix, _, key = name.partition("/")
    size = {"two_cell": 2, "three_cell": 3}.get(prefix)
    if size is None or key not in CATALOGUE[size]:
        raise InvalidNetwork(f"Unknown worked example '{name}'.")
    return network_from_payload(named_network(size, key))

def function_from_text(text: str, spec: NetworkSpec, dim: int = 1,
                       constants: Optional[Sequence[str]] = None) -> ResponseFunction:
    """Parses a response function whose arity is the number of input maps of spec."""
    if not isinstance(text, str) or not text.strip():
        raise InvalidConfig("A response function expression is required.")
    return parse(text, spec.size, dim, parse_constants(constants or []))


# --- Network structure ---

def closure_report(spec: NetworkSpec) -> Dict[str, Any]:
    closed, table = semigroup_closure(spec)
    return {
        "input": spec.to_dict(),
        "closed": closed.to_dict(),
        "generated": closed.size - spec.size,
        "table": table.to_dict(),
        "is_monoid": table.unit_index is not None,
    }

def fundamental_report(spec: NetworkSpec) -> Dict[str, Any]:
    completed = monoid_completion(spec)
    fund = fundamental_network(completed)
    fund.check()
    return {
        "monoid": completed.to_dict(),
        "table": fund.table.to_dict(),
        "tilde_maps": [str(m) for m in fund.tilde_maps],
        "equations": fund.equations(),
        "conjugation_maps": [describe_linear_map(P) for P in conjugation_maps(completed)],
    }

def enumerate_report(n: int, bound: int = MONOID_ENUMERATION_BOUND) -> Dict[str, Any]:
    tables = []
    for table in enumerate_monoids(n, bound):
        name, witness = identify(table)
        tables.append({**table.to_dict(), "name": name, "witness": witness})
    return {"n": n, "count": len(tables), "tables": tables}


# --- Synchrony ---

def _space_entry(space: SynchronySpace, derivations: Sequence[str]) -> Dict[str, Any]:
    return {
        "partition": space.partition.to_external(),
        "equations": space.equations(),
        "dimension": space.dimension,
        "balanced": True,
        "derivations": list(derivations),
    }

def synchrony_report(spec: NetworkSpec, fundamental: bool = False, dim: int = 1) -> Dict[str, Any]:
    """
    Balanced partitions of spec (or of its fundamental network). For the
    fundamental network each space also lists the symmetry expressions that
    produce it, where any do.
    """
    if not fundamental:
        spaces = [SynchronySpace(p, dim) for p in enumerate_balanced(spec)]
        return {
            "network": spec.to_dict(),
            "fundamental": False,
            "closure_preserves_synchrony": closure_preserves_synchrony(spec),
            "spaces": [_space_entry(s, []) for s in spaces],
        }

    fund = fundamental_network(monoid_completion(spec))
    symmetric = synchrony_from_symmetry(rep_matrices(fund, dim), fund)
    derived = {s.partition: s.expressions for s in symmetric}
    spaces = [SynchronySpace(p, dim) for p in enumerate_balanced(fund.as_spec())]
    return {
        "network": fund.as_spec().to_dict(),
        "fundamental": True,
        "spaces": [_space_entry(s, derived.get(s.partition, ())) for s in spaces],
        "symmetry_coverage": symmetry_coverage(fund, symmetric),
    }


# --- Representation and bifurcations ---

def decompose_report(spec: NetworkSpec, dim: int = 1, seed: Optional[int] = None) -> Dict[str, Any]:
    fund = fundamental_network(monoid_completion(spec))
    return decompose(rep_matrices(fund, dim), resolve_seed(seed)).to_dict()

def classify_report(spec: NetworkSpec, dim: int = 1, seed: Optional[int] = None,
                    summand: Optional[int] = None, lift: bool = True) -> Dict[str, Any]:
    """
    Decomposition, per-summand classification and, for d = 1, the branches
    lifted to the original network. `summand` (1-indexed) keeps one class.
    """
    seed = resolve_seed(seed)
    completed = monoid_completion(spec)
    fund = fundamental_network(completed)
    rep = rep_matrices(fund, dim)
    decomposition = decompose(rep, seed)
    classification = classify_codim1(rep, decomposition)

    classes = list(classification)
    if summand is not None:
        if not 1 <= summand <= len(classes):
            raise InvalidConfig(f"Summand {summand} out of range 1..{len(classes)}.")
        classes = [classes[summand - 1]]

    report = {
        "seed": seed,
        "decomposition": decomposition.to_dict(),
        "hypothesis_ok": classification.hypothesis_ok,
        "message": classification.message,
        "classes": [c.to_dict() for c in classes],
        "kinds": [c.kind for c in classes],
    }
    if lift and dim == 1 and classification.hypothesis_ok:
        report["lifted"] = [lift_to_original(completed, c, seed).to_dict() for c in classes]
    return report


def instance_report(spec: NetworkSpec, rf: ResponseFunction, X0: Sequence[Any], lambda0: Any = 0,
                    seed: Optional[int] = None) -> Dict[str, Any]:
    completed, adapted, fund = _monoid_and_function(spec, rf)
    return classify_instance(fund, adapted, X0, lambda0, seed).to_dict()


def _monoid_and_function(spec: NetworkSpec, rf: ResponseFunction):
    completed = monoid_completion(spec)
    return completed, extend_arity(rf, spec, completed), fundamental_network(completed)

def monoid_size(spec: NetworkSpec) -> int:
    """Number of cells of the fundamental network of spec."""
    return monoid_completion(spec).size


def continue_report(spec: NetworkSpec, rf: ResponseFunction, X0: Sequence[float], lambda0: float,
                    lambda_range: Tuple[float, float], step: float, subspace: Optional[Any] = None,
                    seed: Optional[int] = None, tol: Optional[float] = None,
                    predict: bool = True) -> Tuple[List[ContinuationRun], Dict[str, Any]]:
    """
    Continuation on the fundamental network of spec. When the start point is
    exactly representable, the classified instance seeds the branch search
    and the runs are matched against its predictions.
    """
    completed, adapted, fund = _monoid_and_function(spec, rf)
    prediction = None
    if predict:
        try:
            prediction = classify_instance(fund, adapted, X0, lambda0, seed)
            if not prediction.generic:
                log("Analysis", f"Instance is {prediction.status}; continuing without predictions.")
                prediction = None
        except NetsymError as e:
            warn("Analysis", f"No branch predictions: {e.message}")

    kwargs = {"tol": tol} if tol is not None else {}
    runs = continue_branches(fund, adapted, X0, lambda_range, step, lambda0=lambda0,
                             subspace=subspace, seed=seed, predictions=prediction, **kwargs)
    matches = match_predictions(runs, prediction) if prediction is not None else None
    summary = continuation_summary(runs, matches)
    summary.update({"lambda0": lambda0, "lambda_range": list(lambda_range), "step": step})
    if prediction is not None:
        summary["instance"] = prediction.to_dict()
    return runs, summary


# --- Dynamics ---

def simulate(spec: NetworkSpec, rf: ResponseFunction, x0: Sequence[float], lam: float,
             t_end: float, dt: float, fundamental: bool = False) -> Trajectory:
    if fundamental:
        _, adapted, fund = _monoid_and_function(spec, rf)
        field = NetworkVectorField.fundamental(fund, adapted)
    else:
        field = NetworkVectorField(spec, rf)
    return integrate(field, x0, lam, t_end, dt)

def verify_report(spec: NetworkSpec, rf: ResponseFunction, x0: Sequence[float], lam: float,
                  t_end: float, dt: float, residual_tol: float) -> Dict[str, Any]:
    report = semiconjugacy_report(spec, rf, x0, t_end, dt, lam)
    report["residual_tol"] = residual_tol
    report["passed"] = bool(report["semiconjugacy_residual"] < residual_tol
                            and report["equilibrium_correspondence"]["agree"])
    return report


def runs_csv(runs: Sequence[ContinuationRun]) -> str:
    """All runs in one CSV; a 'branch' column numbers them from 1."""
    blocks = []
    for index, run in enumerate(runs, start=1):
        lines = run.to_csv().splitlines()
        if not blocks:
            blocks.append("branch," + lines[0])
        blocks.extend(f"{index},{line}" for line in lines[1:])
    return "\n".join(blocks) + "\n" if blocks else ""


def parse_subspace(data: Any, dim: int) -> Optional[np.ndarray]:
    """Basis vectors as a list of rows [[...], ...] (one row per vector) -> column matrix."""
    if data is None:
        return None
    try:
        vectors = np.asarray(data, dtype=float)
    except (TypeError, ValueError):
        raise InvalidConfig("Subspace must be a list of numeric basis vectors.")
    if vectors.ndim != 2 or vectors.shape[1] != dim:
        raise InvalidConfig(f"Each subspace basis vector needs {dim} entries.", {"shape": list(vectors.shape)})
    return vectors.T
