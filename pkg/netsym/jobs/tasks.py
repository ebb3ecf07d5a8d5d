# ================================================
# File: netsym/jobs/tasks.py
# ================================================
# Payload -> report for each job kind. Payloads are the JSON bodies accepted
# by /netsym/jobs; every field except `network` (or `n` for catalogue jobs)
# is optional.
from typing import Any, Callable, Dict, Optional, Tuple

from .. import analysis
from ..catalogue import catalogue_report
from ..config import JOB_KINDS, MONOID_ENUMERATION_BOUND
from ..errors import InvalidConfig
from ..network.monoid import NetworkSpec


def int_field(payload: Dict[str, Any], key: str, default: Optional[int] = None) -> Optional[int]:
    value = payload.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise InvalidConfig(f"'{key}' must be an integer.", {key: value})
    return value

def float_field(payload: Dict[str, Any], key: str, default: Optional[float] = None) -> Optional[float]:
    value = payload.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidConfig(f"'{key}' must be a number.", {key: value})
    return float(value)

def network_of(payload: Dict[str, Any]) -> NetworkSpec:
    """`network` is {"cells", "maps"} or a worked-example name like "three_cell/sigma4"."""
    data = payload.get("network")
    if isinstance(data, str):
        return analysis.network_by_name(data)
    if data is None:
        raise InvalidConfig("Missing 'network'.")
    return analysis.network_from_payload(data)

def dim_field(payload: Dict[str, Any]) -> int:
    dim = int_field(payload, "dim", 1)
    if dim < 1:
        raise InvalidConfig(f"'dim' must be at least 1, got {dim}.")
    return dim


def run_catalogue(payload: Dict[str, Any]) -> Dict[str, Any]:
    n = int_field(payload, "n")
    if n is None:
        raise InvalidConfig("Missing 'n'.")
    bound = int_field(payload, "bound", MONOID_ENUMERATION_BOUND)
    return catalogue_report(n, dim_field(payload), int_field(payload, "seed"), bound)

def run_decompose(payload: Dict[str, Any]) -> Dict[str, Any]:
    return analysis.decompose_report(network_of(payload), dim_field(payload), int_field(payload, "seed"))

def run_classify(payload: Dict[str, Any]) -> Dict[str, Any]:
    return analysis.classify_report(network_of(payload), dim_field(payload), int_field(payload, "seed"),
                                    int_field(payload, "summand"))

def _lambda_range(payload: Dict[str, Any]) -> Tuple[float, float]:
    value = payload.get("range")
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise InvalidConfig("'range' must be [lambda_min, lambda_max].", {"range": value})
    try:
        return float(value[0]), float(value[1])
    except (TypeError, ValueError):
        raise InvalidConfig("'range' entries must be numbers.", {"range": value})

def run_continue(payload: Dict[str, Any]) -> Dict[str, Any]:
    spec = network_of(payload)
    dim = dim_field(payload)
    rf = analysis.function_from_text(payload.get("function"), spec, dim, payload.get("constants"))
    completed_size = analysis.monoid_size(spec)
    x0 = payload.get("x0", [0.0] * completed_size * dim)
    runs, summary = analysis.continue_report(
        spec, rf, x0,
        lambda0=float_field(payload, "lambda0", 0.0),
        lambda_range=_lambda_range(payload),
        step=float_field(payload, "step", 1e-2),
        subspace=analysis.parse_subspace(payload.get("subspace"), completed_size * dim),
        seed=int_field(payload, "seed"),
        tol=float_field(payload, "tol"),
    )
    summary["csv"] = analysis.runs_csv(runs)
    return summary


TASKS: Dict[str, Callable[[Dict[str, Any]], Dict[str, Any]]] = {
    "catalogue": run_catalogue,
    "decompose": run_decompose,
    "classify": run_classify,
    "continue": run_continue,
}

def run_job(kind: str, payload: Dict[str, Any]) -> Dict[str, Any]:
    if kind not in JOB_KINDS:
        raise InvalidConfig(f"Unknown job kind '{kind}'.", {"kinds": sorted(JOB_KINDS)})
    if not isinstance(payload, dict):
        raise InvalidConfig("Job payload must be a JSON object.")
    return {JOB_KINDS[kind]: TASKS[kind](payload)}
