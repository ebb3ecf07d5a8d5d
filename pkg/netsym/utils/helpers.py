# ================================================
# File: netsym/utils/helpers.py
# ================================================
import json
import os
import sys
from typing import Any, Dict, List, Optional, Sequence

import sympy

from .. import config
from ..errors import InvalidConfig, InvalidNetwork

_verbose = config.VERBOSE

def set_verbose(flag: bool) -> None:
    global _verbose
    _verbose = bool(flag)

def log(area: str, message: str) -> None:
    """Informational line on stderr, shown only in verbose mode."""
    if _verbose:
        print(f"[Netsym {area}] {message}", file=sys.stderr)

def warn(area: str, message: str) -> None:
    print(f"[Netsym {area}] Warning: {message}", file=sys.stderr)

def resolve_seed(explicit: Optional[int] = None) -> int:
    """
    Resolve the random seed, in priority order:
    1) Explicit value (CLI flag or request payload)
    2) `NETSYM_SEED` environment variable (decimal or 0x-prefixed hex)
    3) config.DEFAULT_SEED
    """
    if explicit is not None:
        return int(explicit)

    env_seed = os.getenv(config.SEED_ENV_VAR, "").strip()
    if env_seed:
        try:
            return int(env_seed, 0)
        except ValueError:
            raise InvalidConfig(f"{config.SEED_ENV_VAR} is not an integer: '{env_seed}'")

    return config.DEFAULT_SEED

# --- Network files ---

def validate_network_dict(data: Any) -> Dict[str, Any]:
    """
    Validates the external (1-indexed) network description
    {"cells": N, "maps": [[...], ...]} and returns it normalized.
    """
    if not isinstance(data, dict):
        raise InvalidNetwork("Network description must be a JSON object.")

    cells = data.get("cells", data.get("num_cells"))
    if isinstance(cells, bool) or not isinstance(cells, int) or cells < 1:
        raise InvalidNetwork("'cells' must be a positive integer.", {"cells": cells})

    maps = data.get("maps")
    if not isinstance(maps, list) or not maps:
        raise InvalidNetwork("'maps' must be a nonempty list of cell maps.")

    normalized: List[List[int]] = []
    for j, image in enumerate(maps, start=1):
        if not isinstance(image, list) or len(image) != cells:
            raise InvalidNetwork(f"Map {j} must list exactly {cells} cell indices.", {"map": image})
        for entry in image:
            if isinstance(entry, bool) or not isinstance(entry, int) or not 1 <= entry <= cells:
                raise InvalidNetwork(f"Map {j} has entry {entry!r} outside 1..{cells}.", {"map": image})
        if image in normalized:
            raise InvalidNetwork(f"Map {j} duplicates an earlier map.", {"map": image})
        normalized.append(list(image))

    return {"cells": cells, "maps": normalized}

def load_network_file(path: str) -> Dict[str, Any]:
    if not os.path.isfile(path):
        raise InvalidNetwork(f"Network file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise InvalidNetwork(f"Network file is not valid JSON: {e}", {"path": path})
    return validate_network_dict(data)

def parse_csv_floats(text: str, expected: Optional[int] = None, what: str = "vector") -> List[float]:
    try:
        values = [float(part) for part in text.replace(";", ",").split(",") if part.strip()]
    except ValueError:
        raise InvalidConfig(f"Could not parse {what} '{text}' as comma-separated numbers.")
    if expected is not None and len(values) != expected:
        raise InvalidConfig(f"{what} has {len(values)} entries, expected {expected}.")
    return values

# --- Formatting ---

def rational_str(value: Any) -> str:
    """Renders an exact number as 'p/q' (or 'p' when integral)."""
    r = sympy.nsimplify(value) if not isinstance(value, sympy.Rational) else value
    if isinstance(r, sympy.Rational):
        return str(r.p) if r.q == 1 else f"{r.p}/{r.q}"
    return str(r)

def matrix_rows(matrix: Any) -> List[List[str]]:
    m = sympy.Matrix(matrix)
    return [[rational_str(m[i, j]) for j in range(m.cols)] for i in range(m.rows)]

def basis_columns(basis: Sequence[Any]) -> List[List[str]]:
    return [[rational_str(v) for v in sympy.Matrix(vec)] for vec in basis]

def one_indexed(images: Sequence[Sequence[int]]) -> List[List[int]]:
    return [[i + 1 for i in image] for image in images]

def dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"

def atomic_write(path: str, text: str) -> None:
    """Writes text to path via a temp file and os.replace."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    temp_path = path + ".tmp"
    try:
        with open(temp_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(temp_path, path)
    except Exception:
        if os.path.exists(temp_path):
            try: os.remove(temp_path)
            except OSError: pass
        raise
