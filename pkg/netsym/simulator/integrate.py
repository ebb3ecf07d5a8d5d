# ================================================
# File: netsym/simulator/integrate.py
# ================================================
import csv
import io
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Sequence

import numpy as np

from ..config import BLOWUP_THRESHOLD
from ..errors import InvalidConfig, NonFinite
from ..utils.helpers import log
from .field import NetworkVectorField


class RK4:
    """Classical fourth-order Runge-Kutta step for autonomous y' = F(y)."""

    order = 4

    def integrate(self, y: np.ndarray, h: float, F: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        k1 = F(y)
        k2 = F(y + 0.5 * h * k1)
        k3 = F(y + 0.5 * h * k2)
        k4 = F(y + h * k3)
        return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    method: Dict[str, Any] = field(default_factory=dict)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def to_csv(self, var: str = "x") -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["t"] + [f"{var}{k + 1}" for k in range(self.states.shape[1])])
        for t, x in zip(self.times, self.states):
            writer.writerow([repr(float(t))] + [repr(float(v)) for v in x])
        return buffer.getvalue()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "steps": len(self.times) - 1,
            "t_end": float(self.times[-1]),
            "final_state": [float(v) for v in self.final],
        }


def integrate(vector_field: NetworkVectorField, x0: Sequence[float], lam: float,
              t_end: float, dt: float, blowup: float = BLOWUP_THRESHOLD) -> Trajectory:
    """Fixed-step RK4 from t = 0 to t_end; the last step is shortened to land on t_end."""
    if dt <= 0:
        raise InvalidConfig(f"Time step must be positive, got {dt}.")
    if t_end < 0:
        raise InvalidConfig(f"End time must be nonnegative, got {t_end}.")
    x = np.asarray(x0, dtype=float)
    if x.shape != (vector_field.dim,):
        raise InvalidConfig(f"Initial state has {x.size} entries, expected {vector_field.dim}.")

    n_steps = int(np.ceil(t_end / dt - 1e-9)) if t_end > 0 else 0
    times = np.empty(n_steps + 1)
    states = np.empty((n_steps + 1, vector_field.dim))
    times[0], states[0] = 0.0, x

    stepper = RK4()
    F = lambda y: vector_field(y, lam)
    t = 0.0
    for step in range(1, n_steps + 1):
        h = min(dt, t_end - t) if step == n_steps else dt
        x = stepper.integrate(x, h, F)
        t = t_end if step == n_steps else step * dt
        norm = float(np.linalg.norm(x))
        if not np.isfinite(norm) or norm > blowup:
            raise NonFinite(f"State blew up at t={t:.6g} (norm {norm:.3g} above {blowup:g}).",
                            {"t": t, "norm": norm, "threshold": blowup})
        times[step], states[step] = t, x

    log("Simulate", f"RK4: {n_steps} steps of {dt:g} on {vector_field.dim} coordinates.")
    return Trajectory(times, states, {"method": "rk4", "order": RK4.order, "step": dt, "lambda": lam})
