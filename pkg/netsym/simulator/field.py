# ================================================
# File: netsym/simulator/field.py
# ================================================
from typing import Tuple

import numpy as np

from ..config import FD_STEP
from ..dsl.expression import ResponseFunction
from ..errors import InvalidConfig
from ..network.fundamental import FundamentalNetwork
from ..network.monoid import NetworkSpec


class NetworkVectorField:
    """
    gamma_f(x)_i = f(x_{sigma_1(i)}, ..., x_{sigma_n(i)}) on V^N, V = R^d.

    Works for an original network and for a fundamental network alike: the
    latter is just the network whose maps are the left-multiplication maps.
    """

    def __init__(self, spec: NetworkSpec, rf: ResponseFunction):
        if rf.arity != spec.size:
            raise InvalidConfig(f"Response function has arity {rf.arity}, but the network has {spec.size} inputs per cell.",
                                {"arity": rf.arity, "inputs": spec.size})
        self.spec = spec
        self.rf = rf
        self.d = rf.dim
        self.num_cells = spec.num_cells
        self.dim = spec.num_cells * rf.dim
        d = rf.dim
        # gather[i] lists the state coordinates feeding cell i, in rf input order
        self.gather = np.array([
            [m(i) * d + c for m in spec.maps for c in range(d)]
            for i in range(spec.num_cells)
        ], dtype=int)

    @classmethod
    def fundamental(cls, fund: FundamentalNetwork, rf: ResponseFunction) -> "NetworkVectorField":
        return cls(fund.as_spec(), rf)

    def __call__(self, x: np.ndarray, lam: float = 0.0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.rf.evaluate_batch(x[self.gather], lam).reshape(self.dim)

    def jacobian(self, x: np.ndarray, lam: float = 0.0) -> Tuple[np.ndarray, np.ndarray]:
        """(D_x gamma, d gamma / d lambda) from the exact partials of f."""
        x = np.asarray(x, dtype=float)
        d = self.d
        J = np.zeros((self.dim, self.dim))
        dlam = np.zeros(self.dim)
        for i in range(self.num_cells):
            Jf, df = self.rf.jacobian(x[self.gather[i]], lam)
            rows = slice(i * d, (i + 1) * d)
            # a coordinate may feed several inputs
            for col, target in enumerate(self.gather[i]):
                J[rows, target] += Jf[:, col]
            dlam[rows] = df
        return J, dlam

    def jacobian_fd(self, x: np.ndarray, lam: float = 0.0, h: float = FD_STEP) -> np.ndarray:
        """Central-difference Jacobian, used to cross-check `jacobian`."""
        x = np.asarray(x, dtype=float)
        J = np.zeros((self.dim, self.dim))
        for k in range(self.dim):
            e = np.zeros(self.dim)
            e[k] = h
            J[:, k] = (self(x + e, lam) - self(x - e, lam)) / (2 * h)
        return J

    def residual(self, x: np.ndarray, lam: float = 0.0) -> float:
        return float(np.linalg.norm(self(x, lam)))
