"""Shared grid geometry and penalty-parameter containers."""

from dataclasses import dataclass

import numpy as np


class MeshMismatch(Exception):
    """Two states that should live on the same mesh do not."""


@dataclass(frozen=True)
class Mesh1D:
    """Uniform grid on [0, length] with nodes x_i = i*dx."""

    length: float
    n_nodes: int

    def __post_init__(self):
        if self.length <= 0.0:
            raise ValueError(f"mesh length must be positive, got {self.length}")
        if self.n_nodes < 3:
            raise ValueError(f"need at least 3 nodes, got {self.n_nodes}")

    @property
    def dx(self) -> float:
        return self.length / (self.n_nodes - 1)

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.length, self.n_nodes)

    @property
    def midpoint_index(self) -> int:
        """Index of the node at length/2, if it exists."""
        half = self.n_nodes - 1
        if half % 2 != 0:
            raise ValueError("length/2 is not a node on this mesh")
        return half // 2


@dataclass(frozen=True)
class PenaltyConfig:
    """The four penalty scalars plus the duality gradient step.

    alpha weights the interface (point) penalty, beta the extra stiffness
    inside the structure, gamma the L2 penalty inside the structure; eps is
    the penalty parameter and r the Uzawa multiplier step.
    """

    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    eps: float = 1e-3
    r: float = 10.0

    def __post_init__(self):
        if self.eps <= 0.0:
            raise ValueError(f"eps must be strictly positive, got {self.eps}")
        if self.r <= 0.0:
            raise ValueError(f"r must be strictly positive, got {self.r}")
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if v < 0.0:
                raise ValueError(f"{name} must be nonnegative, got {v}")
