"""Tridiagonal systems, the Thomas algorithm and penalty augmentation.

Every implicit solve in this package reduces to a tridiagonal (or
rank-one-corrected tridiagonal) system; the assembled operators are
diagonally dominant, so the elimination runs without pivoting.  A
zero-pivot guard turns breakdown into an explicit error instead of NaNs.
"""

from dataclasses import dataclass

import numpy as np

PIVOT_FLOOR = 1e-300


class ZeroPivot(Exception):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"zero pivot at row {index}")


class IndexOutOfRange(Exception):
    pass


@dataclass(frozen=True)
class TridiagonalSystem:
    """Tridiagonal matrix stored as three diagonals (sub, diag, sup)."""

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray

    def __post_init__(self):
        n = len(self.diag)
        if len(self.sub) != n - 1 or len(self.sup) != n - 1:
            raise ValueError(
                f"off-diagonals must have length {n - 1}, "
                f"got sub={len(self.sub)}, sup={len(self.sup)}"
            )

    @property
    def n(self) -> int:
        return len(self.diag)

    def to_dense(self) -> np.ndarray:
        a = np.diag(self.diag)
        a += np.diag(self.sub, -1)
        a += np.diag(self.sup, 1)
        return a

    def matvec(self, x: np.ndarray) -> np.ndarray:
        y = self.diag * x
        y[1:] += self.sub * x[:-1]
        y[:-1] += self.sup * x[1:]
        return y


def make_system(sub, diag, sup) -> TridiagonalSystem:
    return TridiagonalSystem(
        np.asarray(sub, dtype=float),
        np.asarray(diag, dtype=float),
        np.asarray(sup, dtype=float),
    )


def solve_tridiagonal(sys: TridiagonalSystem, rhs: np.ndarray) -> np.ndarray:
    """Solve sys * x = rhs by forward elimination / back substitution."""
    n = sys.n
    rhs = np.asarray(rhs, dtype=float)
    if len(rhs) != n:
        raise ValueError(f"rhs has length {len(rhs)}, expected {n}")
    d = sys.diag.copy()
    b = rhs.copy()
    sub, sup = sys.sub, sys.sup
    if abs(d[0]) < PIVOT_FLOOR:
        raise ZeroPivot(0)
    for i in range(1, n):
        w = sub[i - 1] / d[i - 1]
        d[i] -= w * sup[i - 1]
        b[i] -= w * b[i - 1]
        if abs(d[i]) < PIVOT_FLOOR:
            raise ZeroPivot(i)
    x = np.empty(n)
    x[-1] = b[-1] / d[-1]
    for i in range(n - 2, -1, -1):
        x[i] = (b[i] - sup[i] * x[i + 1]) / d[i]
    return x


def add_point_penalty(
    sys: TridiagonalSystem,
    rhs: np.ndarray,
    node: int,
    weight: float,
    target: float,
) -> tuple[TridiagonalSystem, np.ndarray]:
    """Return a copy of (sys, rhs) with weight*(u(node) - target) penalized.

    Adds `weight` to diag[node] and `weight*target` to rhs[node]; nothing
    else changes, so penalties at distinct nodes commute exactly.
    """
    if not 0 <= node < sys.n:
        raise IndexOutOfRange(f"node {node} outside [0, {sys.n})")
    if weight < 0.0:
        raise ValueError(f"penalty weight must be nonnegative, got {weight}")
    diag = sys.diag.copy()
    diag[node] += weight
    out_rhs = np.asarray(rhs, dtype=float).copy()
    out_rhs[node] += weight * target
    return TridiagonalSystem(sys.sub.copy(), diag, sys.sup.copy()), out_rhs


def solve_rank_one_corrected(
    sys: TridiagonalSystem,
    u: np.ndarray,
    v: np.ndarray,
    rhs: np.ndarray,
) -> np.ndarray:
    """Solve (T + u v^T) x = rhs via the Sherman-Morrison identity."""
    y = solve_tridiagonal(sys, rhs)
    z = solve_tridiagonal(sys, u)
    denom = 1.0 + v @ z
    if abs(denom) < PIVOT_FLOOR:
        raise ZeroPivot(-1)
    return y - (v @ y) / denom * z


def solve_cyclic_tridiagonal(
    sys: TridiagonalSystem,
    corner_top: float,
    corner_bottom: float,
    rhs: np.ndarray,
) -> np.ndarray:
    """Solve the tridiagonal system with extra corner entries.

    corner_top is A[0, n-1], corner_bottom is A[n-1, 0] (periodic wrap).
    The corners form a rank-one perturbation of a plain tridiagonal
    matrix, handled by Sherman-Morrison.
    """
    n = sys.n
    if n < 3:
        raise ValueError("cyclic solve needs n >= 3")
    if corner_top == 0.0 and corner_bottom == 0.0:
        return solve_tridiagonal(sys, rhs)
    gamma = -sys.diag[0]
    if abs(gamma) < PIVOT_FLOOR:
        gamma = 1.0
    diag = sys.diag.copy()
    diag[0] -= gamma
    diag[-1] -= corner_top * corner_bottom / gamma
    core = TridiagonalSystem(sys.sub, diag, sys.sup)
    u = np.zeros(n)
    u[0] = gamma
    u[-1] = corner_bottom
    v = np.zeros(n)
    v[0] = 1.0
    v[-1] = corner_top / gamma
    return solve_rank_one_corrected(core, u, v, rhs)
