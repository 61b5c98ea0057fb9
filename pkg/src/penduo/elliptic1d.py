"""Static penalty test problem: a clamped 1D bar with a rigid half.

The model is -u'' = 0 on ]0,L[ with u(0) = 0, and the value u0 is
prescribed approximately on the structure half ]L/2,L[ through any
combination of three penalty terms:

  * alpha/eps * (u(L/2) - u0) * v(L/2)      interface (point) penalty,
  * beta/eps  * integral of u' v' over S    stiffness penalty,
  * gamma/eps * integral of (u - u0) v      L2 (mass) penalty, lumped.

Assembled with P1 finite elements on a uniform mesh; the Dirichlet node
is eliminated.  The limit solution for an active constraint is the linear
ramp 2*u0*x/L capped at u0, which P1 elements reproduce exactly at the
nodes, so closed forms below serve as sharp test oracles.
"""

from dataclasses import dataclass

import numpy as np

from .core import Mesh1D, PenaltyConfig
from .linalg import TridiagonalSystem, solve_tridiagonal


class MisalignedStructure(Exception):
    """Raised when L/2 does not coincide with a mesh node."""


@dataclass(frozen=True)
class EllipticProblem:
    mesh: Mesh1D
    penalty: PenaltyConfig
    u0: float = 1.0

    @property
    def structure_start(self) -> int:
        half = self.mesh.n_nodes - 1
        if half % 2 != 0:
            raise MisalignedStructure(
                f"L/2 is not a node: {self.mesh.n_nodes} nodes"
            )
        return half // 2


def assemble_elliptic(p: EllipticProblem) -> tuple[TridiagonalSystem, np.ndarray]:
    """Assemble the reduced system over nodes 1..N-1 (u(0)=0 eliminated).

    Element stiffness coefficient is 1 on the fluid half and 1 + beta/eps
    on the structure half; the gamma mass term uses trapezoid lumping so
    the matrix stays tridiagonal.
    """
    mesh, pen = p.mesh, p.penalty
    mid = p.structure_start
    n_nodes = mesh.n_nodes
    dx = mesh.dx
    n = n_nodes - 1  # unknowns: nodes 1..N-1

    # element e sits between nodes e and e+1
    coef = np.ones(n_nodes - 1)
    coef[mid:] = 1.0 + pen.beta / pen.eps

    diag = np.empty(n)
    diag[:-1] = (coef[:-1] + coef[1:]) / dx
    diag[-1] = coef[-1] / dx
    off = -coef[1:] / dx
    rhs = np.zeros(n)

    if pen.gamma > 0.0:
        w = pen.gamma / pen.eps * dx
        for node in range(mid, n_nodes):
            wi = 0.5 * w if node in (mid, n_nodes - 1) else w
            diag[node - 1] += wi
            rhs[node - 1] += wi * p.u0

    if pen.alpha > 0.0:
        diag[mid - 1] += pen.alpha / pen.eps
        rhs[mid - 1] += pen.alpha / pen.eps * p.u0

    return TridiagonalSystem(off.copy(), diag, off.copy()), rhs


def solve_penalized_elliptic(p: EllipticProblem) -> np.ndarray:
    """Nodal solution of the penalized problem, with u(0)=0 reinserted."""
    sys, rhs = assemble_elliptic(p)
    x = solve_tridiagonal(sys, rhs)
    return np.concatenate(([0.0], x))


def exact_limit_solution(mesh: Mesh1D, u0: float, variant: str) -> np.ndarray:
    """eps -> 0 limit at the nodes.

    "constraint_active": linear ramp to u0 at L/2, then the rigid plateau
    (the alpha and/or gamma penalties both drive the solution here).
    "beta_only": the stiffness penalty alone has the zero minimizer.
    """
    x = mesh.nodes
    if variant == "beta_only":
        return np.zeros_like(x)
    if variant == "constraint_active":
        half = mesh.length / 2.0
        return np.where(x < half, u0 * x / half, u0)
    raise ValueError(f"unknown variant {variant!r}")


def exact_limit_flux(u0: float = 1.0, length: float = 1.0) -> float:
    """One-sided derivative of the limit solution at L/2 from the fluid side."""
    return 2.0 * u0 / length


def limit_point_multiplier(u0: float = 1.0, length: float = 1.0) -> float:
    """Converged Lagrange multiplier of the point constraint u(L/2) = u0.

    Equals minus the fluid-side flux: the multiplier balances the jump in
    u' across the interface (u' is 0 on the plateau side).
    """
    return -exact_limit_flux(u0, length)


def alpha_only_interface_value(u0: float, length: float, alpha: float, eps: float) -> float:
    """Closed form of u(L/2) for the pure point penalty.

    Minimizing 0.5*s^2*(L/2) + 0.5*(alpha/eps)*(s*L/2 - u0)^2 over the
    ramp slope s gives u(L/2) = u0 / (1 + 2*eps/(alpha*L)).  The solution
    is piecewise linear, so P1 elements hit this value exactly.
    """
    return u0 / (1.0 + 2.0 * eps / (alpha * length))
