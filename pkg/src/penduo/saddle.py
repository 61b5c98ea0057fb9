"""Penalty-duality (augmented Lagrangian) driver.

The Uzawa loop alternates a penalized primal solve at a fixed multiplier
with the gradient-ascent update lambda <- lambda + r * (constraint
residual).  At convergence the constraint holds exactly, independently of
the moderate penalty weight, which is the whole point of the method: no
1/eps blow-up in the operator.

Iteration counting: the solve at the initial multiplier is the penalty
baseline; `iterations` counts multiplier updates.  `residual_history`
therefore has `iterations + 1` entries, the first being the baseline
residual.

For problems that declare `is_linear = True` the residual is an affine
function of the multiplier.  The driver then probes that map once (one
extra solve per constraint dof) and runs the identical update recurrence
on the probed map, which keeps per-time-step duality loops cheap even
when thousands of updates are needed.  The final state always comes from
a genuine primal solve at the returned multiplier and the reported final
residual is recomputed from it.
"""

from dataclasses import dataclass, field
from typing import Protocol

import numpy as np


class LengthMismatch(Exception):
    pass


class SaddleProblem(Protocol):
    def solve_primal(self, lam: np.ndarray) -> np.ndarray: ...

    def constraint_residual(self, state: np.ndarray) -> np.ndarray: ...


@dataclass
class UzawaResult:
    state: np.ndarray
    multiplier: np.ndarray
    residual_history: list[float]
    iterations: int
    converged: bool
    multiplier_history: list[np.ndarray] = field(default_factory=list)


def multiplier_update(lam: np.ndarray, r: float, residual: np.ndarray) -> np.ndarray:
    """lambda + r * residual, componentwise."""
    lam = np.asarray(lam, dtype=float)
    residual = np.asarray(residual, dtype=float)
    if lam.shape != residual.shape:
        raise LengthMismatch(f"multiplier {lam.shape} vs residual {residual.shape}")
    if r <= 0.0:
        raise ValueError(f"duality step r must be positive, got {r}")
    return lam + r * residual


def uzawa_iterate(
    problem: SaddleProblem,
    r: float,
    lam0: np.ndarray | None = None,
    tol: float = 1e-10,
    max_iter: int = 200,
    record_multipliers: bool = True,
) -> UzawaResult:
    if r <= 0.0:
        raise ValueError(f"duality step r must be positive, got {r}")
    if tol <= 0.0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")

    if lam0 is None:
        lam0 = np.zeros(1)
    lam = np.array(lam0, dtype=float)

    state = problem.solve_primal(lam)
    rho = np.asarray(problem.constraint_residual(state), dtype=float)
    if lam.shape != rho.shape:
        raise LengthMismatch(f"multiplier {lam.shape} vs residual {rho.shape}")

    history = [float(np.max(np.abs(rho)))]
    lam_history = [lam.copy()] if record_multipliers else []
    iterations = 0

    if history[-1] <= tol:
        return UzawaResult(state, lam, history, iterations, True, lam_history)

    if getattr(problem, "is_linear", False):
        state, lam, rho, iterations = _iterate_affine(
            problem, r, lam, rho, tol, max_iter, history, lam_history,
            record_multipliers,
        )
    else:
        while history[-1] > tol and iterations < max_iter:
            lam = multiplier_update(lam, r, rho)
            state = problem.solve_primal(lam)
            rho = np.asarray(problem.constraint_residual(state), dtype=float)
            iterations += 1
            history.append(float(np.max(np.abs(rho))))
            if record_multipliers:
                lam_history.append(lam.copy())

    return UzawaResult(state, lam, history, iterations, history[-1] <= tol,
                       lam_history)


def _iterate_affine(problem, r, lam, rho, tol, max_iter, history, lam_history,
                    record_multipliers):
    """Run the exact Uzawa recurrence on the probed affine residual map."""
    m = len(lam)
    # J[:, j] = d(residual)/d(lambda_j), probed with unit multiplier bumps
    jac = np.empty((m, m))
    for j in range(m):
        bumped = lam.copy()
        bumped[j] += 1.0
        s = problem.solve_primal(bumped)
        jac[:, j] = np.asarray(problem.constraint_residual(s), dtype=float) - rho
    lam_ref = lam.copy()
    rho_ref = rho.copy()

    iterations = 0
    while history[-1] > tol and iterations < max_iter:
        if m == 1:
            # scalar recurrence in plain floats: this loop can run for
            # thousands of updates per call
            la = float(lam[0])
            r0 = float(rho_ref[0]) - float(jac[0, 0]) * float(lam_ref[0])
            g = float(jac[0, 0])
            cur = float(rho[0])
            while abs(cur) > tol and iterations < max_iter:
                la += r * cur
                cur = r0 + g * la
                iterations += 1
                history.append(abs(cur))
                if record_multipliers:
                    lam_history.append(np.array([la]))
            lam = np.array([la])
            rho = np.array([cur])
        elif m == 2:
            la, lb = float(lam[0]), float(lam[1])
            ra, rb = float(rho[0]), float(rho[1])
            j00, j01 = float(jac[0, 0]), float(jac[0, 1])
            j10, j11 = float(jac[1, 0]), float(jac[1, 1])
            c0 = ra - j00 * la - j01 * lb
            c1 = rb - j10 * la - j11 * lb
            cur = max(abs(ra), abs(rb))
            while cur > tol and iterations < max_iter:
                la += r * ra
                lb += r * rb
                ra = c0 + j00 * la + j01 * lb
                rb = c1 + j10 * la + j11 * lb
                cur = max(abs(ra), abs(rb))
                iterations += 1
                history.append(cur)
                if record_multipliers:
                    lam_history.append(np.array([la, lb]))
            lam = np.array([la, lb])
            rho = np.array([ra, rb])
        else:
            while history[-1] > tol and iterations < max_iter:
                lam = lam + r * rho
                rho = rho_ref + jac @ (lam - lam_ref)
                iterations += 1
                history.append(float(np.max(np.abs(rho))))
                if record_multipliers:
                    lam_history.append(lam.copy())

        # certify with a genuine solve; if rounding in the probed map left
        # the true residual above tol, keep iterating from here
        state = problem.solve_primal(lam)
        rho = np.asarray(problem.constraint_residual(state), dtype=float)
        history[-1] = float(np.max(np.abs(rho)))
        if history[-1] <= tol or iterations >= max_iter:
            return state, lam, rho, iterations
        rho_ref = rho - jac @ (lam - lam_ref)  # re-anchor the affine map

    state = problem.solve_primal(lam)
    rho = np.asarray(problem.constraint_residual(state), dtype=float)
    history[-1] = float(np.max(np.abs(rho)))
    return state, lam, rho, iterations


class EllipticInterfaceProblem:
    """Point-constrained elliptic model as a saddle problem.

    Primal solve: stiffness with the augmented weight alpha*r at L/2 and
    the multiplier forcing on the right-hand side (the static analogue of
    the boundary-penalized Stokes solve).  Constraint: u(L/2) = u0.
    """

    is_linear = True

    def __init__(self, mesh, u0: float = 1.0, r: float = 10.0, alpha: float = 1.0):
        from .core import PenaltyConfig
        from .elliptic1d import EllipticProblem, assemble_elliptic

        self.mesh = mesh
        self.u0 = u0
        self.r = r
        self.weight = alpha * r
        base = EllipticProblem(
            mesh, PenaltyConfig(alpha=0.0, beta=0.0, gamma=0.0, eps=1.0), u0
        )
        self._sys, self._rhs0 = assemble_elliptic(base)
        self._mid = base.structure_start

    def solve_primal(self, lam: np.ndarray) -> np.ndarray:
        from .linalg import add_point_penalty, solve_tridiagonal

        sys, rhs = add_point_penalty(
            self._sys, self._rhs0, self._mid - 1, self.weight, self.u0
        )
        rhs[self._mid - 1] -= lam[0]
        x = solve_tridiagonal(sys, rhs)
        return np.concatenate(([0.0], x))

    def constraint_residual(self, state: np.ndarray) -> np.ndarray:
        return np.array([state[self._mid] - self.u0])
