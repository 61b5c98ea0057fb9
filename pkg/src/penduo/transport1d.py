"""Time-dependent 1D transport with an immersed rigid-value structure.

Two models share one IMEX scheme: linear advection-diffusion (first-order
upwind transport, implicit 3-point diffusion) and Burgers (Godunov flux
for u^2/2, implicit diffusion).  The structure occupies a fixed interval
[x_a, x_b] whose prescribed value d(x, t) is imposed through

  * an implicit L2 penalty gamma/eps at the nodes strictly inside,
  * an implicit penalty r at the two interface nodes i_a, i_b,
  * optionally a per-step Uzawa duality loop on two interface
    multipliers, which makes the interface values exact.

The implicit operator is constant over a run (the transport term is
explicit), so it is assembled and factored once; the periodic wrap or the
penalized boundary tie is a rank-one correction handled with
Sherman-Morrison on top of a banded solve.

States are stored on the full node set 0..N of a mesh with N space steps;
in exact-periodic mode the last node mirrors the first.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .core import Mesh1D, PenaltyConfig
from .saddle import UzawaResult, uzawa_iterate


class CflViolation(Exception):
    pass


@dataclass(frozen=True)
class StructureRegion:
    """Immersed interval [x_a, x_b], snapped to mesh nodes."""

    x_a: float
    x_b: float
    i_a: int
    i_b: int

    @classmethod
    def from_bounds(cls, mesh: Mesh1D, x_a: float, x_b: float) -> "StructureRegion":
        dx = mesh.dx
        i_a = int(round(x_a / dx))
        i_b = int(round(x_b / dx))
        if not 0 < i_a < i_b < mesh.n_nodes - 1:
            raise ValueError(
                f"structure [{x_a}, {x_b}] must lie strictly inside ]0, {mesh.length}["
            )
        return cls(i_a * dx, i_b * dx, i_a, i_b)


@dataclass(frozen=True)
class RigidMotion:
    """Prescribed structure value d(x, t) = sin(2 pi t) * u_sx(x)."""

    x_a: float
    x_b: float
    length: float

    @classmethod
    def for_structure(cls, structure: StructureRegion, length: float) -> "RigidMotion":
        return cls(structure.x_a, structure.x_b, length)

    def time_profile(self, t: float) -> float:
        return np.sin(2.0 * np.pi * t)

    def space_profile(self, x):
        return 0.4 + 2.0 * (2.0 * np.asarray(x, dtype=float) - self.x_a - self.x_b) / self.length

    def value(self, x, t: float):
        return self.time_profile(t) * self.space_profile(x)


@dataclass(frozen=True)
class TransportParams:
    nu: float = 0.001
    c: float = 1.0
    dt: float = 2e-3
    n_steps: int = 1000
    bc_mode: str = "exact_periodic"
    scheme: str = "penalty_only"
    interior_gamma_on: bool = False
    warm_start: bool = False
    cfl_limit: float = 1.0

    def __post_init__(self):
        if self.nu < 0.0:
            raise ValueError(f"nu must be nonnegative, got {self.nu}")
        if self.dt <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.n_steps < 0:
            raise ValueError(f"n_steps must be nonnegative, got {self.n_steps}")
        if self.bc_mode not in ("exact_periodic", "penalized_periodic"):
            raise ValueError(f"unknown bc_mode {self.bc_mode!r}")
        if self.scheme not in ("penalty_only", "duality"):
            raise ValueError(f"unknown scheme {self.scheme!r}")


@dataclass
class Trajectory:
    mesh: Mesh1D
    snapshots: list = field(default_factory=list)          # (t, state)
    multiplier_series: list = field(default_factory=list)  # (t, lam, iterations)
    flux_series: list = field(default_factory=list)        # (t, flux_a, flux_b)
    residual_series: list = field(default_factory=list)    # (t, sup residual)
    failed_steps: list = field(default_factory=list)

    @property
    def final_state(self) -> np.ndarray:
        return self.snapshots[-1][1]


def godunov_flux(uL: float, uR: float) -> float:
    """Exact Riemann flux for f(u) = u^2/2.

    The convex-flux shortcut max(f(max(uL,0)), f(min(uR,0))) covers both
    the shock and the (possibly sonic) rarefaction cases.
    """
    a = max(uL, 0.0)
    b = min(uR, 0.0)
    return max(0.5 * a * a, 0.5 * b * b)


def _godunov_flux_array(uL: np.ndarray, uR: np.ndarray) -> np.ndarray:
    a = np.maximum(uL, 0.0)
    b = np.minimum(uR, 0.0)
    return 0.5 * np.maximum(a * a, b * b)


def initial_condition(x, structure: StructureRegion, length: float):
    """Triangular ramps outside the structure, zero in between."""
    x = np.asarray(x, dtype=float)
    left_edge = structure.x_a - length / 5.0
    right_edge = structure.x_b + length / 5.0
    u = np.zeros_like(x)
    left = x <= left_edge
    u[left] = 4.4 * (structure.x_a - x[left] - length / 5.0)
    right = x >= right_edge
    u[right] = 4.4 * (x[right] - structure.x_b - length / 5.0)
    return u


class _StepOperator:
    """One run's implicit operator plus the explicit transport term."""

    def __init__(self, kind, mesh, params, structure, motion, penalty):
        if kind not in ("advdiff", "burgers"):
            raise ValueError(f"unknown kind {kind!r}")
        self.kind = kind
        self.mesh = mesh
        self.params = params
        self.structure = structure
        self.motion = motion
        self.penalty = penalty
        self.dx = mesh.dx
        self.dt = params.dt
        self.n_cells = mesh.n_nodes - 1
        self.wrap = params.bc_mode == "exact_periodic"
        self.n = self.n_cells if self.wrap else mesh.n_nodes

        if kind == "advdiff":
            cfl = abs(params.c) * self.dt / self.dx
            if cfl > params.cfl_limit + 1e-12:
                raise CflViolation(
                    f"advection CFL {cfl:.4g} exceeds limit {params.cfl_limit}"
                )

        pen = penalty if penalty is not None else PenaltyConfig()
        nu_w = params.nu * self.dt / self.dx**2
        diag = np.full(self.n, 1.0 + 2.0 * nu_w)
        sub = np.full(self.n - 1, -nu_w)
        sup = np.full(self.n - 1, -nu_w)

        if self.wrap:
            corner = -nu_w
        else:
            # boundary tie rows: time relaxation plus the periodicity penalty
            tie = self.dt / pen.eps
            diag[0] = 1.0 + tie
            diag[-1] = 1.0 + tie
            sup[0] = 0.0
            sub[-1] = 0.0
            corner = -tie
        self.corner = corner

        self.interior = np.empty(0, dtype=int)
        self.interface = np.empty(0, dtype=int)
        if structure is not None:
            self.interior = np.arange(structure.i_a + 1, structure.i_b)
            self.interface = np.array([structure.i_a, structure.i_b])
            if params.interior_gamma_on and pen.gamma > 0.0:
                diag[self.interior] += self.dt * pen.gamma / pen.eps
            diag[self.interface] += self.dt * pen.r

        self._factor(diag, sub, sup)

    def _factor(self, diag, sub, sup):
        n = self.n
        gamma = -diag[0]
        d = diag.copy()
        d[0] -= gamma
        d[-1] -= self.corner * self.corner / gamma
        ab = np.zeros((3, n))
        ab[0, 1:] = sup
        ab[1, :] = d
        ab[2, :-1] = sub
        self._ab = ab
        u = np.zeros(n)
        u[0] = gamma
        u[-1] = self.corner
        self._v = np.zeros(n)
        self._v[0] = 1.0
        self._v[-1] = self.corner / gamma
        self._z = sla.solve_banded((1, 1), ab, u, check_finite=False)
        self._denom = 1.0 + self._v @ self._z

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        y = sla.solve_banded((1, 1), self._ab, rhs, check_finite=False)
        return y - (self._v @ y) / self._denom * self._z

    # -- state layout -------------------------------------------------
    def to_internal(self, state: np.ndarray) -> np.ndarray:
        return state[:-1].copy() if self.wrap else state.copy()

    def to_state(self, u: np.ndarray) -> np.ndarray:
        return np.concatenate((u, [u[0]])) if self.wrap else u.copy()

    # -- explicit transport -------------------------------------------
    def advection(self, u: np.ndarray) -> np.ndarray:
        p = self.params
        if self.kind == "advdiff":
            if p.c == 0.0:
                return np.zeros_like(u)
            if self.wrap:
                if p.c > 0.0:
                    return p.c * (u - np.roll(u, 1)) / self.dx
                return p.c * (np.roll(u, -1) - u) / self.dx
            adv = np.zeros_like(u)
            if p.c > 0.0:
                adv[1:] = p.c * (u[1:] - u[:-1]) / self.dx
            else:
                adv[:-1] = p.c * (u[1:] - u[:-1]) / self.dx
            return adv
        cfl = np.max(np.abs(u)) * self.dt / self.dx
        if cfl > p.cfl_limit + 1e-12:
            raise CflViolation(
                f"Burgers CFL {cfl:.4g} exceeds limit {p.cfl_limit}"
            )
        if self.wrap:
            flux = _godunov_flux_array(u, np.roll(u, -1))
            return (flux - np.roll(flux, 1)) / self.dx
        flux = _godunov_flux_array(u[:-1], u[1:])
        adv = np.zeros_like(u)
        adv[1:-1] = (flux[1:] - flux[:-1]) / self.dx
        return adv

    def base_rhs(self, u: np.ndarray, t_next: float) -> np.ndarray:
        """Right-hand side with zero multipliers."""
        rhs = u - self.dt * self.advection(u)
        if self.structure is not None:
            pen = self.penalty
            x = self.mesh.nodes
            if self.params.interior_gamma_on and pen.gamma > 0.0:
                d_in = self.motion.value(x[self.interior], t_next)
                rhs[self.interior] += self.dt * pen.gamma / pen.eps * d_in
            d_if = self.motion.value(x[self.interface], t_next)
            rhs[self.interface] += self.dt * pen.r * d_if
        return rhs

    def step(self, state: np.ndarray, lam: np.ndarray, t_next: float) -> np.ndarray:
        u = self.to_internal(state)
        rhs = self.base_rhs(u, t_next)
        if self.structure is not None and lam is not None:
            rhs[self.interface] -= self.dt * np.asarray(lam, dtype=float)
        return self.to_state(self.solve(rhs))


class _StepSaddle:
    """One time step of the transport scheme as a saddle problem."""

    is_linear = True

    def __init__(self, op: _StepOperator, u_internal: np.ndarray, t_next: float):
        self.op = op
        self.t_next = t_next
        self.base = op.base_rhs(u_internal, t_next)
        x = op.mesh.nodes
        self.targets = np.asarray(op.motion.value(x[op.interface], t_next), dtype=float)

    def solve_primal(self, lam: np.ndarray) -> np.ndarray:
        rhs = self.base.copy()
        rhs[self.op.interface] -= self.op.dt * np.asarray(lam, dtype=float)
        return self.op.to_state(self.op.solve(rhs))

    def constraint_residual(self, state: np.ndarray) -> np.ndarray:
        return state[self.op.interface] - self.targets


def step_linear(state, mesh, params, structure, motion, penalty, lam, t_next):
    """Single advection-diffusion step (assembles the operator afresh)."""
    op = _StepOperator("advdiff", mesh, params, structure, motion, penalty)
    return op.step(np.asarray(state, dtype=float), lam, t_next)


def step_burgers(state, mesh, params, structure, motion, penalty, lam, t_next):
    """Single Burgers step with Godunov transport."""
    op = _StepOperator("burgers", mesh, params, structure, motion, penalty)
    return op.step(np.asarray(state, dtype=float), lam, t_next)


def run_transient(
    kind: str,
    mesh: Mesh1D,
    params: TransportParams,
    structure: StructureRegion | None,
    motion: RigidMotion | None,
    penalty: PenaltyConfig | None,
    u_init: np.ndarray,
    uzawa_tol: float = 1e-10,
    uzawa_max_iter: int = 50000,
    snapshot_stride: int = 1,
) -> Trajectory:
    """March n_steps of the chosen scheme and record the history.

    In duality mode every step runs the Uzawa loop on the two interface
    multipliers (reset to zero unless warm_start); in penalty_only mode
    each step is a single solve.  A step whose duality loop fails to
    converge is recorded in failed_steps and the run continues.
    """
    from .diagnostics import interface_flux

    if params.scheme == "duality" and structure is None:
        raise ValueError("duality scheme needs a structure region")
    if structure is not None and motion is None:
        raise ValueError("a structure region needs a rigid motion")
    if snapshot_stride < 1:
        raise ValueError("snapshot_stride must be >= 1")

    op = _StepOperator(kind, mesh, params, structure, motion, penalty)
    state = np.asarray(u_init, dtype=float).copy()
    if len(state) != mesh.n_nodes:
        raise ValueError(
            f"initial state has {len(state)} entries, mesh has {mesh.n_nodes} nodes"
        )
    if op.wrap:
        state[-1] = state[0]

    traj = Trajectory(mesh)
    traj.snapshots.append((0.0, state.copy()))
    lam = np.zeros(2)

    for k in range(params.n_steps):
        t_next = (k + 1) * params.dt
        if params.scheme == "duality":
            lam0 = lam if params.warm_start else np.zeros(2)
            prob = _StepSaddle(op, op.to_internal(state), t_next)
            res: UzawaResult = uzawa_iterate(
                prob,
                r=penalty.r,
                lam0=lam0,
                tol=uzawa_tol,
                max_iter=uzawa_max_iter,
                record_multipliers=False,
            )
            state = res.state
            lam = res.multiplier
            if not res.converged:
                traj.failed_steps.append(k + 1)
            traj.multiplier_series.append((t_next, lam.copy(), res.iterations))
            traj.residual_series.append((t_next, res.residual_history[-1]))
        else:
            state = op.step(state, None, t_next)
            if structure is not None:
                traj.multiplier_series.append((t_next, np.zeros(2), 0))

        if structure is not None:
            fa = interface_flux(state, mesh, structure.i_a, "left", params.nu)
            fb = interface_flux(state, mesh, structure.i_b, "right", params.nu)
            traj.flux_series.append((t_next, fa, fb))

        if (k + 1) % snapshot_stride == 0 or k + 1 == params.n_steps:
            traj.snapshots.append((t_next, state.copy()))

    return traj
