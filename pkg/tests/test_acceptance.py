"""Acceptance gate: the nine headline behaviors at their stated tolerances.

Each test is one criterion; the terminal summary prints a pass/fail line
per criterion (see conftest.py).  The transient criteria share
module-scoped runs of the reference scenario (nu=0.001, c=1, r=10,
500 space steps, 1000 time steps, T=2) so the suite stays fast.
"""

import time

import numpy as np
import pytest

from penduo.core import Mesh1D, PenaltyConfig
from penduo.diagnostics import (
    DEFAULT_EPS_SWEEP,
    elliptic_error_table,
    error_norms,
    rate_slopes,
)
from penduo.elliptic1d import (
    EllipticProblem,
    alpha_only_interface_value,
    exact_limit_solution,
    solve_penalized_elliptic,
)
from penduo.saddle import EllipticInterfaceProblem, uzawa_iterate
from penduo.transport1d import (
    RigidMotion,
    StructureRegion,
    TransportParams,
    initial_condition,
    run_transient,
)

MESH = Mesh1D(1.0, 1001)


# ---------------------------------------------------------------------------
# 1. closed-form elliptic oracle, 1e-9, < 1 s

def test_criterion_1_elliptic_closed_form():
    started = time.perf_counter()
    for eps in (1e-1, 1e-2, 1e-3, 1e-4):
        pen = PenaltyConfig(alpha=1.0, eps=eps)
        u = solve_penalized_elliptic(EllipticProblem(MESH, pen, 1.0))
        expected = alpha_only_interface_value(1.0, 1.0, 1.0, eps)
        assert abs(u[MESH.midpoint_index] - expected) <= 1e-9
    assert time.perf_counter() - started < 1.0


# ---------------------------------------------------------------------------
# 2. fitted eps-rates in their windows, < 10 s

def test_criterion_2_rate_suite():
    started = time.perf_counter()
    alpha = rate_slopes(elliptic_error_table(
        PenaltyConfig(alpha=1.0, eps=1.0), DEFAULT_EPS_SWEEP, MESH))
    alpha_beta = rate_slopes(elliptic_error_table(
        PenaltyConfig(alpha=1.0, beta=1.0, eps=1.0), DEFAULT_EPS_SWEEP, MESH))
    gamma = rate_slopes(elliptic_error_table(
        PenaltyConfig(gamma=1.0, eps=1.0), DEFAULT_EPS_SWEEP, MESH))
    assert 0.95 <= alpha["err_interface"] <= 1.05
    assert alpha_beta["err_h1_fluid"] >= 0.95
    assert gamma["err_l2_S"] >= 0.50
    assert 0.4 <= gamma["err_flux"] <= 0.6
    assert time.perf_counter() - started < 10.0


# ---------------------------------------------------------------------------
# 3. stiffness penalty alone cannot prescribe the value

def test_criterion_3_beta_only_pathology():
    pen = PenaltyConfig(beta=1.0, eps=1e-4)
    u = solve_penalized_elliptic(EllipticProblem(MESH, pen, 1.0))
    structure = u[MESH.midpoint_index:]
    assert np.max(structure) - np.min(structure) <= 1e-10
    assert np.min(np.abs(structure - 1.0)) >= 0.99


# ---------------------------------------------------------------------------
# 4-6. penalty-duality on the elliptic model

@pytest.fixture(scope="module")
def uzawa_runs():
    runs = {}
    for r in (1.0, 10.0, 100.0):
        prob = EllipticInterfaceProblem(MESH, u0=1.0, r=r)
        runs[r] = uzawa_iterate(prob, r=r, lam0=np.zeros(1), tol=1e-11,
                                max_iter=500)
    return runs


def test_criterion_4_uzawa_exactness_and_speed(uzawa_runs):
    res = uzawa_runs[10.0]
    assert res.converged
    # residual after 10 multiplier updates (contraction factor 1/6)
    assert res.residual_history[10] <= 1e-8
    assert abs(res.multiplier[0] - (-2.0)) <= 1e-8
    limit = exact_limit_solution(MESH, 1.0, "constraint_active")
    assert np.max(np.abs(res.state - limit)) <= 1e-10


def test_criterion_5_r_invariance(uzawa_runs):
    states = [uzawa_runs[r].state for r in (1.0, 10.0, 100.0)]
    for i in range(len(states)):
        for j in range(i + 1, len(states)):
            assert np.max(np.abs(states[i] - states[j])) <= 1e-8


def test_criterion_6_multiplier_monotonicity(uzawa_runs):
    for res in uzawa_runs.values():
        errs = [np.linalg.norm(lam - np.array([-2.0]))
                for lam in res.multiplier_history]
        assert all(a >= b - 1e-12 for a, b in zip(errs, errs[1:]))


# ---------------------------------------------------------------------------
# 7-8. transient reference scenario

def reference_scenario(kind):
    n_cells = 500
    mesh = Mesh1D(1.0, n_cells + 1)
    structure = StructureRegion.from_bounds(mesh, 0.45, 0.55)
    motion = RigidMotion.for_structure(structure, 1.0)
    u_init = initial_condition(mesh.nodes, structure, 1.0)
    cfl_limit = 1.2 if kind == "burgers" else 1.0

    def run(scheme, eps, r):
        params = TransportParams(
            nu=0.001, c=1.0, dt=2e-3, n_steps=1000, scheme=scheme,
            interior_gamma_on=True, cfl_limit=cfl_limit,
        )
        penalty = PenaltyConfig(gamma=1.0, eps=eps, r=r)
        return run_transient(kind, mesh, params, structure, motion, penalty,
                             u_init, uzawa_tol=1e-10, snapshot_stride=1000)

    return mesh, run


@pytest.fixture(scope="module")
def advdiff_runs():
    mesh, run = reference_scenario("advdiff")
    started = time.perf_counter()
    duality = run("duality", 1e-3, 10.0)
    elapsed = time.perf_counter() - started
    penalty = run("penalty_only", 1e-3, 10.0)
    reference = run("penalty_only", 1e-8, 1e8)
    return mesh, duality, penalty, reference, elapsed


@pytest.fixture(scope="module")
def burgers_runs():
    mesh, run = reference_scenario("burgers")
    duality = run("duality", 1e-3, 10.0)
    penalty = run("penalty_only", 1e-3, 10.0)
    reference = run("penalty_only", 1e-8, 1e8)
    return mesh, duality, penalty, reference


def l2_gap(mesh, a, b):
    return error_norms(a, b, mesh, "whole")[0]


def test_criterion_7_advection_diffusion_reference_run(advdiff_runs):
    mesh, duality, penalty, reference, elapsed = advdiff_runs
    assert elapsed < 30.0
    assert not duality.failed_steps
    assert max(rho for _, rho in duality.residual_series) <= 1e-10
    ref = reference.final_state
    assert l2_gap(mesh, duality.final_state, ref) <= l2_gap(
        mesh, penalty.final_state, ref
    )


def test_criterion_8_burgers_reference_run(burgers_runs):
    mesh, duality, penalty, reference = burgers_runs
    assert not duality.failed_steps
    assert max(rho for _, rho in duality.residual_series) <= 1e-10
    ref = reference.final_state
    assert l2_gap(mesh, duality.final_state, ref) <= l2_gap(
        mesh, penalty.final_state, ref
    )


def test_criterion_8_burgers_conservation_and_shock_speed():
    # structure-free periodic run: discrete mass exact to rounding per step
    mesh = Mesh1D(1.0, 501)
    params = TransportParams(nu=0.001, c=0.0, dt=1e-3, n_steps=200,
                             cfl_limit=1.2)
    u0 = 0.5 + 0.4 * np.sin(2.0 * np.pi * mesh.nodes)
    u0[-1] = u0[0]
    traj = run_transient("burgers", mesh, params, None, None, None, u0,
                         snapshot_stride=1)
    masses = [np.sum(u[:-1]) * mesh.dx for _, u in traj.snapshots]
    steps = np.abs(np.diff(masses))
    assert np.max(steps) <= 1e-12

    # Riemann problem uL=1, uR=0, nu=0: shock speed 1/2, front at x=1.5
    # after T=1.  The domain [0, 4] keeps the periodic images away.
    mesh = Mesh1D(4.0, 2001)
    params = TransportParams(nu=0.0, c=0.0, dt=1e-3, n_steps=1000,
                             cfl_limit=1.2)
    u0 = np.where(mesh.nodes < 1.0, 1.0, 0.0)
    traj = run_transient("burgers", mesh, params, None, None, None, u0,
                         snapshot_stride=1000)
    u = traj.final_state
    x = mesh.nodes
    window = (x > 1.0) & (x < 2.5)
    front = x[window][np.argmax(u[window] < 0.5)]
    assert abs(front - 1.5) <= 2.0 * mesh.dx


# ---------------------------------------------------------------------------
# 9. bitwise-deterministic CSV output

def test_criterion_9_preset_determinism(tmp_path, monkeypatch):
    from penduo.cli import main

    monkeypatch.chdir(tmp_path)
    for preset, case in (("fig4", "uzawa-demo"), ("fig1", "elliptic")):
        dirs = []
        for tag in ("a", "b"):
            out = tmp_path / f"{preset}_{tag}"
            assert main([case, "--preset", preset, "--no-plots",
                         "--out", str(out)]) == 0
            dirs.append(out)
        csvs = sorted(p.name for p in dirs[0].iterdir() if p.suffix == ".csv")
        assert csvs
        for name in csvs:
            assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes()
