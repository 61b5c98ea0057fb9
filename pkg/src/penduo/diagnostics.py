"""Interface flux extraction, discrete error norms and rate fitting."""

from dataclasses import dataclass

import numpy as np

from .core import Mesh1D, MeshMismatch
from .linalg import IndexOutOfRange


class NonPositiveData(Exception):
    """Log-log fitting needs strictly positive abscissae and ordinates."""


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r_squared: float
    points: tuple


def interface_flux(
    state: np.ndarray,
    mesh: Mesh1D,
    node: int,
    side: str,
    nu: float = 1.0,
) -> float:
    """nu * du/dx at a node from one side, with a 3-point one-sided stencil.

    Second order, exact on quadratics: a first-order difference would bury
    the epsilon-rate studies under O(dx) noise.  side="left" reads the
    fluid left of the node (use at the upstream interface), side="right"
    the fluid right of it.
    """
    dx = mesh.dx
    n = len(state)
    if side == "left":
        if node < 2 or node >= n:
            raise IndexOutOfRange(f"no two left neighbors at node {node}")
        d = (3.0 * state[node] - 4.0 * state[node - 1] + state[node - 2]) / (2.0 * dx)
    elif side == "right":
        if node < 0 or node > n - 3:
            raise IndexOutOfRange(f"no two right neighbors at node {node}")
        d = (-3.0 * state[node] + 4.0 * state[node + 1] - state[node + 2]) / (2.0 * dx)
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return nu * d


def error_norms(
    a: np.ndarray,
    b: np.ndarray,
    mesh: Mesh1D,
    region: str = "whole",
    structure: tuple[int, int] | None = None,
) -> tuple[float, float, float]:
    """(L2, H1 seminorm, sup) of a - b over a region of the mesh.

    L2 uses trapezoid weights, the H1 seminorm sums forward differences
    over the region's elements.  `structure` gives the (first, last) node
    indices of the structure; required for the structure/fluid regions.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or len(a) != mesh.n_nodes:
        raise MeshMismatch(
            f"states of length {len(a)}, {len(b)} on a {mesh.n_nodes}-node mesh"
        )
    e = a - b
    dx = mesh.dx
    n = len(e)

    if region == "whole":
        lo, hi = 0, n - 1
    elif region in ("structure", "fluid"):
        if structure is None:
            raise ValueError(f"region {region!r} needs the structure node range")
        lo, hi = structure
        if not 0 <= lo < hi <= n - 1:
            raise ValueError(f"bad structure node range {structure}")
    else:
        raise ValueError(f"unknown region {region!r}")

    if region == "fluid":
        seg = e[: lo + 1]
        # a second fluid segment exists when the structure is interior
        tail = e[hi:] if hi < n - 1 else np.empty(0)
        l2sq = _trapz_sq(seg, dx) + (_trapz_sq(tail, dx) if len(tail) > 1 else 0.0)
        h1sq = _h1_sq(seg, dx) + (_h1_sq(tail, dx) if len(tail) > 1 else 0.0)
        sup = max(
            float(np.max(np.abs(seg))),
            float(np.max(np.abs(tail))) if len(tail) else 0.0,
        )
    else:
        seg = e[lo : hi + 1]
        l2sq = _trapz_sq(seg, dx)
        h1sq = _h1_sq(seg, dx)
        sup = float(np.max(np.abs(seg)))

    return float(np.sqrt(l2sq)), float(np.sqrt(h1sq)), sup


def _trapz_sq(seg: np.ndarray, dx: float) -> float:
    if len(seg) < 2:
        return 0.0
    w = np.full(len(seg), dx)
    w[0] = w[-1] = 0.5 * dx
    return float(w @ (seg * seg))


def _h1_sq(seg: np.ndarray, dx: float) -> float:
    if len(seg) < 2:
        return 0.0
    d = np.diff(seg) / dx
    return float(d @ d * dx)


def fit_rate(points) -> RateFit:
    """Least-squares line through (log eps, log error); slope = order."""
    pts = [(float(e), float(err)) for e, err in points]
    if len(pts) < 3:
        raise NonPositiveData(f"need at least 3 points, got {len(pts)}")
    if any(e <= 0.0 or err <= 0.0 for e, err in pts):
        raise NonPositiveData("all eps and error values must be positive")
    x = np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    slope, intercept = np.polyfit(x, y, 1)
    yhat = slope * x + intercept
    ss_res = float(np.sum((y - yhat) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return RateFit(float(slope), float(intercept), r2, tuple(pts))


DEFAULT_EPS_SWEEP = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4)


def elliptic_error_table(
    penalty_template,
    eps_list=DEFAULT_EPS_SWEEP,
    mesh: Mesh1D | None = None,
    u0: float = 1.0,
):
    """Errors of the penalized elliptic solution against its limit.

    Returns a list of dicts, one per eps, with the L2/H1/interface/flux
    error columns used by the rate studies.  The limit is the rigid ramp
    unless only beta is active, in which case it is zero.
    """
    from dataclasses import replace

    from .core import PenaltyConfig
    from .elliptic1d import (
        EllipticProblem,
        exact_limit_flux,
        exact_limit_solution,
        solve_penalized_elliptic,
    )

    if mesh is None:
        mesh = Mesh1D(1.0, 1001)
    if not isinstance(penalty_template, PenaltyConfig):
        raise TypeError("penalty_template must be a PenaltyConfig")
    beta_only = (
        penalty_template.beta > 0.0
        and penalty_template.alpha == 0.0
        and penalty_template.gamma == 0.0
    )
    variant = "beta_only" if beta_only else "constraint_active"
    limit = exact_limit_solution(mesh, u0, variant)
    mid = mesh.midpoint_index
    flux_ref = exact_limit_flux(u0, mesh.length)

    rows = []
    for eps in eps_list:
        pen = replace(penalty_template, eps=eps)
        u = solve_penalized_elliptic(EllipticProblem(mesh, pen, u0))
        l2_s, _, _ = error_norms(u, limit, mesh, "structure", (mid, mesh.n_nodes - 1))
        l2_w, _, _ = error_norms(u, limit, mesh, "whole")
        _, h1_f, _ = error_norms(u, limit, mesh, "fluid", (mid, mesh.n_nodes - 1))
        rows.append(
            {
                "eps": eps,
                "err_l2_S": l2_s,
                "err_l2_whole": l2_w,
                "err_h1_fluid": h1_f,
                "err_interface": abs(u0 - u[mid]),
                "err_flux": abs(interface_flux(u, mesh, mid, "left") - flux_ref),
            }
        )
    return rows


def rate_slopes(rows) -> dict:
    """Fit a log-log slope for every error column with all-positive data."""
    slopes = {}
    for key in ("err_l2_S", "err_l2_whole", "err_h1_fluid", "err_interface", "err_flux"):
        pts = [(row["eps"], row[key]) for row in rows]
        try:
            slopes[key] = fit_rate(pts).slope
        except NonPositiveData:
            slopes[key] = float("nan")
    return slopes
