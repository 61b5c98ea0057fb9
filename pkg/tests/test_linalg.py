import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from penduo.linalg import (
    IndexOutOfRange,
    TridiagonalSystem,
    ZeroPivot,
    add_point_penalty,
    make_system,
    solve_cyclic_tridiagonal,
    solve_tridiagonal,
)


def dense_solve(sys, rhs):
    """Independent oracle: dense Gaussian elimination."""
    return np.linalg.solve(sys.to_dense(), rhs)


def test_identity_system():
    sys = make_system([0.0, 0.0], [1.0, 1.0, 1.0], [0.0, 0.0])
    x = solve_tridiagonal(sys, np.array([2.0, 3.0, 4.0]))
    assert np.array_equal(x, [2.0, 3.0, 4.0])


def test_two_by_two_against_dense_oracle():
    sys = make_system([-1.0], [2.0, 2.0], [-1.0])
    rhs = np.array([1.0, 1.0])
    expected = dense_solve(sys, rhs)  # = [1, 1] by Cramer: det 3, minors 3
    np.testing.assert_allclose(expected, [1.0, 1.0], rtol=1e-14)
    np.testing.assert_allclose(solve_tridiagonal(sys, rhs), expected, rtol=1e-12)


def test_zero_pivot_reported_with_index():
    sys = make_system([1.0, 1.0], [0.0, 2.0, 2.0], [1.0, 1.0])
    with pytest.raises(ZeroPivot) as exc:
        solve_tridiagonal(sys, np.ones(3))
    assert exc.value.index == 0


def test_residual_bound():
    rng = np.random.default_rng(7)
    n = 40
    diag = rng.uniform(2.5, 4.0, n)
    sub = rng.uniform(-1.0, 1.0, n - 1)
    sup = rng.uniform(-1.0, 1.0, n - 1)
    sys = TridiagonalSystem(sub, diag, sup)
    rhs = rng.standard_normal(n)
    x = solve_tridiagonal(sys, rhs)
    res = np.max(np.abs(sys.matvec(x) - rhs))
    norm_a = np.max(np.abs(diag)) + 2.0
    assert res <= 1e-10 * (norm_a * np.max(np.abs(x)) + np.max(np.abs(rhs)))


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(min_value=2, max_value=50),
    seed=st.integers(min_value=0, max_value=2**31),
)
def test_matches_dense_oracle_on_dominant_systems(n, seed):
    rng = np.random.default_rng(seed)
    sub = rng.uniform(-1.0, 1.0, n - 1)
    sup = rng.uniform(-1.0, 1.0, n - 1)
    diag = rng.uniform(2.1, 5.0, n) * rng.choice([-1.0, 1.0], n)
    sys = TridiagonalSystem(sub, diag, sup)
    rhs = rng.standard_normal(n)
    x = solve_tridiagonal(sys, rhs)
    ref = dense_solve(sys, rhs)
    np.testing.assert_allclose(x, ref, rtol=1e-10, atol=1e-12)


def test_point_penalty_zero_weight_is_noop():
    sys = make_system([-1.0, -1.0], [2.0, 2.0, 2.0], [-1.0, -1.0])
    rhs = np.array([1.0, 2.0, 3.0])
    out_sys, out_rhs = add_point_penalty(sys, rhs, 1, 0.0, 5.0)
    assert np.array_equal(out_sys.diag, sys.diag)
    assert np.array_equal(out_rhs, rhs)


def test_point_penalty_direct_formula():
    sys = make_system([-1.0, -1.0], [2.0, 2.0, 2.0], [-1.0, -1.0])
    rhs = np.zeros(3)
    out_sys, out_rhs = add_point_penalty(sys, rhs, 2, 10.0, 1.0)
    assert out_sys.diag[2] == 12.0
    assert out_rhs[2] == 10.0
    assert sys.diag[2] == 2.0  # original untouched


def test_point_penalties_commute_bitwise():
    sys = make_system([-1.0] * 4, [2.0] * 5, [-1.0] * 4)
    rhs = np.arange(5.0)
    a1, r1 = add_point_penalty(*add_point_penalty(sys, rhs, 1, 3.0, 0.5), 3, 7.0, -2.0)
    a2, r2 = add_point_penalty(*add_point_penalty(sys, rhs, 3, 7.0, -2.0), 1, 3.0, 0.5)
    assert np.array_equal(a1.diag, a2.diag)
    assert np.array_equal(r1, r2)


def test_point_penalty_preserves_symmetry():
    sys = make_system([-1.0, -2.0], [3.0, 4.0, 5.0], [-1.0, -2.0])
    out_sys, _ = add_point_penalty(sys, np.zeros(3), 1, 2.5, 1.0)
    assert np.array_equal(out_sys.sub, out_sys.sup)


def test_point_penalty_index_range():
    sys = make_system([-1.0], [2.0, 2.0], [-1.0])
    with pytest.raises(IndexOutOfRange):
        add_point_penalty(sys, np.zeros(2), 2, 1.0, 0.0)


def test_cyclic_solve_against_dense_oracle():
    rng = np.random.default_rng(3)
    n = 12
    sys = TridiagonalSystem(
        rng.uniform(-1, 1, n - 1), rng.uniform(3, 5, n), rng.uniform(-1, 1, n - 1)
    )
    ct, cb = -0.7, -0.4
    dense = sys.to_dense()
    dense[0, -1] = ct
    dense[-1, 0] = cb
    rhs = rng.standard_normal(n)
    x = solve_cyclic_tridiagonal(sys, ct, cb, rhs)
    np.testing.assert_allclose(x, np.linalg.solve(dense, rhs), rtol=1e-10)


def test_cyclic_solve_without_corners_is_plain():
    sys = make_system([-1.0, -1.0], [3.0, 3.0, 3.0], [-1.0, -1.0])
    rhs = np.array([1.0, 0.0, 2.0])
    np.testing.assert_array_equal(
        solve_cyclic_tridiagonal(sys, 0.0, 0.0, rhs), solve_tridiagonal(sys, rhs)
    )
