import numpy as np
import pytest
from scipy.integrate import simpson

from bsykh.chaos import (branching_time, chaos_point, kr_closed, kr_numeric,
                         lyapunov, otoc_log_slope, otoc_volterra,
                         otoc_volterra_matrix, rung_f, rung_table, scan_chaos)
from bsykh.errors import KernelPoleError, SingularResolventError
from bsykh.models import ModelParams, build_h2
from bsykh.twopoint import decay_and_frequency


def params(u, q=4):
    return ModelParams.with_gamma0(1.0, q, u)


# ---------------------------------------------------------------- rung


def test_rung_u0_is_diagonal_exponential():
    p = params(0.0)
    for t in (0.0, 0.4, 1.5, 3.0):
        for a in range(4):
            for b in range(4):
                want = np.exp(-t) if a == b else 0.0
                assert rung_f(p, t, a, b) == pytest.approx(want, abs=1e-12)


def test_rung_negative_time_rejected():
    with pytest.raises(ValueError):
        rung_f(params(1.0), -0.2)


def test_rung_table_matches_pointwise():
    p = params(1.3)
    grid = np.linspace(0.0, 2.0, 9)
    table = rung_table(p, grid)
    for k in (0, 3, 8):
        for a, b in [(0, 0), (1, 2), (3, 3)]:
            assert table[k, a, b] == pytest.approx(rung_f(p, float(grid[k]), a, b),
                                                   abs=1e-11)


# ---------------------------------------------------------------- kernel


def test_kr_closed_u0_reduction():
    for q in (2, 4, 8):
        p = params(0.0, q)
        for h in (-2.0, -0.5, 0.0, 0.5, 2.5):
            assert kr_closed(p, h) == pytest.approx((q - 1) / (1.0 - h), rel=1e-13)


def test_kr_closed_special_points():
    # q=2, U=0, h=0 gives exactly 1 (kappa = 0)
    assert kr_closed(params(0.0, 2), 0.0) == pytest.approx(1.0, rel=1e-14)
    # h = 2 gamma0 at U > 0 gives exactly -(q-1)
    for q in (2, 4, 12):
        for u in (0.5, 2.0):
            assert kr_closed(params(u, q), 2.0) == pytest.approx(-(q - 1), rel=1e-13)


def test_kr_closed_pole_raises():
    with pytest.raises(KernelPoleError):
        kr_closed(params(0.0), 1.0)


def test_kr_numeric_matches_closed():
    hs = np.linspace(-3.0, 1.5, 13)
    for q in (2, 4):
        for u in (0.0, 1.0, 4.0):
            p = params(u, q)
            for h in hs:
                assert abs(kr_numeric(p, float(h)) - kr_closed(p, float(h))) <= 1e-9


def test_kr_numeric_removable_point():
    # h = 0 shifts the resolvent onto the boundary eigenvalue; k_R is regular
    for u in (0.0, 1.0):
        p = params(u)
        assert abs(kr_numeric(p, 0.0) - kr_closed(p, 0.0)) <= 1e-9


def test_kr_numeric_pole_raises():
    with pytest.raises(SingularResolventError):
        kr_numeric(params(0.0), 1.0)


def test_kr_numeric_decays_at_large_negative_h():
    assert abs(kr_numeric(params(1.0), -50.0)) < 0.1


def test_h2_shift_equals_measured_eigenvalue():
    for u in (0.0, 1.5):
        m = build_h2(params(u))
        assert m.boundary_eigenvalues["EPR1"] == pytest.approx(2.0, abs=1e-11)


def test_laplace_transform_consistency():
    # quadrature of the rung against the kernel eigenvalue, h < 0
    p = params(1.0)
    grid = np.linspace(0.0, 30.0, 3001)
    f_sum = rung_table(p, grid)[:, 0, :].sum(axis=1)
    for h in (-0.5, -1.0, -2.0):
        quad = 3.0 * simpson(np.exp(h * grid) * f_sum, x=grid)
        assert abs(quad - kr_closed(p, h)) <= 1e-6


# ---------------------------------------------------------------- growth data


def test_lyapunov_u0_limits():
    for q in (2, 4, 8, 12):
        assert lyapunov(params(0.0, q)) == pytest.approx(q - 2.0, abs=1e-10)


def test_branching_u0_limits():
    for q in (2, 4, 8, 12):
        kappa = lyapunov(params(0.0, q))
        assert branching_time(params(0.0, q)) * (kappa + 1.0) == pytest.approx(
            1.0, abs=1e-10)
    assert branching_time(params(0.0, 12)) == pytest.approx(1.0 / 11.0, abs=1e-12)


def test_kappa_monotone_in_u():
    us = np.linspace(0.0, 6.0, 13)
    for q in (2, 4, 8, 12):
        kappas = [lyapunov(params(float(u), q)) for u in us]
        assert all(b >= a - 1e-10 for a, b in zip(kappas, kappas[1:]))
        assert all(k >= -1e-12 for k in kappas)


def test_chaos_point_consistency():
    cp = chaos_point(params(2.0, 2))
    gamma, _ = decay_and_frequency(params(2.0, 2))
    assert cp.bound_product == pytest.approx(cp.t_branch * (cp.kappa + gamma),
                                             abs=1e-12)
    assert cp.q == 2 and cp.u_over_gamma0 == pytest.approx(2.0)


def test_bound_product_kink_at_u_equals_gamma0():
    # the left derivative inherits the square-root singularity of the decay
    # rate, so the derivative jump must tower over local finite-difference noise
    eps = 1e-4

    def bp(u, q=2):
        return chaos_point(params(u, q)).bound_product

    left = (bp(1.0) - bp(1.0 - eps)) / eps
    right = (bp(1.0 + eps) - bp(1.0)) / eps
    smooth_noise = abs((bp(1.3 + eps) - 2 * bp(1.3) + bp(1.3 - eps)) / eps)
    assert abs(left - right) > 10.0 * (smooth_noise + 1e-8)


def test_scan_q2_violates_bound():
    u_grid = np.linspace(0.1, 6.0, 60)
    scan = scan_chaos([2], u_grid)
    assert not scan.failures
    assert scan.peak_by_q[2][1] > 2.0
    # peak sits at intermediate U, not at either end of the grid
    assert 0.5 < scan.peak_by_q[2][0] < 5.5


def test_scan_small_u_limits():
    scan = scan_chaos([2], [1e-4])
    r = scan.results[0]
    assert 0.0 <= r.kappa <= 1e-3
    assert r.bound_product == pytest.approx(1.0, abs=1e-3)


def test_scan_interior_peaks():
    u_grid = np.linspace(0.5, 12.0, 24)
    scan = scan_chaos([2, 4], u_grid)
    for q in (2, 4):
        u_peak, _ = scan.peak_by_q[q]
        assert u_grid[0] < u_peak < u_grid[-1]


def test_scan_validation():
    with pytest.raises(ValueError):
        scan_chaos([], [1.0])
    with pytest.raises(ValueError):
        scan_chaos([2], [])


# ---------------------------------------------------------------- volterra


def test_volterra_initial_value_is_rung():
    p = params(1.0)
    t, out = otoc_volterra_matrix(p, 0.5, 0.002)
    ref = rung_table(p, np.array([0.0, 0.002]))[0]
    assert np.abs(out[0] - ref).max() <= 1e-12


def test_volterra_step_guard():
    with pytest.raises(ValueError):
        otoc_volterra_matrix(params(0.0), 2.0, 0.1)


def test_volterra_no_growth_for_q2_u0():
    p = params(0.0, 2)
    t, vals = otoc_volterra(p, 6.0, 0.005)
    total_slope = otoc_log_slope(p, 6.0, 0.005)
    assert abs(total_slope) <= 0.01
    # the flavor-summed OTOC saturates at 1
    _, out = otoc_volterra_matrix(p, 6.0, 0.005)
    assert out[-1, 0, :].sum() == pytest.approx(1.0, abs=1e-3)


def test_volterra_growth_matches_lyapunov():
    p = params(0.0, 4)
    slope = otoc_log_slope(p, 6.0, 0.005)
    assert abs(slope - 2.0) / 2.0 <= 0.02


def test_volterra_richardson_step_halving():
    # second-order marching: halving dt must not grow the slope error
    p = params(2.0, 4)
    kappa = lyapunov(p)
    e1 = abs(otoc_log_slope(p, 5.0, 0.0035) - kappa)
    e2 = abs(otoc_log_slope(p, 5.0, 0.00175) - kappa)
    assert e2 <= max(0.7 * e1, 1e-4)
