import numpy as np
import pytest

from bsykh.majorana import build_majoranas
from bsykh.models import ModelParams
from bsykh.montecarlo import (McConfig, _assemble_h, _pauli_majoranas, _step_w,
                              _taylor_step, coupling_sigma, greens_mc,
                              n_coupling_draws, sample_couplings, sff_mc,
                              step_unitary)
from bsykh.twopoint import greens_closed


def tiny_cfg(**kw):
    base = dict(n_sites=2, q=2, J=1.0, U=0.5, dt=0.05, t_max=0.5,
                n_samples=4, master_seed=9)
    base.update(kw)
    return McConfig(**base)


# ---------------------------------------------------------------- config


def test_config_validation():
    with pytest.raises(ValueError):
        tiny_cfg(n_sites=1)                      # n_sites < q
    with pytest.raises(ValueError):
        tiny_cfg(n_sites=6)                      # 4*n_sites > 20
    with pytest.raises(ValueError):
        tiny_cfg(dt=0.2)                         # dt*max(J,U) > 0.05
    with pytest.raises(ValueError):
        tiny_cfg(dt=-0.01)
    with pytest.raises(ValueError):
        tiny_cfg(n_samples=0)
    with pytest.raises(ValueError):
        tiny_cfg(J=-1.0)
    with pytest.raises(ValueError):
        tiny_cfg(q=1)


def test_config_derived_quantities():
    cfg = McConfig(n_sites=4, q=2, J=2.0, U=0.0, dt=0.025, t_max=3.0,
                   n_samples=1, master_seed=0)
    assert cfg.n_modes == 16 and cfg.dim == 256
    assert cfg.n_steps == 120
    assert cfg.gamma0 == 1.0


# ---------------------------------------------------------------- couplings


def test_coupling_count_and_variance_formula():
    cfg = McConfig(n_sites=4, q=2, J=2.0, U=0.0, dt=0.025, t_max=1.0,
                   n_samples=1, master_seed=0)
    assert n_coupling_draws(cfg) == 24          # C(4,2) pairs x 4 flavors
    assert coupling_sigma(cfg) ** 2 == pytest.approx(2.0 / (4 * 0.025), rel=1e-14)
    draws = sample_couplings(cfg, np.random.default_rng(0))
    assert draws.shape == (4, 6)


def test_coupling_empirical_variance():
    cfg = McConfig(n_sites=4, q=2, J=2.0, U=0.0, dt=0.025, t_max=1.0,
                   n_samples=1, master_seed=0)
    rng = np.random.default_rng(123)
    draws = np.concatenate([sample_couplings(cfg, rng).ravel() for _ in range(5000)])
    target = coupling_sigma(cfg) ** 2
    three_sigma = 3.0 * target * np.sqrt(2.0 / draws.size)
    assert abs(draws.var() - target) <= three_sigma


def test_couplings_zero_at_zero_j():
    cfg = tiny_cfg(J=0.0)
    draws = sample_couplings(cfg, np.random.default_rng(5))
    assert np.all(draws == 0.0)


# ---------------------------------------------------------------- stepping


def test_step_identity_for_zero_hamiltonian():
    cfg = tiny_cfg(U=0.0)
    w = step_unitary(cfg, np.zeros((4, 1)))
    assert np.abs(w - np.eye(cfg.dim)).max() <= 1e-13


def test_step_hamiltonian_matches_dense_construction():
    # assemble H from the permutation representation and from explicit dense
    # Majorana products; they must agree entry by entry
    cfg = tiny_cfg(U=0.7)
    rng = np.random.default_rng(3)
    c = sample_couplings(cfg, rng)
    h = _assemble_h(cfg, c)
    ms = build_majoranas(8)
    mode = lambda i, a: 4 * i + a
    ref = np.zeros((16, 16), dtype=complex)
    k = 0
    for a in range(4):
        ref += 1j * c[a, 0] * (ms[mode(0, a)] @ ms[mode(1, a)])
        k += 1
    for i in range(2):
        ref += 0.7 * (ms[mode(i, 0)] @ ms[mode(i, 1)] @ ms[mode(i, 2)] @ ms[mode(i, 3)])
    assert np.abs(h - ref).max() <= 1e-13
    assert np.abs(h - h.conj().T).max() <= 1e-12


def test_step_unitarity_random_couplings():
    cfg = McConfig(n_sites=4, q=2, J=2.0, U=1.0, dt=0.025, t_max=1.0,
                   n_samples=1, master_seed=0)
    w = step_unitary(cfg, sample_couplings(cfg, np.random.default_rng(17)))
    assert np.linalg.norm(w.conj().T @ w - np.eye(cfg.dim)) <= 1e-11


def test_step_shape_validation():
    with pytest.raises(ValueError):
        step_unitary(tiny_cfg(), np.zeros((3, 1)))


def test_taylor_step_matches_dense_step():
    cfg = tiny_cfg(U=0.4)
    c = sample_couplings(cfg, np.random.default_rng(8))
    block = np.random.default_rng(9).normal(size=(cfg.dim, 5)) + 0j
    dense = _step_w(cfg, c) @ block
    taylor = _taylor_step(cfg, c, block)
    assert np.abs(dense - taylor).max() <= 1e-12


# ---------------------------------------------------------------- estimators


def test_greens_at_zero_time_exact():
    est = greens_mc(tiny_cfg())
    assert est.mean[0] == 0.5
    assert est.std_error[0] == 0.0


def test_greens_bitwise_reproducible():
    a = greens_mc(tiny_cfg())
    b = greens_mc(tiny_cfg())
    assert np.array_equal(a.mean, b.mean)
    assert np.array_equal(a.std_error, b.std_error)
    c = greens_mc(tiny_cfg(master_seed=10))
    assert not np.array_equal(a.mean, c.mean)


def test_sff_at_zero_time_exact():
    cfg = tiny_cfg()
    est = sff_mc(cfg, 0.0)
    assert est.mean[0] == float(cfg.dim) ** 2           # 16^n_sites
    assert np.log(est.mean[0]) / cfg.n_sites == pytest.approx(4 * np.log(2.0),
                                                              abs=1e-13)
    assert est.median[0] == est.mean[0]


def test_sff_t_validation():
    with pytest.raises(ValueError):
        sff_mc(tiny_cfg(), 5.0)


def test_hutchinson_identity_single_vector():
    # the vector-path estimator identity z^H U^H chi U chi z = <Uz| chi |U chi z>
    cfg = tiny_cfg(U=0.3)
    c = sample_couplings(cfg, np.random.default_rng(21))
    w = _step_w(cfg, c)
    rng = np.random.default_rng(4)
    z = np.exp(2j * np.pi * rng.random(cfg.dim))
    ops, dim = _pauli_majoranas(cfg.n_modes)
    f, ph = ops[0]
    cols = np.arange(dim)
    chi = np.zeros((dim, dim), dtype=complex)
    chi[cols ^ f, cols] = ph
    direct = np.vdot(z, w.conj().T @ chi @ w @ chi @ z).real
    phi = w @ z
    psi = w @ (chi @ z)
    block_path = np.vdot(phi, chi @ psi).real
    assert direct == pytest.approx(block_path, rel=1e-12)


@pytest.mark.mc
def test_dt_convergence():
    # halving dt moves the mean by less than one standard error
    base = dict(n_sites=3, q=2, J=2.0, U=0.0, t_max=2.0, n_samples=48,
                master_seed=11)
    est1 = greens_mc(McConfig(dt=0.025, **base))
    est2 = greens_mc(McConfig(dt=0.0125, **base))
    i1 = np.searchsorted(est1.t_grid, 1.0)
    i2 = np.searchsorted(est2.t_grid, 1.0)
    assert abs(est1.mean[i1] - est2.mean[i2]) <= est1.std_error[i1]


@pytest.mark.mc
def test_n_trend_toward_large_n():
    # |mc - closed| at gamma0*t = 1 decreases (or stays within error bars)
    # for N = 3 -> 4 -> 5 at q = 2; N = 5 exercises the trace-vector path
    p = ModelParams.with_gamma0(1.0, 2, 0.0)
    closed = greens_closed(p, 1.0)
    diffs, errs = [], []
    for n_sites, n_samples in [(3, 32), (4, 24), (5, 16)]:
        cfg = McConfig(n_sites=n_sites, q=2, J=2.0, U=0.0, dt=0.025, t_max=1.0,
                       n_samples=n_samples, master_seed=21)
        est = greens_mc(cfg)
        i = np.searchsorted(est.t_grid, 1.0)
        diffs.append(abs(est.mean[i] - closed))
        errs.append(est.std_error[i])
    assert diffs[1] <= diffs[0] + 2 * (errs[0] + errs[1])
    assert diffs[2] <= diffs[1] + 2 * (errs[1] + errs[2])


@pytest.mark.mc
def test_sff_early_decay_and_oscillation():
    # q=2, U=0: the disorder-averaged SFF decays at early times
    cfg = McConfig(n_sites=3, q=2, J=2.0, U=0.0, dt=0.025, t_max=1.5,
                   n_samples=24, master_seed=31)
    est = sff_mc(cfg, 1.5)
    assert est.mean[-1] < est.mean[0]
    assert est.median is not None
    # strong Hubbard coupling: dip/revival with period ~ 4 pi / U in the
    # early SFF (the oscillating factor comes from the Hubbard term alone,
    # so any q shows it; q = 2 keeps the Hilbert space small)
    cfg = McConfig(n_sites=3, q=2, J=2.0, U=6.0, dt=0.008, t_max=2.6,
                   n_samples=24, master_seed=41)
    est = sff_mc(cfg, 2.6)
    period = 4 * np.pi / 6.0
    half = np.searchsorted(est.t_grid, period / 2)
    full = np.searchsorted(est.t_grid, period)
    dip = est.mean[half - 16:half + 16].min()
    revival = est.mean[full - 16:full + 16].max()
    assert dip < 0.01 * est.mean[0]
    assert revival > 10.0 * dip
