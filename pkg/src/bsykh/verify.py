"""Built-in verification suite aggregating every module's key invariants.

Each check either returns normally or raises AssertionError with a
deterministic message; run_all collects (name, passed, detail) tuples in a
fixed order so repeated runs produce byte-identical reports.
"""

import numpy as np

from . import chaos, majorana, models, montecarlo, sff, twopoint
from .models import ModelParams


def _check_clifford():
    for n in (8, 16):
        ms = majorana.build_majoranas(n)
        eye = np.eye(ms.dim)
        worst = 0.0
        for i in range(n):
            for j in range(i, n):
                delta = eye if i == j else 0.0
                dev = np.abs(majorana.anticommutator(ms[i], ms[j]) - delta).max()
                worst = max(worst, dev)
        assert worst <= 1e-13, f"anticommutator deviation {worst:.3e} at n={n}"


def _check_expm_semigroup():
    rng = np.random.default_rng(2024)
    for _ in range(3):
        a = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
        e1 = majorana.matrix_exponential(a, 0.4) @ majorana.matrix_exponential(a, 0.6)
        e2 = majorana.matrix_exponential(a, 1.0)
        dev = np.abs(e1 - e2).max()
        assert dev <= 1e-10, f"semigroup deviation {dev:.3e}"


def _check_resolvent():
    rng = np.random.default_rng(7)
    a = rng.normal(size=(64, 64)) + 1j * rng.normal(size=(64, 64))
    v = rng.normal(size=64)
    z = 9.0 + 0.3j
    x = majorana.resolvent_apply(a, z, v)
    ref = np.linalg.inv(z * np.eye(64) - a) @ v
    dev = np.linalg.norm(x - ref)
    assert dev <= 1e-10 * np.linalg.norm(ref), f"resolvent deviation {dev:.3e}"


def _check_epr_kernel_dimension():
    ms = majorana.build_majoranas(8)
    rows = np.vstack([ms[a] - 1j * ms[4 + a] for a in range(4)])
    ker = majorana.null_space(rows, 1e-10)
    assert ker.shape[1] == 1, f"EPR kernel dimension {ker.shape[1]} != 1"


def _check_h1_eigenstate():
    p = ModelParams.with_gamma0(1.0, 4, 1.0)
    m = models.build_h1(p, 1.0)
    epr = m.boundary_states["EPR"]
    val = m.boundary_eigenvalues["EPR"]
    res = np.linalg.norm(m.hamiltonian @ epr - val * epr)
    assert res <= 1e-11, f"H1 EPR residual {res:.3e}"


def _check_h2_eigenstates():
    for u in (0.0, 0.8, 2.5):
        p = ModelParams.with_gamma0(1.0, 4, u)
        m = models.build_h2(p)
        e1 = m.boundary_states["EPR1"]
        e2 = m.boundary_states["EPR2"]
        r1 = np.linalg.norm(m.hamiltonian @ e1 - 2.0 * e1)
        r2 = np.linalg.norm(e2.conj() @ m.hamiltonian - 2.0 * e2.conj())
        assert max(r1, r2) <= 1e-11, f"H2 residuals ({r1:.3e}, {r2:.3e}) at U={u}"
        assert abs(np.vdot(e2, e1)) > 1e-14, "EPR overlap vanished"


def _check_flavor_blocks():
    ms = majorana.build_majoranas(8)
    blocks = [1j * 0.5 * (ms[a] @ ms[4 + a]) for a in range(4)]
    for i in range(4):
        for j in range(i + 1, 4):
            dev = np.abs(majorana.commutator(blocks[i], blocks[j])).max()
            assert dev <= 1e-13, f"flavor blocks {i},{j} do not commute: {dev:.3e}"


def _check_hubbard_branches():
    ms = majorana.build_majoranas(16)
    prods = []
    for b in range(4):
        ops = ms.ops[4 * b:4 * b + 4]
        prods.append(ops[0] @ ops[1] @ ops[2] @ ops[3])
    for i in range(4):
        for j in range(i + 1, 4):
            dev = np.abs(majorana.commutator(prods[i], prods[j])).max()
            assert dev <= 1e-13, f"Hubbard branches {i},{j} do not commute: {dev:.3e}"


def _check_greens():
    ts = np.linspace(0.0, 10.0, 41)
    for u in (0.0, 1.0, 3.0):
        p = ModelParams.with_gamma0(1.0, 4, u)
        worst = max(abs(twopoint.greens_numeric(p, float(t))
                        - twopoint.greens_closed(p, float(t))) for t in ts)
        assert worst <= 1e-9, f"two-point mismatch {worst:.3e} at U={u}"


def _check_greens_degeneracy():
    below = ModelParams.with_gamma0(1.0, 4, 1.0 - 1e-6)
    above = ModelParams.with_gamma0(1.0, 4, 1.0 + 1e-6)
    at = ModelParams.with_gamma0(1.0, 4, 1.0)
    for t in (0.5, 2.0, 5.0):
        g = twopoint.greens_closed(at, t)
        budget = 1e-6 * 0.12 * max(t, 1.0)  # |dG/dU| slope, no branch jump
        lo = abs(twopoint.greens_closed(below, t) - g)
        hi = abs(twopoint.greens_closed(above, t) - g)
        assert max(lo, hi) <= budget, f"jump {max(lo, hi):.3e} at t={t}"


def _check_spectral_convention():
    p = ModelParams.with_gamma0(1.0, 4, 0.5)
    for w in (0.0, 1.0, 3.0):
        dev = abs(twopoint.spectral_numeric(p, w) - twopoint.spectral_closed(p, w))
        assert dev <= 1e-6, f"spectral convention mismatch {dev:.3e} at omega={w}"


def _check_trace_identity():
    worst = 0.0
    for lam in (0.0, 0.8, 2.0):
        for u in (0.0, 1.0, 3.0):
            p = ModelParams.with_gamma0(1.0, 4, u)
            for T in (0.0, 0.7, 2.5):
                tr = sff.trace_h1_numeric(lam, p, T)
                ref = sff.s0(lam, u, T)
                worst = max(worst, abs(np.log(tr) - ref) / max(1.0, abs(ref)))
    assert worst <= 1e-10, f"trace identity relative deviation {worst:.3e}"


def _check_sff_endpoints():
    p = ModelParams.with_gamma0(1.0, 4, 1.0)
    r0 = sff.maximize_sff(p, 0.0)
    assert abs(r0.value - 4 * np.log(2.0)) <= 1e-12, f"T=0 value {r0.value}"
    assert r0.saddle_label == sff.DIAGONAL
    for u in (0.0, 1.0, 3.0):
        r = sff.maximize_sff(ModelParams.with_gamma0(1.0, 4, u), 20.0)
        assert abs(r.value) <= 0.01, f"long-time value {r.value} at U={u}"


def _check_sff_small_T():
    for u in (0.5, 2.0, 5.0):
        r = sff.maximize_sff(ModelParams.with_gamma0(1.0, 4, u), 0.005)
        assert r.saddle_label == sff.DIAGONAL, f"small-T saddle not diagonal at U={u}"


def _check_kernel_equivalence():
    hs = np.linspace(-3.0, 1.5, 9)
    for q in (2, 4):
        for u in (0.0, 1.0):
            p = ModelParams.with_gamma0(1.0, q, u)
            for h in hs:
                kc = chaos.kr_closed(p, float(h))
                kn = chaos.kr_numeric(p, float(h))
                assert abs(kn - kc) <= 1e-9, \
                    f"kernel mismatch {abs(kn - kc):.3e} at q={q}, U={u}, h={h}"


def _check_chaos_limits():
    for q in (2, 4, 8, 12):
        p = ModelParams.with_gamma0(1.0, q, 0.0)
        kappa = chaos.lyapunov(p)
        assert abs(kappa - (q - 2)) <= 1e-8, f"kappa({q}, U=0) = {kappa}"
        prod = chaos.branching_time(p) * (kappa + 1.0)
        assert abs(prod - 1.0) <= 1e-8, f"bound product {prod} at q={q}, U=0"


def _check_volterra_growth():
    p = ModelParams.with_gamma0(1.0, 4, 0.0)
    slope = chaos.otoc_log_slope(p, t_max=6.0, dt=0.005)
    assert abs(slope - 2.0) <= 0.04, f"growth rate {slope} vs kappa=2"


def _check_mc_couplings():
    cfg = montecarlo.McConfig(n_sites=4, q=2, J=2.0, U=0.0, dt=0.025, t_max=0.5,
                              n_samples=1, master_seed=5)
    assert montecarlo.n_coupling_draws(cfg) == 24
    rng = np.random.default_rng(11)
    draws = np.concatenate([montecarlo.sample_couplings(cfg, rng).ravel()
                            for _ in range(5000)])
    var = draws.var()
    target = 2.0 / (4 * 0.025)
    sigma3 = 3.0 * target * np.sqrt(2.0 / draws.size)
    assert abs(var - target) <= sigma3, f"coupling variance {var} vs {target}"


def _check_mc_step_identity():
    cfg = montecarlo.McConfig(n_sites=2, q=2, J=1.0, U=0.0, dt=0.02, t_max=0.1,
                              n_samples=1, master_seed=0)
    w = montecarlo.step_unitary(cfg, np.zeros((4, 1)))
    assert np.abs(w - np.eye(cfg.dim)).max() <= 1e-13, "zero-coupling step != identity"


def _check_mc_reproducible():
    cfg = montecarlo.McConfig(n_sites=2, q=2, J=1.0, U=0.5, dt=0.05, t_max=0.5,
                              n_samples=4, master_seed=77)
    a = montecarlo.greens_mc(cfg)
    b = montecarlo.greens_mc(cfg)
    assert np.array_equal(a.mean, b.mean) and np.array_equal(a.std_error, b.std_error), \
        "seeded runs are not bitwise identical"
    assert a.mean[0] == 0.5 and a.std_error[0] == 0.0, "G(0) must be exactly 1/2"


CHECKS = [
    ("majorana.clifford_algebra", _check_clifford),
    ("majorana.expm_semigroup", _check_expm_semigroup),
    ("majorana.resolvent_vs_inverse", _check_resolvent),
    ("majorana.epr_kernel_dimension", _check_epr_kernel_dimension),
    ("models.h1_epr_eigenstate", _check_h1_eigenstate),
    ("models.h2_epr_eigenstates", _check_h2_eigenstates),
    ("models.flavor_blocks_commute", _check_flavor_blocks),
    ("models.hubbard_branches_commute", _check_hubbard_branches),
    ("twopoint.closed_vs_numeric", _check_greens),
    ("twopoint.degeneracy_continuity", _check_greens_degeneracy),
    ("twopoint.spectral_convention", _check_spectral_convention),
    ("sff.trace_identity", _check_trace_identity),
    ("sff.endpoints", _check_sff_endpoints),
    ("sff.small_T_diagonal", _check_sff_small_T),
    ("chaos.kernel_equivalence", _check_kernel_equivalence),
    ("chaos.limits_at_u0", _check_chaos_limits),
    ("chaos.volterra_growth_rate", _check_volterra_growth),
    ("montecarlo.coupling_variance", _check_mc_couplings),
    ("montecarlo.step_identity", _check_mc_step_identity),
    ("montecarlo.seeded_reproducibility", _check_mc_reproducible),
]


def run_all():
    """Run every check; returns [(name, passed, detail)] in fixed order."""
    report = []
    for name, fn in CHECKS:
        try:
            fn()
        except AssertionError as exc:
            report.append((name, False, str(exc)))
        except Exception as exc:  # construction failures count as failures too
            report.append((name, False, f"{type(exc).__name__}: {exc}"))
        else:
            report.append((name, True, ""))
    return report
