"""OTOC growth data: ladder rung, kernel eigenvalue, Lyapunov exponent.

The single-site rung F_ab(t) and the kernel eigenvalue k_R(h) are computed
two independent ways: from the two-replica effective Hamiltonian (matrix
exponential / resolvent) and from the closed-form rational function; the
test suite pins them against each other.  The homogeneous ladder equation
uses the flavor-summed rung F(t) = sum_c F_{ac}(t) at fixed a, which is the
summation convention that reproduces the closed form.

The growth exponent kappa solves k_R(-kappa) = 1 (largest real root); the
branching time is t_B = k_R'(-kappa).  Reported bound products use
t_B * (kappa + Gamma) with Gamma the late-time two-point decay rate, the
combination the branching-time bound constrains; at U = 0 it coincides
with t_B * (kappa + gamma0) = 1.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.polynomial import Polynomial

from .errors import (DegenerateOverlapError, KernelPoleError,
                     NoGrowthExponentError, SingularResolventError)
from .majorana import matrix_exponential, resolvent_apply
from .models import ModelParams, build_h2, h2_mode
from .twopoint import decay_and_frequency

N_FLAVORS = 4


@dataclass(frozen=True)
class ChaosResult:
    """Growth data at one (q, U) point.

    bound_product = t_branch * (kappa + Gamma(U)) where Gamma is the
    late-time decay rate of the two-point function (equal to gamma0 at
    U = 0, saturating at 2*gamma0 for U >= gamma0).
    """

    u_over_gamma0: float
    q: int
    kappa: float
    t_branch: float
    bound_product: float


@dataclass(frozen=True)
class KernelSample:
    h: float
    k_numeric: float
    k_closed: float


@dataclass(frozen=True)
class ChaosScan:
    results: tuple            # ChaosResult per successful (q, u) point
    peak_by_q: dict           # q -> (u_over_gamma0 at max, max bound_product)
    failures: tuple           # (q, u_over_gamma0, message) per failed point


class _H2Bundle:
    """Two-replica model plus the rung sink/source vectors."""

    def __init__(self, gamma0, u):
        params = ModelParams(J=gamma0 * 8.0, q=4, U=u)  # q does not enter H2
        self.model = build_h2(params)
        ms = self.model.majoranas
        op = lambda blk, a: ms[h2_mode(blk, a)]
        e1 = self.model.boundary_states["EPR1"]
        e2 = self.model.boundary_states["EPR2"]
        self.shift = self.model.boundary_eigenvalues["EPR1"]
        self.overlap = np.vdot(e2, e1)
        if abs(self.overlap) < 1e-14:
            raise DegenerateOverlapError("<EPR2|EPR1> is degenerate")
        self.sinks = np.array([
            e2.conj() @ ((op("L1", a) - 1j * op("R1", a))
                         @ (op("L2", a) - 1j * op("R2", a)))
            for a in range(N_FLAVORS)])
        self.sources = np.column_stack([
            (op("L2", b) @ op("L1", b)) @ e1 for b in range(N_FLAVORS)])


@lru_cache(maxsize=8)
def _bundle_cached(gamma0, u) -> _H2Bundle:
    return _H2Bundle(gamma0, u)


def _bundle(params: ModelParams) -> _H2Bundle:
    return _bundle_cached(params.gamma0, params.U)


def rung_f(params: ModelParams, t: float, a: int = 0, b: int = 0) -> float:
    """Single-site OTOC rung F_ab(t); real by convention (asserted)."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    bun = _bundle(params)
    h_shifted = bun.model.hamiltonian - bun.shift * np.eye(bun.model.majoranas.dim)
    val = (bun.sinks[a] @ matrix_exponential(h_shifted, t) @ bun.sources[:, b]) \
        / bun.overlap
    if abs(val.imag) > 1e-12 * max(1.0, abs(val.real)):
        raise ArithmeticError(f"rung F_{a}{b}({t}) is not real: {val}")
    return float(val.real)


def rung_table(params: ModelParams, t_grid) -> np.ndarray:
    """F_ab on a uniform time grid, shape (len(t_grid), 4, 4).

    The grid must be uniform starting at 0; evolution is applied stepwise
    so the whole table costs one matrix exponential.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    n = t_grid.size
    if n < 2 or t_grid[0] != 0.0:
        raise ValueError("t_grid must start at 0 and have at least two points")
    dts = np.diff(t_grid)
    if not np.allclose(dts, dts[0], rtol=1e-12, atol=0.0):
        raise ValueError("t_grid must be uniform")
    bun = _bundle(params)
    dim = bun.model.majoranas.dim
    w = matrix_exponential(bun.model.hamiltonian - bun.shift * np.eye(dim), dts[0])
    table = np.empty((n, N_FLAVORS, N_FLAVORS))
    v = bun.sources.copy()
    for k in range(n):
        m = (bun.sinks @ v) / bun.overlap
        if np.abs(m.imag).max() > 1e-10 * max(1.0, np.abs(m.real).max()):
            raise ArithmeticError(f"rung table not real at step {k}")
        table[k] = m.real
        if k + 1 < n:
            v = w @ v
    return table


def _kr_polynomials(gamma0, u, q):
    h = Polynomial([0.0, 1.0])
    num = gamma0 * (q - 1) * ((h - 2 * gamma0) ** 2 * (3 * gamma0 - h)
                              + u * u * (7 * gamma0 - 2 * h))
    den = (h - 2 * gamma0) ** 2 * (3 * gamma0 ** 2 + h ** 2 - 4 * gamma0 * h) \
        + u * u * (gamma0 ** 2 + h ** 2 - 4 * gamma0 * h)
    return num, den


def kr_closed(params: ModelParams, h: float) -> float:
    """Closed-form kernel eigenvalue k_R(h)."""
    num, den = _kr_polynomials(params.gamma0, params.U, params.q)
    d = den(h)
    if abs(d) <= 1e-14 * params.gamma0 ** 4:
        raise KernelPoleError(f"k_R has a pole at h={h}", h=h)
    return float(num(h) / d)


def _kr_resolvent(params, h):
    bun = _bundle(params)
    src = bun.sources.sum(axis=1)
    x = resolvent_apply(bun.model.hamiltonian, bun.shift - h, src)
    val = params.gamma0 * (params.q - 1) * (bun.sinks[0] @ x) / bun.overlap
    if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
        raise ArithmeticError(f"k_R({h}) is not real: {val}")
    return float(val.real)


def kr_numeric(params: ModelParams, h: float) -> float:
    """Kernel eigenvalue from the two-replica resolvent.

    k_R(h) = g0 (q-1) <EPR2| O_a (E1 - h - H2)^-1 sum_b S_b |EPR1> / <EPR2|EPR1>
    with E1 the measured boundary eigenvalue (2*gamma0).  Points where the
    shifted resolvent is singular but k_R itself is regular (removable
    eigenvalue crossings, e.g. h = 0) are filled by symmetric Richardson
    continuation in h; genuine poles raise SingularResolventError.
    """
    try:
        return _kr_resolvent(params, h)
    except SingularResolventError:
        pass

    def extrapolate(delta):
        vals = [_kr_resolvent(params, h + s * delta) for s in (-2.0, -1.0, 1.0, 2.0)]
        even = (4.0 * (vals[1] + vals[2]) - (vals[0] + vals[3])) / 6.0
        odd = 0.5 * abs(vals[2] - vals[1])
        return even, odd

    delta = 5e-4 * params.gamma0
    coarse, odd_c = extrapolate(delta)
    fine, odd_f = extrapolate(0.5 * delta)
    scale = max(1.0, abs(fine))
    if max(odd_c, odd_f) > 50.0 * scale:
        raise SingularResolventError(
            f"k_R appears to have a pole at h={h} (odd part {odd_f:.3e})")
    if abs(coarse - fine) > 1e-8 * scale:
        raise SingularResolventError(
            f"resolvent continuation at h={h} did not converge "
            f"({coarse} vs {fine})")
    return fine


def kernel_sample(params: ModelParams, h: float) -> KernelSample:
    """Both kernel routes at one h (they agree to 1e-9 away from poles)."""
    return KernelSample(h=h, k_numeric=kr_numeric(params, h),
                        k_closed=kr_closed(params, h))


def lyapunov(params: ModelParams) -> float:
    """Growth exponent: the largest real kappa with k_R(-kappa) = 1.

    Found as the largest admissible real root of the quartic
    g0 (q-1) num(h) - den(h) at h = -kappa (companion-matrix roots plus
    Newton polish), restricted to kappa in [-0.999 g0, (q-2) g0 + 2U + 5 g0].
    The root is cross-checked against the resolvent kernel to 1e-8.
    """
    g0 = params.gamma0
    num, den = _kr_polynomials(g0, params.U, params.q)
    p = num - den
    dp = p.deriv()
    kappa_max = (params.q - 2) * g0 + 2.0 * params.U + 5.0 * g0
    candidates = []
    for r in p.roots():
        if abs(r.imag) > 1e-9 * max(1.0, abs(r)):
            continue
        h = r.real
        for _ in range(3):
            slope = dp(h)
            if slope == 0.0:
                break
            h -= p(h) / slope
        kappa = -h
        if -0.999 * g0 <= kappa <= kappa_max:
            candidates.append(kappa)
    if not candidates:
        raise NoGrowthExponentError(
            f"no real solution of k_R(-kappa)=1 in [-0.999*g0, {kappa_max}] "
            f"for q={params.q}, U={params.U}")
    kappa = max(candidates)
    check = kr_numeric(params, -kappa)
    if abs(check - 1.0) > 1e-8:
        raise NoGrowthExponentError(
            f"kernel cross-check failed at kappa={kappa}: k_R(-kappa)={check}")
    return float(kappa)


def branching_time(params: ModelParams) -> float:
    """t_B = k_R'(-kappa), by exact rational-function differentiation.

    The quotient-rule derivative is cross-checked against a central finite
    difference (step 1e-6 g0) to 1e-6 relative.
    """
    kappa = lyapunov(params)
    num, den = _kr_polynomials(params.gamma0, params.U, params.q)
    h = -kappa
    d = den(h)
    tb = (num.deriv()(h) * d - num(h) * den.deriv()(h)) / (d * d)
    step = 1e-6 * params.gamma0
    fd = (kr_closed(params, h + step) - kr_closed(params, h - step)) / (2 * step)
    if abs(fd - tb) > 1e-6 * max(1.0, abs(tb)):
        raise ArithmeticError(
            f"branching-time derivative cross-check failed: analytic {tb}, "
            f"finite difference {fd}")
    return float(tb)


def chaos_point(params: ModelParams) -> ChaosResult:
    kappa = lyapunov(params)
    tb = branching_time(params)
    gamma, _ = decay_and_frequency(params)
    return ChaosResult(
        u_over_gamma0=params.U / params.gamma0,
        q=params.q,
        kappa=kappa,
        t_branch=tb,
        bound_product=tb * (kappa + gamma),
    )


def scan_chaos(q_list, u_grid, gamma0=1.0) -> ChaosScan:
    """ChaosResult table over q x (U/gamma0) grids.

    Individual point failures are recorded and the scan continues.  Also
    reports, per q, the maximal bound product and the U where it occurs.
    """
    q_list = list(q_list)
    u_grid = list(u_grid)
    if not q_list or not u_grid:
        raise ValueError("q_list and u_grid must be nonempty")
    results, failures, peaks = [], [], {}
    for q in q_list:
        best = None
        for u in u_grid:
            params = ModelParams.with_gamma0(gamma0, q, u)
            try:
                point = chaos_point(params)
            except Exception as exc:  # record and continue
                failures.append((q, float(u), f"{type(exc).__name__}: {exc}"))
                continue
            results.append(point)
            if best is None or point.bound_product > best[1]:
                best = (float(u), point.bound_product)
        if best is not None:
            peaks[q] = best
    return ChaosScan(results=tuple(results), peak_by_q=peaks, failures=tuple(failures))


def otoc_volterra_matrix(params: ModelParams, t_max: float, dt: float):
    """Solve the 4-flavor ladder equation by trapezoidal marching.

    OTOC_ab(t) = F_ab(t) + (q-1) g0 sum_c int_0^t F_ac(t-t') OTOC_cb(t') dt'.
    Returns (t_grid, O) with O of shape (n+1, 4, 4).
    """
    g0 = params.gamma0
    try:
        rate_scale = max(g0, params.U, lyapunov(params))
    except NoGrowthExponentError:
        rate_scale = max(g0, params.U)
    if dt > 0.01 / rate_scale:
        raise ValueError(
            f"dt={dt} too large; need dt <= {0.01 / rate_scale:.4g} for this point")
    n = int(round(t_max / dt))
    t_grid = np.arange(n + 1) * dt
    f = rung_table(params, t_grid)
    c = (params.q - 1) * g0
    out = np.empty_like(f)
    out[0] = f[0]
    lhs_inv = np.linalg.inv(np.eye(N_FLAVORS) - 0.5 * c * dt * f[0])
    for k in range(1, n + 1):
        acc = 0.5 * (f[k] @ out[0])
        if k > 1:
            acc = acc + np.einsum("mij,mjk->ik", f[k - 1:0:-1], out[1:k])
        out[k] = lhs_inv @ (f[k] + c * dt * acc)
    return t_grid, out


def otoc_volterra(params: ModelParams, t_max: float, dt: float,
                  a: int = 0, b: int = 0):
    """Sampled OTOC_ab(t) from the ladder equation; see otoc_volterra_matrix."""
    t_grid, out = otoc_volterra_matrix(params, t_max, dt)
    return t_grid, out[:, a, b]


def otoc_log_slope(params: ModelParams, t_max: float, dt: float,
                   window=(0.6, 1.0), a: int = 0) -> float:
    """Late-window growth rate d ln(sum_b OTOC_ab) / dt.

    Fits a line to the log of the flavor-summed OTOC over the fraction
    `window` of the time range; in the growth regime this matches the
    Lyapunov exponent.
    """
    t_grid, out = otoc_volterra_matrix(params, t_max, dt)
    total = out[:, a, :].sum(axis=1)
    mask = (t_grid >= window[0] * t_max) & (t_grid <= window[1] * t_max)
    if np.any(total[mask] <= 0):
        raise ArithmeticError("flavor-summed OTOC is not positive in the fit window")
    slope, _ = np.polyfit(t_grid[mask], np.log(total[mask]), 1)
    return float(slope)
