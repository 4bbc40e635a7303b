"""Infinite-temperature two-point function and single-particle spectrum.

Both observables come in two independent routes that the test suite pins
against each other: a closed form, and direct evolution under the
single-replica effective Hamiltonian (Fourier-transformed for the
spectrum).  The transform convention is the retarded one,

    rho(omega) = -2 Im G^R(omega),   G^R(t) = -2i theta(t) G(t),

equivalently rho = 4 Re Int_0^inf e^{i omega t} G(t) dt; it is the unique
standard convention that reproduces the closed-form spectrum exactly.
"""

from functools import lru_cache

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import minimize_scalar

from .errors import DegenerateOverlapError, InsufficientWindowError
from .majorana import matrix_exponential
from .models import ModelParams, build_h1

# |gamma0^2 - U^2| below this (relative) switches to the series branch,
# avoiding 0/0 where the Hamiltonian is non-diagonalizable.
_DEGENERACY_CUT = 1e-8


def _sinhc_cosh(x2):
    """(sinh(x)/x, cosh(x)) as functions of x^2, valid for x^2 of either sign."""
    x2 = np.asarray(x2, dtype=float)
    if np.abs(x2).max() < 1e-3:
        sinhc = 1.0 + x2 / 6.0 + x2 ** 2 / 120.0 + x2 ** 3 / 5040.0
        cosh = 1.0 + x2 / 2.0 + x2 ** 2 / 24.0 + x2 ** 3 / 720.0
        return sinhc, cosh
    x = np.sqrt(np.abs(x2))
    pos = x2 >= 0
    sinhc = np.where(pos, np.sinh(np.where(pos, x, 0.0)) / np.where(x == 0, 1.0, x),
                     np.sin(np.where(pos, 0.0, x)) / np.where(x == 0, 1.0, x))
    cosh = np.where(pos, np.cosh(np.where(pos, x, 0.0)), np.cos(np.where(pos, 0.0, x)))
    return sinhc, cosh


def greens_closed(params: ModelParams, t):
    """Closed-form G(t) = (1/2) e^{-g0 t} [g0 sinh(st/2)/s + cosh(st/2)].

    s = sqrt(g0^2 - U^2); the sine/cosine branch is used for U > g0 and an
    explicit series branch at the U = g0 degeneracy.  Accepts scalar or
    array t >= 0.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("t must be nonnegative")
    g0 = params.gamma0
    d = g0 * g0 - params.U * params.U
    # _sinhc_cosh switches to its series for small x^2, which in particular
    # covers the whole degeneracy strip |d| < _DEGENERACY_CUT * g0^2.
    sinhc, cosh = _sinhc_cosh(d * t_arr * t_arr / 4.0)
    out = 0.5 * np.exp(-g0 * t_arr) * (g0 * (t_arr / 2.0) * sinhc + cosh)
    return out if isinstance(t, np.ndarray) else float(out)


@lru_cache(maxsize=16)
def _h1_physical(gamma0, u):
    # q enters only through gamma0 here; lam = gamma0 is the physical point
    return build_h1(ModelParams(J=gamma0 * 8.0, q=4, U=u), lam=gamma0)


def greens_numeric(params: ModelParams, t: float) -> float:
    """G(t) as a ratio of matrix-exponential matrix elements.

    Numerator <EPR| chi_0^L e^{Ht} chi_0^L |EPR>, denominator
    <EPR| e^{Ht} |EPR>.  The denominator is also predicted by the measured
    boundary eigenvalue E as e^{E t}; both paths must agree.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    model = _h1_physical(params.gamma0, params.U)
    epr = model.boundary_states["EPR"]
    chi = model.majoranas[0]
    et = matrix_exponential(model.hamiltonian, t)
    denom = np.vdot(epr, et @ epr)
    if abs(denom) < 1e-14:
        raise DegenerateOverlapError(
            f"normalization <EPR|e^(Ht)|EPR> = {denom} at t={t} is degenerate")
    denom_from_eig = np.exp(model.boundary_eigenvalues["EPR"] * t)
    if abs(denom - denom_from_eig) > 1e-8 * abs(denom):
        raise ArithmeticError(
            f"denominator paths disagree at t={t}: explicit {denom}, "
            f"from measured eigenvalue {denom_from_eig}")
    num = np.vdot(epr, chi @ et @ chi @ epr)
    g = num / denom
    if abs(g.imag) > 1e-9:
        raise ArithmeticError(f"two-point function acquired an imaginary part: {g}")
    return float(g.real)


def decay_and_frequency(params: ModelParams):
    """Late-time decay rate Gamma and oscillation frequency omega of G(t).

    Gamma = 2 g0 - sqrt(g0^2 - U^2) for U <= g0 (omega = 0); for U > g0 the
    rate saturates at 2 g0 and omega = sqrt(U^2 - g0^2) / 2.
    """
    g0 = params.gamma0
    if params.U <= g0:
        return 2.0 * g0 - np.sqrt(g0 * g0 - params.U * params.U), 0.0
    return 2.0 * g0, 0.5 * np.sqrt(params.U * params.U - g0 * g0)


def spectral_closed(params: ModelParams, omega):
    """Closed-form spectral function; positive and even in omega."""
    w2 = np.square(np.asarray(omega, dtype=float))
    g0, u = params.gamma0, params.U
    num = 4.0 * g0 * (9.0 * g0 ** 2 + 3.0 * u * u + 4.0 * w2)
    den = 9.0 * g0 ** 4 + g0 ** 2 * (6.0 * u * u + 40.0 * w2) + (u * u - 4.0 * w2) ** 2
    out = num / den
    return out if isinstance(omega, np.ndarray) else float(out)


def _tail_envelope(params, t):
    """Upper bound on |G| at time t and the late-time rate Gamma."""
    g0, u = params.gamma0, params.U
    gamma, _ = decay_and_frequency(params)
    d = g0 * g0 - u * u
    scale = max(g0 * g0, 1.0e-300)
    if abs(d) < _DEGENERACY_CUT * scale:
        amp = 1.0 + g0 * t / 2.0
    elif d > 0:
        amp = 1.0 + g0 / np.sqrt(d)
    else:
        amp = 1.0 + g0 / np.sqrt(-d)
    return 0.5 * amp * np.exp(-gamma * t / 2.0), gamma


def spectral_numeric(params: ModelParams, omega: float, t_max=None, dt=None,
                     tail_tol=1e-6) -> float:
    """Spectral function from quadrature of the time-domain transform.

    rho(omega) = 4 Int_0^{t_max} cos(omega t) G(t) dt via composite Simpson.
    Defaults (t_max = 40/g0, dt = 0.002/g0) are calibrated so the U = 0
    case, where the transform is analytic, is accurate below 1e-8.
    """
    g0 = params.gamma0
    if g0 <= 0:
        raise ValueError("spectral quadrature requires gamma0 > 0")
    if t_max is None:
        t_max = 40.0 / g0
    if dt is None:
        dt = 0.002 / g0
    if t_max * g0 < 20.0:
        raise ValueError(f"t_max*gamma0 = {t_max * g0:.3f} < 20: window too short")
    if dt <= 0 or dt > t_max / 100.0:
        raise ValueError(f"dt = {dt} is not a sensible quadrature step for t_max = {t_max}")
    env, gamma = _tail_envelope(params, t_max)
    tail = 8.0 * env / gamma
    if tail > tail_tol:
        raise InsufficientWindowError(
            f"truncation estimate {tail:.3e} exceeds tolerance {tail_tol:.1e}; "
            f"increase t_max")
    n = int(np.ceil(t_max / dt))
    n += n % 2  # Simpson wants an even interval count
    t = np.linspace(0.0, t_max, n + 1)
    integrand = 4.0 * np.cos(omega * t) * greens_closed(params, t)
    return float(simpson(integrand, x=t))


def spectral_peaks(params: ModelParams):
    """Frequencies where the closed-form spectrum attains its maxima.

    Returns [0.0] when the global maximum sits at omega = 0, otherwise the
    symmetric pair [-w*, +w*], with w* refined by bracketed maximization to
    1e-8 * gamma0.
    """
    g0 = params.gamma0
    w_hi = 2.0 * g0 + 0.75 * params.U
    grid = np.linspace(0.0, w_hi, 4001)
    vals = spectral_closed(params, grid)
    i = int(np.argmax(vals))
    if i == 0:
        return [0.0]
    lo, hi = grid[i - 1], grid[min(i + 1, grid.size - 1)]
    res = minimize_scalar(lambda w: -spectral_closed(params, w), bounds=(lo, hi),
                          method="bounded", options={"xatol": 1e-10 * g0})
    w_star = float(res.x)
    if w_star <= 1e-8 * g0 or spectral_closed(params, w_star) <= spectral_closed(params, 0.0):
        return [0.0]
    return [-w_star, w_star]
