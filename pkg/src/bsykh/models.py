"""Model parameters, effective few-Majorana Hamiltonians, EPR boundary states.

Mode layouts are fixed once and for all (flavors a = 0..3 internally):

  single-replica (8 modes):  [L_0..L_3, R_0..R_3],      L_a = ops[a], R_a = ops[4+a]
  two-replica   (16 modes):  blocks (L1, R1, L2, R2),   mode(block, a) = 4*block + a

Only ratio observables are ever reported, so the global phase of each
boundary state is fixed purely for reproducibility (largest amplitude
real positive).  Boundary-state eigenvalues are measured, never assumed;
consumers read them off the returned model.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ConventionMismatchError, PairingError
from .majorana import MajoranaSet, build_majoranas, null_space

H2_BLOCKS = ("L1", "R1", "L2", "R2")
N_FLAVORS = 4


@dataclass(frozen=True)
class ModelParams:
    """Couplings of the Brownian SYK-Hubbard model; the single source of rates.

    J is the Brownian coupling rate, q the interaction body count, U the
    on-site Hubbard strength (hbar = 1).
    """

    J: float
    q: int = 4
    U: float = 0.0

    def __post_init__(self):
        if not isinstance(self.q, (int, np.integer)) or self.q < 2:
            raise ValueError(f"q must be an integer >= 2, got {self.q!r}")
        if not (self.J >= 0.0):
            raise ValueError(f"J must be nonnegative, got {self.J}")
        if not (self.U >= 0.0):
            raise ValueError(f"U must be nonnegative, got {self.U}")

    @property
    def gamma0(self) -> float:
        """Decay rate of the pure Brownian SYK two-point function, J / 2^(q-1)."""
        return self.J / 2.0 ** (self.q - 1)

    @classmethod
    def with_gamma0(cls, gamma0=1.0, q=4, u_over_gamma0=0.0):
        """Build params from the decay rate instead of J (J = gamma0 * 2^(q-1))."""
        return cls(J=gamma0 * 2.0 ** (q - 1), q=q, U=u_over_gamma0 * gamma0)


@dataclass(frozen=True)
class EffectiveModel:
    """A dense (generally non-Hermitian) Hamiltonian with its boundary states.

    boundary_eigenvalues holds the measured eigenvalue of each boundary
    state, boundary_sides records whether it is a right or left eigenstate.
    extremal_eigenvalue is the measured largest real part of the spectrum.
    """

    majoranas: MajoranaSet
    hamiltonian: np.ndarray
    boundary_states: dict = field(default_factory=dict)
    boundary_eigenvalues: dict = field(default_factory=dict)
    boundary_sides: dict = field(default_factory=dict)
    extremal_eigenvalue: float = 0.0


def h2_mode(block, flavor):
    """Majorana index of (branch block, flavor) in the two-replica layout."""
    return 4 * H2_BLOCKS.index(block) + flavor


def _product(ops):
    out = ops[0]
    for op in ops[1:]:
        out = out @ op
    return out


def build_epr_state(majoranas, pairs, tol=1e-10):
    """The unique state annihilated by (chi_p - i chi_r) for every pair (p, r).

    pairs must be disjoint; the stacked annihilation conditions must leave a
    one-dimensional kernel, otherwise PairingError is raised.  The global
    phase makes the largest-magnitude amplitude real positive.
    """
    modes = [m for pr in pairs for m in pr]
    if len(set(modes)) != len(modes):
        raise PairingError(f"pairs are not disjoint: {pairs}")
    rows = np.vstack([majoranas[p] - 1j * majoranas[r] for p, r in pairs])
    kernel = null_space(rows, tol)
    if kernel.shape[1] != 1:
        raise PairingError(
            f"annihilation conditions leave a {kernel.shape[1]}-dimensional kernel "
            f"(expected 1) for pairs {pairs}"
        )
    v = kernel[:, 0]
    k = int(np.argmax(np.abs(v)))
    v = v * (v[k].conjugate() / abs(v[k]))
    v /= np.linalg.norm(v)
    v.setflags(write=False)
    return v


def _measured_right_eigenvalue(h, v):
    val = np.vdot(v, h @ v)
    residual = np.linalg.norm(h @ v - val * v)
    return val, residual


@lru_cache(maxsize=64)
def _build_h1_cached(gamma0, u, lam):
    ms = build_majoranas(8)
    left = ms.ops[:4]
    right = ms.ops[4:]
    h = np.zeros((ms.dim, ms.dim), dtype=complex)
    for a in range(N_FLAVORS):
        h += 0.5j * lam * (left[a] @ right[a])
    h += -1j * u * _product(left) + 1j * u * _product(right)
    epr = build_epr_state(ms, [(a, 4 + a) for a in range(N_FLAVORS)])
    val, residual = _measured_right_eigenvalue(h, epr)
    if residual > 1e-10 or abs(val.imag) > 1e-10:
        raise ConventionMismatchError(
            f"EPR state is not a right eigenstate of the single-replica "
            f"Hamiltonian: residual {residual:.3e}, eigenvalue {val}"
        )
    extremal = float(np.linalg.eigvals(h).real.max())
    h.setflags(write=False)
    return EffectiveModel(
        majoranas=ms,
        hamiltonian=h,
        boundary_states={"EPR": epr},
        boundary_eigenvalues={"EPR": float(val.real)},
        boundary_sides={"EPR": "right"},
        extremal_eigenvalue=extremal,
    )


def build_h1(params: ModelParams, lam: float) -> EffectiveModel:
    """Single-replica effective Hamiltonian at pair-coupling rate lam.

    H = i sum_a (lam/2) L_a R_a - iU L_0 L_1 L_2 L_3 + iU R_0 R_1 R_2 R_3
    on 8 Majorana modes, with boundary state "EPR" pairing (L_a, R_a).
    The physical two-point function uses lam = gamma0.
    """
    if lam < 0:
        raise ValueError(f"lam must be nonnegative, got {lam}")
    return _build_h1_cached(params.gamma0, params.U, lam)


@lru_cache(maxsize=16)
def _build_h2_cached(gamma0, u):
    ms = build_majoranas(16)
    blk = lambda b: ms.ops[4 * b:4 * b + 4]
    l1, r1, l2, r2 = blk(0), blk(1), blk(2), blk(3)
    h = np.zeros((ms.dim, ms.dim), dtype=complex)
    for a in range(N_FLAVORS):
        h += -0.5 * gamma0 * ((l1[a] - 1j * r1[a]) @ (l2[a] - 1j * r2[a]))
        h += 0.5j * gamma0 * (l1[a] @ r1[a] + l2[a] @ r2[a])
    h += -1j * u * _product(l1) + 1j * u * _product(r1)
    h += -1j * u * _product(l2) + 1j * u * _product(r2)

    epr1 = build_epr_state(
        ms,
        [(h2_mode("L1", a), h2_mode("R1", a)) for a in range(N_FLAVORS)]
        + [(h2_mode("L2", a), h2_mode("R2", a)) for a in range(N_FLAVORS)],
    )
    epr2 = build_epr_state(
        ms,
        [(h2_mode("L1", a), h2_mode("R2", a)) for a in range(N_FLAVORS)]
        + [(h2_mode("R1", a), h2_mode("L2", a)) for a in range(N_FLAVORS)],
    )

    val1, res1 = _measured_right_eigenvalue(h, epr1)
    left_image = epr2.conj() @ h
    val2 = (left_image @ epr2) / np.vdot(epr2, epr2).real
    res2 = np.linalg.norm(left_image - val2 * epr2.conj())
    for label, val, res in (("EPR1", val1, res1), ("EPR2", val2, res2)):
        if res > 1e-10 or abs(val.imag) > 1e-10:
            raise ConventionMismatchError(
                f"{label} failed its eigenstate check (residual {res:.3e}, "
                f"eigenvalue {val}); Jordan-Wigner sign conventions are broken"
            )
    if abs(np.vdot(epr2, epr1)) < 1e-14:
        raise ConventionMismatchError("boundary states are orthogonal: <EPR2|EPR1> = 0")

    extremal = float(np.linalg.eigvals(h).real.max())
    h.setflags(write=False)
    return EffectiveModel(
        majoranas=ms,
        hamiltonian=h,
        boundary_states={"EPR1": epr1, "EPR2": epr2},
        boundary_eigenvalues={"EPR1": float(val1.real), "EPR2": float(val2.real)},
        boundary_sides={"EPR1": "right", "EPR2": "left"},
        extremal_eigenvalue=extremal,
    )


def build_h2(params: ModelParams) -> EffectiveModel:
    """Two-replica effective Hamiltonian on 16 Majorana modes.

    Couplings between the two forward (or two backward) branches are
    anti-Hermitian, forward-backward couplings are Hermitian, and each
    branch carries its own Hubbard term.  Boundary states: "EPR1" (a right
    eigenstate) and "EPR2" (a left eigenstate), both measured at 2*gamma0.
    Independent of q; q only rescales kernel prefactors downstream.
    """
    return _build_h2_cached(params.gamma0, params.U)
