"""Dense Majorana operators and the small-matrix kernels built on them.

Operators are plain complex ndarrays.  Majorana modes use the fixed
Jordan-Wigner ordering

    chi_{2j}   = Z^{(x)j} X_j / sqrt(2),
    chi_{2j+1} = Z^{(x)j} Y_j / sqrt(2),

i.e. mode k lives on qubit k // 2, with a Z string on all earlier qubits
and qubit 0 as the most significant tensor factor.  The 1/sqrt(2) makes
chi^2 = I/2, so {chi_i, chi_j} = delta_ij * I.  Every sign convention
downstream inherits from this ordering.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm as _scipy_expm

from .errors import SingularResolventError

MAX_MODES = 20  # dim 2^(n/2) <= 1024

_PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
_PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
_IDENT2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class MajoranaSet:
    """n_modes Hermitian operators with {chi_i, chi_j} = delta_ij * I."""

    n_modes: int
    dim: int
    ops: tuple

    def __iter__(self):
        return iter(self.ops)

    def __getitem__(self, k):
        return self.ops[k]


def anticommutator(a, b):
    return a @ b + b @ a


def commutator(a, b):
    return a @ b - b @ a


def is_hermitian(a, tol=1e-12):
    return np.abs(a - a.conj().T).max() <= tol


def is_antihermitian(a, tol=1e-12):
    return np.abs(a + a.conj().T).max() <= tol


@lru_cache(maxsize=8)
def build_majoranas(n_modes: int) -> MajoranaSet:
    """Dense Jordan-Wigner representation of n_modes Majorana operators.

    Deterministic: identical calls return the identical (cached, read-only)
    operator set.  n_modes must be even and at most MAX_MODES.
    """
    if not isinstance(n_modes, (int, np.integer)):
        raise ValueError(f"n_modes must be an integer, got {n_modes!r}")
    if n_modes <= 0 or n_modes % 2 != 0:
        raise ValueError(f"n_modes must be even and positive, got {n_modes}")
    if n_modes > MAX_MODES:
        raise ValueError(f"n_modes={n_modes} exceeds the dense limit {MAX_MODES}")
    n_qubits = n_modes // 2
    ops = []
    for k in range(n_modes):
        j, r = divmod(k, 2)
        factors = [_PAULI_Z] * j
        factors.append(_PAULI_X if r == 0 else _PAULI_Y)
        factors.extend([_IDENT2] * (n_qubits - j - 1))
        mat = factors[0]
        for f in factors[1:]:
            mat = np.kron(mat, f)
        mat = mat / np.sqrt(2.0)
        mat.setflags(write=False)
        ops.append(mat)
    return MajoranaSet(n_modes=n_modes, dim=2 ** n_qubits, ops=tuple(ops))


def matrix_exponential(a, t=1.0):
    """exp(a * t) for a dense square matrix, valid for non-Hermitian a.

    Backed by scaling-and-squaring with a Pade approximant, so parameter
    degeneracies where a is non-diagonalizable are handled.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    if not np.isfinite(t):
        raise ValueError(f"time must be finite, got {t}")
    return _scipy_expm(a * t)


def resolvent_apply(a, z, v, tol=1e-10):
    """Solve (z - a) x = v with a residual guarantee.

    v may be a vector or a matrix of column vectors.  Raises
    SingularResolventError (carrying the relative residual) when the
    solve cannot meet ||(z - a) x - v|| <= tol * ||v||.
    """
    a = np.asarray(a)
    v = np.asarray(v)
    mat = z * np.eye(a.shape[0], dtype=complex) - a
    vnorm = np.linalg.norm(v)
    if vnorm == 0.0:
        return np.zeros_like(v, dtype=complex)
    try:
        x = np.linalg.solve(mat, v)
    except np.linalg.LinAlgError:
        x = None
    if x is not None:
        residual = np.linalg.norm(mat @ x - v) / vnorm
        if residual <= tol:
            return x
    else:
        residual = np.inf
    # Singular but possibly consistent system (z equal to an eigenvalue whose
    # eigendirections the right-hand side avoids): minimum-norm solution.
    x, *_ = np.linalg.lstsq(mat, v, rcond=1e-12)
    residual = min(residual, np.linalg.norm(mat @ x - v) / vnorm)
    if residual <= tol:
        return x
    raise SingularResolventError(
        f"resolvent solve at z={z} failed: relative residual {residual:.3e} > {tol:.1e}",
        residual=residual,
    )


def null_space(a, tol):
    """Orthonormal basis (columns) of the kernel of a, possibly rectangular.

    Keeps right singular vectors whose singular value is <= tol * smax.
    An empty kernel yields a (n, 0) array, not an error.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    a = np.asarray(a)
    if a.shape[0] >= a.shape[1]:
        # tall stack: the economy decomposition already carries all of vh
        _, s, vh = np.linalg.svd(a, full_matrices=False)
    else:
        _, s, vh = np.linalg.svd(a, full_matrices=True)
    n = a.shape[1]
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        return np.eye(n, dtype=complex)
    n_small = int(np.sum(s <= tol * smax))
    n_missing = n - s.size  # columns beyond the rank bound are exact kernel
    n_null = n_small + max(n_missing, 0)
    if n_null == 0:
        return np.zeros((n, 0), dtype=complex)
    return vh[n - n_null:].conj().T
