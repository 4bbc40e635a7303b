"""First-principles disorder Monte Carlo for the microscopic model.

N sites host four Majorana flavors each (mode index 4*i + a).  Brownian
couplings are held constant over each step [t, t + dt) with variance
(q-1)! J / (N^{q-1} dt), the Ito-consistent discretization of white-noise
couplings, and the step evolution is the exact unitary of the assembled
Hamiltonian.

Majorana operators and their products are generalized permutation matrices
(Jordan-Wigner Pauli strings / sqrt(2)); they are stored as
(flip-mask, phase-vector) pairs so a step Hamiltonian assembles in O(dim)
per term and operator application never needs a dense product.

Per-sample RNG streams derive from SeedSequence(master_seed).spawn(), so
results are deterministic and independent of scheduling.  Draw order per
sample: trace vectors first (dim > 256 only), then couplings step by step.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np
from scipy.linalg import eigh

DENSE_TRACE_DIM = 256   # above this, traces switch to random-phase vectors
N_TRACE_VECTORS = 8


@dataclass(frozen=True)
class McConfig:
    n_sites: int
    q: int
    J: float
    U: float
    dt: float
    t_max: float
    n_samples: int
    master_seed: int

    def __post_init__(self):
        if self.q < 2:
            raise ValueError(f"q must be >= 2, got {self.q}")
        if self.n_sites < self.q:
            raise ValueError(f"n_sites={self.n_sites} must be >= q={self.q}")
        if 4 * self.n_sites > 20:
            raise ValueError(f"4*n_sites={4 * self.n_sites} exceeds the dense limit 20")
        if self.J < 0 or self.U < 0:
            raise ValueError("J and U must be nonnegative")
        if self.dt <= 0 or self.t_max <= 0:
            raise ValueError("dt and t_max must be positive")
        if self.dt * max(self.J, self.U) > 0.05 + 1e-12:
            raise ValueError(
                f"dt*max(J,U)={self.dt * max(self.J, self.U):.4g} > 0.05: "
                f"discretization too coarse")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")

    @property
    def n_modes(self):
        return 4 * self.n_sites

    @property
    def dim(self):
        return 2 ** (2 * self.n_sites)

    @property
    def n_steps(self):
        return int(round(self.t_max / self.dt))

    @property
    def gamma0(self):
        return self.J / 2.0 ** (self.q - 1)


@dataclass(frozen=True)
class McEstimate:
    t_grid: np.ndarray
    mean: np.ndarray
    std_error: np.ndarray
    n_samples_used: int
    median: np.ndarray = None


@lru_cache(maxsize=4)
def _pauli_majoranas(n_modes):
    """(flip, phase) pairs of the Pauli strings sqrt(2)*chi; op|j> = ph[j]|j^flip>.

    Phases are exactly unit (+-1, +-i), so traces of string products stay
    exact; the Majorana normalization chi = string / sqrt(2) is reinstated
    by explicit 2^(-q/2) scale factors at assembly time.
    """
    n_qubits = n_modes // 2
    dim = 1 << n_qubits
    idx = np.arange(dim)
    bit = [(idx >> (n_qubits - 1 - j)) & 1 for j in range(n_qubits)]
    ops = []
    for k in range(n_modes):
        j, r = divmod(k, 2)
        ph = np.ones(dim, dtype=complex)
        for jz in range(j):
            ph = ph * np.where(bit[jz] == 1, -1.0, 1.0)
        if r == 1:  # Y instead of X on qubit j
            ph = ph * (1j * np.where(bit[j] == 1, -1.0, 1.0))
        f = 1 << (n_qubits - 1 - j)
        ph.setflags(write=False)
        ops.append((f, ph))
    return tuple(ops), dim


def _compose(ops, dim):
    """Matrix product of (flip, phase) ops, leftmost factor outermost."""
    idx = np.arange(dim)
    flip = 0
    phase = np.ones(dim, dtype=complex)
    for f, ph in reversed(ops):
        phase = phase * ph[idx ^ flip]
        flip ^= f
    return flip, phase


@lru_cache(maxsize=4)
def _model_terms(n_sites, q):
    """SYK basis terms (with the Hermiticity phase folded in) and Hubbard terms."""
    ops, dim = _pauli_majoranas(4 * n_sites)
    mode = lambda i, a: 4 * i + a
    herm_phase = 1j ** ((q * (q - 1)) // 2)
    syk = []
    for a in range(4):
        for combo in combinations(range(n_sites), q):
            f, ph = _compose([ops[mode(i, a)] for i in combo], dim)
            syk.append((f, herm_phase * ph))
    hub = []
    for i in range(n_sites):
        f, ph = _compose([ops[mode(i, a)] for a in range(4)], dim)
        hub.append((f, ph))
    return tuple(syk), tuple(hub), dim


def n_coupling_draws(cfg: McConfig) -> int:
    """Independent Gaussian draws per step: 4 flavors x C(n_sites, q) index sets."""
    return 4 * math.comb(cfg.n_sites, cfg.q)


def coupling_sigma(cfg: McConfig) -> float:
    """Std dev of one Brownian coupling over a step of length dt."""
    return math.sqrt(math.factorial(cfg.q - 1) * cfg.J
                     / (cfg.n_sites ** (cfg.q - 1) * cfg.dt))


def sample_couplings(cfg: McConfig, rng) -> np.ndarray:
    """One step's coupling tensor, shape (4, C(n_sites, q)), flavor-major order."""
    return rng.normal(0.0, coupling_sigma(cfg),
                      size=(4, math.comb(cfg.n_sites, cfg.q)))


def _assemble_h(cfg, couplings):
    syk, hub, dim = _model_terms(cfg.n_sites, cfg.q)
    scale = 2.0 ** (-cfg.q / 2.0)     # q Majorana factors of 1/sqrt(2)
    cols = np.arange(dim)
    h = np.zeros((dim, dim), dtype=complex)
    for c, (f, ph) in zip(couplings.ravel(), syk):
        h[cols ^ f, cols] += (c * scale) * ph
    for f, ph in hub:
        h[cols ^ f, cols] += (cfg.U / 4.0) * ph
    return h


def _step_w(cfg, couplings):
    h = _assemble_h(cfg, couplings)
    w, v = eigh(h)
    return (v * np.exp(-1j * w * cfg.dt)) @ v.conj().T


def step_unitary(cfg: McConfig, couplings) -> np.ndarray:
    """exp(-i H_step dt) for one step's couplings; unitary to 1e-11."""
    couplings = np.asarray(couplings, dtype=float)
    expected = (4, math.comb(cfg.n_sites, cfg.q))
    if couplings.shape != expected:
        raise ValueError(f"couplings shape {couplings.shape} != {expected}")
    w = _step_w(cfg, couplings)
    defect = np.linalg.norm(w.conj().T @ w - np.eye(w.shape[0]))
    if defect > 1e-11:
        raise ArithmeticError(f"step unitarity defect {defect:.3e} > 1e-11")
    return w


def _apply_terms(cfg, couplings, block):
    """H_step @ block using the permutation structure (matrix-free path)."""
    syk, hub, dim = _model_terms(cfg.n_sites, cfg.q)
    scale = 2.0 ** (-cfg.q / 2.0)
    out = np.zeros_like(block)
    scratch = np.empty_like(block)
    for c, (f, ph) in zip(couplings.ravel(), syk):
        np.multiply(ph[:, None], block, out=scratch)
        out[np.arange(dim) ^ f, :] += (c * scale) * scratch
    for f, ph in hub:
        np.multiply(ph[:, None], block, out=scratch)
        out[np.arange(dim) ^ f, :] += (cfg.U / 4.0) * scratch
    return out


def _taylor_step(cfg, couplings, block):
    """exp(-i H dt) @ block by a truncated Taylor series (tol 1e-14)."""
    result = block.copy()
    term = block
    norm0 = np.linalg.norm(block)
    for k in range(1, 60):
        term = (-1j * cfg.dt / k) * _apply_terms(cfg, couplings, term)
        result += term
        if np.linalg.norm(term) <= 1e-14 * max(norm0, np.linalg.norm(result)):
            return result
    raise ArithmeticError("Taylor step did not converge in 60 terms")


def _chi0_apply(cfg, mat, side):
    """The Pauli string sqrt(2)*chi_{site 0, flavor 0} applied to a matrix.

    Exact unit phases; callers of paired applications divide by 2 once to
    restore the Majorana normalization.
    """
    ops, dim = _pauli_majoranas(cfg.n_modes)
    f, ph = ops[0]
    cols = np.arange(dim)
    if side == "left":
        return (ph[:, None] * mat)[cols ^ f, :]
    return mat[:, cols ^ f] * ph[None, :]


def _sample_streams(cfg):
    return np.random.SeedSequence(cfg.master_seed).spawn(cfg.n_samples)


def greens_mc(cfg: McConfig) -> McEstimate:
    """Disorder-averaged two-point function on the step grid.

    Exact trace of U^dag chi U chi for dim <= 256; above that, a Hutchinson
    estimate with N_TRACE_VECTORS random-phase vectors per sample (its
    spread is folded into std_error through the sample-to-sample variance).
    """
    n = cfg.n_steps
    t_grid = np.arange(n + 1) * cfg.dt
    dim = cfg.dim
    estimates = np.empty((cfg.n_samples, n + 1))
    for s, stream in enumerate(_sample_streams(cfg)):
        rng = np.random.default_rng(stream)
        if dim <= DENSE_TRACE_DIM:
            u = np.eye(dim, dtype=complex)
            for k in range(n + 1):
                chi_u = _chi0_apply(cfg, u, "left")
                u_chi = _chi0_apply(cfg, u, "right")
                estimates[s, k] = np.vdot(chi_u, u_chi).real / (2 * dim)
                if k < n:
                    u = _step_w(cfg, sample_couplings(cfg, rng)) @ u
            defect = np.linalg.norm(u.conj().T @ u - np.eye(dim))
            if defect > 1e-9:
                raise ArithmeticError(
                    f"accumulated evolution lost unitarity: {defect:.3e}")
        else:
            z = np.exp(2j * np.pi * rng.random((dim, N_TRACE_VECTORS)))
            block = np.concatenate([z, _chi0_apply(cfg, z, "left")], axis=1)
            for k in range(n + 1):
                phi = block[:, :N_TRACE_VECTORS]
                chi_psi = _chi0_apply(cfg, block[:, N_TRACE_VECTORS:], "left")
                vals = np.einsum("il,il->l", phi.conj(), chi_psi).real / (2 * dim)
                estimates[s, k] = vals.mean()
                if k < n:
                    block = _taylor_step(cfg, sample_couplings(cfg, rng), block)
    mean = estimates.mean(axis=0)
    if cfg.n_samples > 1:
        std_error = estimates.std(axis=0, ddof=1) / math.sqrt(cfg.n_samples)
    else:
        std_error = np.zeros_like(mean)
    return McEstimate(t_grid=t_grid, mean=mean, std_error=std_error,
                      n_samples_used=cfg.n_samples)


def sff_mc(cfg: McConfig, T: float) -> McEstimate:
    """Disorder-averaged |Tr U(t)|^2 on the step grid up to T.

    Means and medians are both reported (small-N fluctuations are large).
    At T = 0 the value is dim^2 = 16^n_sites exactly, so ln(SFF)/n_sites
    is 4 ln 2.  For dim > 256 an unbiased two-half-batch random-phase
    product replaces the exact trace.
    """
    if T < 0 or T > cfg.t_max + 1e-12:
        raise ValueError(f"T={T} outside [0, t_max={cfg.t_max}]")
    n = int(round(T / cfg.dt))
    t_grid = np.arange(n + 1) * cfg.dt
    dim = cfg.dim
    estimates = np.empty((cfg.n_samples, n + 1))
    half = N_TRACE_VECTORS // 2
    for s, stream in enumerate(_sample_streams(cfg)):
        rng = np.random.default_rng(stream)
        if dim <= DENSE_TRACE_DIM:
            u = np.eye(dim, dtype=complex)
            for k in range(n + 1):
                tr = np.trace(u)
                estimates[s, k] = (tr * tr.conjugate()).real
                if k < n:
                    u = _step_w(cfg, sample_couplings(cfg, rng)) @ u
        else:
            z = np.exp(2j * np.pi * rng.random((dim, N_TRACE_VECTORS)))
            block = z.copy()
            for k in range(n + 1):
                tr_each = np.einsum("il,il->l", z.conj(), block)
                t1 = tr_each[:half].mean()
                t2 = tr_each[half:].mean()
                estimates[s, k] = (t1 * t2.conjugate()).real
                if k < n:
                    block = _taylor_step(cfg, sample_couplings(cfg, rng), block)
    mean = estimates.mean(axis=0)
    if cfg.n_samples > 1:
        std_error = estimates.std(axis=0, ddof=1) / math.sqrt(cfg.n_samples)
    else:
        std_error = np.zeros_like(mean)
    return McEstimate(t_grid=t_grid, mean=mean, std_error=std_error,
                      n_samples_used=cfg.n_samples, median=np.median(estimates, axis=0))
