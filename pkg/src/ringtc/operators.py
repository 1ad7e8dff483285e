"""Second-quantized operators on momentum-sector bases.

States live in a direct sum of (N, K) sectors.  The Hamiltonian on the unit
ring with flux alpha is

    H = sum_l 0.5*(2*pi*l - alpha)**2 * n_l
        + (g0/2) * sum_{k+l=m+n} adag_k adag_l a_m a_n,

which is block-diagonal in K.  The bosonic field operator at position x is
psi_hat(x) = sum_l exp(i*2*pi*l*x) a_l; applying it removes one particle and
spreads a K block over sectors K - l.
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import kernels
from .fock import ModeWindow, SectorBasis, enumerate_sector

log = logging.getLogger("ringtc.operators")

TWO_PI = 2.0 * np.pi


class BudgetExceededError(RuntimeError):
    """Requested explicit assembly would exceed the configured memory budget."""


class EmptyStateError(RuntimeError):
    """Operation requires at least one particle or nonzero norm."""


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters; g0*(N-1) is the invariant mean-field knob."""

    g0: float
    alpha: float
    n_particles: int
    window: ModeWindow

    @property
    def gn(self) -> float:
        return self.g0 * (self.n_particles - 1)

    @classmethod
    def from_gn(cls, gn: float, n_particles: int, window: ModeWindow,
                alpha: float = 0.0) -> "ModelParams":
        if n_particles < 2:
            raise ValueError("coupling product g0*(N-1) needs N >= 2")
        return cls(g0=gn / (n_particles - 1), alpha=alpha,
                   n_particles=n_particles, window=window)

    def with_particles(self, n_particles: int) -> "ModelParams":
        """Same g0/alpha/window for a different particle count (post-collapse)."""
        return ModelParams(self.g0, self.alpha, n_particles, self.window)


@dataclass
class ManyBodyState:
    """Complex amplitudes over a union of (N, K) sector bases.

    blocks maps K -> complex128 vector aligned with enumerate_sector(N, K,
    window).  States are kept unnormalized where the norm carries meaning
    (detection probabilities); normalization is always explicit.
    """

    n_particles: int
    window: ModeWindow
    blocks: dict[int, np.ndarray]

    def __post_init__(self):
        self.blocks = {
            int(k): np.ascontiguousarray(v, dtype=np.complex128)
            for k, v in self.blocks.items()
        }

    @classmethod
    def from_occupation(cls, occ, window: ModeWindow) -> "ManyBodyState":
        """Unit-amplitude Fock state |n_{l_min}, ..., n_{l_max}>."""
        occ = tuple(int(v) for v in occ)
        if len(occ) != window.size:
            raise ValueError("occupation length does not match window size")
        n = sum(occ)
        k = sum(l * c for l, c in zip(range(window.l_min, window.l_max + 1), occ))
        basis = enumerate_sector(n, k, window)
        vec = np.zeros(basis.dim, dtype=np.complex128)
        vec[basis.index_of(occ)] = 1.0
        return cls(n, window, {k: vec})

    def sectors(self) -> list[int]:
        return sorted(self.blocks)

    def block_norm2(self) -> dict[int, float]:
        return {k: float(np.vdot(v, v).real) for k, v in sorted(self.blocks.items())}

    def norm2(self) -> float:
        return sum(self.block_norm2().values())

    def norm(self) -> float:
        return float(np.sqrt(self.norm2()))

    def dot(self, other: "ManyBodyState") -> complex:
        """<self|other> over the common sectors."""
        acc = 0.0j
        for k in sorted(set(self.blocks) & set(other.blocks)):
            acc += np.vdot(self.blocks[k], other.blocks[k])
        return complex(acc)

    def fidelity(self, other: "ManyBodyState") -> float:
        return abs(self.dot(other)) / (self.norm() * other.norm())

    def scaled(self, factor: complex) -> "ManyBodyState":
        return ManyBodyState(self.n_particles, self.window,
                             {k: factor * v for k, v in self.blocks.items()})

    def normalized(self) -> "ManyBodyState":
        n = self.norm()
        if n < 1e-300:
            raise EmptyStateError("cannot normalize a zero state")
        return self.scaled(1.0 / n)

    def added(self, other: "ManyBodyState") -> "ManyBodyState":
        if (other.n_particles, other.window) != (self.n_particles, self.window):
            raise ValueError("incompatible states")
        out = {k: v.copy() for k, v in self.blocks.items()}
        for k, v in other.blocks.items():
            if k in out:
                out[k] = out[k] + v
            else:
                out[k] = v.copy()
        return ManyBodyState(self.n_particles, self.window, out)

    def pruned(self, rel_tol: float = 1e-12) -> "ManyBodyState":
        """Drop blocks whose norm^2 is below rel_tol of the total."""
        total = self.norm2()
        kept = {k: v for k, v in self.blocks.items()
                if np.vdot(v, v).real >= rel_tol * total}
        return ManyBodyState(self.n_particles, self.window, kept)

    def copy(self) -> "ManyBodyState":
        return ManyBodyState(self.n_particles, self.window,
                             {k: v.copy() for k, v in self.blocks.items()})


@dataclass
class OneBodyDensityMatrix:
    """Matrix of <adag_k a_l> over the mode window (Hermitian by construction)."""

    rho1: np.ndarray
    window: ModeWindow

    @property
    def trace(self) -> float:
        return float(np.trace(self.rho1).real)

    def occupations(self) -> np.ndarray:
        return np.diag(self.rho1).real.copy()


def _check_alignment(state: ManyBodyState, params: ModelParams):
    if state.n_particles != params.n_particles or state.window != params.window:
        raise ValueError(
            f"state (N={state.n_particles}, window={state.window}) does not match "
            f"params (N={params.n_particles}, window={params.window})"
        )
    for k, v in state.blocks.items():
        dim = enumerate_sector(state.n_particles, k, state.window).dim
        if v.shape[0] != dim:
            raise ValueError(f"block K={k} has length {v.shape[0]}, basis dim {dim}")


def _require_keys(basis: SectorBasis):
    if basis.keys is None:
        raise NotImplementedError(
            f"window {basis.window} with N={basis.n_particles} exceeds int64 "
            "occupation encoding; narrow the window or reduce N"
        )


def kinetic_energies(basis: SectorBasis, params: ModelParams) -> np.ndarray:
    """Diagonal kinetic energies sum_l 0.5*(2*pi*l - alpha)^2 n_l per basis row."""
    modes = basis.window.modes.astype(np.float64)
    weights = 0.5 * (TWO_PI * modes - params.alpha) ** 2
    return basis.occupations.astype(np.float64) @ weights


def apply_hamiltonian_block(psi: np.ndarray, basis: SectorBasis,
                            params: ModelParams) -> np.ndarray:
    """Matrix-free H action on a single sector block."""
    psi = np.ascontiguousarray(psi, dtype=np.complex128)
    out = kinetic_energies(basis, params) * psi
    if params.g0 != 0.0 and basis.dim:
        _require_keys(basis)
        kernels.interaction_matvec(basis.occupations, basis.keys, basis._pows,
                                   0.5 * params.g0, psi, out)
    return out


def apply_hamiltonian(state: ManyBodyState, params: ModelParams) -> ManyBodyState:
    """H|state>, block-diagonal over K (no stored matrix)."""
    _check_alignment(state, params)
    out = {}
    for k in state.sectors():
        basis = enumerate_sector(state.n_particles, k, state.window)
        out[k] = apply_hamiltonian_block(state.blocks[k], basis, params)
    return ManyBodyState(state.n_particles, state.window, out)


def energy_expectation(state: ManyBodyState, params: ModelParams) -> float:
    """<H> of a (not necessarily normalized) state."""
    h_state = apply_hamiltonian(state, params)
    return state.dot(h_state).real / state.norm2()


def assemble_sparse(params: ModelParams, basis: SectorBasis,
                    max_bytes: int = 2 ** 28) -> sp.csr_matrix:
    """Explicit sector Hamiltonian as a real CSR matrix.

    Validation/diagnostic path; refuses (BudgetExceededError) when the
    estimated CSR size exceeds max_bytes.
    """
    dim = basis.dim
    kin = kinetic_energies(basis, params)
    if params.g0 == 0.0 or dim == 0:
        return sp.diags(kin, format="csr")
    _require_keys(basis)
    counts = kernels.interaction_csr_count(basis.occupations, basis.keys, basis._pows)
    nnz = int(counts.sum())
    est = nnz * 12 + (dim + 1) * 8 + dim * 12  # data+indices, indptr, diagonal
    if est > max_bytes:
        raise BudgetExceededError(
            f"sector (N={basis.n_particles}, K={basis.k_total}) dim={dim}: "
            f"assembly needs ~{est / 1e6:.0f} MB > budget {max_bytes / 1e6:.0f} MB"
        )
    indptr = np.zeros(dim + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    indices = np.empty(nnz, dtype=np.int32)
    data = np.empty(nnz, dtype=np.float64)
    kernels.interaction_csr_fill(basis.occupations, basis.keys, basis._pows,
                                 0.5 * params.g0, indptr, indices, data)
    mat = sp.csr_matrix((data, indices, indptr), shape=(dim, dim))
    mat = mat + sp.diags(kin)
    mat = mat.tocsr()
    mat.sort_indices()
    return mat


def csr_matvec_complex(mat: sp.csr_matrix, v: np.ndarray) -> np.ndarray:
    """Real CSR times complex vector without upcasting the matrix."""
    return (mat @ np.ascontiguousarray(v.real)) + 1j * (mat @ np.ascontiguousarray(v.imag))


@functools.lru_cache(maxsize=512)
def _annihilation_map(n_particles: int, k_total: int, window: ModeWindow, l: int):
    """Index map realizing a_l from sector (N, K) into (N-1, K-l).

    Returns (src_rows, dst_rows, amplitudes) with amplitudes sqrt(n_l); the
    map is injective so scatter assignment needs no duplicate handling.
    """
    src = enumerate_sector(n_particles, k_total, window)
    dst = enumerate_sector(n_particles - 1, k_total - l, window)
    j = l - window.l_min
    mask = src.occupations[:, j] > 0
    src_rows = np.nonzero(mask)[0].astype(np.int64)
    occ2 = src.occupations[mask].astype(np.int16)
    occ2[:, j] -= 1
    dst_rows = dst.lookup_rows(occ2)
    if dst_rows.size and dst_rows.min() < 0:
        raise AssertionError("annihilation target missing from destination basis")
    amps = np.sqrt(src.occupations[mask, j].astype(np.float64))
    return src_rows, dst_rows, amps


def annihilate_mode(state: ManyBodyState, l: int) -> ManyBodyState:
    """Un-normalized a_l|state> (one particle removed from mode l)."""
    if state.n_particles < 1:
        raise EmptyStateError("cannot annihilate from the vacuum")
    if l not in state.window:
        raise ValueError(f"mode {l} outside window {state.window}")
    out = {}
    for k in state.sectors():
        src_rows, dst_rows, amps = _annihilation_map(
            state.n_particles, k, state.window, l)
        if src_rows.size == 0:
            continue
        dst_dim = enumerate_sector(state.n_particles - 1, k - l, state.window).dim
        buf = np.zeros(dst_dim, dtype=np.complex128)
        buf[dst_rows] = amps * state.blocks[k][src_rows]
        tgt = k - l
        if tgt in out:
            out[tgt] += buf
        else:
            out[tgt] = buf
    return ManyBodyState(state.n_particles - 1, state.window, out)


def apply_field_annihilation(state: ManyBodyState, x: float) -> ManyBodyState:
    """Un-normalized psi_hat(x)|state>; norm^2 equals the density at x."""
    if state.n_particles < 1:
        raise EmptyStateError("cannot apply the field operator to the vacuum")
    out: dict[int, np.ndarray] = {}
    for l in range(state.window.l_min, state.window.l_max + 1):
        phase = np.exp(1j * TWO_PI * l * x)
        for k in state.sectors():
            src_rows, dst_rows, amps = _annihilation_map(
                state.n_particles, k, state.window, l)
            if src_rows.size == 0:
                continue
            tgt = k - l
            if tgt not in out:
                dst_dim = enumerate_sector(state.n_particles - 1, tgt, state.window).dim
                out[tgt] = np.zeros(dst_dim, dtype=np.complex128)
            # dst_rows are unique within one (l, K) map, so += is safe here
            out[tgt][dst_rows] += phase * amps * state.blocks[k][src_rows]
    return ManyBodyState(state.n_particles - 1, state.window, out)


def obdm(state: ManyBodyState) -> OneBodyDensityMatrix:
    """One-body density matrix rho1[k, l] = <adag_k a_l>.

    Computed as the Gram matrix of the annihilated states a_l|psi>, which is
    Hermitian by construction; trace equals N * norm^2 of the input.
    """
    w = state.window.size
    rho = np.zeros((w, w), dtype=np.complex128)
    if state.n_particles == 0:
        return OneBodyDensityMatrix(rho, state.window)
    annihilated = [annihilate_mode(state, l)
                   for l in range(state.window.l_min, state.window.l_max + 1)]
    for a in range(w):
        for b in range(a, w):
            val = annihilated[a].dot(annihilated[b])
            rho[a, b] = val
            if b != a:
                rho[b, a] = np.conj(val)
    return OneBodyDensityMatrix(rho, state.window)


def density_from_obdm(rho: OneBodyDensityMatrix, grid: np.ndarray) -> np.ndarray:
    """Particle density rho(x) = sum_{kl} exp(i*2*pi*(l-k)*x) rho1[k,l].

    Integrates to trace(rho1) over the ring; the result is real up to
    rounding and is returned as a real array.
    """
    grid = np.asarray(grid, dtype=np.float64)
    phases = np.exp(1j * TWO_PI * np.outer(grid, rho.window.modes))
    dens = np.einsum("xk,kl,xl->x", phases.conj(), rho.rho1, phases,
                     optimize=True).real
    return dens


def apply_boost(state: ManyBodyState, m: int,
                leak_warn: float = 1e-12) -> ManyBodyState:
    """Shift every mode index by m: n_l -> n_{l-m}, K -> K + m*N.

    Amplitude on occupations that would leave the window is dropped; the
    leaked norm is logged as a warning above leak_warn.
    """
    if m == 0:
        return state.copy()
    w = state.window.size
    out: dict[int, np.ndarray] = {}
    leaked = 0.0
    for k in state.sectors():
        basis = enumerate_sector(state.n_particles, k, state.window)
        occ = basis.occupations
        if m > 0:
            valid = ~occ[:, w - m:].any(axis=1)
            shifted = np.zeros_like(occ)
            shifted[:, m:] = occ[:, : w - m]
        else:
            valid = ~occ[:, : -m].any(axis=1)
            shifted = np.zeros_like(occ)
            shifted[:, :m] = occ[:, -m:]
        vec = state.blocks[k]
        leaked += float(np.sum(np.abs(vec[~valid]) ** 2))
        if not valid.any():
            continue
        tgt = k + m * state.n_particles
        dst = enumerate_sector(state.n_particles, tgt, state.window)
        rows = dst.lookup_rows(shifted[valid])
        buf = np.zeros(dst.dim, dtype=np.complex128)
        buf[rows] = vec[valid]
        if tgt in out:
            out[tgt] += buf
        else:
            out[tgt] = buf
    if leaked > leak_warn:
        log.warning("boost by m=%d leaked norm^2 %.3e outside window %s",
                    m, leaked, state.window)
    return ManyBodyState(state.n_particles, state.window, out)


def clear_operator_caches():
    _annihilation_map.cache_clear()
