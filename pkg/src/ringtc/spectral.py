"""Sector eigensolvers and time propagation.

Ground states come from Lanczos with full reorthogonalization run per
momentum sector.  Propagation is exp(-i*H*t) block by block: small blocks use
a cached dense eigendecomposition (one eigh amortized over all output times),
large blocks use an adaptive short-iterate Krylov (Lanczos) stepper.  Sector
matrices are real symmetric, so heavy linear algebra stays in float64 and
complex vectors are handled by splitting real/imaginary parts.
"""

from __future__ import annotations

import logging
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .fock import SectorBasis, enumerate_sector
from .operators import (
    BudgetExceededError,
    ManyBodyState,
    ModelParams,
    _check_alignment,
    apply_hamiltonian_block,
    assemble_sparse,
    csr_matvec_complex,
    kinetic_energies,
)

log = logging.getLogger("ringtc.spectral")

# Blocks up to this dimension are propagated through a dense eigendecomposition.
EIGEN_DIM_LIMIT = 4000
# Dense full-spectrum requests above this are refused.
DENSE_SPECTRUM_LIMIT = 4600
# Byte budgets for the in-process operator caches.
CSR_CACHE_BYTES = 1_000_000_000
EIG_CACHE_BYTES = 400_000_000
SECTOR_CSR_BUDGET = 600_000_000


@dataclass
class EigenResult:
    """Lowest eigenpair of one sector block."""

    energy: float
    vector: ManyBodyState
    residual: float
    iterations: int


@dataclass
class PropagatorConfig:
    """Time-propagation policy.

    method "eigenbasis" diagonalizes blocks up to EIGEN_DIM_LIMIT once and
    reuses the decomposition for every requested time (larger blocks fall
    back to krylov with a logged notice); "krylov" always uses the adaptive
    Lanczos stepper.  step is the largest Krylov substep attempted, tol the
    local error tolerance per substep.
    """

    method: str = "eigenbasis"
    krylov_dim: int = 30
    step: float = 1.0 / (2.0 * np.pi) / 40.0
    tol: float = 1e-12

    def __post_init__(self):
        if self.method not in ("eigenbasis", "krylov"):
            raise ValueError(f"unknown propagator method {self.method!r}")
        if self.krylov_dim < 2:
            raise ValueError("krylov_dim must be >= 2")
        if self.tol <= 0 or self.step <= 0:
            raise ValueError("step and tol must be positive")


class _ByteBudgetCache:
    """LRU cache evicting by total payload bytes."""

    def __init__(self, max_bytes: int):
        self.max_bytes = max_bytes
        self._data: OrderedDict = OrderedDict()
        self._bytes = 0

    def get(self, key):
        if key in self._data:
            self._data.move_to_end(key)
            return self._data[key][0]
        return None

    def put(self, key, value, nbytes: int):
        if key in self._data:
            self._bytes -= self._data[key][1]
        self._data[key] = (value, nbytes)
        self._bytes += nbytes
        while self._bytes > self.max_bytes and len(self._data) > 1:
            _, (_, freed) = self._data.popitem(last=False)
            self._bytes -= freed

    def clear(self):
        self._data.clear()
        self._bytes = 0


_csr_cache = _ByteBudgetCache(CSR_CACHE_BYTES)
_eig_cache = _ByteBudgetCache(EIG_CACHE_BYTES)


def clear_spectral_caches():
    _csr_cache.clear()
    _eig_cache.clear()


def _block_matvec(params: ModelParams, basis: SectorBasis):
    """Complex matvec closure for one sector; CSR-backed when it fits."""
    key = (params, basis.k_total)
    mat = _csr_cache.get(key)
    if mat is None:
        try:
            mat = assemble_sparse(params, basis, max_bytes=SECTOR_CSR_BUDGET)
            nbytes = mat.data.nbytes + mat.indices.nbytes + mat.indptr.nbytes
            _csr_cache.put(key, mat, nbytes)
        except BudgetExceededError:
            log.info("sector K=%d dim=%d: CSR over budget, using matrix-free apply",
                     basis.k_total, basis.dim)
            return lambda v: apply_hamiltonian_block(v, basis, params), None
    return (lambda v: csr_matvec_complex(mat, v)), mat


def _real_matvec(params: ModelParams, basis: SectorBasis):
    matvec, mat = _block_matvec(params, basis)
    if mat is not None:
        return (lambda v: mat @ v), mat
    return (lambda v: apply_hamiltonian_block(v.astype(np.complex128),
                                              basis, params).real), None


def ground_of_sector(basis: SectorBasis, params: ModelParams,
                     tol: float = 1e-10, max_iter: int = 600) -> EigenResult:
    """Lowest eigenpair of one momentum sector.

    Lanczos with full (two-pass) reorthogonalization; the sector matrix is
    real symmetric so the iteration runs in float64.  Convergence is checked
    on the true residual ||H v - E v||.  A quasi-degenerate pair of lowest
    Ritz values (gap < 1e-10) is reported via the log; the first converged
    vector is returned deterministically.
    """
    dim = basis.dim
    if dim == 0:
        raise ValueError(f"empty sector basis {basis!r}")
    matvec, _ = _real_matvec(params, basis)
    if dim == 1:
        v = np.ones(1)
        energy = float(matvec(v)[0])
        state = ManyBodyState(basis.n_particles, basis.window,
                              {basis.k_total: v.astype(np.complex128)})
        return EigenResult(energy, state, 0.0, 1)

    rng = np.random.default_rng(0x52544331)  # fixed seed: deterministic restarts
    v = rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    vecs = [v]
    alphas: list[float] = []
    betas: list[float] = []
    energy = np.inf
    ritz = None
    m_max = min(max_iter, dim)
    for it in range(1, m_max + 1):
        w = matvec(vecs[-1])
        a = float(np.dot(vecs[-1], w))
        alphas.append(a)
        w = w - a * vecs[-1]
        if len(vecs) > 1:
            w = w - betas[-1] * vecs[-2]
        # full reorthogonalization, two passes
        basis_mat = np.asarray(vecs).T
        for _ in range(2):
            w = w - basis_mat @ (basis_mat.T @ w)
        b = float(np.linalg.norm(w))
        theta, s = _lowest_ritz(alphas, betas)
        est = (b * abs(s[-1])) if b > 0 else 0.0
        if est < 0.5 * tol or b < 1e-13 or it == m_max:
            ritz = basis_mat @ s
            ritz /= np.linalg.norm(ritz)
            resid = float(np.linalg.norm(matvec(ritz) - theta * ritz))
            energy = theta
            if resid < tol or b < 1e-13:
                _report_degeneracy(alphas, betas)
                vec = ManyBodyState(basis.n_particles, basis.window,
                                    {basis.k_total: ritz.astype(np.complex128)})
                return EigenResult(float(energy), vec, resid, it)
            if it == m_max:
                raise RuntimeError(
                    f"Lanczos did not converge in {it} iterations "
                    f"(best residual {resid:.3e}, tol {tol:.1e})"
                )
        betas.append(b)
        vecs.append(w / b)
    raise RuntimeError("unreachable")


def _lowest_ritz(alphas, betas):
    """Lowest eigenvalue and eigenvector of the current tridiagonal matrix."""
    m = len(alphas)
    if m == 1:
        return alphas[0], np.ones(1)
    w, v = sla.eigh_tridiagonal(np.asarray(alphas), np.asarray(betas[: m - 1]),
                                select="i", select_range=(0, 0))
    return float(w[0]), v[:, 0]


def _report_degeneracy(alphas, betas):
    m = len(alphas)
    if m < 2:
        return
    w = sla.eigh_tridiagonal(np.asarray(alphas), np.asarray(betas[: m - 1]),
                             select="i", select_range=(0, 1),
                             eigvals_only=True)
    if len(w) == 2 and w[1] - w[0] < 1e-10:
        log.warning("quasi-degenerate ground state: gap %.3e", w[1] - w[0])


def spectrum_of_sector(basis: SectorBasis, params: ModelParams,
                       max_dim: int = DENSE_SPECTRUM_LIMIT):
    """Full dense eigendecomposition (eigenvalues, eigenvectors) of a sector."""
    if basis.dim > max_dim:
        raise BudgetExceededError(
            f"dense spectrum refused: dim {basis.dim} > limit {max_dim}")
    mat = assemble_sparse(params, basis, max_bytes=SECTOR_CSR_BUDGET).toarray()
    w, v = sla.eigh(mat)
    return w, v


def _eigendecomposition(params: ModelParams, basis: SectorBasis):
    key = (params, basis.k_total)
    entry = _eig_cache.get(key)
    if entry is None:
        w, v = spectrum_of_sector(basis, params, max_dim=EIGEN_DIM_LIMIT)
        entry = (w, v)
        _eig_cache.put(key, entry, w.nbytes + v.nbytes)
    return entry


def _real_mat_complex_vec(mat: np.ndarray, v: np.ndarray) -> np.ndarray:
    return (mat @ v.real) + 1j * (mat @ v.imag)


def _evolve_block_eigenbasis(psi, basis, params, t):
    w, v = _eigendecomposition(params, basis)
    coeff = _real_mat_complex_vec(v.T, psi)
    coeff *= np.exp(-1j * w * t)
    return _real_mat_complex_vec(v, coeff)


def _evolve_block_krylov(psi, basis, params, t, cfg: PropagatorConfig):
    matvec, _ = _block_matvec(params, basis)
    return _krylov_expm(matvec, psi, t, cfg)


def _krylov_expm(matvec, psi, t, cfg: PropagatorConfig):
    """exp(-i*H*t) psi via adaptive Lanczos stepping (H Hermitian).

    Per substep tau the error is estimated from the next-basis-vector weight
    beta * |last component of exp(-i*tau*T) e1|; substeps shrink until the
    estimate is below cfg.tol (scaled per unit time) and grow again when the
    estimate is very small.
    """
    remaining = float(t)
    tau = min(cfg.step, remaining)
    v = psi.astype(np.complex128, copy=True)
    norm0 = np.linalg.norm(v)
    if norm0 == 0.0 or remaining == 0.0:
        return v
    while remaining > 1e-16 * t:
        tau = min(tau, remaining)
        alphas, betas, vmat, breakdown = _lanczos_basis(matvec, v, cfg.krylov_dim)
        while True:
            coeff, err = _tridiag_phase(alphas, betas, tau, breakdown)
            if err <= cfg.tol * max(tau / t, 1e-3) or breakdown:
                break
            tau *= 0.5
            if tau < 1e-12 * max(t, 1.0):
                raise RuntimeError("Krylov substep underflow; raise krylov_dim")
        v = np.linalg.norm(v) * (vmat @ coeff)
        remaining -= tau
        if err < 0.01 * cfg.tol * max(tau / t, 1e-3):
            tau *= 1.5
    return v


def _lanczos_basis(matvec, v, m):
    """Orthonormal Krylov basis and tridiagonal coefficients from v."""
    dim = v.shape[0]
    nv = np.linalg.norm(v)
    vmat = np.empty((dim, m), dtype=np.complex128)
    vmat[:, 0] = v / nv
    alphas = []
    betas = []
    breakdown = False
    k = 1
    for j in range(m):
        w = matvec(vmat[:, j])
        a = float(np.vdot(vmat[:, j], w).real)
        alphas.append(a)
        w = w - a * vmat[:, j]
        if j > 0:
            w = w - betas[-1] * vmat[:, j - 1]
        # full reorthogonalization within the small basis
        active = vmat[:, : j + 1]
        w = w - active @ (active.conj().T @ w)
        b = float(np.linalg.norm(w))
        if j == m - 1:
            betas.append(b)
            break
        if b < 1e-14 * max(abs(a), 1.0):
            breakdown = True
            break
        betas.append(b)
        vmat[:, j + 1] = w / b
        k += 1
    return np.asarray(alphas), np.asarray(betas), vmat[:, :k], breakdown


def _tridiag_phase(alphas, betas, tau, breakdown):
    """Coefficients of exp(-i*tau*T) e1 and the Saad-style error estimate."""
    m = len(alphas)
    if m == 1:
        return np.exp(-1j * tau * alphas[:1]), 0.0
    w, s = sla.eigh_tridiagonal(alphas, betas[: m - 1])
    coeff = s @ (np.exp(-1j * tau * w) * s[0, :])
    err = 0.0 if breakdown else float(betas[-1] * abs(coeff[-1]) * tau)
    return coeff, err


def evolve_trajectory(state: ManyBodyState, params: ModelParams,
                      times: np.ndarray, cfg: PropagatorConfig | None = None,
                      ) -> list[ManyBodyState]:
    """States at the requested times, propagated block by block.

    Equivalent to calling evolve for each time but walks one sector through
    the whole time grid before moving to the next, so at most one large
    sector operator needs to be resident at a time.  times must be
    non-decreasing and non-negative.
    """
    times = np.asarray(times, dtype=np.float64)
    if times.size == 0 or times[0] < 0 or np.any(np.diff(times) < 0):
        raise ValueError("times must be non-decreasing and non-negative")
    cfg = cfg or PropagatorConfig()
    _check_alignment(state, params)
    slices: list[dict[int, np.ndarray]] = [{} for _ in times]
    for k in state.sectors():
        basis = enumerate_sector(state.n_particles, k, state.window)
        if basis.dim == 0:
            continue
        psi = state.blocks[k]
        if params.g0 == 0.0:
            kin = kinetic_energies(basis, params)
            for i, t in enumerate(times):
                slices[i][k] = np.exp(-1j * kin * t) * psi
            continue
        use_eigen = cfg.method == "eigenbasis" and basis.dim <= EIGEN_DIM_LIMIT
        if cfg.method == "eigenbasis" and not use_eigen:
            log.info("block K=%d dim=%d above eigenbasis limit %d: krylov",
                     k, basis.dim, EIGEN_DIM_LIMIT)
        if use_eigen:
            w, v = _eigendecomposition(params, basis)
            coeff0 = _real_mat_complex_vec(v.T, psi)
            for i, t in enumerate(times):
                slices[i][k] = _real_mat_complex_vec(v, np.exp(-1j * w * t) * coeff0)
        else:
            cur = psi
            t_prev = 0.0
            for i, t in enumerate(times):
                cur = _evolve_block_krylov(cur, basis, params, float(t - t_prev), cfg) \
                    if t > t_prev else cur.copy()
                t_prev = float(t)
                slices[i][k] = cur
    return [ManyBodyState(state.n_particles, state.window, blocks)
            for blocks in slices]


def evolve(state: ManyBodyState, params: ModelParams, t: float,
           cfg: PropagatorConfig | None = None) -> ManyBodyState:
    """exp(-i*H*t)|state>, each K block propagated independently."""
    if t < 0:
        raise ValueError("propagation time must be non-negative")
    cfg = cfg or PropagatorConfig()
    _check_alignment(state, params)
    if t == 0:
        return state.copy()
    out = {}
    for k in state.sectors():
        basis = enumerate_sector(state.n_particles, k, state.window)
        psi = state.blocks[k]
        if basis.dim == 0:
            continue
        if params.g0 == 0.0:
            # H diagonal in the Fock basis: exact phases
            out[k] = np.exp(-1j * kinetic_energies(basis, params) * t) * psi
        elif cfg.method == "eigenbasis" and basis.dim <= EIGEN_DIM_LIMIT:
            out[k] = _evolve_block_eigenbasis(psi, basis, params, t)
        else:
            if cfg.method == "eigenbasis":
                log.info("block K=%d dim=%d above eigenbasis limit %d: krylov",
                         k, basis.dim, EIGEN_DIM_LIMIT)
            out[k] = _evolve_block_krylov(psi, basis, params, t, cfg)
    return ManyBodyState(state.n_particles, state.window, out)
