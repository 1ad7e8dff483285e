"""Truncated bosonic Fock bases on the unit ring, organized by total momentum.

Single-particle modes are plane waves exp(i*2*pi*l*x) with integer mode index
l restricted to a contiguous window [l_min, l_max].  A basis state is an
occupation vector (n_{l_min}, ..., n_{l_max}); the total mode-index sum
K = sum_l l*n_l labels conserved total-momentum sectors (P = 2*pi*K).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

FockOccupation = tuple[int, ...]


@dataclass(frozen=True)
class ModeWindow:
    """Contiguous window of mode indices l_min..l_max (momenta 2*pi*l)."""

    l_min: int
    l_max: int

    def __post_init__(self):
        if self.l_min > self.l_max:
            raise ValueError(f"invalid mode window [{self.l_min}, {self.l_max}]")

    @property
    def size(self) -> int:
        return self.l_max - self.l_min + 1

    @property
    def modes(self) -> np.ndarray:
        return np.arange(self.l_min, self.l_max + 1)

    def widen(self, by: int = 1) -> "ModeWindow":
        return ModeWindow(self.l_min - by, self.l_max + by)

    def __contains__(self, l: int) -> bool:
        return self.l_min <= l <= self.l_max

    def __str__(self) -> str:
        return f"[{self.l_min},{self.l_max}]"


def _key_powers(n_particles: int, size: int) -> np.ndarray | None:
    """Mixed-radix weights encoding an occupation row into one int64.

    Row-major with the first mode most significant, so integer key order
    coincides with lexicographic order of occupation vectors.  Returns None
    when (n_particles+1)**size does not fit in int64 (callers then fall back
    to row-wise comparison).
    """
    base = n_particles + 1
    if size * np.log2(max(base, 2)) >= 63:
        return None
    return (base ** np.arange(size - 1, -1, -1)).astype(np.int64)


@dataclass(eq=False)
class SectorBasis:
    """Ordered occupation basis of one (N, K) momentum sector.

    `occupations` is a (dim, window.size) int16 array whose rows are sorted
    lexicographically; row index is the canonical basis ordinal.
    """

    n_particles: int
    k_total: int
    window: ModeWindow
    occupations: np.ndarray

    def __post_init__(self):
        self.occupations = np.ascontiguousarray(self.occupations, dtype=np.int16)
        pows = _key_powers(self.n_particles, self.window.size)
        if pows is not None:
            self.keys = self.occupations.astype(np.int64) @ pows
            self._pows = pows
        else:
            self.keys = None
            self._pows = None
        self._index: dict[FockOccupation, int] | None = None

    @property
    def dim(self) -> int:
        return self.occupations.shape[0]

    @property
    def states(self) -> list[FockOccupation]:
        return [tuple(int(v) for v in row) for row in self.occupations]

    @property
    def index(self) -> dict[FockOccupation, int]:
        """Occupation tuple -> ordinal map (built lazily)."""
        if self._index is None:
            self._index = {
                tuple(int(v) for v in row): i
                for i, row in enumerate(self.occupations)
            }
        return self._index

    def index_of(self, occ) -> int:
        """Ordinal of one occupation vector; raises KeyError if absent."""
        row = np.asarray(occ, dtype=np.int64)
        if self._pows is not None:
            key = int(row @ self._pows)
            i = int(np.searchsorted(self.keys, key))
            if i < self.dim and self.keys[i] == key:
                return i
            raise KeyError(f"occupation {tuple(occ)} not in sector basis")
        return self.index[tuple(int(v) for v in occ)]

    def lookup_rows(self, occ_matrix: np.ndarray) -> np.ndarray:
        """Ordinals for a batch of occupation rows; -1 where absent."""
        occ_matrix = np.asarray(occ_matrix, dtype=np.int64)
        if self._pows is not None:
            keys = occ_matrix @ self._pows
            pos = np.searchsorted(self.keys, keys)
            pos[pos >= self.dim] = self.dim - 1 if self.dim else 0
            if self.dim == 0:
                return np.full(occ_matrix.shape[0], -1, dtype=np.int64)
            hit = self.keys[pos] == keys
            return np.where(hit, pos, -1)
        idx = self.index
        return np.array(
            [idx.get(tuple(int(v) for v in row), -1) for row in occ_matrix],
            dtype=np.int64,
        )

    def __repr__(self) -> str:
        return (
            f"SectorBasis(N={self.n_particles}, K={self.k_total}, "
            f"window={self.window}, dim={self.dim})"
        )


@functools.cache
def _count_table(n_particles: int, k_total: int, window: ModeWindow):
    """Memoized recursive count of occupations with fixed N and K."""
    l_max = window.l_max

    @functools.cache
    def count(l: int, n_left: int, k_left: int) -> int:
        if l > l_max:
            return int(n_left == 0 and k_left == 0)
        if not (n_left * l <= k_left <= n_left * l_max):
            return 0
        return sum(count(l + 1, n_left - c, k_left - c * l) for c in range(n_left + 1))

    return count


def sector_dimension(n_particles: int, k_total: int, window: ModeWindow) -> int:
    """Dimension of the (N, K) sector without enumerating it."""
    if n_particles < 0:
        raise ValueError("particle number must be non-negative")
    return _count_table(n_particles, k_total, window)(window.l_min, n_particles, k_total)


def reachable_k_range(n_particles: int, window: ModeWindow) -> tuple[int, int]:
    """Inclusive range of K values with at least one basis state."""
    return n_particles * window.l_min, n_particles * window.l_max


@functools.lru_cache(maxsize=None)
def enumerate_sector(n_particles: int, k_total: int, window: ModeWindow) -> SectorBasis:
    """Enumerate all occupation vectors with sum(n)=N and sum(l*n)=K.

    Rows come out in lexicographic order on the occupation vector, which fixes
    the basis ordinals deterministically.  An unreachable K yields an empty
    basis (dim 0) rather than an error; an inverted window raises ValueError
    at ModeWindow construction.
    """
    if n_particles < 0:
        raise ValueError("particle number must be non-negative")
    dim = sector_dimension(n_particles, k_total, window)
    size = window.size
    occ = np.zeros((dim, size), dtype=np.int16)
    if dim:
        row = np.zeros(size, dtype=np.int16)
        cursor = 0

        def fill(pos: int, l: int, n_left: int, k_left: int):
            nonlocal cursor
            if pos == size - 1:
                # last mode is forced by the two constraints
                if k_left == n_left * l:
                    row[pos] = n_left
                    occ[cursor] = row
                    cursor += 1
                return
            l_rest_max = window.l_max
            for c in range(n_left + 1):
                n_rem = n_left - c
                k_rem = k_left - c * l
                if not ((l + 1) * n_rem <= k_rem <= l_rest_max * n_rem):
                    continue
                row[pos] = c
                fill(pos + 1, l + 1, n_rem, k_rem)
            row[pos] = 0

        fill(0, window.l_min, n_particles, k_total)
        assert cursor == dim
    return SectorBasis(n_particles, k_total, window, occ)


def sector_span_after_annihilation(k_total: int, window: ModeWindow) -> list[int]:
    """Sectors reachable by removing one particle: {K - l for l in window}."""
    return list(range(k_total - window.l_max, k_total - window.l_min + 1))


def clear_basis_cache():
    """Drop memoized bases (frees memory after large sweeps)."""
    enumerate_sector.cache_clear()
    _count_table.cache_clear()
