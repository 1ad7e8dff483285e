"""On-disk caches: sector bases and sector ground-state eigenpairs.

Container format (shared by both kinds): 4-byte magic "RTC1", one version
byte, one kind byte (1 = basis, 2 = eigenpair), then little-endian int64
header fields followed by the raw payload.

  basis:     header n, k, l_min, l_max, dim; payload occupations int16 LE,
             row-major (dim x window size)
  eigenpair: header n, k, l_min, l_max, dim; payload energy float64 LE,
             then the sector vector complex128 LE

Caches are pure optimizations: loaded bases are bit-identical to
re-enumeration, and loaders verify magic/version/kind and reject mismatched
headers.  The cache directory defaults to ~/.cache/ringtc and can be moved
with the RINGTC_CACHE_DIR environment variable.
"""

from __future__ import annotations

import hashlib
import logging
import os
import struct
from pathlib import Path

import numpy as np

from .fock import ModeWindow, SectorBasis, enumerate_sector
from .operators import ModelParams

log = logging.getLogger("ringtc.cache")

MAGIC = b"RTC1"
VERSION = 1
KIND_BASIS = 1
KIND_EIGENPAIR = 2

_HEADER = struct.Struct("<4sBB5q")  # magic, version, kind, n, k, l_min, l_max, dim


def cache_root(override: str | os.PathLike | None = None) -> Path:
    if override is not None:
        return Path(override)
    env = os.environ.get("RINGTC_CACHE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "ringtc"


def params_digest(params: ModelParams, extra: str = "") -> str:
    """Stable 16-hex-digit key for eigenpair files."""
    text = (f"g0={params.g0!r};alpha={params.alpha!r};n={params.n_particles};"
            f"window={params.window.l_min},{params.window.l_max};{extra}")
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _basis_path(root: Path, n: int, k: int, window: ModeWindow) -> Path:
    return root / f"basis_N{n}_K{k}_W{window.l_min}_{window.l_max}.rtc1"


def _eig_path(root: Path, digest: str, k: int) -> Path:
    return root / f"eig_{digest}_K{k}.rtc1"


def save_basis(basis: SectorBasis, root: Path | None = None) -> Path:
    root = cache_root(root)
    root.mkdir(parents=True, exist_ok=True)
    path = _basis_path(root, basis.n_particles, basis.k_total, basis.window)
    header = _HEADER.pack(MAGIC, VERSION, KIND_BASIS, basis.n_particles,
                          basis.k_total, basis.window.l_min,
                          basis.window.l_max, basis.dim)
    payload = np.ascontiguousarray(basis.occupations, dtype="<i2").tobytes()
    tmp = path.with_suffix(".tmp")
    tmp.write_bytes(header + payload)
    tmp.replace(path)
    return path


def load_basis(n: int, k: int, window: ModeWindow,
               root: Path | None = None) -> SectorBasis | None:
    path = _basis_path(cache_root(root), n, k, window)
    if not path.exists():
        return None
    raw = path.read_bytes()
    magic, version, kind, fn, fk, flmin, flmax, dim = _HEADER.unpack_from(raw)
    if magic != MAGIC or version != VERSION or kind != KIND_BASIS:
        log.warning("ignoring cache file with bad header: %s", path)
        return None
    if (fn, fk, flmin, flmax) != (n, k, window.l_min, window.l_max):
        log.warning("ignoring cache file with mismatched key: %s", path)
        return None
    occ = np.frombuffer(raw, dtype="<i2", offset=_HEADER.size)
    occ = occ.reshape(dim, window.size).astype(np.int16)
    return SectorBasis(n, k, window, occ)


def basis_cached(n: int, k: int, window: ModeWindow, enabled: bool,
                 root: Path | None = None) -> SectorBasis:
    """Basis from disk when enabled and present, else enumerated (and saved)."""
    if enabled:
        loaded = load_basis(n, k, window, root)
        if loaded is not None:
            return loaded
    basis = enumerate_sector(n, k, window)
    if enabled:
        save_basis(basis, root)
    return basis


def save_eigenpair(params: ModelParams, k: int, energy: float,
                   vector: np.ndarray, root: Path | None = None,
                   extra: str = "") -> Path:
    root = cache_root(root)
    root.mkdir(parents=True, exist_ok=True)
    path = _eig_path(root, params_digest(params, extra), k)
    dim = vector.shape[0]
    header = _HEADER.pack(MAGIC, VERSION, KIND_EIGENPAIR, params.n_particles,
                          k, params.window.l_min, params.window.l_max, dim)
    payload = struct.pack("<d", energy)
    payload += np.ascontiguousarray(vector, dtype="<c16").tobytes()
    tmp = path.with_suffix(".tmp")
    tmp.write_bytes(header + payload)
    tmp.replace(path)
    return path


def load_eigenpair(params: ModelParams, k: int, root: Path | None = None,
                   extra: str = "") -> tuple[float, np.ndarray] | None:
    path = _eig_path(cache_root(root), params_digest(params, extra), k)
    if not path.exists():
        return None
    raw = path.read_bytes()
    magic, version, kind, fn, fk, flmin, flmax, dim = _HEADER.unpack_from(raw)
    if magic != MAGIC or version != VERSION or kind != KIND_EIGENPAIR:
        log.warning("ignoring cache file with bad header: %s", path)
        return None
    if (fn, fk, flmin, flmax) != (params.n_particles, k, params.window.l_min,
                                  params.window.l_max):
        log.warning("ignoring cache file with mismatched key: %s", path)
        return None
    (energy,) = struct.unpack_from("<d", raw, _HEADER.size)
    vec = np.frombuffer(raw, dtype="<c16", offset=_HEADER.size + 8)
    if vec.shape[0] != dim:
        log.warning("ignoring truncated cache file: %s", path)
        return None
    return float(energy), vec.astype(np.complex128)
