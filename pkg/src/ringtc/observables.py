"""Post-processing of simulation output: contrast, lifetimes, peak motion,
center-of-mass width, condensate fraction."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .meanfield import circular_variance
from .operators import ModelParams, OneBodyDensityMatrix

log = logging.getLogger("ringtc.observables")

TWO_PI = 2.0 * np.pi


@dataclass
class CorrelationSeries:
    """rho2(x, t) on a space-time grid; each time slice integrates to 1."""

    grid: np.ndarray
    times: np.ndarray
    rho2: np.ndarray  # shape (len(times), len(grid))
    params: ModelParams


@dataclass
class ContrastTrack:
    times: np.ndarray
    values: np.ndarray
    t_c: float | None  # first down-crossing of 0.5, linearly interpolated


@dataclass
class PeakTrack:
    times: np.ndarray
    positions: np.ndarray      # circular first-moment peak, in [0, 1)
    unwrapped: np.ndarray      # branch nearest the previous sample
    velocity: float | None     # least-squares slope, absent at low contrast


@dataclass
class DeformationResult:
    times: np.ndarray
    cm_std: np.ndarray
    t_d: float | None  # first time cm_std reaches sigma/2, interpolated


def contrast(density_slice: np.ndarray) -> float:
    """(max - min) / (max + min) over the ring."""
    slc = np.asarray(density_slice, dtype=np.float64)
    hi = float(slc.max())
    lo = float(slc.min())
    if hi <= 0.0:
        raise ValueError("contrast of an all-zero (or negative) slice")
    return (hi - lo) / (hi + lo)


def lifetime(times: np.ndarray, values: np.ndarray,
             level: float = 0.5) -> float | None:
    """First linearly interpolated down-crossing of the level; None if absent."""
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    for i in range(len(times) - 1):
        if values[i] >= level > values[i + 1]:
            frac = (values[i] - level) / (values[i] - values[i + 1])
            return float(times[i] + frac * (times[i + 1] - times[i]))
    return None


def contrast_track(series: CorrelationSeries) -> ContrastTrack:
    values = np.array([contrast(s) for s in series.rho2])
    return ContrastTrack(times=series.times, values=values,
                         t_c=lifetime(series.times, values))


def circular_peak(density_slice: np.ndarray, grid: np.ndarray) -> float:
    """Peak position as the phase of the first circular moment, in [0, 1)."""
    z = np.sum(density_slice * np.exp(1j * TWO_PI * grid))
    if abs(z) < 1e-300:
        return 0.0
    return float((np.angle(z) / TWO_PI) % 1.0)


def argmax_peak(density_slice: np.ndarray, grid: np.ndarray) -> float:
    """Grid-resolution peak position (diagnostic alternative)."""
    return float(grid[int(np.argmax(density_slice))])


def peak_track(series: CorrelationSeries, min_contrast: float = 0.05) -> PeakTrack:
    """Per-slice circular peak positions, unwrapped track, fitted velocity.

    Unwrapping picks the branch nearest the previous sample.  The velocity is
    the least-squares slope over slices whose contrast exceeds min_contrast;
    it is absent when fewer than two slices qualify.
    """
    positions = np.array([circular_peak(s, series.grid) for s in series.rho2])
    unwrapped = positions.copy()
    for i in range(1, len(unwrapped)):
        jump = np.round(unwrapped[i] - unwrapped[i - 1])
        unwrapped[i] -= jump
    contrasts = np.array([contrast(s) for s in series.rho2])
    mask = contrasts > min_contrast
    if mask.sum() < 2:
        velocity = None
    else:
        t = series.times[mask]
        y = unwrapped[mask]
        slope = np.polyfit(t, y, 1)[0] if np.ptp(t) > 0 else None
        velocity = None if slope is None else float(slope)
    return PeakTrack(times=series.times, positions=positions,
                     unwrapped=unwrapped, velocity=velocity)


def cm_width_proxy(density_slice: np.ndarray, sigma2_mf: float,
                   neg_tol: float | None = None) -> float:
    """Center-of-mass width extracted by variance deconvolution.

    The single-particle density of the (approximately product) state is the
    CM distribution convolved with the mean-field profile, so their variances
    subtract: returns sqrt(max(0, var(density) - sigma2_mf)).  A negative
    argument beyond neg_tol (default 10% of sigma2_mf) is clamped to zero
    with a warning.
    """
    if neg_tol is None:
        neg_tol = 0.1 * sigma2_mf
    excess = circular_variance(density_slice) - sigma2_mf
    if excess < -neg_tol:
        log.warning("density variance %.3e below mean-field variance %.3e; "
                    "clamping CM width to 0", excess + sigma2_mf, sigma2_mf)
    return float(np.sqrt(max(0.0, excess)))


def deformation_track(times: np.ndarray, densities: np.ndarray,
                      sigma2_mf: float) -> DeformationResult:
    """CM-width track and the first time it reaches sigma/2 (interpolated)."""
    times = np.asarray(times, dtype=np.float64)
    cm_std = np.array([cm_width_proxy(d, sigma2_mf) for d in densities])
    threshold = 0.5 * np.sqrt(sigma2_mf)
    t_d = None
    for i in range(len(times)):
        if cm_std[i] >= threshold:
            if i == 0:
                t_d = float(times[0])
            else:
                frac = (threshold - cm_std[i - 1]) / (cm_std[i] - cm_std[i - 1])
                t_d = float(times[i - 1] + frac * (times[i] - times[i - 1]))
            break
    return DeformationResult(times=times, cm_std=cm_std, t_d=t_d)


def condensate_fraction(rho: OneBodyDensityMatrix) -> float:
    """Largest eigenvalue of the one-body density matrix over its trace."""
    tr = rho.trace
    if tr <= 0.0:
        raise ValueError("one-body density matrix has non-positive trace")
    evals = sla.eigvalsh(rho.rho1)
    if evals[0] < -1e-10 * tr:
        raise ValueError(f"density matrix not positive semidefinite: {evals[0]:.3e}")
    return float(evals[-1] / tr)
