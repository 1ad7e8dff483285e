"""Position-measurement simulation: single collapse and sequential detection.

A projective position detection at x removes one atom: the post-measurement
state is psi_hat(x)|psi> renormalized, and the pre-normalization norm^2 is
the single-particle density at x (the detection probability density).
Sequential measurement of a fraction of the particles repeats
density -> sample -> collapse, all at t = 0.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .observables import CorrelationSeries, condensate_fraction
from .operators import (
    ManyBodyState,
    ModelParams,
    apply_field_annihilation,
    density_from_obdm,
    obdm,
)
from .spectral import PropagatorConfig, evolve

log = logging.getLogger("ringtc.measurement")


class MeasurementNodeError(RuntimeError):
    """Detection attempted at a node of the single-particle density."""


@dataclass
class MeasurementRecord:
    """Bookkeeping of one sequential-measurement pass."""

    seed: int | None
    epsilon: float
    positions: list[float] = field(default_factory=list)
    norms: list[float] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {"seed": self.seed, "epsilon": self.epsilon,
             "positions": self.positions, "norms": self.norms},
            sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "MeasurementRecord":
        d = json.loads(text)
        return cls(seed=d["seed"], epsilon=d["epsilon"],
                   positions=list(d["positions"]), norms=list(d["norms"]))


def collapse_once(state: ManyBodyState, x: float) -> tuple[ManyBodyState, float]:
    """Measure one particle at x: normalized collapsed state and norm^2.

    The input is assumed normalized, so norm^2 is the density at x; a value
    below 1e-14 is treated as a measurement at a node and rejected.
    """
    if state.n_particles < 1:
        raise ValueError("cannot measure a zero-particle state")
    collapsed = apply_field_annihilation(state, x)
    norm2 = collapsed.norm2()
    if norm2 < 1e-14:
        raise MeasurementNodeError(
            f"density at x={x} is {norm2:.3e}; measurement position is a node")
    return collapsed.scaled(1.0 / np.sqrt(norm2)), norm2


def sample_position(density: np.ndarray, rng: np.random.Generator) -> float:
    """Draw x in [0, 1) from a density sampled on the uniform grid.

    Inverse-CDF sampling with linear interpolation between grid nodes (the
    density is periodic, so the node at x=1 repeats the one at x=0).
    Deterministic given the generator state.
    """
    dens = np.asarray(density, dtype=np.float64)
    dens = np.clip(dens, 0.0, None)
    if not np.any(dens > 0.0):
        raise ValueError("cannot sample from an identically zero density")
    n = dens.size
    nodes = np.concatenate([np.arange(n) / n, [1.0]])
    values = np.concatenate([dens, dens[:1]])
    # trapezoid CDF on the periodic extension
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (values[1:] + values[:-1]))])
    cdf /= cdf[-1]
    u = rng.random()
    return float(np.interp(u, cdf, nodes) % 1.0)


def sequential_measure(state: ManyBodyState, epsilon: float,
                       rng: np.random.Generator, grid: np.ndarray,
                       *, seed: int | None = None,
                       positions: list[float] | None = None,
                       prune_tol: float = 1e-14,
                       checkpoints: dict[int, float] | None = None,
                       ) -> tuple[ManyBodyState, MeasurementRecord]:
    """Measure round(epsilon*N) particles at t=0, one by one.

    Each step evaluates the current single-particle density (from the
    one-body density matrix), samples a position from it (or takes the next
    entry of `positions` when given), and collapses.  Blocks below prune_tol
    of the state norm are dropped after each collapse to bound the sector
    count.  If `checkpoints` is given, it is filled with {particles measured
    so far: condensate fraction} after each collapse.
    """
    if not (0.0 < epsilon < 1.0):
        raise ValueError("epsilon must lie strictly between 0 and 1")
    n_meas = round(epsilon * state.n_particles)
    if n_meas < 1:
        raise ValueError(
            f"epsilon={epsilon} with N={state.n_particles} measures no particle")
    if positions is not None and len(positions) < n_meas:
        raise ValueError(f"need {n_meas} fixed positions, got {len(positions)}")

    record = MeasurementRecord(seed=seed, epsilon=epsilon)
    current = state.normalized()
    rho = obdm(current)
    for i in range(n_meas):
        if positions is None:
            dens = density_from_obdm(rho, grid)
            x = sample_position(dens, rng)
        else:
            x = float(positions[i])
        current, norm2 = collapse_once(current, x)
        if prune_tol > 0.0:
            current = current.pruned(prune_tol).normalized()
        rho = obdm(current)  # reused for the next sampling step
        record.positions.append(x)
        record.norms.append(norm2)
        if checkpoints is not None:
            checkpoints[i + 1] = condensate_fraction(rho)
    return current, record


def correlation_evolution(psi0: ManyBodyState, x1: float, times: np.ndarray,
                          grid: np.ndarray, params: ModelParams,
                          cfg: PropagatorConfig | None = None,
                          ) -> CorrelationSeries:
    """Conditional density rho2(x, t) after detecting one particle at x1.

    For an eigenstate input the two-time correlator reduces to the ordinary
    density of the time-evolved collapsed state (the eigenstate phase
    cancels), which is what is computed here.  Every time slice is
    normalized to unit integral over the ring.
    """
    times = np.asarray(times, dtype=np.float64)
    if times.size == 0 or np.any(np.diff(times) < 0) or times[0] < 0:
        raise ValueError("times must be non-decreasing and non-negative")
    collapsed, _ = collapse_once(psi0.normalized(), x1)
    reduced = params.with_particles(collapsed.n_particles)
    rho2 = np.empty((times.size, grid.size), dtype=np.float64)
    current = collapsed
    t_prev = 0.0
    for i, t in enumerate(times):
        current = evolve(current, reduced, float(t - t_prev), cfg)
        t_prev = float(t)
        dens = density_from_obdm(obdm(current), grid)
        rho2[i] = dens / dens.mean()  # exact unit integral on the uniform grid
    return CorrelationSeries(grid=np.asarray(grid, dtype=np.float64),
                             times=times, rho2=rho2, params=params)
