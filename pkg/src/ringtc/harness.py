"""Experiment orchestration: configuration, runs, sweeps, and manifests.

Configuration files are JSON objects whose keys mirror RunConfig fields
(print the embedded defaults with `ringtc print-defaults`).  Every run writes
plain CSV files (comma separator, '.' decimal, header row, LF endings) plus a
summary.json, and finally a manifest.json listing the resolved configuration,
package version, seeds, wall-clock time, and a sha256 of every output file.
Reruns with an identical configuration reproduce every listed output
bit for bit (the manifest records wall-clock time and is excluded from its
own hash table).

Randomized sweep points get isolated generators derived from the configured
seeds by the documented splitting rule

    rng(seed, point) = numpy.random.default_rng(SeedSequence((seed, index)))

where index enumerates the sweep points, so results do not depend on worker
scheduling; sweeps can run across processes with max_workers > 1.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .cache import basis_cached, load_eigenpair, save_eigenpair
from .fock import ModeWindow, enumerate_sector
from .meanfield import clt_deformation_time, gpe_ground
from .measurement import (collapse_once, correlation_evolution,
                          sequential_measure)
from .observables import (
    contrast,
    contrast_track,
    condensate_fraction,
    deformation_track,
    lifetime,
    peak_track,
)
from .operators import ManyBodyState, ModelParams, density_from_obdm, obdm
from .spectral import (
    PropagatorConfig,
    evolve_trajectory,
    ground_of_sector,
)

log = logging.getLogger("ringtc.harness")

PERIOD = 1.0 / (2.0 * np.pi)

EXPERIMENTS = ("ground", "correlation", "sweep-tc", "measure-fraction",
               "sweep-td", "gpe", "clt", "convergence")


class ConfigError(ValueError):
    """Invalid or unparsable run configuration (CLI exit code 2)."""


@dataclass
class RunConfig:
    """Fully resolved settings of one experiment run.

    Defaults reproduce the reference parameter point: coupling product -15,
    seven modes l in [-2, 4], first detection at x1 = 0.5, sampling step
    T/40 with T = 1/(2*pi).
    """

    experiment: str
    gn: float = -15.0
    g0: float | None = None          # overrides gn when set
    alpha: float = 0.0
    n_particles: int = 20
    window: tuple[int, int] = (-2, 4)
    k_total: int | None = None       # defaults to n_particles
    grid_size: int = 512
    x1: float = 0.5
    t_max: float | None = None       # experiment-specific default when None
    dt: float = PERIOD / 40.0
    epsilon: float = 0.2
    epsilons: tuple[float, ...] = (0.05, 0.10, 0.15, 0.20)
    n_values: tuple[int, ...] = (10, 15, 20, 25, 30)
    seeds: tuple[int, ...] = (0,)
    output_dir: str | None = None    # defaults to runs/<experiment>
    propagator: PropagatorConfig = field(default_factory=PropagatorConfig)
    cache: bool = False
    cache_dir: str | None = None
    max_workers: int = 1
    eig_tol: float = 1e-10
    gpe_tol: float = 1e-13
    convergence_tol: float = 1e-8
    max_modes: int = 15
    prune_tol: float = 1e-12

    def model_params(self, n_particles: int | None = None) -> ModelParams:
        n = self.n_particles if n_particles is None else n_particles
        w = ModeWindow(*self.window)
        if self.g0 is not None:
            return ModelParams(g0=self.g0, alpha=self.alpha, n_particles=n, window=w)
        if n >= 2:
            return ModelParams.from_gn(self.gn, n, w, alpha=self.alpha)
        return ModelParams(g0=0.0, alpha=self.alpha, n_particles=n, window=w)

    @property
    def sector(self) -> int:
        return self.n_particles if self.k_total is None else self.k_total

    @property
    def grid(self) -> np.ndarray:
        return np.arange(self.grid_size) / self.grid_size

    def out_dir(self) -> Path:
        return Path(self.output_dir or f"runs/{self.experiment}")


_TUPLE_FIELDS = {"window", "epsilons", "n_values", "seeds"}


def config_to_dict(cfg: RunConfig) -> dict:
    d = dataclasses.asdict(cfg)
    d["propagator"] = dataclasses.asdict(cfg.propagator)
    for key in _TUPLE_FIELDS:
        d[key] = list(d[key])
    return d


def config_from_dict(data: dict, experiment: str | None = None) -> RunConfig:
    data = dict(data)
    if experiment is not None:
        data["experiment"] = experiment
    if "experiment" not in data:
        raise ConfigError("missing required field 'experiment'")
    if data["experiment"] not in EXPERIMENTS:
        raise ConfigError(
            f"unknown experiment {data['experiment']!r}; "
            f"expected one of {', '.join(EXPERIMENTS)}")
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config field(s): {', '.join(sorted(unknown))}")
    if "propagator" in data and data["propagator"] is not None:
        pdata = data["propagator"]
        if not isinstance(pdata, dict):
            raise ConfigError("field 'propagator' must be an object")
        pknown = {f.name for f in dataclasses.fields(PropagatorConfig)}
        punknown = set(pdata) - pknown
        if punknown:
            raise ConfigError(
                f"unknown propagator field(s): {', '.join(sorted(punknown))}")
        try:
            data["propagator"] = PropagatorConfig(**pdata)
        except ValueError as exc:
            raise ConfigError(f"invalid propagator settings: {exc}") from exc
    for key in _TUPLE_FIELDS & set(data):
        try:
            data[key] = tuple(data[key])
        except TypeError as exc:
            raise ConfigError(f"field {key!r} must be a list") from exc
    try:
        cfg = RunConfig(**data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    _validate(cfg)
    return cfg


def load_config(path: str | Path, experiment: str | None = None) -> RunConfig:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: "
            f"{exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top-level JSON value must be an object")
    return config_from_dict(data, experiment)


def _validate(cfg: RunConfig):
    if cfg.n_particles < 1:
        raise ConfigError("n_particles must be >= 1")
    lo, hi = cfg.window
    if lo > hi:
        raise ConfigError(f"invalid window {cfg.window}")
    if cfg.grid_size < 8:
        raise ConfigError("grid_size too small")
    if cfg.dt <= 0:
        raise ConfigError("dt must be positive")
    if not 0.0 <= cfg.x1 < 1.0:
        raise ConfigError("x1 must lie in [0, 1)")
    if cfg.experiment in ("measure-fraction", "sweep-td"):
        if not 0.0 < cfg.epsilon < 1.0:
            raise ConfigError("epsilon must lie strictly between 0 and 1")
    if not cfg.seeds:
        raise ConfigError("seeds must be non-empty")
    if cfg.max_workers < 1:
        raise ConfigError("max_workers must be >= 1")


def point_rng(seed: int, index: int) -> np.random.Generator:
    """Isolated per-point generator (documented splitting rule)."""
    return np.random.default_rng(np.random.SeedSequence((seed, index)))


# ---------------------------------------------------------------------------
# output helpers

def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", newline="\n")


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n",
                    newline="\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# shared physics steps

def ground_state(cfg: RunConfig, n_particles: int | None = None,
                 k_total: int | None = None):
    """Sector ground state honoring the run's cache settings."""
    n = cfg.n_particles if n_particles is None else n_particles
    k = (cfg.sector if n_particles is None else n) if k_total is None else k_total
    params = cfg.model_params(n)
    root = Path(cfg.cache_dir) if cfg.cache_dir else None
    extra = f"tol={cfg.eig_tol!r}"
    if cfg.cache:
        hit = load_eigenpair(params, k, root, extra=extra)
        if hit is not None:
            energy, vec = hit
            state = ManyBodyState(n, params.window, {k: vec})
            return energy, state, params
    basis = basis_cached(n, k, params.window, cfg.cache, root)
    res = ground_of_sector(basis, params, tol=cfg.eig_tol)
    if cfg.cache:
        save_eigenpair(params, k, res.energy, res.vector.blocks[k], root,
                       extra=extra)
    return res.energy, res.vector, params


def _density_series(states: list[ManyBodyState], grid: np.ndarray) -> np.ndarray:
    dens = np.empty((len(states), grid.size))
    for i, st in enumerate(states):
        dens[i] = density_from_obdm(obdm(st), grid)
    return dens


# ---------------------------------------------------------------------------
# experiments

def _run_ground(cfg: RunConfig, out: Path) -> dict:
    energy, state, params = ground_state(cfg)
    k = cfg.sector
    basis = enumerate_sector(params.n_particles, k, params.window)
    weights = np.abs(state.blocks[k]) ** 2
    mode_occ = (weights @ basis.occupations).astype(float)
    rho = obdm(state)
    summary = {
        "experiment": "ground",
        "n_particles": params.n_particles,
        "k_total": k,
        "gn": params.gn,
        "g0": params.g0,
        "alpha": params.alpha,
        "window": list(cfg.window),
        "dim": basis.dim,
        "energy": energy,
        "mode_occupations": mode_occ.tolist(),
        "condensate_fraction": condensate_fraction(rho),
    }
    write_json(out / "summary.json", summary)
    return summary


def _correlation_series(cfg: RunConfig, n_particles: int | None = None):
    _, psi0, params = ground_state(cfg, n_particles)
    t_max = PERIOD if cfg.t_max is None else cfg.t_max
    n_steps = int(round(t_max / cfg.dt))
    times = np.arange(n_steps + 1) * cfg.dt
    series = correlation_evolution(psi0, cfg.x1, times, cfg.grid, params,
                                   cfg.propagator)
    return series


def _run_correlation(cfg: RunConfig, out: Path) -> dict:
    series = _correlation_series(cfg)
    ct = contrast_track(series)
    pt = peak_track(series)
    write_csv(out / "rho2.csv", ["t", "x", "rho2"],
              ((t, x, series.rho2[i, j])
               for i, t in enumerate(series.times)
               for j, x in enumerate(series.grid)))
    write_csv(out / "contrast.csv", ["t", "C"], zip(ct.times, ct.values))
    write_csv(out / "peaks.csv", ["t", "x_peak", "x_unwrapped"],
              zip(pt.times, pt.positions, pt.unwrapped))
    summary = {
        "experiment": "correlation",
        "n_particles": cfg.n_particles,
        "gn": cfg.model_params().gn,
        "x1": cfg.x1,
        "t_max": float(series.times[-1]),
        "dt": cfg.dt,
        "velocity": pt.velocity,
        "rotation_period": PERIOD,
        "t_c": ct.t_c,
        "contrast_initial": float(ct.values[0]),
        "contrast_final": float(ct.values[-1]),
    }
    write_json(out / "summary.json", summary)
    return summary


def _tc_lifetime(cfg: RunConfig, n: int) -> dict:
    """Contrast track of one sweep-tc point, evolved until C < 0.45 or cap."""
    _, psi0, params = ground_state(cfg, n)
    collapsed, _ = collapse_once(psi0.normalized(), cfg.x1)
    reduced = params.with_particles(collapsed.n_particles)
    cap = cfg.t_max if cfg.t_max is not None else max(0.032 * n, 0.25)
    chunk = 10
    grid = cfg.grid
    times = [0.0]
    values = []
    state = collapsed
    dens = density_from_obdm(obdm(state), grid)
    values.append(contrast(dens / dens.mean()))
    t = 0.0
    while t < cap and values[-1] >= 0.45:
        steps = [cfg.dt * (i + 1) for i in range(chunk)]
        traj = evolve_trajectory(state, reduced, np.asarray(steps), cfg.propagator)
        for dt_i, st in zip(steps, traj):
            dens = density_from_obdm(obdm(st), grid)
            times.append(t + dt_i)
            values.append(contrast(dens / dens.mean()))
        state = traj[-1]
        t += steps[-1]
        if values[-1] < 0.45:
            break
    t_c = lifetime(np.asarray(times), np.asarray(values))
    return {"n": n, "t_c": t_c, "times": times, "values": values}


def _linear_fit(xs: np.ndarray, ys: np.ndarray) -> dict:
    slope, intercept = np.polyfit(xs, ys, 1)
    pred = slope * xs + intercept
    ss_res = float(np.sum((ys - pred) ** 2))
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return {"slope": float(slope), "intercept": float(intercept), "r2": r2}


def _run_sweep_tc(cfg: RunConfig, out: Path) -> dict:
    results = _map_points(_sweep_tc_worker, cfg, list(cfg.n_values))
    rows = []
    for res in results:
        write_csv(out / f"contrast_N{res['n']}.csv", ["t", "C"],
                  zip(res["times"], res["values"]))
        rows.append((res["n"], res["t_c"]))
    write_csv(out / "tc_vs_N.csv", ["n", "t_c"], rows)
    fitted = [(n, tc) for n, tc in rows if tc is not None]
    summary = {
        "experiment": "sweep-tc",
        "gn": cfg.gn,
        "n_values": list(cfg.n_values),
        "t_c": {str(n): tc for n, tc in rows},
    }
    if len(fitted) >= 2:
        ns = np.array([n for n, _ in fitted], float)
        tcs = np.array([tc for _, tc in fitted])
        summary["linear_fit"] = _linear_fit(ns, tcs)
    write_json(out / "summary.json", summary)
    return summary


def _sweep_tc_worker(cfg_json: str, index: int, n: int) -> dict:
    cfg = config_from_dict(json.loads(cfg_json))
    return _tc_lifetime(cfg, n)


def _run_measure_fraction(cfg: RunConfig, out: Path) -> dict:
    n = cfg.n_particles
    counts = {eps: round(eps * n) for eps in cfg.epsilons}
    bad = [eps for eps, c in counts.items() if c < 1]
    if bad:
        raise ConfigError(f"epsilon values {bad} measure no particle at N={n}")
    eps_max = max(cfg.epsilons, key=lambda e: counts[e])
    results = _map_points(_fraction_worker, cfg, list(cfg.seeds),
                          extra={"eps_max": eps_max})
    _, psi0, params = ground_state(cfg)
    cf0 = condensate_fraction(obdm(psi0))

    (out / "records").mkdir(exist_ok=True)
    rows = []
    per_eps: dict[float, list[float]] = {eps: [] for eps in cfg.epsilons}
    for res in results:
        (out / "records" / f"record_seed{res['seed']}.json").write_text(
            res["record_json"] + "\n", newline="\n")
        for eps in cfg.epsilons:
            frac = res["checkpoints"][str(counts[eps])]
            per_eps[eps].append(frac)
            rows.append((eps, res["seed"], frac))
    rows.sort(key=lambda r: (r[0], r[1]))
    write_csv(out / "fraction_vs_epsilon.csv",
              ["epsilon", "seed", "condensate_fraction"], rows)
    means = {eps: float(np.mean(v)) for eps, v in per_eps.items()}
    ordered = [means[eps] for eps in sorted(means)]
    summary = {
        "experiment": "measure-fraction",
        "n_particles": n,
        "gn": cfg.model_params().gn,
        "epsilons": list(cfg.epsilons),
        "seeds": list(cfg.seeds),
        "initial_condensate_fraction": cf0,
        "mean_condensate_fraction": {repr(eps): means[eps] for eps in sorted(means)},
        "strictly_increasing": bool(np.all(np.diff(ordered) > 0)),
    }
    write_json(out / "summary.json", summary)
    return summary


def _fraction_worker(cfg_json: str, index: int, seed: int,
                     eps_max: float) -> dict:
    cfg = config_from_dict(json.loads(cfg_json))
    _, psi0, params = ground_state(cfg)
    rng = point_rng(seed, index)
    checkpoints: dict[int, float] = {}
    _, record = sequential_measure(psi0, eps_max, rng, cfg.grid, seed=seed,
                                   prune_tol=cfg.prune_tol,
                                   checkpoints=checkpoints)
    return {
        "seed": seed,
        "record_json": record.to_json(),
        "checkpoints": {str(k): v for k, v in checkpoints.items()},
    }


def _run_sweep_td(cfg: RunConfig, out: Path) -> dict:
    profile = gpe_ground(cfg.gn, cfg.grid_size, tol=cfg.gpe_tol)
    sigma2 = profile.sigma2
    points = [(n, seed) for n in cfg.n_values for seed in cfg.seeds]
    results = _map_points(_td_worker, cfg, points, extra={"sigma2": sigma2})

    rows = []
    per_n: dict[int, list[float]] = {}
    for (n, seed), res in zip(points, results):
        write_csv(out / f"cmwidth_N{n}_seed{seed}.csv", ["t", "std"],
                  zip(res["times"], res["cm_std"]))
        clt = clt_deformation_time(n, cfg.epsilon, sigma2)
        rows.append((n, seed, res["t_d"], clt.t_deform))
        if res["t_d"] is not None:
            per_n.setdefault(n, []).append(res["t_d"])
    write_csv(out / "td_vs_N.csv", ["n", "seed", "t_d", "t_d_clt"], rows)

    summary = {
        "experiment": "sweep-td",
        "gn": cfg.gn,
        "epsilon": cfg.epsilon,
        "sigma2": sigma2,
        "n_values": list(cfg.n_values),
        "seeds": list(cfg.seeds),
        "t_d_mean": {},
        "t_d_clt": {},
    }
    ns, means = [], []
    for n in cfg.n_values:
        clt = clt_deformation_time(n, cfg.epsilon, sigma2)
        summary["t_d_clt"][str(n)] = clt.t_deform
        if n in per_n:
            mean = float(np.mean(per_n[n]))
            summary["t_d_mean"][str(n)] = mean
            ns.append(n)
            means.append(mean)
    if len(ns) >= 2:
        fit = _linear_fit(np.log(np.asarray(ns, float)), np.log(np.asarray(means)))
        summary["power_law_exponent"] = fit["slope"]
        summary["clt_ratio"] = {
            str(n): summary["t_d_mean"][str(n)] / summary["t_d_clt"][str(n)]
            for n in ns}
    write_json(out / "summary.json", summary)
    return summary


def _td_worker(cfg_json: str, index: int, point: tuple[int, int],
               sigma2: float) -> dict:
    cfg = config_from_dict(json.loads(cfg_json))
    n, seed = point
    _, psi0, params = ground_state(cfg, n)
    rng = point_rng(seed, index)
    measured, _ = sequential_measure(psi0, cfg.epsilon, rng, cfg.grid,
                                     seed=seed, prune_tol=cfg.prune_tol)
    reduced = params.with_particles(measured.n_particles)
    clt = clt_deformation_time(n, cfg.epsilon, sigma2)
    cap = cfg.t_max if cfg.t_max is not None else 2.5 * clt.t_deform
    n_steps = max(4, int(np.ceil(cap / cfg.dt)))
    times = np.arange(n_steps + 1) * cfg.dt
    traj = evolve_trajectory(measured, reduced, times, cfg.propagator)
    dens = _density_series(traj, cfg.grid)
    deform = deformation_track(times, dens, sigma2)
    return {"n": n, "seed": seed, "t_d": deform.t_d,
            "times": times.tolist(), "cm_std": deform.cm_std.tolist()}


def _run_gpe(cfg: RunConfig, out: Path) -> dict:
    profile = gpe_ground(cfg.gn, cfg.grid_size, tol=cfg.gpe_tol)
    write_csv(out / "profile.csv", ["x", "re_phi", "im_phi", "density"],
              zip(profile.grid, profile.phi.real, profile.phi.imag,
                  profile.density))
    dens = profile.density
    summary = {
        "experiment": "gpe",
        "gn": cfg.gn,
        "grid_size": cfg.grid_size,
        "mu": profile.mu,
        "sigma2": profile.sigma2,
        "contrast": contrast(dens) if dens.max() > 0 else 0.0,
        "residual": profile.residual(),
        "soliton_threshold": -float(np.pi ** 2),
    }
    write_json(out / "summary.json", summary)
    return summary


def _run_clt(cfg: RunConfig, out: Path) -> dict:
    profile = gpe_ground(cfg.gn, cfg.grid_size, tol=cfg.gpe_tol)
    pred = clt_deformation_time(cfg.n_particles, cfg.epsilon, profile.sigma2)
    summary = {
        "experiment": "clt",
        "gn": cfg.gn,
        "n_particles": cfg.n_particles,
        "epsilon": cfg.epsilon,
        "sigma2": pred.sigma2,
        "remaining_particles": cfg.n_particles * (1 - cfg.epsilon),
        "initial_cm_variance": pred.v0,
        "t_deform": pred.t_deform,
    }
    write_json(out / "summary.json", summary)
    return summary


def validate_convergence(cfg: RunConfig) -> dict:
    """Widen the mode window symmetrically until the target energy settles.

    Stops when the sector ground energy changes by less than
    cfg.convergence_tol (relative) from one window to the next; reports
    non-convergence when the window would exceed cfg.max_modes modes or the
    occupation encoding limit.
    """
    base = ModeWindow(*cfg.window)
    rows = []
    prev_energy = None
    converged = False
    window = base
    while True:
        n = cfg.n_particles
        if (n + 1) ** window.size >= 2 ** 63:
            log.warning("window %s with N=%d exceeds the int64 occupation "
                        "encoding; stopping the sweep", window, n)
            break
        params = cfg.model_params()
        params = ModelParams(params.g0, params.alpha, n, window)
        basis = enumerate_sector(n, cfg.sector, window)
        res = ground_of_sector(basis, params, tol=cfg.eig_tol)
        rel = (abs(res.energy - prev_energy) / max(abs(res.energy), 1e-300)
               if prev_energy is not None else None)
        rows.append({"l_min": window.l_min, "l_max": window.l_max,
                     "modes": window.size, "dim": basis.dim,
                     "energy": res.energy, "rel_change": rel})
        if rel is not None and rel < cfg.convergence_tol:
            converged = True
            break
        if window.size + 2 > cfg.max_modes:
            break
        prev_energy = res.energy
        window = window.widen(1)
    return {
        "experiment": "convergence",
        "n_particles": cfg.n_particles,
        "k_total": cfg.sector,
        "gn": cfg.model_params().gn,
        "base_window": list(cfg.window),
        "tolerance": cfg.convergence_tol,
        "converged": converged,
        "final_window": [rows[-1]["l_min"], rows[-1]["l_max"]] if rows else None,
        "windows": rows,
    }


def _run_convergence(cfg: RunConfig, out: Path) -> dict:
    summary = validate_convergence(cfg)
    write_csv(out / "convergence.csv",
              ["l_min", "l_max", "modes", "dim", "energy", "rel_change"],
              ((r["l_min"], r["l_max"], r["modes"], r["dim"], r["energy"],
                "" if r["rel_change"] is None else r["rel_change"])
               for r in summary["windows"]))
    write_json(out / "summary.json", summary)
    return summary


# ---------------------------------------------------------------------------
# sweep plumbing

def _map_points(worker, cfg: RunConfig, points: list, extra: dict | None = None):
    """Run worker(cfg_json, index, point, **extra) over all sweep points.

    Results come back in point order regardless of scheduling.
    """
    cfg_json = json.dumps(config_to_dict(cfg), sort_keys=True)
    extra = extra or {}
    if cfg.max_workers <= 1 or len(points) <= 1:
        return [worker(cfg_json, i, p, **extra) for i, p in enumerate(points)]
    with ProcessPoolExecutor(max_workers=cfg.max_workers) as pool:
        futures = [pool.submit(worker, cfg_json, i, p, **extra)
                   for i, p in enumerate(points)]
        return [f.result() for f in futures]


_RUNNERS = {
    "ground": _run_ground,
    "correlation": _run_correlation,
    "sweep-tc": _run_sweep_tc,
    "measure-fraction": _run_measure_fraction,
    "sweep-td": _run_sweep_td,
    "gpe": _run_gpe,
    "clt": _run_clt,
    "convergence": _run_convergence,
}


def run(cfg: RunConfig) -> dict:
    """Execute one experiment end to end; returns the summary dict."""
    out = cfg.out_dir()
    out.mkdir(parents=True, exist_ok=True)
    started = time.time()
    summary = _RUNNERS[cfg.experiment](cfg, out)
    manifest = {
        "config": config_to_dict(cfg),
        "version": __version__,
        "seeds": list(cfg.seeds),
        "wall_clock_s": time.time() - started,
        "outputs": {},
    }
    for path in sorted(out.rglob("*")):
        if path.is_file() and path.name != "manifest.json":
            manifest["outputs"][str(path.relative_to(out))] = _sha256(path)
    write_json(out / "manifest.json", manifest)
    return summary
