"""Monte Carlo experiment harness: trial farming, persistence, aggregation.

A run is a grid of (N, eps) cells.  Each cell's trials are split into
fixed-size blocks of trial indices; trial k always uses the stream
(base_seed, k), and blocks are merged in index order, so the aggregated
output is byte-identical no matter how many workers executed it.  Each
completed cell is persisted as one CSV shard with a checksum footer;
rerunning a partially finished experiment recomputes only the cells whose
shard is missing or fails its checksum.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator

from collide1d import elastic, stats
from collide1d.distributions import (
    CAUCHY, NORMAL, POWERTAIL,
    DistributionSpec, SeedSpec, sample_with,
)
from collide1d.limits import LawKind, LimitLaw
from collide1d.simulate import CollisionRule, simulate, time_reverse_rule

ELASTIC_SINGLE_CDF = "elastic_single_cdf"
ELASTIC_SYSTEM_CDF = "elastic_system_cdf"
CONVERGENCE_SWEEP = "convergence_sweep"
HEAVY_TAIL_SWEEP = "heavy_tail_sweep"
PAIR_HISTOGRAM = "pair_histogram"
NONELASTIC_MEDIANS = "nonelastic_medians"
POISSON_CHECK = "poisson_check"

EXPERIMENTS = (
    ELASTIC_SINGLE_CDF,
    ELASTIC_SYSTEM_CDF,
    CONVERGENCE_SWEEP,
    HEAVY_TAIL_SWEEP,
    PAIR_HISTOGRAM,
    NONELASTIC_MEDIANS,
    POISSON_CHECK,
)

_SWEEPS = (CONVERGENCE_SWEEP, HEAVY_TAIL_SWEEP)

# trials per scheduling block; fixed so output is schedule-independent
BLOCK = 4096
# cap on elements of a pair-time tensor materialized at once
_TENSOR_BUDGET = 4_000_000


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    fx: DistributionSpec
    fv: DistributionSpec
    n_values: tuple[int, ...]
    eps_values: tuple[float, ...] = ()
    trials: int = 10_000
    base_seed: int = 0
    output_dir: str = "experiment_out"
    workers: int | None = None
    interval: tuple[float, float] = (0.0, 5.0)
    grid: int = 512
    z_time: float = 1.0          # scaled exceedance threshold (poisson_check)
    include_zero_finals: bool = True  # medians: count never-colliding particles as 0

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.n_values or any(n < 2 for n in self.n_values):
            raise ConfigError("all N must be >= 2")
        if any(e >= 1.0 for e in self.eps_values):
            raise ConfigError("all eps must be < 1")
        if self.experiment == NONELASTIC_MEDIANS and 0.0 not in self.eps_values:
            raise ConfigError("nonelastic_medians needs eps = 0 as its baseline")

    @property
    def effective_eps(self) -> tuple[float, ...]:
        return self.eps_values if self.eps_values else (0.0,)

    def cell_trials(self, n: int) -> int:
        if self.experiment in _SWEEPS:
            return min(n**4, self.trials)
        return self.trials

    def worker_count(self) -> int:
        env = os.environ.get("COLLIDE1D_WORKERS")
        if env:
            return max(1, int(env))
        if self.workers:
            return max(1, self.workers)
        return os.cpu_count() or 1

    def to_dict(self) -> dict:
        d = asdict(self)
        d["fx"] = self.fx.to_string()
        d["fv"] = self.fv.to_string()
        return d

    @staticmethod
    def from_dict(d: dict) -> "ExperimentConfig":
        d = dict(d)
        d["fx"] = DistributionSpec.from_string(d["fx"])
        d["fv"] = DistributionSpec.from_string(d["fv"])
        d["n_values"] = tuple(int(v) for v in d["n_values"])
        d["eps_values"] = tuple(float(v) for v in d.get("eps_values", ()))
        d["interval"] = tuple(float(v) for v in d.get("interval", (0.0, 5.0)))
        return ExperimentConfig(**d)


def parse_config_file(path) -> ExperimentConfig:
    """Read the key=value experiment config format."""
    raw: dict[str, str] = {}
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"bad config line {line!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        raw[key] = val
    try:
        kw: dict = {
            "experiment": raw["experiment"],
            "fx": DistributionSpec.from_string(raw["fx"]),
            "fv": DistributionSpec.from_string(raw["fv"]),
            "n_values": tuple(int(v) for v in raw["n_values"].split(",")),
        }
    except KeyError as exc:
        raise ConfigError(f"missing required config key {exc}") from exc
    if "eps_values" in raw and raw["eps_values"]:
        kw["eps_values"] = tuple(float(v) for v in raw["eps_values"].split(","))
    for key, cast in (
        ("trials", int), ("base_seed", int), ("output_dir", str),
        ("grid", int), ("z_time", float),
    ):
        if key in raw:
            kw[key] = cast(raw[key])
    if "workers" in raw:
        kw["workers"] = None if raw["workers"] == "auto" else int(raw["workers"])
    if "interval" in raw:
        lo, hi = raw["interval"].split(",")
        kw["interval"] = (float(lo), float(hi))
    return ExperimentConfig(**kw)


def law_for(config: ExperimentConfig) -> LimitLaw | None:
    """Pick the limit family matching the position tail and experiment."""
    exp = config.experiment
    if exp in (PAIR_HISTOGRAM, NONELASTIC_MEDIANS, POISSON_CHECK) and exp != POISSON_CHECK:
        pass
    single = exp == ELASTIC_SINGLE_CDF
    fx = config.fx
    if fx.kind == CAUCHY:
        kind = LawKind.SINGLE_CAUCHY if single else LawKind.SYSTEM_CAUCHY
    elif fx.kind == POWERTAIL and fx.alpha < 1.0:
        kind = LawKind.SINGLE_STABLE_ALPHA if single else LawKind.SYSTEM_STABLE_ALPHA
    elif fx.kind == POWERTAIL and fx.alpha == 1.0:
        raise ConfigError("powertail(1) positions sit exactly on the Cauchy boundary")
    else:
        kind = LawKind.SINGLE_FINITE_MEAN if single else LawKind.SYSTEM_FINITE_MEAN
    return LimitLaw(kind, fx, config.fv)


def law_cdf_callable(law: LimitLaw, interval: tuple[float, float], nodes: int = 1025):
    """Vectorized CDF of a law; mixture laws get a monotone interpolant."""
    if law.is_system:
        return law.cdf
    lo, hi = interval
    xs = np.linspace(max(lo, 1e-9), hi, nodes)
    ys = np.array([law.cdf(float(x)) for x in xs])
    interp = PchipInterpolator(xs, ys, extrapolate=False)

    def f(t):
        t = np.asarray(t, dtype=float)
        out = np.where(t <= xs[0], 0.0, np.nan_to_num(interp(np.clip(t, xs[0], xs[-1]))))
        out = np.where(t >= xs[-1], ys[-1], out)
        return out

    return f


# ---------------------------------------------------------------------------
# per-block trial computation (runs in worker processes)
# ---------------------------------------------------------------------------

def _sample_block(config: ExperimentConfig, n: int, start: int, stop: int):
    """Draw initial data for trials [start, stop); one stream per trial."""
    X = np.empty((stop - start, n))
    V = np.empty((stop - start, n))
    pick = np.empty(stop - start, dtype=np.int64)
    for k in range(start, stop):
        rng = SeedSpec(config.base_seed, k).stream()
        X[k - start] = sample_with(config.fx, rng, n)
        V[k - start] = sample_with(config.fv, rng, n)
        pick[k - start] = rng.integers(n)
    return X, V, pick


def _cell_scale(config: "ExperimentConfig", law, n: int) -> float:
    """Normalization applied to raw final times before comparing to the law.

    Convergence sweeps divide by the leading term n^2/2 instead of the
    exact binomial: the binomial absorbs the O(1/n) error term, which is
    precisely the rate the sweep is trying to measure.
    """
    if config.experiment in _SWEEPS and law.kind == LawKind.SYSTEM_FINITE_MEAN:
        return n * n / 2.0
    return law.scale(n)


def _chunks(total: int, size: int):
    for a in range(0, total, size):
        yield a, min(a + size, total)


def compute_block(config_dict: dict, n: int, eps: float, start: int, stop: int):
    """Rows for one block of trials; pure function of its arguments."""
    config = ExperimentConfig.from_dict(config_dict)
    exp = config.experiment
    if exp in (ELASTIC_SINGLE_CDF, ELASTIC_SYSTEM_CDF, *_SWEEPS, POISSON_CHECK):
        X, V, _ = _sample_block(config, n, start, stop)
        rows = []
        chunk = max(1, _TENSOR_BUDGET // (n * n))
        if exp == POISSON_CHECK:
            z = n * (n - 1) / 2.0 * config.z_time
            for a, b in _chunks(stop - start, chunk):
                counts = elastic.batch_exceedance_count(X[a:b], V[a:b], z)
                rows.extend(
                    (start + a + i, int(c)) for i, c in enumerate(counts)
                )
            return rows
        law = law_for(config)
        scale = _cell_scale(config, law, n)
        if exp == ELASTIC_SINGLE_CDF:
            for a, b in _chunks(stop - start, chunk):
                vals = elastic.batch_row_final(X[a:b], V[a:b], row=0) / scale
                rows.extend((start + a + i, float(v)) for i, v in enumerate(vals))
        else:
            for a, b in _chunks(stop - start, chunk):
                vals = elastic.batch_system_final(X[a:b], V[a:b]) / scale
                rows.extend((start + a + i, float(v)) for i, v in enumerate(vals))
        return rows

    if exp == PAIR_HISTOGRAM:
        rule = CollisionRule(eps)
        back_rule = time_reverse_rule(rule)
        rows = []
        for k in range(start, stop):
            rng = SeedSpec(config.base_seed, k).stream()
            x = sample_with(config.fx, rng, n)
            v = sample_with(config.fv, rng, n)
            ens = elastic.ParticleEnsemble(x, v)
            fwd = simulate(ens, rule)
            bwd = simulate(elastic.ParticleEnsemble(x, -v), back_rule)
            for t in fwd.event_times:
                rows.append((k, float(t)))
            for t in bwd.event_times:
                rows.append((k, float(-t)))
        return rows

    if exp == NONELASTIC_MEDIANS:
        rule = CollisionRule(eps)
        rows = []
        for k in range(start, stop):
            rng = SeedSpec(config.base_seed, k).stream()
            x = sample_with(config.fx, rng, n)
            v = sample_with(config.fv, rng, n)
            pick = int(rng.integers(n))
            out = simulate(elastic.ParticleEnsemble(x, v), rule)
            alpha = float(np.mean(out.collisions_per_particle / (n - 1)))
            rows.append(
                (k, float(out.per_particle_final[pick]), float(out.system_final), alpha)
            )
        return rows

    raise ConfigError(f"unknown experiment {exp!r}")


# ---------------------------------------------------------------------------
# shard persistence
# ---------------------------------------------------------------------------

_COLUMNS = {
    ELASTIC_SINGLE_CDF: ("trial", "value"),
    ELASTIC_SYSTEM_CDF: ("trial", "value"),
    CONVERGENCE_SWEEP: ("trial", "value"),
    HEAVY_TAIL_SWEEP: ("trial", "value"),
    PAIR_HISTOGRAM: ("trial", "value"),
    POISSON_CHECK: ("trial", "count"),
    NONELASTIC_MEDIANS: ("trial", "t_particle", "t_system", "alpha_mean"),
}


def _eps_token(eps: float) -> str:
    return format(eps, "+.6g").replace("+", "p").replace("-", "m").replace(".", "d")


def shard_path(config: ExperimentConfig, n: int, eps: float) -> Path:
    name = f"{config.experiment}__N{n}__eps{_eps_token(eps)}.csv"
    return Path(config.output_dir) / "shards" / name


def _format_row(row) -> str:
    parts = [str(row[0])]
    for v in row[1:]:
        parts.append(str(int(v)) if isinstance(v, (int, np.integer)) else repr(float(v)))
    return ",".join(parts)


def write_shard(path: Path, experiment: str, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    header = ",".join(_COLUMNS[experiment])
    lines = [_format_row(r) for r in rows]
    digest = hashlib.sha256("\n".join(lines).encode()).hexdigest()
    tmp = path.with_suffix(".tmp")
    tmp.write_text(header + "\n" + "\n".join(lines) + f"\n#sha256={digest}\n")
    tmp.replace(path)


def load_shard(path: Path, experiment: str):
    """Parsed rows if the shard is complete and intact, else None."""
    if not path.exists():
        return None
    text = path.read_text()
    lines = text.rstrip("\n").split("\n")
    if len(lines) < 2 or not lines[-1].startswith("#sha256="):
        return None
    header, data, footer = lines[0], lines[1:-1], lines[-1]
    if header != ",".join(_COLUMNS[experiment]):
        return None
    digest = hashlib.sha256("\n".join(data).encode()).hexdigest()
    if footer != f"#sha256={digest}":
        return None
    rows = []
    for line in data:
        toks = line.split(",")
        rows.append((int(toks[0]), *(float(t) for t in toks[1:])))
    return rows


# ---------------------------------------------------------------------------
# the report
# ---------------------------------------------------------------------------

@dataclass
class ExperimentReport:
    config: dict
    records: list = field(default_factory=list)   # one dict per (N, eps) cell
    regressions: dict = field(default_factory=dict)
    wall_clock_s: float = 0.0

    def to_json(self) -> str:
        return json.dumps(
            {
                "config": self.config,
                "records": self.records,
                "regressions": self.regressions,
                "wall_clock_s": self.wall_clock_s,
            },
            indent=2,
        )

    def save(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    @staticmethod
    def load(path) -> "ExperimentReport":
        d = json.loads(Path(path).read_text())
        # JSON turns tuples into lists; normalize through the config class
        config = ExperimentConfig.from_dict(d["config"]).to_dict()
        return ExperimentReport(
            config, d["records"], d.get("regressions", {}), d.get("wall_clock_s", 0.0)
        )

    def record_for(self, n: int, eps: float = 0.0) -> dict:
        for rec in self.records:
            if rec["n"] == n and rec["eps"] == eps:
                return rec
        raise KeyError(f"no record for N={n}, eps={eps}")


# ---------------------------------------------------------------------------
# orchestration
# ---------------------------------------------------------------------------

def _cell_rows(config: ExperimentConfig, n: int, eps: float, pool) -> list:
    path = shard_path(config, n, eps)
    cached = load_shard(path, config.experiment)
    trials = config.cell_trials(n)
    if cached is not None and (not cached or cached[-1][0] == trials - 1):
        return cached
    cfg_dict = config.to_dict()
    blocks = list(_chunks(trials, BLOCK))
    if pool is None:
        parts = [compute_block(cfg_dict, n, eps, a, b) for a, b in blocks]
    else:
        futs = [pool.submit(compute_block, cfg_dict, n, eps, a, b) for a, b in blocks]
        parts = [f.result() for f in futs]
    rows: list = []
    for part in parts:  # fixed block order regardless of completion order
        rows.extend(part)
    write_shard(path, config.experiment, rows)
    return rows


def run(config: ExperimentConfig) -> ExperimentReport:
    """Execute every cell of the experiment grid and aggregate the results."""
    t0 = time.monotonic()
    outdir = Path(config.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    workers = config.worker_count()
    cells = [(n, eps) for n in config.n_values for eps in config.effective_eps]

    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        data = {cell: _cell_rows(config, *cell, pool) for cell in cells}
    finally:
        if pool is not None:
            pool.shutdown()

    report = ExperimentReport(config=config.to_dict())
    exp = config.experiment

    if exp in (ELASTIC_SINGLE_CDF, ELASTIC_SYSTEM_CDF, *_SWEEPS):
        law = law_for(config)
        law_cdf = law_cdf_callable(law, config.interval)
        sweep_points = []
        for n, eps in cells:
            values = np.array([r[1] for r in data[(n, eps)]])
            ecdf = stats.EmpiricalCDF(values)
            sup = stats.sup_distance(ecdf, law_cdf, config.interval, config.grid)
            report.records.append(
                {
                    "n": n,
                    "eps": eps,
                    "trials": values.size,
                    "sup_distance": sup,
                    "law": law.kind.value,
                    "scale": _cell_scale(config, law, n),
                    "shard": str(shard_path(config, n, eps)),
                }
            )
            sweep_points.append((n, sup))
        if exp in _SWEEPS and len(sweep_points) >= 3:
            report.regressions["loglog_slope"] = stats.loglog_slope(sweep_points)

    elif exp == PAIR_HISTOGRAM:
        edges = np.linspace(-10.0, 10.0, 101)
        ref = _pair_time_reference(config.fx, config.fv)
        for n, eps in cells:
            values = np.array([r[1] for r in data[(n, eps)]])
            counts, _ = np.histogram(values, bins=edges)
            rec = {
                "n": n,
                "eps": eps,
                "samples": values.size,
                "bin_edges": edges.tolist(),
                "bin_counts": counts.tolist(),
                "shard": str(shard_path(config, n, eps)),
            }
            if ref is not None:
                rec["reference"] = ref.to_string()
            report.records.append(rec)

    elif exp == NONELASTIC_MEDIANS:
        _aggregate_medians(config, cells, data, report)

    elif exp == POISSON_CHECK:
        law = law_for(config)
        c = law.constant()
        lam = c / config.z_time ** law.tail_exponent
        for n, eps in cells:
            counts = np.array([r[1] for r in data[(n, eps)]])
            mean_err, var_err = stats.poisson_count_check(counts, lam)
            report.records.append(
                {
                    "n": n,
                    "eps": eps,
                    "trials": counts.size,
                    "lambda_theory": lam,
                    "count_mean": float(np.mean(counts)),
                    "count_var": float(np.var(counts)),
                    "mean_err": mean_err,
                    "var_err": var_err,
                    "shard": str(shard_path(config, n, eps)),
                }
            )

    report.wall_clock_s = time.monotonic() - t0
    report.save(outdir / "report.json")
    return report


def _pair_time_reference(fx: DistributionSpec, fv: DistributionSpec):
    # ratio of two independent centered normals is Cauchy
    if fx.kind == NORMAL and fv.kind == NORMAL:
        return DistributionSpec.cauchy(0.0, fx.b / fv.b)
    return None


def _aggregate_medians(config, cells, data, report: ExperimentReport) -> None:
    per_cell = {}
    for idx, (n, eps) in enumerate(cells):
        rows = data[(n, eps)]
        t = np.array([r[1] for r in rows])
        T = np.array([r[2] for r in rows])
        alpha = np.array([r[3] for r in rows])
        if not config.include_zero_finals:
            t = t[t > 0.0]
        boot_seed = SeedSpec(config.base_seed, 2**32 + idx)
        m_t = stats.bootstrap_median(t, 0.99, 100, boot_seed)
        m_T = stats.bootstrap_median(T, 0.99, 100, boot_seed.child(2**33 + idx))
        per_cell[(n, eps)] = (m_t, m_T, float(np.mean(alpha)))

    points_t, points_T, points_TNt = [], [], []
    for n, eps in cells:
        m_t, m_T, mean_alpha = per_cell[(n, eps)]
        m_t0, m_T0, _ = per_cell[(n, 0.0)]
        rec = {
            "n": n,
            "eps": eps,
            "eps_n": eps * n,
            "trials": len(data[(n, eps)]),
            "m_t": m_t.point, "m_t_lo": m_t.ci_lo, "m_t_hi": m_t.ci_hi,
            "m_T": m_T.point, "m_T_lo": m_T.ci_lo, "m_T_hi": m_T.ci_hi,
            "mean_alpha": mean_alpha,
            "log_ratio_t": math.log(m_t.point / m_t0.point),
            "log_ratio_T": math.log(m_T.point / m_T0.point),
            "log_ratio_T_over_Nt": math.log(m_T.point / (n * m_t0.point)),
            "shard": str(shard_path(config, n, eps)),
        }
        report.records.append(rec)
        points_t.append((rec["eps_n"], rec["log_ratio_t"]))
        points_T.append((rec["eps_n"], rec["log_ratio_T"]))
        points_TNt.append((rec["eps_n"], rec["log_ratio_T_over_Nt"]))

    def fit(points, design):
        distinct = {p[0] for p in points if p[0] != 0.0}
        if not distinct:
            # eps grid is {0} alone: D1 = D2 = 0, intercept absorbs the mean
            ys = np.array([p[1] for p in points])
            if design == stats.THROUGH_ORIGIN:
                coef, resid = [0.0, 0.0], ys
            else:
                coef, resid = [float(np.mean(ys)), 0.0, 0.0], ys - np.mean(ys)
            return {"coefficients": coef,
                    "residual_rms": float(np.sqrt(np.mean(resid**2))),
                    "design": design}
        if len(distinct) == 1:
            # one nonzero eps*N cannot separate the linear and quadratic
            # terms; fit the linear coefficient alone
            xs = np.array([p[0] for p in points])
            ys = np.array([p[1] for p in points])
            if design == stats.THROUGH_ORIGIN:
                d1 = float(np.dot(xs, ys) / np.dot(xs, xs))
                coef, resid = [d1, 0.0], ys - d1 * xs
            else:
                A = np.column_stack([np.ones_like(xs), xs])
                sol, *_ = np.linalg.lstsq(A, ys, rcond=None)
                coef, resid = [float(sol[0]), float(sol[1]), 0.0], ys - A @ sol
            return {"coefficients": coef,
                    "residual_rms": float(np.sqrt(np.mean(resid**2))),
                    "design": design}
        f = stats.fit_eps_regression(points, design)
        return {"coefficients": list(f.coefficients), "residual_rms": f.residual_rms,
                "design": f.design}

    report.regressions["log_ratio_t"] = fit(points_t, stats.THROUGH_ORIGIN)
    report.regressions["log_ratio_T"] = fit(points_T, stats.THROUGH_ORIGIN)
    report.regressions["log_ratio_T_over_Nt"] = fit(points_TNt, stats.WITH_INTERCEPT)


# ---------------------------------------------------------------------------
# figure-ready CSV emission
# ---------------------------------------------------------------------------

class CurveError(ValueError):
    """Unknown or inapplicable curve id."""


def emit_curve(report: ExperimentReport, which: str, out_path=None) -> Path:
    """Write one figure-ready CSV extracted from a finished report."""
    config = ExperimentConfig.from_dict(report.config)
    outdir = Path(config.output_dir) / "curves"
    outdir.mkdir(parents=True, exist_ok=True)
    token = which.replace(":", "_").replace("=", "")
    path = Path(out_path) if out_path else outdir / f"{token}.csv"

    if which == "convergence":
        lines = ["N,sup_distance"]
        for rec in report.records:
            if "sup_distance" in rec:
                lines.append(f"{rec['n']},{rec['sup_distance']!r}")
    elif which == "medians":
        lines = ["N,eps,epsN,M_t,M_t_lo,M_t_hi,M_T,M_T_lo,M_T_hi,mean_alpha"]
        for rec in report.records:
            if "m_t" not in rec:
                raise CurveError("medians curve needs a nonelastic_medians report")
            lines.append(
                ",".join(
                    [str(rec["n"]), repr(rec["eps"]), repr(rec["eps_n"]),
                     repr(rec["m_t"]), repr(rec["m_t_lo"]), repr(rec["m_t_hi"]),
                     repr(rec["m_T"]), repr(rec["m_T_lo"]), repr(rec["m_T_hi"]),
                     repr(rec["mean_alpha"])]
                )
            )
    elif which.startswith("ecdf:"):
        sel = dict(part.split("=") for part in which[5:].split(","))
        n = int(sel["N"])
        eps = float(sel.get("eps", 0.0))
        rec = report.record_for(n, eps)
        rows = load_shard(Path(rec["shard"]), config.experiment)
        if rows is None:
            raise CurveError(f"shard missing or corrupt: {rec['shard']}")
        values = np.array([r[1] for r in rows])
        ecdf = stats.EmpiricalCDF(values)
        law = law_for(config)
        law_cdf = law_cdf_callable(law, config.interval)
        ts = np.linspace(config.interval[0], config.interval[1], config.grid)
        emp = ecdf(ts)
        theo = np.asarray(law_cdf(ts), dtype=float)
        lines = ["t,empirical,theoretical,absdiff"]
        for t, e, th in zip(ts, emp, theo):
            t, e, th = float(t), float(e), float(th)
            lines.append(f"{t!r},{e!r},{th!r},{abs(e - th)!r}")
    else:
        raise CurveError(f"unknown curve id {which!r}")

    path.write_text("\n".join(lines) + "\n")
    return path
