"""End-to-end acceptance gate.

Thirteen numbered criteria covering oracle equivalence, termination,
limit-law constants and CDFs, convergence rates, non-elastic median
regressions, and the Poisson exceedance approximation, each at desk scale.
One summary line is printed per criterion.

Monte Carlo artifacts are cached under COLLIDE1D_ACCEPTANCE_DIR (default
a fixed directory under the system temp dir) so an interrupted session
resumes from completed shards.
"""

import math
import os
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

from collide1d import experiments as ex
from collide1d import stats
from collide1d.distributions import DistributionSpec, SeedSpec, sample_with
from collide1d.elastic import (
    ParticleEnsemble,
    batch_row_final,
    batch_system_extrema,
    batch_system_final,
    pair_times_upper,
)
from collide1d.limits import (
    LawKind,
    LimitLaw,
    finite_n_single_cdf,
    QuadratureConfig,
)
from collide1d.simulate import CollisionRule, simulate

N01 = DistributionSpec.normal(0, 1)
U02 = DistributionSpec.uniform(0, 2)

ACC_DIR = Path(
    os.environ.get(
        "COLLIDE1D_ACCEPTANCE_DIR",
        os.path.join(tempfile.gettempdir(), "collide1d_acceptance"),
    )
)


def check(num, ok, detail):
    print(f"criterion {num:02d}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {num:02d}: {detail}"


def draw_ensemble(n, seed, trial, fx=N01, fv=N01):
    rng = SeedSpec(seed, trial).stream()
    x = sample_with(fx, rng, n)
    v = sample_with(fv, rng, n)
    return ParticleEnsemble(x, v)


def draw_batches(n, trials, seed, chunk, fx=N01, fv=N01):
    """Yield (X, V) blocks; one counter-based stream per trial."""
    for a in range(0, trials, chunk):
        b = min(a + chunk, trials)
        X = np.empty((b - a, n))
        V = np.empty((b - a, n))
        for k in range(a, b):
            rng = SeedSpec(seed, k).stream()
            X[k - a] = sample_with(fx, rng, n)
            V[k - a] = sample_with(fv, rng, n)
        yield X, V


def run_experiment(tag, **kw):
    kw.setdefault("output_dir", str(ACC_DIR / tag))
    config = ex.ExperimentConfig(**kw)
    return ex.run(config)


def two_sample_sup(a, b):
    """Sup distance between the ECDFs of two equal-size samples."""
    grid = np.sort(np.concatenate([a, b]))
    fa = np.searchsorted(np.sort(a), grid, side="right") / a.size
    fb = np.searchsorted(np.sort(b), grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def test_criterion_01_elastic_oracle_equivalence():
    t0 = time.monotonic()
    worst = 0.0
    for k in range(500):
        n = 3 + k % 10
        ens = draw_ensemble(n, 101, k)
        out = simulate(ens, CollisionRule(0.0))
        taus = np.sort(pair_times_upper(ens))
        taus = taus[taus > 0]
        got = np.sort(out.event_times)
        assert got.size == taus.size
        if taus.size:
            worst = max(worst, float(np.max(np.abs(got - taus) / np.abs(taus))))
    dt = time.monotonic() - t0
    check(1, worst < 1e-9 and dt < 10.0,
          f"max rel err {worst:.2e} over 500 ensembles in {dt:.1f}s")


def test_criterion_02_termination_and_sorting():
    t0 = time.monotonic()
    cells = [(eps, n) for eps in (-0.1, -0.005, 0.005, 0.1, 0.5)
             for n in (10, 50, 100)]
    runs_per_cell = 10_000 // len(cells) + 1
    bad = 0
    total = 0
    for c, (eps, n) in enumerate(cells):
        rule = CollisionRule(eps)
        for k in range(runs_per_cell):
            ens = draw_ensemble(n, 202 + c, k)
            out = simulate(ens, rule)  # raises if the cap fires
            idx = np.argsort(ens.positions)
            if not np.all(np.diff(out.terminal_velocities[idx]) > 0):
                bad += 1
            total += 1
    dt = time.monotonic() - t0
    check(2, bad == 0 and dt < 300.0,
          f"{total} runs terminated, {bad} unsorted, {dt:.0f}s")


def test_criterion_03_pair_time_cauchy_law():
    rng = SeedSpec(303).stream()
    x = rng.normal(size=(10**6, 2))
    v = rng.normal(size=(10**6, 2))
    tau = np.sort((x[:, 1] - x[:, 0]) / (v[:, 0] - v[:, 1]))
    n = tau.size
    theo = 0.5 + np.arctan(tau) / math.pi
    hi = np.arange(1, n + 1) / n
    lo = np.arange(0, n) / n
    sup = max(float(np.max(np.abs(hi - theo))), float(np.max(np.abs(lo - theo))))
    check(3, sup < 0.002, f"sup distance to Cauchy(0,1) = {sup:.5f}")


def test_criterion_04_system_finite_mean_law():
    t0 = time.monotonic()
    law = LimitLaw(LawKind.SYSTEM_FINITE_MEAN, N01, N01)
    c = law.constant()
    const_ok = abs(c - 1.0 / math.pi) < 1e-6
    report = run_experiment(
        "c04_system_n32",
        experiment=ex.ELASTIC_SYSTEM_CDF, fx=N01, fv=N01,
        n_values=(32,), trials=10**6, base_seed=404,
    )
    sup = report.record_for(32)["sup_distance"]
    dt = time.monotonic() - t0
    check(4, const_ok and sup < 0.03 and dt < 1800.0,
          f"C = {c:.8f}, sup at N=32 over 1e6 trials = {sup:.4f}, {dt:.0f}s")


def test_criterion_05_convergence_rate_slope():
    report = run_experiment(
        "c05_convergence",
        experiment=ex.CONVERGENCE_SWEEP, fx=N01, fv=N01,
        n_values=(5, 8, 12, 18, 27), trials=10**6, base_seed=505,
    )
    slope = report.regressions["loglog_slope"]
    check(5, -1.25 <= slope <= -0.75, f"log-log slope = {slope:.3f}")


def test_criterion_06_single_particle_law():
    cfg = QuadratureConfig(rel_tol=1e-6, abs_tol=1e-10)
    mus = (0.5, 1.0, 2.0, 4.0)
    trials = 10**6
    finals = np.concatenate([
        batch_row_final(X, V) for X, V in draw_batches(5, trials, 606, 20_000)
    ])
    exact_ok = True
    details = []
    for mu in mus:
        p_exact = finite_n_single_cdf(N01, N01, 5, mu, cfg)
        p_mc = float(np.mean(finals < mu))
        se = math.sqrt(max(p_exact * (1 - p_exact), 1e-12) / trials)
        ok = abs(p_mc - p_exact) <= 3.0 * se + 2e-6  # quadrature slack
        exact_ok = exact_ok and ok
        details.append(f"mu={mu}: |{p_mc:.5f}-{p_exact:.5f}|<=3SE={3*se:.1e}")

    finals400 = np.concatenate([
        batch_row_final(X, V) for X, V in draw_batches(400, 10**4, 616, 500)
    ])
    med = float(np.median(finals400)) / 400.0
    med_ok = abs(med - 0.412) <= 0.03
    check(6, exact_ok and med_ok,
          "; ".join(details) + f"; median t/N at N=400 = {med:.4f}")


def test_criterion_07_median_coefficient():
    law = LimitLaw(LawKind.SYSTEM_FINITE_MEAN, N01, N01)
    ct = law.median()
    target = 1.0 / (math.pi * math.log(4))
    exact_ok = abs(ct - target) < 1e-6
    finals = np.concatenate([
        batch_system_final(X, V) for X, V in draw_batches(200, 10**4, 707, 100)
    ])
    mc = float(np.median(finals)) / 200.0**2
    mc_ok = abs(mc - target) / target < 0.10
    check(7, exact_ok and mc_ok,
          f"C_T = {ct:.8f} (target {target:.8f}), MC M_T/N^2 = {mc:.5f}")


def test_criterion_08_heavy_tail_laws():
    rep_a = run_experiment(
        "c08_stable_half",
        experiment=ex.ELASTIC_SYSTEM_CDF, fx=DistributionSpec.powertail(0.5),
        fv=N01, n_values=(100,), trials=10**5, base_seed=808,
    )
    sup_a = rep_a.record_for(100)["sup_distance"]
    rep_b = run_experiment(
        "c08_cauchy",
        experiment=ex.ELASTIC_SYSTEM_CDF, fx=DistributionSpec.cauchy(0, 1),
        fv=N01, n_values=(100,), trials=10**5, base_seed=818,
    )
    sup_b = rep_b.record_for(100)["sup_distance"]
    check(8, sup_a < 0.05 and sup_b < 0.05,
          f"stable alpha=1/2 sup = {sup_a:.4f}, Cauchy-position sup = {sup_b:.4f}")


def test_criterion_09_slow_convergence_regime():
    report = run_experiment(
        "c09_powertail54",
        experiment=ex.ELASTIC_SYSTEM_CDF, fx=DistributionSpec.powertail(1.25),
        fv=N01, n_values=(5, 10, 20, 40, 80), trials=10**5, base_seed=909,
    )
    dists = [(rec["n"], rec["sup_distance"]) for rec in report.records]
    slope = stats.loglog_slope(dists)
    vals = [d for _, d in dists]
    monotone = all(a > b for a, b in zip(vals, vals[1:]))
    check(9, -0.55 <= slope <= -0.20 and monotone,
          f"slope = {slope:.3f}, distances = "
          + ", ".join(f"{v:.4f}" for v in vals))


def test_criterion_10_nonelastic_regressions():
    t0 = time.monotonic()

    def median_runs(fv, seed0, tag):
        points_t, points_T = [], []
        for i, n in enumerate((50, 100, 200)):
            grid = tuple(np.linspace(-0.5 / n, 0.5 / n, 9))
            rep = run_experiment(
                f"c10_{tag}_n{n}_s{seed0}",
                experiment=ex.NONELASTIC_MEDIANS, fx=N01, fv=fv,
                n_values=(n,), eps_values=grid, trials=10**4,
                base_seed=seed0 + i,
            )
            for rec in rep.records:
                points_t.append((rec["eps_n"], rec["log_ratio_t"]))
                points_T.append((rec["eps_n"], rec["log_ratio_T"]))
        fit_t = stats.fit_eps_regression(points_t, stats.THROUGH_ORIGIN)
        fit_T = stats.fit_eps_regression(points_T, stats.THROUGH_ORIGIN)
        return fit_t, fit_T

    fit_t_norm, fit_T_norm = median_runs(N01, 2010, "norm")
    _, fit_T_unif = median_runs(U02, 2020, "unif")
    d1 = fit_t_norm.coefficients[0]
    d2_norm = fit_T_norm.coefficients[1]
    d2_unif = fit_T_unif.coefficients[1]
    dt = time.monotonic() - t0
    check(10, 0.25 <= d1 <= 0.37 and d2_unif > d2_norm and dt < 7200.0,
          f"D1(M_t, normal) = {d1:.3f}; D2(M_T): uniform {d2_unif:.3f} "
          f"> normal {d2_norm:.3f}; {dt:.0f}s")


def test_criterion_11_collision_fraction():
    fracs = np.empty(1000)
    for k in range(1000):
        ens = draw_ensemble(100, 1111, k)
        out = simulate(ens, CollisionRule(0.0))
        fracs[k] = np.mean(out.collisions_per_particle / 99.0)
    mean = float(np.mean(fracs))
    check(11, abs(mean - 0.5) <= 0.01, f"mean collision fraction = {mean:.4f}")


def test_criterion_12_poisson_exceedance():
    report = run_experiment(
        "c12_poisson",
        experiment=ex.POISSON_CHECK, fx=N01, fv=N01,
        n_values=(100,), trials=10**5, base_seed=1212, z_time=1.0,
    )
    rec = report.record_for(100)
    lam = 1.0 / math.pi
    mean_ok = abs(rec["count_mean"] - lam) / lam < 0.10
    var_ok = abs(rec["count_var"] - lam) / lam < 0.10
    check(12, mean_ok and var_ok,
          f"count mean = {rec['count_mean']:.4f}, var = {rec['count_var']:.4f}, "
          f"lambda = {lam:.4f}")


def test_criterion_13_min_max_symmetry():
    maxima = []
    minima = []
    for X, V in draw_batches(20, 10**5, 1313, 10_000):
        hi, lo = batch_system_extrema(X, V)
        maxima.append(hi)
        minima.append(lo)
    sup = two_sample_sup(np.concatenate(minima), -np.concatenate(maxima))
    check(13, sup < 0.01, f"sup distance ECDF(min) vs ECDF(-max) = {sup:.5f}")
