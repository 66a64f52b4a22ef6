"""Statistical analysis layer: ECDFs, sup distances, bootstrap medians,
log-log slopes, and the polynomial regressions in eps*N."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from collide1d.distributions import SeedSpec

THROUGH_ORIGIN = "through_origin_d1_d2"
WITH_INTERCEPT = "with_intercept_d0_d1_d2"


class EmpiricalCDF:
    """Right-continuous empirical CDF of a fixed sample."""

    def __init__(self, samples):
        samples = np.asarray(samples, dtype=float)
        if samples.size == 0:
            raise ValueError("empty sample set")
        self.sorted_samples = np.sort(samples)
        self.n = samples.size

    def __call__(self, x):
        """F_hat(x) = (#samples <= x) / n, vectorized."""
        idx = np.searchsorted(self.sorted_samples, np.asarray(x, dtype=float), side="right")
        out = idx / self.n
        return float(out) if np.ndim(x) == 0 else out


def sup_distance(ecdf: EmpiricalCDF, law, interval: tuple[float, float],
                 grid: int = 512) -> float:
    """Sup of |F_hat - F| over the interval.

    ``law`` is a LimitLaw or any callable CDF.  The sup is taken over a
    uniform grid plus both corners of every sample jump inside the
    interval, which a pure-grid evaluation would under-report.
    """
    lo, hi = interval
    if not (0.0 <= lo < hi):
        raise ValueError("interval must satisfy 0 <= lo < hi")
    if grid < 2:
        raise ValueError("grid must have at least two points")
    f = law.cdf if hasattr(law, "cdf") else law

    ts = np.linspace(lo, hi, grid)
    best = float(np.max(np.abs(ecdf(ts) - np.asarray(f(ts), dtype=float))))

    s = ecdf.sorted_samples
    inside = s[(s >= lo) & (s <= hi)]
    if inside.size:
        theo = np.asarray(f(inside), dtype=float)
        counts = np.searchsorted(s, inside, side="right") / ecdf.n
        before = np.searchsorted(s, inside, side="left") / ecdf.n
        best = max(
            best,
            float(np.max(np.abs(counts - theo))),
            float(np.max(np.abs(before - theo))),
        )
    return best


def loglog_slope(points) -> float:
    """Least-squares slope of log(err) against log(N)."""
    pts = [(float(n), float(e)) for n, e in points]
    if len(pts) < 3:
        raise ValueError("need at least three points")
    ns = np.array([p[0] for p in pts])
    es = np.array([p[1] for p in pts])
    if np.any(ns <= 0) or np.any(es <= 0):
        raise ValueError("log-log slope requires positive values")
    slope, _ = np.polyfit(np.log(ns), np.log(es), 1)
    return float(slope)


@dataclass(frozen=True)
class MedianEstimate:
    point: float
    ci_lo: float
    ci_hi: float
    confidence: float
    resamples: int


def bootstrap_median(samples, confidence: float = 0.99, resamples: int = 100,
                     seed: SeedSpec | None = None,
                     method: str = "percentile") -> MedianEstimate:
    """Sample median with a bootstrap confidence interval.

    The default is a percentile interval over ``resamples`` resampled
    medians; ``method="normal"`` gives the +-z*sd interval instead.
    Deterministic given (samples, seed, resamples).
    """
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise ValueError("empty input")
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must be in (0, 1)")
    point = float(np.median(samples))
    rng = (seed or SeedSpec(0)).stream()
    n = samples.size
    idx = rng.integers(0, n, size=(resamples, n))
    meds = np.median(samples[idx], axis=1)
    tail = 0.5 * (1.0 - confidence)
    if method == "percentile":
        lo, hi = np.quantile(meds, [tail, 1.0 - tail])
    elif method == "normal":
        from scipy.special import ndtri
        z = ndtri(1.0 - tail)
        sd = float(np.std(meds, ddof=1)) if resamples > 1 else 0.0
        lo, hi = point - z * sd, point + z * sd
    else:
        raise ValueError(f"unknown bootstrap method {method!r}")
    lo = min(lo, point)
    hi = max(hi, point)
    return MedianEstimate(point, float(lo), float(hi), confidence, resamples)


@dataclass(frozen=True)
class RegressionFit:
    coefficients: tuple[float, ...]  # (D1, D2) or (D0, D1, D2)
    residual_rms: float
    design: str


def fit_eps_regression(points, design: str = THROUGH_ORIGIN) -> RegressionFit:
    """Ordinary least squares of y on the monomials of eps*N.

    ``through_origin_d1_d2`` fits D1 x + D2 x^2;
    ``with_intercept_d0_d1_d2`` adds the constant D0.
    """
    pts = [(float(x), float(y)) for x, y in points]
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if design == THROUGH_ORIGIN:
        A = np.column_stack([x, x * x])
    elif design == WITH_INTERCEPT:
        A = np.column_stack([np.ones_like(x), x, x * x])
    else:
        raise ValueError(f"unknown design {design!r}")
    if x.size < A.shape[1]:
        raise ValueError("not enough points for the chosen design")
    if np.linalg.matrix_rank(A) < A.shape[1]:
        raise ValueError("rank-deficient design matrix")
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    rms = float(np.sqrt(np.mean(resid**2)))
    return RegressionFit(tuple(float(c) for c in coef), rms, design)


def poisson_count_check(counts, lam: float) -> tuple[float, float]:
    """(|mean - lambda|, |var - lambda|) of the observed exceedance counts."""
    counts = np.asarray(counts, dtype=float)
    if counts.size == 0:
        raise ValueError("empty counts")
    if lam <= 0.0:
        raise ValueError("lambda must be positive")
    mean_err = abs(float(np.mean(counts)) - lam)
    var_err = abs(float(np.var(counts)) - lam)
    return mean_err, var_err
