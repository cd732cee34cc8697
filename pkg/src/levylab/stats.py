"""Estimators and tests that turn ensembles into verdicts."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy import special, stats as sps

from .ensemble import quenched_sweep
from .medium import GapLaw
from .walks import IncrementLaw


@dataclass(frozen=True)
class KSResult:
    statistic: float
    n: int
    m: int
    pvalue: float


def ks_two_sample(xs, ys) -> KSResult:
    """Two-sample Kolmogorov-Smirnov test.

    ``D`` is exact (both empirical CDFs evaluated at every pooled point, ties
    included); the p-value is the asymptotic Kolmogorov tail at
    ``sqrt(n m / (n + m)) * D``.
    """
    xs = np.sort(np.asarray(xs, dtype=float))
    ys = np.sort(np.asarray(ys, dtype=float))
    n, m = len(xs), len(ys)
    if n == 0 or m == 0:
        raise ValueError("both samples must be non-empty")
    pooled = np.concatenate([xs, ys])
    fx = np.searchsorted(xs, pooled, side="right") / n
    fy = np.searchsorted(ys, pooled, side="right") / m
    d = float(np.max(np.abs(fx - fy)))
    en = n * m / (n + m)
    return KSResult(d, n, m, float(special.kolmogorov(math.sqrt(en) * d)))


def studentize(x, method: str = "median_abs") -> np.ndarray:
    """Remove the unknown scale of a sample before a two-sample comparison.

    ``"median_abs"`` (default) divides by ``median |x|`` and suits laws that
    are known to have location 0, which covers every centered or positive
    strictly stable limit.  ``"iqr"`` divides by the interquartile range and
    ``"median_iqr"`` also subtracts the median first.  Both IQR variants make
    the two-sample test anti-conservative for strongly skewed laws: at the 1%
    level, same-law pairs of positive 1/2-stable samples are rejected 16% and
    60% of the time.
    """
    x = np.asarray(x, dtype=float)
    if method == "median_abs":
        scale = np.median(np.abs(x))
        centre = 0.0
    elif method in ("iqr", "median_iqr"):
        q1, med, q3 = np.percentile(x, [25, 50, 75])
        scale = q3 - q1
        centre = med if method == "median_iqr" else 0.0
    else:
        raise ValueError(f"unknown method {method!r}")
    if scale == 0:
        raise ValueError("sample scale is zero; cannot studentize")
    return (x - centre) / scale


def empirical_abs_moment(samples, q: float) -> float:
    """``mean |x|**q`` with exactly rounded summation (order independent)."""
    if q < 0:
        raise ValueError(f"q must be non-negative, got {q}")
    x = np.abs(np.asarray(samples, dtype=float)) ** q
    return math.fsum(x) / len(x)


@dataclass(frozen=True)
class ExponentFit:
    abscissae: np.ndarray  # log scales
    ordinates: np.ndarray  # log moments
    slope: float
    intercept: float
    slope_stderr: float


def fit_exponent(points: Sequence[tuple[float, float]], min_decades: float = 2.0) -> ExponentFit:
    """Least-squares slope of ``log moment`` against ``log scale``.

    Needs at least four points, strictly increasing scales spanning
    ``min_decades`` decades or more, and positive moments.
    """
    scales = np.array([p[0] for p in points], dtype=float)
    moments = np.array([p[1] for p in points], dtype=float)
    if len(points) < 4:
        raise ValueError(f"need at least 4 points, got {len(points)}")
    if np.any(moments <= 0) or np.any(scales <= 0):
        raise ValueError("scales and moments must be positive")
    if np.any(np.diff(scales) <= 0):
        raise ValueError("scales must be strictly increasing")
    if scales[-1] / scales[0] < 10**min_decades * (1 - 1e-12):
        raise ValueError(f"scales must span at least {min_decades:g} decades")
    lx, ly = np.log(scales), np.log(moments)
    fit = sps.linregress(lx, ly)
    return ExponentFit(lx, ly, float(fit.slope), float(fit.intercept), float(fit.stderr))


class TailEstimate(NamedTuple):
    p: float
    low: float
    high: float
    hits: int
    n: int


def wilson_interval(hits: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    p = hits / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    # the interval closes exactly at 0 (no hits) or 1 (all hits)
    lo = 0.0 if hits == 0 else max(0.0, centre - half)
    hi = 1.0 if hits == n else min(1.0, centre + half)
    return lo, hi


def tail_probability(samples, threshold: float) -> TailEstimate:
    """Fraction of samples strictly above ``threshold`` with a 95% Wilson interval."""
    x = np.asarray(samples)
    hits = int(np.count_nonzero(x > threshold))
    lo, hi = wilson_interval(hits, len(x))
    return TailEstimate(hits / len(x), lo, hi, hits, len(x))


class DeviationRate(NamedTuple):
    t: float
    rate: float
    p_hat: float
    hits: int


def stretched_exp_rate(gap_law: GapLaw, inc_law: IncrementLaw, a: float, t_grid,
                       replicas: int, medium_seed, seed: int, *, method: str = "tilted",
                       workers: int = 1, repetition: int = 0) -> list[DeviationRate]:
    """Empirical ``log P_omega(|X(t)| > a t) / sqrt(a t)`` on a fixed medium.

    ``method="plain"`` counts exceedances of untilted walks.  The default
    ``"tilted"`` draws the walk from an even mixture of walks with drift
    ``+-min(a, 0.95)`` and reweights by the likelihood ratio up to the segment
    holding ``t``; it is unbiased and resolves probabilities far below
    ``1/replicas``.  Either way a point without exceedances is given the
    floor value ``1/replicas``.
    """
    if not 0.0 < a <= 1.0:
        raise ValueError(f"a must lie in (0, 1], got {a}")
    if not inc_law.simple_symmetric:
        raise ValueError("the deviation rate assumes S is a simple symmetric RW")
    if not math.isfinite(gap_law.mean):
        raise ValueError("the deviation rate assumes a finite mean gap")
    if method not in ("tilted", "plain"):
        raise ValueError(f"unknown method {method!r}")
    t_grid = tuple(sorted(float(t) for t in t_grid))
    tilt = min(a, 0.95) if method == "tilted" else 0.0
    results = quenched_sweep(gap_law, inc_law, "X_at", t_grid, replicas, medium_seed, seed,
                             workers=workers, repetition=repetition, tilt=tilt)
    out = []
    for res in results:
        t = res.point
        hit = np.abs(res.samples) > a * t
        if res.log_weights is None:
            p_hat = float(np.mean(hit))
        else:
            p_hat = math.fsum(np.exp(res.log_weights[hit])) / replicas
        hits = int(np.count_nonzero(hit))
        # the floor guards empty exceedance counts; for plain sampling it is max(p, 1/R)
        guarded = p_hat if hits else 1.0 / replicas
        out.append(DeviationRate(t, math.log(guarded) / math.sqrt(a * t), p_hat, hits))
    return out
