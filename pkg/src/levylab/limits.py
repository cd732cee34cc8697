"""Samplers for the limit processes used as reference laws in two-sample tests.

Two constructions live here:

* the composition ``Z(W(t))`` of a two-sided stable process ``Z`` with an
  independent stable Lévy process ``W``;
* a discrete approximation of the limit of the infinite-mean gas, obtained by
  running a lattice walk over a heavy-tailed scenery and inverting its clock.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels, rng as rngmod
from .medium import GapLaw, MediumWindow
from .stable import StableLaw, levy_increments


@dataclass(frozen=True)
class CompositionSpec:
    """``Z(W(t))`` with ``Z`` two-sided of law ``outer`` and ``W`` of law ``inner``.

    ``m`` is kept for interface stability: values of ``Z`` are drawn exactly at
    the points where they are needed, so no grid is involved.
    """

    outer: StableLaw
    inner: StableLaw
    m: int = 100_000

    def __post_init__(self):
        if self.m < 1000:
            raise ValueError(f"discretization m must be at least 1000, got {self.m}")
        o = self.outer
        if o.stability_index < 1 and o.skewness != 1:
            # an increasing medium only produces totally skewed limits below index 1
            raise ValueError("outer index below 1 needs skewness 1 (increasing medium)")


def two_sided_at(law: StableLaw, s, rng: np.random.Generator) -> np.ndarray:
    """One joint draw of the two-sided process at every point of ``s``.

    The positive and negative halves are independent copies; on each half the
    points are visited in order of distance from 0 and joined by independent
    increments, so equal points receive equal values.
    """
    s = np.asarray(s, dtype=float)
    out = np.zeros(s.shape)
    for sign in (1.0, -1.0):
        mask = sign * s > 0
        if not mask.any():
            continue
        dist = sign * s[mask]
        order = np.argsort(dist, kind="stable")
        knots = dist[order]
        path = np.cumsum(levy_increments(law, np.diff(knots, prepend=0.0), rng))
        vals = np.empty_like(path)
        vals[order] = sign * path
        out[mask] = vals
    return out


def compose_marginals(spec: CompositionSpec, times, rng: np.random.Generator) -> np.ndarray:
    """One joint draw of ``(Z(W(t_1)), ..., Z(W(t_k)))`` sharing one ``Z`` path."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a non-empty sequence")
    if times[0] < 0 or np.any(np.diff(times) < 0):
        raise ValueError("times must be non-negative and nondecreasing")
    w = np.cumsum(levy_increments(spec.inner, np.diff(times, prepend=0.0), rng))
    return two_sided_at(spec.outer, w, rng)


def compose_marginal_sample(spec: CompositionSpec, t: float, rng: np.random.Generator,
                            size: int) -> np.ndarray:
    """``size`` independent draws of ``Z(W(t))`` (vectorized single-time case)."""
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    w = levy_increments(spec.inner, np.full(size, float(t)), rng)
    sign = np.where(w < 0, -1.0, 1.0)
    return sign * levy_increments(spec.outer, np.abs(w), rng)


@dataclass(frozen=True)
class SceneryApproximation:
    """Lattice walk of ``m`` steps over an i.i.d. scenery of gaps.

    Time is measured in units of ``m**((a+1)/(2a))`` and space in units of
    ``m**(1/(2a))``, ``a`` being the tail index of the gaps.
    """

    gap_law: GapLaw
    m: int = 1_000_000
    mean_abs_step: float = 1.0
    max_doublings: int = 3

    def __post_init__(self):
        a = self.gap_law.stability_index
        if a is None or not 0.0 < a < 1.0:
            raise ValueError("the scenery approximation needs gaps with tail index in (0, 1)")
        if self.m < 1:
            raise ValueError(f"m must be positive, got {self.m}")

    @property
    def time_unit(self) -> float:
        a = self.gap_law.stability_index
        return self.mean_abs_step * self.m ** ((a + 1.0) / (2.0 * a))

    @property
    def space_unit(self) -> float:
        return self.m ** (1.0 / (2.0 * self.gap_law.stability_index))


def local_times(sites: np.ndarray) -> tuple[np.ndarray, int]:
    """Visit counts per site of ``sites[:-1]`` and the index of the first site."""
    lo = int(sites.min())
    counts = np.bincount(sites[:-1] - lo)
    return counts, lo


def _random_bits(rng: np.random.Generator, n: int) -> np.ndarray:
    return np.unpackbits(np.frombuffer(rng.bytes(-(-n // 8)), dtype=np.uint8))[:n]


def ks_marginal(scenery: SceneryApproximation, t: float, rng: np.random.Generator) -> float:
    """One approximate draw of the limit marginal at time ``t``.

    The discrete clock after ``k`` steps is the total length of the gaps crossed
    so far; it is strictly increasing because every gap is positive.  We stop
    at the first step whose clock reaches ``t`` (in time units) and return the
    scenery position the walk last stood on, in space units.  Gaps are read
    from the gap arrays rather than from differences of targets, which lose
    small gaps next to very large target values.
    """
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    if t == 0:
        return 0.0
    tau = t * scenery.time_unit
    window = MediumWindow(scenery.gap_law, (rngmod.child_seed(rng),))
    bits = _random_bits(rng, scenery.m)
    for _ in range(scenery.max_doublings + 1):
        lo, hi = _kernels.walk_range(bits)
        window.ensure(min(lo - 1, -1), max(hi + 1, 1))
        k, site, local, status = _kernels.scenery_scan(
            bits, window.positive_gaps, window.negative_gaps, lo, hi, tau)
        if status == 1:
            raise AssertionError("discrete clock is not strictly increasing")
        if status == 2:
            raise AssertionError("discrete clock decreased")
        steps_run = k + 1 if k >= 0 else len(bits)
        if local.sum() != steps_run:
            raise AssertionError("local times do not add up to the walk length")
        if k >= 0:
            return window.target(int(site)) / scenery.space_unit
        bits = np.concatenate([bits, _random_bits(rng, len(bits))])
    raise RuntimeError(f"clock did not reach t = {t} after {scenery.max_doublings} doublings; "
                       "increase m")


def ks_marginal_sample(scenery: SceneryApproximation, t: float, rng: np.random.Generator,
                       size: int) -> np.ndarray:
    return np.array([ks_marginal(scenery, t, rng) for _ in range(size)])
