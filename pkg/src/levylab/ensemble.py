"""Quenched and annealed ensembles of the flight Y and the gas X.

Replica ``i`` of repetition ``r`` under master seed ``s`` draws its walk from
``substream(s, WALK, r, i)``; in the annealed protocol its medium is
``MediumWindow(law, (s, MEDIUM, r, i))``.  In the quenched protocol every
replica shares one medium, rebuilt identically in each worker from
``medium_seed``.  Results are merged by replica index, so samples do not depend
on the number of workers.
"""

from __future__ import annotations

import csv
import json
import math
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import rng as rngmod
from .medium import GapLaw, MediumWindow
from .walks import IncrementLaw, simulate_gas

OBSERVABLES = ("Y_at", "X_at")


@dataclass(frozen=True)
class _Job:
    gap_law: GapLaw
    inc_law: IncrementLaw
    observable: str
    points: tuple
    seed: int
    repetition: int
    medium_seed: tuple | None  # None: annealed
    tilt: float = 0.0


class _TiltedSimple(IncrementLaw):
    """+1 with probability ``p``, else -1; proposal law for rare-event sampling."""

    def __init__(self, p):
        self.p = p

    def sample(self, rng, size):
        return np.where(rng.random(size) < self.p, 1, -1).astype(np.int64)


def _mixture_log_weight(ups, downs, h):
    # log of dP0/dQ for Q = (P_{+h} + P_{-h}) / 2 on the first ups + downs steps
    lp, lq = math.log1p(h), math.log1p(-h)
    a = ups * lp + downs * lq
    b = ups * lq + downs * lp
    return math.log(2.0) - np.logaddexp(a, b)


_WINDOWS: dict = {}


def _quenched_window(job):
    key = (job.gap_law, job.medium_seed)
    w = _WINDOWS.get(key)
    if w is None:
        _WINDOWS.clear()
        w = _WINDOWS[key] = MediumWindow(job.gap_law, job.medium_seed)
    return w


def _replica(job: _Job, i: int):
    walk_rng = rngmod.substream(job.seed, rngmod.WALK, job.repetition, i)
    if job.medium_seed is None:
        window = MediumWindow(job.gap_law, (job.seed, rngmod.MEDIUM, job.repetition, i))
    else:
        window = _quenched_window(job)
    points = np.asarray(job.points)
    if job.observable == "Y_at":
        n = int(points[-1])
        xi = job.inc_law.sample(walk_rng, n)
        s = np.concatenate([[0], np.cumsum(xi)])
        return window.targets(s[points.astype(np.int64)]), None
    if job.tilt:
        sign = 1.0 if walk_rng.random() < 0.5 else -1.0
        law = _TiltedSimple((1.0 + sign * job.tilt) / 2.0)
        x, seg, xi = simulate_gas(window, law, points, walk_rng)
        ups = np.cumsum(xi > 0)
        logw = np.empty(len(points))
        for k, m in enumerate(seg):
            u = int(ups[m - 1]) if m > 0 else 0
            logw[k] = _mixture_log_weight(u, m - u, job.tilt)
        return x, logw
    x, _, _ = simulate_gas(window, job.inc_law, points, walk_rng)
    return x, None


def _run_chunk(job: _Job, start: int, stop: int):
    values = np.empty((stop - start, len(job.points)))
    weights = np.empty_like(values) if job.tilt else None
    for row, i in enumerate(range(start, stop)):
        v, w = _replica(job, i)
        values[row] = v
        if weights is not None:
            weights[row] = w
    return values, weights


def _run(job: _Job, replicas: int, workers: int = 1):
    if replicas < 1:
        raise ValueError(f"replicas must be at least 1, got {replicas}")
    if workers <= 1 or replicas < 2:
        return _run_chunk(job, 0, replicas)
    n_chunks = min(replicas, 4 * workers)
    bounds = np.linspace(0, replicas, n_chunks + 1).astype(int)
    ctx = multiprocessing.get_context("fork")
    with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
        parts = list(pool.map(_run_chunk, [job] * n_chunks, bounds[:-1], bounds[1:]))
    values = np.concatenate([p[0] for p in parts])
    weights = np.concatenate([p[1] for p in parts]) if job.tilt else None
    return values, weights


@dataclass
class EnsembleResult:
    """Sample of one observable at one point under a recorded protocol."""

    observable: str
    protocol: str
    point: float
    samples: np.ndarray
    seed: int
    medium_seed: tuple | None = None
    repetition: int = 0
    params: dict = field(default_factory=dict)
    medium_token: tuple | None = None
    log_weights: np.ndarray | None = None

    def __post_init__(self):
        if self.observable == "X_at":
            # unit speed from the origin
            bound = self.point * (1 + 1e-12)
            if not np.all(np.abs(self.samples) <= bound):
                raise AssertionError(f"|X(t)| exceeds t = {self.point}")

    @property
    def replicas(self) -> int:
        return len(self.samples)

    def summary(self) -> dict:
        x = self.samples
        q1, med, q3 = np.percentile(x, [25, 50, 75])
        return {
            "observable": self.observable,
            "protocol": self.protocol,
            "point": self.point,
            "replicas": self.replicas,
            "seed": self.seed,
            "repetition": self.repetition,
            "medium_seed": list(self.medium_seed) if self.medium_seed else None,
            "params": self.params,
            "mean": float(np.mean(x)),
            "std": float(np.std(x)),
            "median": float(med),
            "iqr": float(q3 - q1),
        }

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            if self.log_weights is None:
                out.writerow(["replica", "value"])
                for i, v in enumerate(self.samples):
                    out.writerow([i, repr(float(v))])
            else:
                out.writerow(["replica", "value", "log_weight"])
                for i, (v, w) in enumerate(zip(self.samples, self.log_weights)):
                    out.writerow([i, repr(float(v)), repr(float(w))])

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.summary(), fh, indent=2, sort_keys=True)


def _check(observable, points):
    if observable not in OBSERVABLES:
        raise ValueError(f"observable must be one of {OBSERVABLES}, got {observable!r}")
    points = tuple(points)
    if not points:
        raise ValueError("need at least one point")
    if any(b < a for a, b in zip(points, points[1:])):
        raise ValueError("points must be ascending")
    if observable == "Y_at" and any(int(p) != p or p < 0 for p in points):
        raise ValueError("Y_at points are non-negative step counts")
    if observable == "X_at" and points[0] < 0:
        raise ValueError("X_at points are non-negative times")
    return points


def _results(job, values, weights, window_token):
    protocol = "annealed" if job.medium_seed is None else "quenched"
    params = {"gap": job.gap_law.params(), "increments": job.inc_law.params()}
    return [
        EnsembleResult(job.observable, protocol, p, values[:, k].copy(), job.seed,
                       job.medium_seed, job.repetition, params, window_token,
                       None if weights is None else weights[:, k].copy())
        for k, p in enumerate(job.points)
    ]


def _medium_key(medium_seed):
    return (medium_seed,) if isinstance(medium_seed, (int, np.integer)) else tuple(medium_seed)


def quenched_sweep(gap_law, inc_law, observable, points, replicas, medium_seed, seed,
                   *, workers=1, repetition=0, tilt=0.0):
    """One fixed medium, ``replicas`` independent walks, all ``points`` per walk."""
    points = _check(observable, points)
    key = _medium_key(medium_seed)
    job = _Job(gap_law, inc_law, observable, points, seed, repetition, key, tilt)
    values, weights = _run(job, replicas, workers)
    token = MediumWindow(gap_law, key).token
    return _results(job, values, weights, token)


def annealed_sweep(gap_law, inc_law, observable, points, replicas, seed,
                   *, workers=1, repetition=0):
    """A fresh medium and a fresh walk per replica, all ``points`` per replica."""
    points = _check(observable, points)
    job = _Job(gap_law, inc_law, observable, points, seed, repetition, None)
    values, weights = _run(job, replicas, workers)
    return _results(job, values, weights, None)


def quenched_ensemble(gap_law, inc_law, observable, point, replicas, medium_seed, seed,
                      *, workers=1, repetition=0):
    return quenched_sweep(gap_law, inc_law, observable, (point,), replicas, medium_seed,
                          seed, workers=workers, repetition=repetition)[0]


def annealed_ensemble(gap_law, inc_law, observable, point, replicas, seed,
                      *, workers=1, repetition=0):
    return annealed_sweep(gap_law, inc_law, observable, (point,), replicas, seed,
                          workers=workers, repetition=repetition)[0]
