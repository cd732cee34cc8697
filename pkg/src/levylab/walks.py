"""The underlying walk S, the flight Y = omega[S] and the unit-speed gas X."""

from __future__ import annotations

import csv
import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from . import _kernels
from .medium import MediumWindow


class IncrementLaw:
    """Base class of the integer increment laws of the underlying walk."""

    @property
    def drift(self) -> float | None:
        """``E xi`` (None when undefined)."""
        raise NotImplementedError

    @property
    def second_moment(self) -> float:
        raise NotImplementedError

    @property
    def abs_moment(self) -> float:
        raise NotImplementedError

    @property
    def moment_ceiling(self) -> float:
        """``sup{q >= 0 : E|xi|^q < inf}``."""
        raise NotImplementedError

    @property
    def stability_index(self) -> float | None:
        raise NotImplementedError

    symmetric = True
    unimodal = True
    simple_symmetric = False

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    def params(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class SimpleSymmetric(IncrementLaw):
    simple_symmetric = True

    drift = 0.0
    second_moment = 1.0
    abs_moment = 1.0
    moment_ceiling = math.inf
    stability_index = 2.0

    def sample(self, rng, size):
        return 2 * rng.integers(0, 2, size, dtype=np.int64) - 1

    def params(self):
        return {"kind": "simple"}


@dataclass(frozen=True)
class LazySymmetric(IncrementLaw):
    """0 with probability ``p0``, otherwise +-1 with equal probability."""

    p0: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.p0 < 1.0:
            raise ValueError(f"p0 must lie in [0, 1), got {self.p0}")

    drift = 0.0
    moment_ceiling = math.inf
    stability_index = 2.0

    @property
    def second_moment(self):
        return 1.0 - self.p0

    @property
    def abs_moment(self):
        return 1.0 - self.p0

    @property
    def unimodal(self):
        return self.p0 >= (1.0 - self.p0) / 2.0

    def sample(self, rng, size):
        u = rng.random(size)
        half = (1.0 - self.p0) / 2.0
        return np.where(u < half, -1, np.where(u < 2 * half, 1, 0)).astype(np.int64)

    def params(self):
        return {"kind": "lazy", "p0": self.p0}


@functools.lru_cache(maxsize=32)
def _zeta_table(beta: float, size: int = 1 << 16):
    """CDF of ``|xi|`` on ``1..size`` for ``P(|xi| = j) = j**-(beta+1) / zeta(beta+1)``."""
    j = np.arange(1, size + 1, dtype=float)
    cdf = np.cumsum(j ** -(beta + 1.0)) / special.zeta(beta + 1.0)
    return cdf, _kernels.guide_table(cdf, size)


def _zeta_tail(beta: float, start: int, rng: np.random.Generator, size: int) -> np.ndarray:
    """Draws of ``|xi|`` conditioned on ``|xi| > start`` by rejection."""
    a = beta + 1.0
    out = np.empty(size, dtype=np.int64)
    filled = 0
    # envelope: floor(Y) with Y Pareto(a - 1) on [start + 1, inf)
    bound = (1.0 + 1.0 / (start + 1)) ** a
    while filled < size:
        k = 2 * (size - filled)
        y = (start + 1) * (1.0 - rng.random(k)) ** (-1.0 / (a - 1.0))
        j = np.floor(y)
        mass = (j ** (1.0 - a) - (j + 1.0) ** (1.0 - a)) / (a - 1.0)
        accept = rng.random(k) * bound * mass <= j ** -a
        got = j[accept & (j < 2.0**62)].astype(np.int64)[: size - filled]
        out[filled:filled + len(got)] = got
        filled += len(got)
    return out


def _zeta_magnitudes(beta: float, u: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    cdf, guide = _zeta_table(beta)
    j = _kernels.guided_inverse(u, cdf, guide)
    far = j < 0
    j += 1
    if far.any():
        j[far] = _zeta_tail(beta, len(cdf), rng, int(far.sum()))
    return j


@dataclass(frozen=True)
class SymmetricZeta(IncrementLaw):
    """``P(xi = +-j) = j**-(beta+1) / (2 zeta(beta+1))`` for ``j >= 1``.

    Symmetric and unimodal in ``|j|``; in the normal domain of the
    ``beta``-stable law for ``beta < 2`` and of the Gaussian for ``beta > 2``.
    """

    beta: float

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")

    @property
    def norm(self):
        return float(special.zeta(self.beta + 1.0))

    @property
    def drift(self):
        return 0.0 if self.beta > 1 else None

    @property
    def abs_moment(self):
        return float(special.zeta(self.beta)) / self.norm if self.beta > 1 else math.inf

    @property
    def second_moment(self):
        return float(special.zeta(self.beta - 1.0)) / self.norm if self.beta > 2 else math.inf

    @property
    def moment_ceiling(self):
        return self.beta

    @property
    def stability_index(self):
        if self.beta == 2:
            return None
        return min(self.beta, 2.0)

    def pmf_abs(self, j):
        j = np.asarray(j, dtype=float)
        return j ** -(self.beta + 1.0) / self.norm

    def sample(self, rng, size):
        u = rng.random(size)
        sign = np.where(u < 0.5, -1, 1)
        # reuse the uniform: 2u mod 1 is uniform and independent of the sign
        mag = _zeta_magnitudes(self.beta, (2.0 * u) % 1.0, rng)
        return sign * mag

    def params(self):
        return {"kind": "symmetric_zeta", "beta": self.beta}


@dataclass(frozen=True)
class DriftedZeta(IncrementLaw):
    """``xi = floor(nu) + Bernoulli(frac(nu)) + Z`` with ``Z ~ SymmetricZeta(beta)``.

    Integer valued, mean ``nu``, asymmetric, and in the same stable domain as
    ``Z`` (so the centered limit has skewness 0).  Needs ``beta > 1``.
    """

    beta: float
    nu: float

    def __post_init__(self):
        if not self.beta > 1:
            raise ValueError(f"DriftedZeta needs beta > 1 for a finite drift, got {self.beta}")

    symmetric = False
    unimodal = False

    @property
    def core(self):
        return SymmetricZeta(self.beta)

    @property
    def drift(self):
        return self.nu

    @property
    def second_moment(self):
        if self.beta <= 2:
            return math.inf
        frac = self.nu - math.floor(self.nu)
        return self.core.second_moment + frac * (1 - frac) + self.nu**2

    @property
    def abs_moment(self):
        core = self.core
        base = math.floor(self.nu)
        frac = self.nu - base

        def shifted(c):
            # E|c + Z| = E|Z| + sum over |j| < |c| of p_j (|c + j| - |j|)
            total = core.abs_moment
            for j in range(1, abs(c)):
                p = float(core.pmf_abs(j)) / 2.0
                total += p * (abs(c + j) - j) + p * (abs(c - j) - j)
            return total

        return (1 - frac) * shifted(base) + frac * shifted(base + 1)

    @property
    def moment_ceiling(self):
        return self.beta

    @property
    def stability_index(self):
        return self.core.stability_index

    def sample(self, rng, size):
        base = math.floor(self.nu)
        frac = self.nu - base
        z = self.core.sample(rng, size)
        return z + base + (rng.random(size) < frac)

    def params(self):
        return {"kind": "drifted_zeta", "beta": self.beta, "nu": self.nu}


def increment_law_from_dict(d: dict) -> IncrementLaw:
    d = dict(d)
    kind = d.pop("kind")
    laws = {"simple": SimpleSymmetric, "lazy": LazySymmetric,
            "symmetric_zeta": SymmetricZeta, "drifted_zeta": DriftedZeta}
    if kind not in laws:
        raise ValueError(f"unknown increment law {kind!r}; expected one of {sorted(laws)}")
    return laws[kind](**d)


@dataclass(frozen=True)
class WalkPath:
    steps: np.ndarray  # S_0 .. S_N

    def __post_init__(self):
        if self.steps[0] != 0:
            raise ValueError("a walk starts at 0")

    @property
    def n_steps(self):
        return len(self.steps) - 1


@dataclass(frozen=True)
class FlightPath:
    walk: WalkPath
    positions: np.ndarray  # Y_0 .. Y_N


@dataclass(frozen=True)
class GasTrajectory:
    positions: np.ndarray
    collision_times: np.ndarray
    walk: WalkPath | None = field(default=None, compare=False)

    @property
    def horizon(self) -> float:
        return float(self.collision_times[-1])

    def to_csv(self, path):
        """Rows ``(n, S_n, Y_n, T_n)``."""
        s = self.walk.steps if self.walk is not None else [""] * len(self.positions)
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["n", "S", "Y", "T"])
            for n, (sn, y, t) in enumerate(zip(s, self.positions, self.collision_times)):
                out.writerow([n, int(sn) if sn != "" else "", repr(float(y)), repr(float(t))])


def sample_walk(law: IncrementLaw, n_steps: int, rng: np.random.Generator) -> WalkPath:
    if n_steps < 1:
        raise ValueError(f"n_steps must be at least 1, got {n_steps}")
    xi = law.sample(rng, n_steps)
    return WalkPath(np.concatenate([[0], np.cumsum(xi)]))


def flight(window: MediumWindow, path: WalkPath) -> FlightPath:
    return FlightPath(path, window.targets(path.steps))


def interpolate(fl: FlightPath | np.ndarray) -> GasTrajectory:
    """Collision times ``T_0 = 0, T_{n+1} = T_n + |Y_{n+1} - Y_n|``."""
    if isinstance(fl, FlightPath):
        y, walk = fl.positions, fl.walk
    else:
        y, walk = np.asarray(fl, dtype=float), None
    t = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(y)))])
    return GasTrajectory(y, t, walk)


def position_at(traj: GasTrajectory, t: float) -> float:
    """``X(t)``; raises ValueError if ``t`` exceeds the simulated horizon."""
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    times = traj.collision_times
    if t > times[-1]:
        raise ValueError(f"t = {t} beyond trajectory horizon {times[-1]}; simulate more steps")
    y = traj.positions
    n = int(np.searchsorted(times, t, side="left"))
    if n == 0:
        return float(y[0])
    # T_{n-1} < t <= T_n
    if t == times[n]:
        return float(y[n])
    d = y[n] - y[n - 1]
    return float(y[n - 1] + math.copysign(t - times[n - 1], d)) if d != 0 else float(y[n - 1])


def initial_steps(mean_gap: float, t: float) -> int:
    """First guess at the number of walk steps needed to reach time ``t``."""
    c = 2.0 / mean_gap if math.isfinite(mean_gap) else 2.0
    return max(1, math.ceil(c * t))


def simulate_gas(window: MediumWindow, law: IncrementLaw, times, rng: np.random.Generator,
                 max_doublings: int = 40):
    """Run the gas in ``window`` until it passes ``max(times)``.

    Starts from :func:`initial_steps` and doubles the walk (continuing the same
    random stream) until the last collision time reaches the horizon.  Returns
    ``(x, seg, increments)`` with ``x`` the positions at ``times`` (ascending),
    ``seg`` the segment indices from the kernel and the increments used.
    """
    times = np.asarray(times, dtype=float)
    n = initial_steps(window.gap_law.mean, float(times[-1]))
    xi = law.sample(rng, n)
    for _ in range(max_doublings):
        s = np.concatenate([[0], np.cumsum(xi)])
        y = window.targets(s)
        x, seg = _kernels.gas_positions(y, times)
        if seg[-1] >= 0:
            return x, seg, xi
        xi = np.concatenate([xi, law.sample(rng, len(xi))])
    raise RuntimeError(f"gas did not reach time {times[-1]} after {max_doublings} doublings")
