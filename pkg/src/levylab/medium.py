"""The random medium: i.i.d. positive gaps between consecutive targets.

Indexing convention: ``omega[0] = 0`` and ``zeta[k] = omega[k] - omega[k-1]``.
The positive side stores ``zeta[1], zeta[2], ...`` and the negative side stores
``zeta[0], zeta[-1], ...`` in that order, so ``omega[-j]`` is minus the sum of
the first ``j`` negative-side gaps.

Gaps are materialized in fixed-size blocks and every block is drawn from its
own counter-based stream, keyed by (seed, side, block index).  A target's value
therefore depends only on the seed, never on how far or in which order the
window was extended, which is what lets quenched ensembles rebuild the same
medium in every worker.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import rng as rngmod

BLOCK = 1024


class GapLaw:
    """Base class of the gap distributions.  Subclasses are frozen dataclasses."""

    name = "gap"

    @property
    def mean(self) -> float:
        raise NotImplementedError

    @property
    def stability_index(self) -> float | None:
        """Index of the stable domain the gaps belong to (None if not normal)."""
        raise NotImplementedError

    @property
    def regularly_varying(self) -> bool:
        return False

    def tail(self, x):
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    def params(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Pareto(GapLaw):
    """``P(zeta > x) = (x / x_min) ** -alpha`` for ``x >= x_min``."""

    alpha: float
    x_min: float = 1.0
    name = "pareto"

    def __post_init__(self):
        if not self.alpha > 0 or not self.x_min > 0:
            raise ValueError(f"Pareto needs alpha > 0 and x_min > 0, got {self}")

    @property
    def mean(self):
        if self.alpha <= 1:
            return math.inf
        return self.alpha * self.x_min / (self.alpha - 1)

    @property
    def stability_index(self):
        if self.alpha < 2:
            return self.alpha
        if self.alpha > 2:
            return 2.0
        return None  # x^-2 tail: Gaussian domain but not the normal one

    @property
    def regularly_varying(self):
        return True

    def tail(self, x):
        x = np.asarray(x, dtype=float)
        out = np.minimum(1.0, (np.maximum(x, 0.0) / self.x_min) ** -self.alpha)
        out = np.where(x < self.x_min, 1.0, out)
        return float(out) if out.ndim == 0 else out

    def sample(self, rng, size):
        # numpy's pareto is the Lomax law; shifting by one gives support [1, inf)
        return self.x_min * (rng.pareto(self.alpha, size) + 1.0)

    def params(self):
        return {"kind": "pareto", "alpha": self.alpha, "x_min": self.x_min}


@dataclass(frozen=True)
class ShiftedExponential(GapLaw):
    """``zeta = offset + Exp(rate)``: a light-tailed (Gaussian domain) medium."""

    rate: float = 1.0
    offset: float = 1.0
    name = "shifted_exponential"

    def __post_init__(self):
        if not self.rate > 0 or self.offset < 0:
            raise ValueError(f"need rate > 0 and offset >= 0, got {self}")

    @property
    def mean(self):
        return self.offset + 1.0 / self.rate

    @property
    def stability_index(self):
        return 2.0

    def tail(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x < self.offset, 1.0, np.exp(-self.rate * (x - self.offset)))
        return float(out) if out.ndim == 0 else out

    def sample(self, rng, size):
        return self.offset + rng.standard_exponential(size) / self.rate

    def params(self):
        return {"kind": "shifted_exponential", "rate": self.rate, "offset": self.offset}


@dataclass(frozen=True)
class Deterministic(GapLaw):
    value: float = 1.0
    name = "deterministic"

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError(f"gap must be positive, got {self.value}")

    @property
    def mean(self):
        return self.value

    @property
    def stability_index(self):
        return 2.0

    def tail(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x < self.value, 1.0, 0.0)
        return float(out) if out.ndim == 0 else out

    def sample(self, rng, size):
        return np.full(size, float(self.value))

    def params(self):
        return {"kind": "deterministic", "value": self.value}


def gap_law_from_dict(d: dict) -> GapLaw:
    d = dict(d)
    kind = d.pop("kind")
    laws = {"pareto": Pareto, "shifted_exponential": ShiftedExponential,
            "deterministic": Deterministic}
    if kind not in laws:
        raise ValueError(f"unknown gap law {kind!r}; expected one of {sorted(laws)}")
    return laws[kind](**d)


def gap_tail(law: GapLaw, x):
    """``P(zeta_1 > x)``."""
    return law.tail(x)


class _Side:
    """One half-line of gaps with running prefix sums, grown block by block."""

    def __init__(self, draw):
        self._draw = draw
        self.gaps = np.empty(0)
        self.prefix = np.zeros(1)

    def __len__(self):
        return len(self.gaps)

    def ensure(self, count: int):
        have = len(self.gaps) // BLOCK
        need = -(-count // BLOCK)
        if need <= have:
            return
        # doubling keeps the number of reallocations logarithmic
        need = max(need, 2 * have)
        new = np.concatenate([self._draw(b) for b in range(have, need)])
        if not np.all(new > 0):
            raise ValueError("gap law produced a non-positive gap")
        self.gaps = np.concatenate([self.gaps, new])
        # sequential accumulation from the last prefix value, so prefix sums do
        # not depend on the growth history
        tail = np.cumsum(np.concatenate([self.prefix[-1:], new]))[1:]
        self.prefix = np.concatenate([self.prefix, tail])


class MediumWindow:
    """Lazily materialized two-sided medium ``(omega_k, k in Z)``.

    ``seed`` is an int or a tuple of ints ``(master, *key)``; gaps of block
    ``b`` on side ``s`` (0 positive, 1 negative) come from
    ``substream(master, *key, s, b)``.
    """

    def __init__(self, gap_law: GapLaw, seed=0):
        self.gap_law = gap_law
        self.seed = (seed,) if isinstance(seed, (int, np.integer)) else tuple(seed)
        self._pos = _Side(lambda b: self._block(0, b))
        self._neg = _Side(lambda b: self._block(1, b))
        self._dense = None
        self._dense_lo = 0

    def _block(self, side, b):
        g = rngmod.substream(self.seed[0], *self.seed[1:], side, b)
        return np.asarray(self.gap_law.sample(g, BLOCK), dtype=float)

    @classmethod
    def from_gaps(cls, positive, negative):
        """Finite window with hand-chosen gaps.

        ``positive`` is ``(zeta_1, zeta_2, ...)`` and ``negative`` is
        ``(zeta_0, zeta_-1, ...)``.  Asking for a target beyond them raises
        IndexError.
        """
        w = cls(Deterministic(1.0))
        for side, given in ((w._pos, positive), (w._neg, negative)):
            given = np.asarray(given, dtype=float)
            if not np.all(given > 0):
                raise ValueError("gaps must be positive")
            side.gaps = given
            side.prefix = np.concatenate([[0.0], np.cumsum(given)])
            side.ensure = _refuse_beyond(len(given))
        w.seed = ("explicit", tuple(w._pos.gaps), tuple(w._neg.gaps))
        return w

    @property
    def token(self) -> tuple:
        """Identity of the realization: equal tokens mean equal media."""
        return (tuple(sorted(self.gap_law.params().items())), self.seed)

    @property
    def extent(self) -> tuple[int, int]:
        """Materialized index range ``(lo, hi)``, inclusive."""
        return -len(self._neg), len(self._pos)

    @property
    def positive_gaps(self):
        return self._pos.gaps

    @property
    def negative_gaps(self):
        return self._neg.gaps

    def ensure(self, lo: int, hi: int):
        """Materialize every target with index in ``[lo, hi]``."""
        if hi > len(self._pos):
            self._pos.ensure(hi)
            self._dense = None
        if -lo > len(self._neg):
            self._neg.ensure(-lo)
            self._dense = None

    def target(self, k: int) -> float:
        k = int(k)
        self.ensure(min(k, 0), max(k, 0))
        if k >= 0:
            return float(self._pos.prefix[k])
        return -float(self._neg.prefix[-k])

    def dense(self) -> tuple[np.ndarray, int]:
        """All materialized targets as one array plus the index of ``omega_lo``."""
        if self._dense is None:
            self._dense = np.concatenate([-self._neg.prefix[:0:-1], self._pos.prefix])
            self._dense_lo = -len(self._neg)
        return self._dense, self._dense_lo

    def targets(self, ks) -> np.ndarray:
        """Vectorized :meth:`target`."""
        ks = np.asarray(ks, dtype=np.int64)
        if ks.size == 0:
            return np.zeros(0)
        self.ensure(min(int(ks.min()), 0), max(int(ks.max()), 0))
        dense, lo = self.dense()
        return dense[ks - lo]

    def to_csv(self, path, lo: int | None = None, hi: int | None = None):
        """Write ``(k, omega_k)`` rows for the materialized (or requested) range."""
        elo, ehi = self.extent
        lo = elo if lo is None else lo
        hi = ehi if hi is None else hi
        ks = np.arange(lo, hi + 1)
        values = self.targets(ks)
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["k", "omega"])
            for k, v in zip(ks, values):
                out.writerow([int(k), repr(float(v))])


def _refuse_beyond(limit):
    def ensure(count):
        if count > limit:
            raise IndexError(f"target beyond the {limit} explicit gaps")
    return ensure


def target(window: MediumWindow, k: int) -> float:
    return window.target(k)


def rescaled_medium(window: MediumWindow, n: int, s: float, mode: str = "raw") -> float:
    """Finite-``n`` rescaled medium at ``s``.

    ``fluid``: ``omega_[ns] / n``.  ``raw``: ``omega_[ns] / n**(1/a)``.
    ``centered``: ``sum (zeta_i - mu) / n**(1/a)`` over ``1..floor(ns)`` for
    ``s >= 0`` and minus the sum over ``ceil((n-1)s)..0`` for ``s < 0``.  Here
    ``[ns]`` is the floor for ``s >= 0`` and the ceiling for ``s < 0``, and
    ``a`` is the stability index of the gap law.
    """
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    law = window.gap_law
    if mode not in ("fluid", "raw", "centered"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "centered" and not math.isfinite(law.mean):
        raise ValueError("centered mode needs a finite mean gap")
    if s == 0:
        return 0.0
    if mode == "fluid":
        norm = float(n)
    else:
        a = law.stability_index
        if a is None:
            raise ValueError(f"{law} is not in a normal stable domain")
        norm = n ** (1.0 / a)
    if mode == "centered":
        mu = law.mean
        if s >= 0:
            k = math.floor(n * s)
            return (window.target(k) - mu * k) / norm
        lo = math.ceil((n - 1) * s)
        # sum_{i=lo}^{0} zeta_i = omega_0 - omega_{lo-1}
        count = 1 - lo
        return -(-window.target(lo - 1) - mu * count) / norm
    k = math.floor(n * s) if s >= 0 else math.ceil(n * s)
    return window.target(k) / norm
