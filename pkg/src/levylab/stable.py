"""Stable laws and marginals of stable Lévy processes.

Parametrization (fixed library-wide): a :class:`StableLaw` with stability index
``a``, skewness ``b``, scale ``s`` and location ``m`` has characteristic
function

    E exp(i θ X) = exp(-|s θ|^a (1 - i b sgn(θ) tan(π a / 2)) + i m θ),

which is the native parametrization of the Chambers-Mallows-Stuck transform.
Consequences worth remembering:

* ``a = 2`` is Gaussian with mean ``m`` and variance ``2 s²``; skewness is
  ignored.
* ``a < 1, b = 1, m = 0`` is supported on the positive half-line.
* ``a = 1`` is not supported (the parametrization is discontinuous there and
  none of the limit laws we need uses it).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class StableLaw:
    stability_index: float
    skewness: float = 0.0
    scale: float = 1.0
    location: float = 0.0

    def __post_init__(self):
        a = self.stability_index
        if not 0.0 < a <= 2.0:
            raise ValueError(f"stability index must lie in (0, 2], got {a}")
        if a == 1.0:
            raise ValueError("stability index 1 is not supported")
        if not -1.0 <= self.skewness <= 1.0:
            raise ValueError(f"skewness must lie in [-1, 1], got {self.skewness}")
        if not self.scale > 0.0:
            raise ValueError(f"scale must be positive, got {self.scale}")

    @property
    def is_gaussian(self) -> bool:
        return self.stability_index == 2.0

    def standard(self) -> StableLaw:
        """Same index and skewness, unit scale, zero location."""
        return StableLaw(self.stability_index, self.skewness)


def _cms(a: float, b: float, u: np.ndarray, w: np.ndarray) -> np.ndarray:
    # u uniform on (-pi/2, pi/2], w standard exponential
    if a == 2.0:
        return 2.0 * np.sin(u) * np.sqrt(w)
    t = b * math.tan(math.pi * a / 2.0)
    shift = math.atan(t) / a
    factor = (1.0 + t * t) ** (1.0 / (2.0 * a))
    au = a * (u + shift)
    return (
        factor
        * np.sin(au)
        / np.cos(u) ** (1.0 / a)
        * (np.cos(u - au) / w) ** ((1.0 - a) / a)
    )


def sample_stable(law: StableLaw, rng: np.random.Generator, size=None):
    """Draw from ``law`` with the Chambers-Mallows-Stuck transform.

    Returns a float when ``size`` is None, otherwise an array of that shape.
    """
    shape = () if size is None else size
    # 1 - random() lies in (0, 1], keeping u off the singular endpoint -pi/2
    u = math.pi * (0.5 - rng.random(shape))
    w = rng.standard_exponential(shape)
    x = law.location + law.scale * _cms(law.stability_index, law.skewness, u, w)
    return float(x) if size is None else x


def levy_marginal(law: StableLaw, t: float, rng: np.random.Generator, size=None):
    """Value at time ``t`` of the Lévy process whose value at time 1 has law ``law``.

    By self-similarity this is ``law`` with scale ``scale * t**(1/a)`` and
    location ``location * t``.
    """
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    if t == 0:
        return 0.0 if size is None else np.zeros(size)
    scaled = StableLaw(
        law.stability_index,
        law.skewness,
        law.scale * t ** (1.0 / law.stability_index),
        law.location * t,
    )
    return sample_stable(scaled, rng, size)


def two_sided_marginal(law: StableLaw, s: float, rng: np.random.Generator, size=None):
    """Value at ``s`` of the two-sided process built from two i.i.d. copies.

    For ``s >= 0`` this is ``Z_+(s)``; for ``s < 0`` it is ``-Z_-(-s)``.
    """
    if s >= 0:
        return levy_marginal(law, s, rng, size)
    x = levy_marginal(law, -s, rng, size)
    return -x


def levy_increments(law: StableLaw, durations, rng: np.random.Generator) -> np.ndarray:
    """Independent increments of the Lévy process over the given durations."""
    d = np.asarray(durations, dtype=float)
    if np.any(d < 0):
        raise ValueError("durations must be non-negative")
    std = sample_stable(law.standard(), rng, d.shape)
    return law.scale * d ** (1.0 / law.stability_index) * std + law.location * d
