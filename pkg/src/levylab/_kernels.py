"""Compiled inner loops.  Everything here is pure array-in / array-out."""

import numba
import numpy as np


@numba.njit(cache=True)
def gas_positions(y, times):
    """Unit-speed interpolation of ``y`` evaluated at ascending ``times``.

    Returns ``(x, seg)`` where ``seg[i]`` is the index ``n + 1`` of the right
    end of the segment ``[T_n, T_{n+1}]`` holding ``times[i]``.  A time beyond
    the last collision gives ``x = nan`` and ``seg = -1``.
    """
    m = times.shape[0]
    x = np.empty(m)
    seg = np.empty(m, dtype=np.int64)
    n = y.shape[0]
    i = 0
    clock = 0.0
    for j in range(m):
        t = times[j]
        while i < n - 1:
            step = abs(y[i + 1] - y[i])
            if clock + step < t:
                clock += step
                i += 1
            else:
                break
        if i >= n - 1:
            if clock == t:
                x[j] = y[n - 1]
                seg[j] = n - 1
            else:
                x[j] = np.nan
                seg[j] = -1
            continue
        d = y[i + 1] - y[i]
        if clock + abs(d) == t:
            x[j] = y[i + 1]
        elif d > 0:
            x[j] = y[i] + (t - clock)
        elif d < 0:
            x[j] = y[i] - (t - clock)
        else:
            x[j] = y[i]
        seg[j] = i + 1
    return x, seg


@numba.njit(cache=True)
def guide_table(cdf, size):
    guide = np.empty(size, dtype=np.int64)
    j = 0
    for k in range(size):
        level = k / size
        while j < cdf.shape[0] - 1 and cdf[j] <= level:
            j += 1
        guide[k] = j
    return guide


@numba.njit(cache=True)
def guided_inverse(u, cdf, guide):
    """Smallest ``j`` with ``cdf[j] > u``; ``-1`` when ``u >= cdf[-1]``."""
    out = np.empty(u.shape[0], dtype=np.int64)
    size = guide.shape[0]
    last = cdf.shape[0] - 1
    top = cdf[last]
    for i in range(u.shape[0]):
        v = u[i]
        if v >= top:
            out[i] = -1
            continue
        j = guide[int(v * size)]
        while cdf[j] <= v:
            j += 1
        out[i] = j
    return out


@numba.njit(cache=True)
def walk_range(bits):
    """Lowest and highest partial sum of the +-1 path encoded by ``bits``."""
    site = 0
    lo = 0
    hi = 0
    for j in range(bits.shape[0]):
        site += 2 * np.int64(bits[j]) - 1
        lo = min(lo, site)
        hi = max(hi, site)
    return lo, hi


@numba.njit(cache=True)
def scenery_scan(bits, pos, neg, lo, hi, tau):
    """Run the +-1 path over the gaps until the crossed length reaches ``tau``.

    Gap ``(s, s+1)`` is ``pos[s]`` for ``s >= 0`` and ``neg[-s-1]`` otherwise.
    Returns ``(k, site, local, status)``: the step index at which the clock
    first reaches ``tau`` (or -1), the site occupied before that step, per-site
    visit counts over ``[lo, hi]`` and a status code (0 ok, 1 a crossed gap
    was not positive, 2 the clock decreased).
    """
    local = np.zeros(hi - lo + 1, dtype=np.int64)
    site = 0
    clock = 0.0
    for j in range(bits.shape[0]):
        local[site - lo] += 1
        step = 2 * np.int64(bits[j]) - 1
        lower = site if step > 0 else site - 1
        gap = pos[lower] if lower >= 0 else neg[-lower - 1]
        if not gap > 0:
            return j, site, local, 1
        new = clock + gap
        if new < clock:
            return j, site, local, 2
        clock = new
        if clock >= tau:
            return j, site, local, 0
        site += step
    return -1, site, local, 0
