"""Hot numerical kernels, JIT-compiled when numba is available.

Every kernel has a pure-Python/numpy twin (the ``*_py`` functions) used as a
fallback when numba is missing or ``PATHWISE_HJ_DISABLE_JIT=1`` is set, and as
an independent reference in tests.  The compiled path only matters for the
Monte Carlo studies (thousands of conjugate-space solves and first-exit
counts); correctness never depends on numba.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "HAVE_JIT",
    "lower_envelope",
    "radial_envelope",
    "exit_count",
    "walk_exit_times",
    "band_exit_indices",
    "tooth_sequence",
]


def lower_envelope_py(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Greatest convex minorant of the points ``(x_i, y_i)`` sampled at the
    same nodes, by a single monotone-chain sweep.

    ``x`` must be strictly increasing and ``y`` finite.  Collinear middle
    points are dropped (the values are identical either way, so ties keep the
    earlier vertex).
    """
    n = x.shape[0]
    stack = np.empty(n, dtype=np.int64)
    stack[0] = 0
    top = 0
    for i in range(1, n):
        while top >= 1:
            a = stack[top - 1]
            b = stack[top]
            # pop b when it sits on or above the chord a -> i
            if (y[b] - y[a]) * (x[i] - x[a]) >= (y[i] - y[a]) * (x[b] - x[a]):
                top -= 1
            else:
                break
        top += 1
        stack[top] = i
    out = np.empty(n, dtype=np.float64)
    for s in range(top):
        i0 = stack[s]
        i1 = stack[s + 1]
        out[i0] = y[i0]
        slope = (y[i1] - y[i0]) / (x[i1] - x[i0])
        for j in range(i0 + 1, i1):
            out[j] = y[i0] + slope * (x[j] - x[i0])
    last = stack[top]
    out[last] = y[last]
    return out


def radial_envelope_py(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Lower convex envelope of the even extension of a radial profile.

    ``x`` lives on ``[0, L]`` with ``x[0] == 0``.  The even reflection makes
    the result the greatest convex *nondecreasing* minorant on ``[0, L]``,
    which is the correct convexification of ``p -> y(|p|)``.
    """
    n = x.shape[0]
    m = 2 * n - 1
    xx = np.empty(m, dtype=np.float64)
    yy = np.empty(m, dtype=np.float64)
    for i in range(n - 1):
        xx[i] = -x[n - 1 - i]
        yy[i] = y[n - 1 - i]
    for i in range(n):
        xx[n - 1 + i] = x[i]
        yy[n - 1 + i] = y[i]
    env = lower_envelope_py(xx, yy)
    return env[n - 1 :]


def exit_count_py(values: np.ndarray, delta: float) -> int:
    """Number of intervals of the first-exit oscillation partition.

    Scans the piecewise-linear value sequence keeping the oscillation band
    since the previous breakpoint; a breakpoint fires the first time the band
    width reaches ``delta`` (equality included).  Runs of several exits inside
    one monotone segment are counted in closed form, so the cost is
    O(#knots + #exits).  Returns ``exits`` when the final exit lands exactly
    on the last knot and ``exits + 1`` otherwise.
    """
    n = values.shape[0]
    exits = 0
    lo = values[0]
    hi = values[0]
    ended_on_exit = False
    for i in range(1, n):
        v = values[i]
        ended_on_exit = False
        while True:
            nhi = hi if hi > v else v
            nlo = lo if lo < v else v
            if nhi - nlo < delta:
                hi = nhi
                lo = nlo
                break
            if v > hi:
                first = lo + delta
                extra = int((v - first) / delta)
                exits += 1 + extra
                b = first + extra * delta
            else:
                first = hi - delta
                extra = int((first - v) / delta)
                exits += 1 + extra
                b = first - extra * delta
            lo = b
            hi = b
            if b == v:
                ended_on_exit = True
                break
    if ended_on_exit:
        return exits
    return exits + 1


def walk_exit_times_py(positions: np.ndarray, m: int) -> np.ndarray:
    """Successive exit times of an integer walk from centered bands of
    half-width ``m``: each epoch ends the first time the walk moves ``m`` away
    from its value at the previous exit.  Returns the exit times that occur
    within the recorded walk."""
    n = positions.shape[0]
    out = np.empty(n, dtype=np.int64)
    k = 0
    base = positions[0]
    for t in range(1, n):
        d = positions[t] - base
        if d >= m or d <= -m:
            out[k] = t
            k += 1
            base = positions[t]
    return out[:k]


def band_exit_indices_py(values: np.ndarray, width: float) -> np.ndarray:
    """Successive first-exit indices of a real-valued sequence from bands of
    half-width ``width`` centered at the value observed at the previous exit.

    Unlike the integer-walk variant, the sequence overshoots the band edge, so
    each new band is centered at the actual observed value; the exit *sides*
    are what matters to callers (they are symmetric and independent by the
    Markov property when the sequence is a random walk)."""
    n = values.shape[0]
    out = np.empty(n, dtype=np.int64)
    k = 0
    base = values[0]
    for t in range(1, n):
        d = values[t] - base
        if d >= width or d <= -width:
            out[k] = t
            k += 1
            base = values[t]
    return out[:k]


def tooth_sequence_py(a1: float, beta: float, k_max: int) -> np.ndarray:
    """Iterates a_{k+1} = a_k + ((1-beta)/beta) * a_k^(-beta/(1-beta))."""
    out = np.empty(k_max, dtype=np.float64)
    c = (1.0 - beta) / beta
    e = beta / (1.0 - beta)
    a = a1
    out[0] = a
    for k in range(1, k_max):
        a = a + c * a ** (-e)
        out[k] = a
    return out


_disable = os.environ.get("PATHWISE_HJ_DISABLE_JIT", "") == "1"
HAVE_JIT = False

if not _disable:
    try:
        from numba import njit

        lower_envelope = njit(cache=True)(lower_envelope_py)

        @njit(cache=True)
        def _radial_envelope(x, y):  # pragma: no cover - thin jit wrapper
            n = x.shape[0]
            m = 2 * n - 1
            xx = np.empty(m, dtype=np.float64)
            yy = np.empty(m, dtype=np.float64)
            for i in range(n - 1):
                xx[i] = -x[n - 1 - i]
                yy[i] = y[n - 1 - i]
            for i in range(n):
                xx[n - 1 + i] = x[i]
                yy[n - 1 + i] = y[i]
            env = lower_envelope(xx, yy)
            return env[n - 1 :]

        radial_envelope = _radial_envelope
        exit_count = njit(cache=True)(exit_count_py)
        walk_exit_times = njit(cache=True)(walk_exit_times_py)
        band_exit_indices = njit(cache=True)(band_exit_indices_py)
        tooth_sequence = njit(cache=True)(tooth_sequence_py)
        HAVE_JIT = True
    except ImportError:  # pragma: no cover - exercised via env flag instead
        pass

if not HAVE_JIT:
    lower_envelope = lower_envelope_py
    radial_envelope = radial_envelope_py
    exit_count = exit_count_py
    walk_exit_times = walk_exit_times_py
    band_exit_indices = band_exit_indices_py
    tooth_sequence = tooth_sequence_py


def warm_up() -> None:
    """Trigger JIT compilation of all kernels (used by test fixtures so timed
    acceptance criteria measure algorithmic cost, not compiler start-up)."""
    x = np.linspace(0.0, 1.0, 5)
    lower_envelope(x, x**2)
    radial_envelope(x, (x - 0.4) ** 2)
    exit_count(np.array([0.0, 1.0, 0.0]), 0.5)
    walk_exit_times(np.array([0, 1, 2, 1], dtype=np.int64), 2)
    band_exit_indices(np.array([0.0, 0.4, 1.1, 0.2]), 1.0)
    tooth_sequence(2.0, 0.5, 4)
