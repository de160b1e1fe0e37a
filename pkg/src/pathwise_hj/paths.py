"""Rough driving signals as piecewise-linear paths.

Everything downstream of the solvers consumes a driving path through the same
small interface: a continuous piecewise-linear function on ``[0, T]`` pinned
to zero at the origin.  This module provides that representation, generators
for the stock examples (sawteeth, Brownian interpolants, rescaled coin-flip
walks, mollified copies), and the regularity estimators built on first-exit
oscillation counting: greedy partitions, ``p``-variation, Hoelder seminorms,
and dyadic K-functional profiles.

All estimators here work with the exact piecewise-linear structure rather
than sampling on an auxiliary grid, so knot-level quantities (variation,
exit times, seminorms, moduli) carry no discretization error of their own.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from . import _accel
from .grid_convex import KProfile

__all__ = [
    "PiecewiseLinearPath",
    "Partition",
    "RngSeed",
    "teeth",
    "scale_path",
    "brownian",
    "rademacher_walk",
    "scaled_random_walk",
    "embedded_walk",
    "mollify",
    "greedy_oscillation_partition",
    "count_N",
    "p_variation",
    "holder_seminorm",
    "k_path_profile",
    "p_alpha_norm",
    "bm_refinement_partition",
    "walk_exit_times",
    "walk_exit_count",
    "path_L1_modulus",
]

_UINT64 = 2**64


@dataclass(frozen=True, eq=False)
class PiecewiseLinearPath:
    """Continuous piecewise-linear function on ``[0, horizon]`` with
    ``W(0) = 0``, stored as knot arrays and interpolated affinely between
    them.  Evaluation outside the horizon clamps to the endpoint values."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=np.float64).copy()
        values = np.asarray(self.values, dtype=np.float64).copy()
        if times.ndim != 1 or times.shape != values.shape:
            raise ValueError("times and values must be 1-d arrays of equal length")
        if times.size < 2:
            raise ValueError("a path needs at least two knots")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(values))):
            raise ValueError("knots must be finite")
        if times[0] != 0.0:
            raise ValueError("first knot time must be 0")
        if values[0] != 0.0:
            raise ValueError("paths start at zero")
        if np.any(np.diff(times) <= 0):
            raise ValueError("knot times must be strictly increasing")
        times.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    @property
    def n_knots(self) -> int:
        return int(self.times.size)

    def __call__(self, t):
        return np.interp(t, self.times, self.values)

    def sup_norm(self) -> float:
        # piecewise-linear, so the sup over [0, T] is attained at a knot
        return float(np.max(np.abs(self.values)))

    def total_variation(self) -> float:
        return float(np.sum(np.abs(np.diff(self.values))))

    def restrict(self, t_end: float) -> "PiecewiseLinearPath":
        """The same path truncated to ``[0, t_end]``, interpolating a final
        knot when ``t_end`` falls inside a segment."""
        t_end = float(t_end)
        if not 0.0 < t_end <= self.horizon:
            raise ValueError("t_end must lie in (0, horizon]")
        keep = self.times < t_end
        times = np.append(self.times[keep], t_end)
        values = np.append(self.values[keep], self(t_end))
        return PiecewiseLinearPath(times, values)

    def to_csv(self, path_or_buffer) -> None:
        """Write ``t,w`` rows; the first data row is always ``0,0``."""

        def _write(fh) -> None:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["t", "w"])
            for t, w in zip(self.times, self.values):
                writer.writerow([repr(float(t)), repr(float(w))])

        if isinstance(path_or_buffer, (str, bytes)) or hasattr(path_or_buffer, "__fspath__"):
            with open(path_or_buffer, "w", encoding="utf-8", newline="") as fh:
                _write(fh)
        else:
            _write(path_or_buffer)

    @classmethod
    def from_csv(cls, path_or_buffer) -> "PiecewiseLinearPath":
        if isinstance(path_or_buffer, (str, bytes)) or hasattr(path_or_buffer, "__fspath__"):
            with open(path_or_buffer, "r", encoding="utf-8", newline="") as fh:
                text = fh.read()
        else:
            text = path_or_buffer.read()
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != ["t", "w"]:
            raise ValueError("expected header 't,w'")
        ts = np.array([float(r[0]) for r in rows[1:]])
        ws = np.array([float(r[1]) for r in rows[1:]])
        return cls(ts, ws)


@dataclass(frozen=True, eq=False)
class Partition:
    """Ordered breakpoints ``0 = t_0 < t_1 < ... < t_k`` of a time interval."""

    times: np.ndarray

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=np.float64).copy()
        if times.ndim != 1 or times.size < 2:
            raise ValueError("a partition needs at least two breakpoints")
        if times[0] != 0.0:
            raise ValueError("partitions start at 0")
        if not np.all(np.isfinite(times)):
            raise ValueError("breakpoints must be finite")
        if np.any(np.diff(times) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        times.flags.writeable = False
        object.__setattr__(self, "times", times)

    @property
    def count(self) -> int:
        """Number of intervals."""
        return int(self.times.size - 1)

    @property
    def mesh(self) -> float:
        return float(np.max(np.diff(self.times)))


@dataclass(frozen=True)
class RngSeed:
    """Reproducible randomness label: a root seed plus a stream id, mapped to
    a counter-based generator so that equal labels give bit-identical draws
    regardless of how many other streams were consumed in between."""

    seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or not 0 <= int(v) < _UINT64:
                raise ValueError(f"{name} must be an integer in [0, 2^64)")
            object.__setattr__(self, name, int(v))

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=[self.seed, self.stream_id]))

    def substream(self, k: int) -> "RngSeed":
        """Child label ``k``; up to 2^20 children per parent stay distinct."""
        if not 0 <= int(k) < 2**20:
            raise ValueError("substream index must lie in [0, 2^20)")
        return RngSeed(self.seed, (self.stream_id * 2**20 + int(k)) % _UINT64)


def teeth(duration: float) -> PiecewiseLinearPath:
    """Unit sawtooth train on ``[0, duration]``: rises 0 to 1 and falls back
    over each span of two time units, so the duration must be a positive even
    integer for the path to end at zero."""
    d = float(duration)
    if not (d > 0 and d == math.floor(d) and int(d) % 2 == 0):
        raise ValueError("duration must be a positive even integer")
    k = int(d)
    times = np.arange(k + 1, dtype=np.float64)
    values = (np.arange(k + 1) % 2).astype(np.float64)
    return PiecewiseLinearPath(times, values)


def scale_path(
    W: PiecewiseLinearPath,
    n: int,
    alpha: float,
    amp: float = 1.0,
    horizon: float | None = None,
) -> PiecewiseLinearPath:
    """Parabolic-type rescaling ``t -> amp * 2^(-n*alpha) * W(2^n t)``.

    The output lives on ``[0, horizon]`` (default: the largest horizon the
    source supports, ``W.horizon / 2^n``); a requested horizon needing source
    data past ``W.horizon`` is an error.  Under this map the ``alpha``-Hoelder
    seminorm scales by exactly ``|amp|``.
    """
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise ValueError("n must be a nonnegative integer")
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    factor = 2.0**n
    if horizon is None:
        t_out = W.horizon / factor
    else:
        t_out = float(horizon)
        if t_out <= 0:
            raise ValueError("horizon must be positive")
        if t_out * factor > W.horizon * (1 + 1e-12):
            raise ValueError("source path too short for the requested horizon")
    src_end = min(t_out * factor, W.horizon)
    src = W if src_end >= W.horizon else W.restrict(src_end)
    times = src.times / factor
    times = times.copy()
    times[-1] = t_out
    values = float(amp) * 2.0 ** (-n * alpha) * src.values
    return PiecewiseLinearPath(times, values)


def brownian(horizon: float, steps: int, rng: RngSeed) -> PiecewiseLinearPath:
    """Linear interpolant of a Brownian motion sampled on ``steps`` uniform
    increments, each drawn N(0, horizon/steps)."""
    horizon = float(horizon)
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    if not isinstance(steps, (int, np.integer)) or steps < 1:
        raise ValueError("steps must be a positive integer")
    g = rng.generator()
    inc = g.normal(0.0, math.sqrt(horizon / steps), int(steps))
    values = np.concatenate(([0.0], np.cumsum(inc)))
    times = np.linspace(0.0, horizon, int(steps) + 1)
    return PiecewiseLinearPath(times, values)


def rademacher_walk(steps: int, rng: RngSeed) -> np.ndarray:
    """Positions of a simple +-1 coin-flip walk at integer times, starting
    at 0; returned as an int64 array of length ``steps + 1``."""
    if not isinstance(steps, (int, np.integer)) or steps < 1:
        raise ValueError("steps must be a positive integer")
    g = rng.generator()
    signs = 2 * g.integers(0, 2, int(steps), dtype=np.int64) - 1
    return np.concatenate(([0], np.cumsum(signs)))


def _diffusive_steps(n: int, horizon: float) -> int:
    spacing = 1.0 / (n * n)
    return max(int(math.ceil(horizon / spacing - 1e-9)), 1)


def _diffusive_path(walk: np.ndarray, n: int, horizon: float) -> PiecewiseLinearPath:
    """Interpolate integer walk positions on the ``k / n^2`` grid, trimming or
    snapping the final knot onto the requested horizon."""
    spacing = 1.0 / (n * n)
    times = np.arange(walk.shape[0], dtype=np.float64) * spacing
    path = PiecewiseLinearPath(times, walk.astype(np.float64) / n)
    if times[-1] > horizon * (1 + 1e-12):
        return path.restrict(horizon)
    if times[-1] != horizon:
        # ceil landed within rounding dust of the horizon; snap exactly
        t = path.times.copy()
        t[-1] = horizon
        return PiecewiseLinearPath(t, path.values)
    return path


def scaled_random_walk(n: int, horizon: float, rng: RngSeed) -> PiecewiseLinearPath:
    """Diffusively rescaled coin-flip walk ``W_n(t) = zeta(n^2 t) / n``:
    knots every ``1/n^2`` time units, increments of size ``1/n``, slopes
    ``+-n``.  As ``n`` grows these interpolants converge in law to Brownian
    motion on ``[0, horizon]``."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError("n must be a positive integer")
    horizon = float(horizon)
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    walk = rademacher_walk(_diffusive_steps(n, horizon), rng)
    return _diffusive_path(walk, n, horizon)


def embedded_walk(B: PiecewiseLinearPath, n: int, horizon: float) -> PiecewiseLinearPath:
    """Diffusively rescaled coin-flip walk read off a Brownian driver.

    The k-th sign is the side on which ``B`` first leaves the band of
    half-width ``1/n`` centered at its previous exit value; the resulting
    ``+-1/n`` increments are placed on the uniform ``k / n^2`` grid.  Each
    band is symmetric about its own start, so by the Markov property the sign
    sequence is exactly iid Rademacher and the output has exactly the law of
    ``scaled_random_walk(n, horizon, *)`` while staying coupled to ``B``
    pathwise.  Ensembles built from shared drivers compare walk and Brownian
    functionals without independent-sampling noise.

    The driver must complete enough exit epochs: its horizon should be a
    couple of times ``horizon`` (the epochs consume Brownian time ``~ 1/n^2``
    each), and its sampling step must resolve the band width ``1/n``.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError("n must be a positive integer")
    horizon = float(horizon)
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    steps = _diffusive_steps(n, horizon)
    idx = np.asarray(_accel.band_exit_indices(np.ascontiguousarray(B.values), 1.0 / n))
    if idx.shape[0] < steps:
        raise ValueError(
            f"driver completed {idx.shape[0]} of {steps} required exit epochs; "
            "extend its horizon"
        )
    hits = B.values[idx[:steps]]
    prev = np.concatenate(([B.values[0]], hits[:-1]))
    signs = np.where(hits >= prev, 1, -1).astype(np.int64)
    walk = np.concatenate(([0], np.cumsum(signs)))
    return _diffusive_path(walk, n, horizon)


def _eval_reflected(W: PiecewiseLinearPath, q: np.ndarray) -> np.ndarray:
    """Evaluate the odd-reflection extension of ``W`` about both endpoints:
    ``W(-u) = -W(u)`` and ``W(T+u) = 2 W(T) - W(T-u)``.  Point symmetry keeps
    affine paths affine and pins the extension to W at both endpoints."""
    T = W.horizon
    sgn = np.where(q < 0, -1.0, 1.0)
    qa = np.abs(q)
    over = qa > T
    qb = np.where(over, 2.0 * T - qa, qa)
    v = np.interp(qb, W.times, W.values)
    v = np.where(over, 2.0 * W.values[-1] - v, v)
    return sgn * v


def mollify(W: PiecewiseLinearPath, delta: float) -> PiecewiseLinearPath:
    """Smoothed copy of ``W`` at scale ``delta``: discrete convolution with a
    compactly supported quartic bump, sampled on a grid of step ``delta/16``.

    The path is extended by odd reflection about both endpoints before
    averaging, which pins the smoothed path to 0 at the origin, leaves affine
    paths unchanged, and never increases total variation (pairing each kernel
    offset with its mirror image shows the averaged one-sided windows carry
    exactly the variation of ``W``).  The sup-distance to ``W`` is controlled
    by the modulus of continuity of ``W`` at ``delta`` in the interior and at
    twice that scale inside the endpoint collars.
    """
    T = W.horizon
    delta = float(delta)
    if not 0.0 < delta < T / 2:
        raise ValueError("smoothing scale must lie in (0, horizon/2)")
    taps = 16
    dt = delta / taps
    offsets = np.arange(-taps, taps + 1) * dt
    u = offsets / delta
    weights = (1.0 - u * u) ** 2
    weights /= weights.sum()
    m = int(math.floor(T / dt + 1e-9))
    out_t = np.arange(m + 1, dtype=np.float64) * dt
    if out_t[-1] < T * (1 - 1e-12):
        out_t = np.append(out_t, T)
    else:
        out_t[-1] = T
    out_v = np.zeros_like(out_t)
    for off, wt in zip(offsets, weights):
        out_v += wt * _eval_reflected(W, out_t - off)
    out_v[0] = 0.0  # analytically exact by symmetry; clears float dust
    return PiecewiseLinearPath(out_t, out_v)


def greedy_oscillation_partition(W: PiecewiseLinearPath, delta: float) -> Partition:
    """First-exit oscillation partition: each breakpoint is the first time the
    oscillation of ``W`` since the previous breakpoint reaches ``delta``.

    Breakpoint times are found by exact linear solves on the knots, so the
    partition is computed without time discretization.  For generic ``delta``
    the greedy count is the minimal number of intervals of oscillation at most
    ``delta``; at the exceptional thresholds where an interval's oscillation
    equals ``delta`` exactly the first-exit rule may close it one interval
    early.
    """
    if not np.isfinite(delta) or delta <= 0:
        raise ValueError("delta must be positive")
    t = W.times
    v = W.values
    breaks = [0.0]
    lo = hi = v[0]
    for i in range(1, t.size):
        t0 = t[i - 1]
        t1 = t[i]
        a = v[i - 1]
        b = v[i]
        if b == a:
            continue
        slope = (b - a) / (t1 - t0)
        while True:
            nhi = max(hi, b)
            nlo = min(lo, b)
            if nhi - nlo < delta:
                hi, lo = nhi, nlo
                break
            target = lo + delta if b > hi else hi - delta
            tb = t1 if target == b else t0 + (target - a) / slope
            if tb >= t1:
                # exit lands on (or rounds past) the knot; close the epoch there
                breaks.append(t1)
                lo = hi = target
                break
            breaks.append(tb)
            lo = hi = target
            t0, a = tb, target
    if breaks[-1] != W.horizon:
        breaks.append(W.horizon)
    return Partition(np.array(breaks))


def count_N(W: PiecewiseLinearPath, delta: float) -> int:
    """Number of intervals of the first-exit oscillation partition at scale
    ``delta``, computed in O(knots) by counting the exits inside each monotone
    segment in closed form rather than materializing breakpoint times."""
    if not np.isfinite(delta) or delta <= 0:
        raise ValueError("delta must be positive")
    return int(_accel.exit_count(np.ascontiguousarray(W.values), float(delta)))


def p_variation(W: PiecewiseLinearPath, p: float) -> float:
    """Exact ``p``-variation norm ``sup_partitions (sum |increments|^p)^(1/p)``.

    For a piecewise-linear path the supremum is attained on knots: merging two
    same-direction increments never decreases the sum when ``p >= 1``, so an
    optimal partition alternates and its points sit at local extrema.  The
    path is pruned to its alternating extrema and the best alternating
    subsequence is found by an O(m^2) dynamic program over them.
    """
    if not np.isfinite(p) or p < 1:
        raise ValueError("p must be at least 1")
    diffs = np.diff(W.values)
    if p == 1.0:
        return float(np.sum(np.abs(diffs)))
    ext = [W.values[0]]
    direction = 0.0
    for dv, val in zip(diffs, W.values[1:]):
        if dv == 0.0:
            continue
        s = 1.0 if dv > 0 else -1.0
        if s == direction:
            ext[-1] = val
        else:
            ext.append(val)
            direction = s
    vals = np.asarray(ext)
    m = vals.size
    if m < 2:
        return 0.0
    best = np.zeros(m)
    for i in range(1, m):
        best[i] = np.max(best[:i] + np.abs(vals[i] - vals[:i]) ** p)
    return float(np.max(best) ** (1.0 / p))


def holder_seminorm(W: PiecewiseLinearPath, alpha: float) -> float:
    """Exact Hoelder seminorm ``sup_{s<t} |W(t)-W(s)| / (t-s)^alpha``.

    At ``alpha = 1`` this is the largest slope magnitude.  For ``alpha < 1``
    the supremum over a pair of segments is attained either with both times at
    knots, or with one time at a knot and the other at an interior stationary
    point of the ratio, or (for parallel segments) at a pair separated by the
    stationary gap; all three families are enumerated and evaluated, which is
    exhaustive because interior-interior stationarity forces equal slopes.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    t = W.times
    v = W.values
    seg_dt = np.diff(t)
    seg_dv = np.diff(v)
    slopes = seg_dv / seg_dt
    if alpha == 1.0:
        return float(np.max(np.abs(slopes)))

    best = 0.0
    # knot-knot pairs, blocked to keep memory linear in the knot count
    block = 1024
    for start in range(0, t.size, block):
        ti = t[start : start + block, None]
        vi = v[start : start + block, None]
        dt_all = t[None, :] - ti
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.abs(v[None, :] - vi) / dt_all**alpha
        ratio[dt_all <= 0] = 0.0
        best = max(best, float(np.max(ratio)))

    # one time at a knot, the other at an interior stationary point t* of
    # |W(t*) - w0| / |t* - s0|^alpha on a segment with slope sigma; the
    # stationarity condition sigma (t* - s0) = +-alpha (W(t*) - w0) is linear
    intercepts = v[:-1] - slopes * t[:-1]
    for s0, w0 in zip(t, v):
        c = intercepts + slopes * s0 - w0  # W_seg(s0) - w0 along each segment line
        for sign in (1.0, -1.0):
            denom = slopes * (1.0 - sign * alpha)
            with np.errstate(divide="ignore", invalid="ignore"):
                tstar = s0 + sign * alpha * c / denom
            inside = (
                np.isfinite(tstar)
                & (tstar > t[:-1])
                & (tstar < t[1:])
                & (tstar != s0)
            )
            if not np.any(inside):
                continue
            ts = tstar[inside]
            wv = intercepts[inside] + slopes[inside] * ts
            ratio = np.abs(wv - w0) / np.abs(ts - s0) ** alpha
            best = max(best, float(np.max(ratio)))

    # parallel segment pairs: both times interior forces equal slopes and a
    # gap d* = alpha c / (sigma (1 - alpha)) where c is the line offset
    order = np.argsort(slopes, kind="stable")
    k = 0
    while k < order.size:
        j = k
        while j < order.size and slopes[order[j]] == slopes[order[k]]:
            j += 1
        group = order[k:j]
        k = j
        sigma = slopes[group[0]]
        if sigma == 0.0 or group.size < 2:
            continue
        for start in range(0, group.size, block):
            rows = group[start : start + block]
            c = intercepts[group][None, :] - intercepts[rows][:, None]
            d = alpha * c / (sigma * (1.0 - alpha))
            s_lo = np.maximum(t[rows][:, None], t[group][None, :] - d)
            s_hi = np.minimum(t[rows + 1][:, None], t[group + 1][None, :] - d)
            ok = (d > 0.0) & (s_lo < s_hi)
            if np.any(ok):
                dsel = d[ok]
                dw = np.abs(sigma * dsel + c[ok])
                best = max(best, float(np.max(dw / dsel**alpha)))
    return best


def k_path_profile(W: PiecewiseLinearPath, n_max: int) -> KProfile:
    """Dyadic profile of the sup-norm K-functional against total variation:
    entry ``n`` bounds ``inf_V (||W - V||_inf + 2^-n TV(V))``.

    Three candidate families are minimized: ``V = W`` (the variation clamp
    ``2^-n TV(W)``), ``V = 0`` (the sup clamp), and for each band width
    ``delta`` in a geometric sweep the piecewise-constant skeleton of the
    first-exit partition, which tracks ``W`` within ``delta`` using total
    variation at most ``count * delta``.
    """
    if not isinstance(n_max, (int, np.integer)) or n_max < 0:
        raise ValueError("n_max must be a nonnegative integer")
    sup = W.sup_norm()
    levels = np.arange(n_max + 1)
    if sup == 0.0:
        return KProfile("small", levels, np.zeros(n_max + 1))
    tv = W.total_variation()
    deltas = sup * 2.0 ** (-np.arange(21, dtype=np.float64))
    skeleton = np.array([count_N(W, d) * d for d in deltas])
    scales = 2.0 ** (-levels.astype(np.float64))
    entries = np.empty(n_max + 1)
    for i, s in enumerate(scales):
        entries[i] = min(sup, s * tv, float(np.min(deltas + s * skeleton)))
    return KProfile("small", levels, entries)


def p_alpha_norm(
    W: PiecewiseLinearPath,
    alpha: float,
    p: float = math.inf,
    n_max: int = 16,
) -> float:
    """Scaled size of the K-profile: the sup (or little-ell-p norm) over
    levels of ``2^(n alpha) K(2^-n)``.  Finiteness as ``n_max`` grows is the
    estimator's proxy for membership in the alpha-interpolation class."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if not p >= 1:
        raise ValueError("p must be at least 1 (math.inf for the sup)")
    prof = k_path_profile(W, n_max)
    terms = 2.0 ** (prof.levels.astype(np.float64) * alpha) * prof.upper
    if math.isinf(p):
        return float(np.max(terms))
    return float(np.sum(terms**p) ** (1.0 / p))


def bm_refinement_partition(W: PiecewiseLinearPath, n: int) -> Partition:
    """First-exit partition at the diffusive band width ``2^(-n/2)``, the
    scale at which a Brownian path produces about ``2^n`` intervals per unit
    time."""
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise ValueError("n must be a nonnegative integer")
    return greedy_oscillation_partition(W, 2.0 ** (-n / 2.0))


def walk_exit_times(walk: np.ndarray, m: int) -> np.ndarray:
    """Successive first-exit epochs of an integer walk from bands of
    half-width ``m`` centered at the previous exit position; only the exits
    completed within the recorded walk are returned."""
    walk = np.ascontiguousarray(walk, dtype=np.int64)
    if walk.ndim != 1 or walk.size < 2:
        raise ValueError("walk must hold at least two positions")
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise ValueError("m must be a positive integer")
    return np.asarray(_accel.walk_exit_times(walk, int(m)))


def walk_exit_count(walk: np.ndarray, m: int, t: float) -> int:
    """Number of half-width-``m`` exit epochs needed to pass time ``t``: the
    smallest ``k`` with ``tau_k >= t``, or one more than the completed exits
    when the walk reaches ``t`` inside an unfinished epoch.  With ``m = 1``
    every step is an exit and the count is ``ceil(t)``."""
    t = float(t)
    if t < 0:
        raise ValueError("t must be nonnegative")
    walk = np.ascontiguousarray(walk, dtype=np.int64)
    if walk.ndim != 1 or walk.size < 2:
        raise ValueError("walk must hold at least two positions")
    if walk.size - 1 < t:
        raise ValueError("walk too short: horizon must reach t")
    if t == 0.0:
        return 0
    taus = walk_exit_times(walk, m)
    pos = int(np.searchsorted(taus, t, side="left"))
    return pos + 1 if pos < taus.size else taus.size + 1


def path_L1_modulus(W: PiecewiseLinearPath, h: float) -> float:
    """Exact L1 modulus ``int_0^{T-h} |W(t+h) - W(t)| dt``.

    The difference ``t -> W(t+h) - W(t)`` is piecewise linear with kinks only
    at knots and knots shifted by ``h``, so the integral splits into cells on
    which the integrand is affine and each cell contributes in closed form,
    splitting at the interior zero crossing when the endpoint signs differ.
    """
    h = float(h)
    T = W.horizon
    if not 0.0 < h <= T:
        raise ValueError("shift must lie in (0, horizon]")
    upper = T - h
    if upper <= 0.0:
        return 0.0
    ts = np.union1d(W.times, W.times - h)
    ts = ts[(ts > 0.0) & (ts < upper)]
    ts = np.concatenate(([0.0], ts, [upper]))
    d = W(ts + h) - W(ts)
    d0 = d[:-1]
    d1 = d[1:]
    width = np.diff(ts)
    crossing = d0 * d1 < 0.0
    trapezoid = 0.5 * (np.abs(d0) + np.abs(d1)) * width
    with np.errstate(divide="ignore", invalid="ignore"):
        split = 0.5 * (d0 * d0 + d1 * d1) / (np.abs(d0) + np.abs(d1)) * width
    return float(np.sum(np.where(crossing, split, trapezoid)))
