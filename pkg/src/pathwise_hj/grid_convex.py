"""Uniform grids, grid functions with an explicit +inf sentinel, and the
convex-analysis kernel: lower convex envelopes, discrete Legendre transforms,
second-difference moduli, Besov-type level sums, and C^{1,1}-vs-C K-functional
estimates.

Conventions
-----------
* A grid function may take the value ``+inf`` outside its effective domain;
  the finite entries must form one contiguous index range.  ``+inf`` encodes
  "identically steep" tails of convex conjugates.
* All envelope/conjugate operations are pure: inputs are never mutated and
  returned arrays are write-protected.
* Moduli are computed over grid-representable shifts only, so they are exact
  for piecewise-linear data aligned with the grid and lower-biased by at most
  ``Lip * spacing`` otherwise.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _accel

__all__ = [
    "Grid1D",
    "GridFunction",
    "KProfile",
    "SeriesTail",
    "convex_envelope",
    "radial_convex_envelope",
    "legendre",
    "monotone_conjugate",
    "second_difference_modulus",
    "besov_seminorm",
    "k_c11_estimate",
    "c11_k_profile",
]

_CONVEXITY_TOL = 1e-9


@dataclass(frozen=True)
class Grid1D:
    """Uniform one-dimensional grid with nodes exactly ``lo + i * spacing``."""

    lo: float
    hi: float
    n: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("grid endpoints must be finite")
        if not self.lo < self.hi:
            raise ValueError(f"need lo < hi, got [{self.lo}, {self.hi}]")
        if self.n < 2:
            raise ValueError(f"need at least 2 nodes, got n={self.n}")

    @property
    def spacing(self) -> float:
        return (self.hi - self.lo) / (self.n - 1)

    @cached_property
    def points(self) -> np.ndarray:
        pts = self.lo + np.arange(self.n) * self.spacing
        pts.flags.writeable = False
        return pts

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def index_of(self, x: float) -> int:
        """Nearest-node index of ``x`` (must lie inside the grid)."""
        if x < self.lo - 1e-12 or x > self.hi + 1e-12:
            raise ValueError(f"{x} outside grid [{self.lo}, {self.hi}]")
        return int(round((x - self.lo) / self.spacing))


def _as_readonly(values: np.ndarray) -> np.ndarray:
    out = np.asarray(values, dtype=np.float64).copy()
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Function values on a :class:`Grid1D`; ``+inf`` marks points outside the
    effective domain, and the finite entries must be contiguous."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = _as_readonly(self.values)
        object.__setattr__(self, "values", vals)
        if vals.shape != (self.grid.n,):
            raise ValueError(
                f"values shape {vals.shape} does not match grid n={self.grid.n}"
            )
        if np.isnan(vals).any():
            raise ValueError("NaN entries are not allowed")
        if np.any(vals == -np.inf):
            raise ValueError("-inf entries are not allowed")
        finite = np.isfinite(vals)
        if not finite.any():
            raise ValueError("empty effective domain")
        idx = np.flatnonzero(finite)
        if idx[-1] - idx[0] + 1 != idx.size:
            raise ValueError("finite entries must form a contiguous range")
        object.__setattr__(self, "_lo_idx", int(idx[0]))
        object.__setattr__(self, "_hi_idx", int(idx[-1]))

    @classmethod
    def from_callable(cls, grid: Grid1D, fun: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        return cls(grid, np.asarray(fun(grid.points), dtype=np.float64))

    @property
    def finite_slice(self) -> slice:
        return slice(self._lo_idx, self._hi_idx + 1)

    @property
    def finite_values(self) -> np.ndarray:
        return self.values[self.finite_slice]

    @property
    def finite_points(self) -> np.ndarray:
        return self.grid.points[self.finite_slice]

    @property
    def all_finite(self) -> bool:
        return self._lo_idx == 0 and self._hi_idx == self.grid.n - 1

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.finite_values)))

    def max_slope(self) -> float:
        """Largest adjacent slope over the effective domain."""
        fv = self.finite_values
        if fv.size < 2:
            raise ValueError("effective domain has a single node")
        return float(np.max(np.diff(fv)) / self.grid.spacing)

    def min_slope(self) -> float:
        fv = self.finite_values
        if fv.size < 2:
            raise ValueError("effective domain has a single node")
        return float(np.min(np.diff(fv)) / self.grid.spacing)

    def lipschitz(self) -> float:
        return max(abs(self.max_slope()), abs(self.min_slope()))

    def is_convex(self, tol: float = _CONVEXITY_TOL) -> bool:
        fv = self.finite_values
        if fv.size < 3:
            return True
        scale = max(1.0, float(np.max(np.abs(fv))))
        return bool(np.all(np.diff(fv, 2) >= -tol * scale))

    def second_differences(self) -> np.ndarray:
        return np.diff(self.finite_values, 2)

    def with_values(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(self.grid, values)

    def __call__(self, x: np.ndarray | float) -> np.ndarray | float:
        """Piecewise-linear interpolation over the effective domain."""
        return np.interp(x, self.finite_points, self.finite_values)

    def to_csv(self, path_or_buffer) -> None:
        """Write ``x,value`` rows; +inf is rendered as the literal ``inf``."""

        def _write(fh) -> None:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["x", "value"])
            for x, v in zip(self.grid.points, self.values):
                writer.writerow([repr(float(x)), "inf" if np.isinf(v) else repr(float(v))])

        if isinstance(path_or_buffer, (str, bytes)) or hasattr(path_or_buffer, "__fspath__"):
            with open(path_or_buffer, "w", encoding="utf-8", newline="") as fh:
                _write(fh)
        else:
            _write(path_or_buffer)

    @classmethod
    def from_csv(cls, path_or_buffer) -> "GridFunction":
        if isinstance(path_or_buffer, (str, bytes)) or hasattr(path_or_buffer, "__fspath__"):
            with open(path_or_buffer, "r", encoding="utf-8", newline="") as fh:
                text = fh.read()
        else:
            text = path_or_buffer.read()
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != ["x", "value"]:
            raise ValueError("expected header 'x,value'")
        xs = np.array([float(r[0]) for r in rows[1:]])
        vs = np.array([float(r[1]) for r in rows[1:]])
        if xs.size < 2:
            raise ValueError("need at least two rows")
        spacing = xs[1] - xs[0]
        if not np.allclose(np.diff(xs), spacing, rtol=0, atol=1e-9 * max(1.0, abs(spacing))):
            raise ValueError("nodes are not uniformly spaced")
        grid = Grid1D(float(xs[0]), float(xs[-1]), xs.size)
        return cls(grid, vs)


@dataclass(frozen=True, eq=False)
class KProfile:
    """Dyadic K-functional upper envelope: entry ``upper[i]`` bounds
    ``K(2^levels[i])`` (orientation ``"large"``) or ``K(2^-levels[i])``
    (orientation ``"small"``)."""

    orientation: str
    levels: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        if self.orientation not in ("large", "small"):
            raise ValueError("orientation must be 'large' or 'small'")
        levels = np.asarray(self.levels, dtype=np.int64).copy()
        upper = np.asarray(self.upper, dtype=np.float64).copy()
        if levels.shape != upper.shape or levels.ndim != 1:
            raise ValueError("levels and upper must be 1-d arrays of equal length")
        if np.any(np.diff(levels) <= 0):
            raise ValueError("levels must be strictly increasing")
        if np.any(upper < 0) or not np.all(np.isfinite(upper)):
            raise ValueError("entries must be finite and nonnegative")
        if self.orientation == "small" and upper.size > 1:
            # K is nondecreasing in its argument, so K(2^-n) falls with n
            scale = max(1.0, float(upper[0]))
            if np.any(np.diff(upper) > 1e-9 * scale):
                raise ValueError("small-argument profile must be nonincreasing")
        levels.flags.writeable = False
        upper.flags.writeable = False
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "upper", upper)

    def argument(self) -> np.ndarray:
        """The t-values the entries refer to."""
        sign = 1.0 if self.orientation == "large" else -1.0
        return np.exp2(sign * self.levels.astype(np.float64))

    def value(self, level: int) -> float:
        idx = np.flatnonzero(self.levels == level)
        if idx.size == 0:
            raise KeyError(f"level {level} not in profile")
        return float(self.upper[idx[0]])


@dataclass(frozen=True, eq=False)
class SeriesTail:
    """Partial sums of a nonnegative series with a geometric tail diagnosis.

    ``converged`` means the last terms decay geometrically and the projected
    remainder ``tail_estimate`` is below the tolerance used to build the
    report.  ``growth_exponent`` is the fitted log2 slope of the terms over
    the terminal stretch where log2 increments have stabilized (None when the
    terms do not grow geometrically); fitting only the stabilized regime
    avoids the bias that transients at small indices would induce.
    """

    terms: np.ndarray
    partial_sums: np.ndarray
    converged: bool
    tail_estimate: float
    growth_exponent: float | None

    @property
    def value(self) -> float:
        return float(self.partial_sums[-1])


def diagnose_series(terms: np.ndarray, tol: float) -> SeriesTail:
    """Shared tail diagnosis for level sums: geometric-ratio extrapolation of
    the remainder, and a growth-rate fit when the sums diverge."""
    terms = np.asarray(terms, dtype=np.float64)
    if terms.ndim != 1 or terms.size == 0:
        raise ValueError("need a nonempty 1-d term array")
    if np.any(terms < 0):
        raise ValueError("terms must be nonnegative")
    sums = np.cumsum(terms)
    window = min(5, terms.size - 1)
    converged = False
    tail = np.inf
    growth: float | None = None
    if terms[-1] == 0.0:
        converged = True
        tail = 0.0
    elif window >= 1 and terms[-1 - window] > 0:
        ratio = (terms[-1] / terms[-1 - window]) ** (1.0 / window)
        if ratio < 0.97:
            tail = float(terms[-1] * ratio / (1.0 - ratio))
            converged = tail < tol
    if not converged and terms.size >= 6 and np.all(terms > 0):
        logs = np.log2(terms)
        inc = np.diff(logs)
        last = inc[-1]
        tol_inc = max(0.2 * abs(last), 0.02)
        start = inc.size
        while start > 0 and abs(inc[start - 1] - last) <= tol_inc:
            start -= 1
        if inc.size - start < 3:
            start = terms.size // 2  # no stable stretch: fall back to last half
        ns = np.arange(terms.size)[start:]
        slope = np.polyfit(ns, logs[start:], 1)[0]
        if slope > 1e-3:
            growth = float(slope)
    return SeriesTail(
        terms=terms,
        partial_sums=sums,
        converged=converged,
        tail_estimate=float(tail),
        growth_exponent=growth,
    )


# ---------------------------------------------------------------------------
# envelopes and conjugates


def convex_envelope(f: GridFunction) -> GridFunction:
    """Greatest convex minorant of ``f`` on its effective domain, evaluated at
    the grid nodes; ``+inf`` entries are preserved.

    Single monotone-chain pass, O(n).  The result is a convex minorant that is
    idempotent and monotone in its argument, and it never enlarges the
    effective domain.
    """
    if f.finite_values.size < 2:
        raise ValueError("envelope needs at least 2 finite values")
    sl = f.finite_slice
    env = _accel.lower_envelope(f.finite_points, np.ascontiguousarray(f.finite_values))
    out = np.full(f.grid.n, np.inf)
    out[sl] = env
    return GridFunction(f.grid, out)


def radial_convex_envelope(f: GridFunction) -> GridFunction:
    """Envelope of the even extension of a profile on ``[0, L]``: the greatest
    convex nondecreasing minorant, i.e. the convexification of ``p -> f(|p|)``.
    Requires the effective domain to start at the left endpoint 0."""
    if abs(f.grid.lo) > 1e-12 * max(1.0, abs(f.grid.hi)):
        raise ValueError("radial profile must live on [0, L]")
    if f._lo_idx != 0:
        raise ValueError("radial envelope needs the origin inside the effective domain")
    sl = f.finite_slice
    env = _accel.radial_envelope(f.finite_points, np.ascontiguousarray(f.finite_values))
    out = np.full(f.grid.n, np.inf)
    out[sl] = env
    return GridFunction(f.grid, out)


def _legendre_dense(xs: np.ndarray, ys: np.ndarray, ps: np.ndarray) -> np.ndarray:
    out = np.empty(ps.size)
    chunk = max(1, int(4e6 // max(xs.size, 1)))
    for start in range(0, ps.size, chunk):
        block = ps[start : start + chunk, None] * xs[None, :] - ys[None, :]
        out[start : start + chunk] = block.max(axis=1)
    return out


def _legendre_merge(xs: np.ndarray, ys: np.ndarray, ps: np.ndarray) -> np.ndarray:
    """Two-pointer conjugate for convex samples: the argmax index is
    nondecreasing in the slope argument, giving O(n + m)."""
    out = np.empty(ps.size)
    i = 0
    n = xs.size
    for j, p in enumerate(ps):
        while i + 1 < n and p * xs[i + 1] - ys[i + 1] >= p * xs[i] - ys[i]:
            i += 1
        out[j] = p * xs[i] - ys[i]
    return out


def legendre(f: GridFunction, dual: Grid1D, assume_convex: bool = False) -> GridFunction:
    """Discrete Legendre transform ``f*(p) = max_x (p x - f(x))`` over the
    finite nodes of ``f``, evaluated on the dual grid.

    The default path is the exhaustive O(n m) maximum; ``assume_convex``
    switches to the O(n + m) merge sweep, valid when the finite values are
    convex (both agree to 1e-12 on such inputs).  The output is finite
    everywhere and 1-Lipschitz as a map of ``f`` in sup norm.
    """
    xs = f.finite_points
    ys = f.finite_values
    ps = dual.points
    if assume_convex:
        vals = _legendre_merge(xs, ys, np.ascontiguousarray(ps))
    else:
        vals = _legendre_dense(xs, ys, ps)
    return GridFunction(dual, vals)


def monotone_conjugate(g: GridFunction, dual: Grid1D) -> GridFunction:
    """Radial conjugate ``q -> max_r (r q - g(r))`` for profiles on ``[0, R]``;
    both grids must start at 0."""
    for grid, name in ((g.grid, "profile"), (dual, "dual")):
        if grid.lo < -1e-12:
            raise ValueError(f"{name} grid must live on [0, R]")
    return legendre(g, dual, assume_convex=g.is_convex())


# ---------------------------------------------------------------------------
# moduli and K-estimates


def second_difference_modulus(f: GridFunction, t: float, p: float = np.inf) -> float:
    """Largest L^p size of symmetric second differences over grid shifts
    ``|h| <= t``:  sup over representable h of ``||f(.+h) + f(.-h) - 2 f||_p``.

    L^p integrals use the left-endpoint Riemann rule on the inner range; the
    restriction to grid-representable shifts makes the value lower-biased by
    at most ``Lip(f') * spacing`` terms.  Requires an all-finite ``f`` and
    ``t`` at most half the domain length.
    """
    if not f.all_finite:
        raise ValueError("modulus needs an all-finite grid function")
    if t < 0:
        raise ValueError("shift bound must be nonnegative")
    if t > f.grid.length / 2 + 1e-12:
        raise ValueError("shift bound exceeds half the domain length")
    if p != np.inf and p < 1:
        raise ValueError("p must be >= 1 or inf")
    h = f.grid.spacing
    jmax = int(np.floor(t / h + 1e-12))
    vals = f.values
    best = 0.0
    for j in range(1, jmax + 1):
        d2 = vals[2 * j :] + vals[: -2 * j] - 2.0 * vals[j : -j]
        if d2.size == 0:
            continue
        if p == np.inf:
            size = float(np.max(np.abs(d2)))
        else:
            size = float((np.sum(np.abs(d2) ** p) * h) ** (1.0 / p))
        if size > best:
            best = size
    return best


def besov_seminorm(
    f: GridFunction,
    s: float,
    p: float = np.inf,
    q: float = 1.0,
    n_levels: int = 10,
    tol: float = 1e-3,
) -> SeriesTail:
    """Level sums of the second-difference Besov seminorm: terms
    ``modulus(f, 2^-k, p) * 2^(k s)`` for ``k = 0..n_levels``, combined in
    ``l^q`` and reported with the shared tail diagnosis (``converged=False``
    flags divergence, e.g. a kink when s = 1, p = inf)."""
    if not 0 < s < 2:
        raise ValueError("smoothness exponent must lie in (0, 2)")
    if n_levels < 1:
        raise ValueError("need at least one level")
    if q != np.inf and q < 1:
        raise ValueError("q must be >= 1 or inf")
    terms = []
    for k in range(n_levels + 1):
        t = 2.0**-k
        if t > f.grid.length / 2:
            continue
        mod = second_difference_modulus(f, t, p)
        terms.append((mod * 2.0 ** (k * s)) ** (1.0 if q == np.inf else q))
    arr = np.array(terms)
    if q == np.inf:
        running = np.maximum.accumulate(arr)
        increments = np.diff(np.concatenate([[0.0], running]))
        return diagnose_series(increments, tol)
    report = diagnose_series(arr, tol)
    # undo the q-power on the reported partial sums so .value is the l^q norm
    sums = report.partial_sums ** (1.0 / q)
    return SeriesTail(
        terms=report.terms ** (1.0 / q),
        partial_sums=sums,
        converged=report.converged,
        tail_estimate=report.tail_estimate ** (1.0 / q)
        if np.isfinite(report.tail_estimate)
        else np.inf,
        growth_exponent=report.growth_exponent,
    )


def k_c11_estimate(f: GridFunction, t: float) -> float:
    """Two-sided K-functional surrogate for the pair (C^{1,1}, C) at large
    arguments:  ``||f||_inf + t * modulus(f, t^(-1/2), inf)``.

    The true K(t) is sandwiched between 1/5 of this and a universal multiple
    of it, so ratios of these estimates track K up to fixed constants.
    Requires ``t >= 1``.
    """
    if t < 1:
        raise ValueError("estimate is calibrated for t >= 1")
    shift = min(t**-0.5, f.grid.length / 2)
    return f.sup_norm() + t * second_difference_modulus(f, shift, np.inf)


def c11_k_profile(f: GridFunction, n_max: int) -> KProfile:
    """K-profile of ``k_c11_estimate`` at ``t = 2^n``, ``n = 0..n_max``."""
    levels = np.arange(n_max + 1)
    upper = np.array([k_c11_estimate(f, float(2.0**n)) for n in levels])
    return KProfile("large", levels, upper)
