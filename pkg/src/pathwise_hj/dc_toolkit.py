"""Difference-of-convex calculus on an interval and K-functional diagnostics
for Hamiltonians.

A function with derivative of bounded variation splits as ``f = f_plus -
f_minus`` with both parts convex; the DC size of ``f`` is the infimum of
``||f_plus||_inf + ||f_minus||_inf`` over such splittings.  The infimum is not
computably attained, so everything here produces certified upper bounds from
explicit decompositions and says so.  The power-type family
``max(|p|^beta, delta^beta)`` gets its closed-form decomposition, and the
K-profile machinery turns those decompositions into membership evidence for
interpolation classes between DC and C.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .grid_convex import (
    Grid1D,
    GridFunction,
    KProfile,
    SeriesTail,
    diagnose_series,
)

__all__ = [
    "DCFunction1D",
    "Hamiltonian1D",
    "dc_from_convex",
    "dc_split",
    "dc_norm_upper",
    "dc_max",
    "dc_min",
    "power_dc_truncation",
    "power_truncation_family",
    "mollify_grid",
    "k_dc_profile",
    "h_membership_partial_sums",
]

_PART_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DCFunction1D:
    """Explicit convex-minus-convex representation on a fixed grid.

    ``norm_upper`` is a certified upper bound for the DC size of the
    represented function; it always dominates the stored decomposition's
    ``||part_plus||_inf + ||part_minus||_inf`` (usually with equality).
    """

    part_plus: GridFunction
    part_minus: GridFunction
    interval: Grid1D
    norm_upper: float

    def __post_init__(self) -> None:
        if self.part_plus.grid != self.interval or self.part_minus.grid != self.interval:
            raise ValueError("parts must live on the stated interval grid")
        for name, part in (("part_plus", self.part_plus), ("part_minus", self.part_minus)):
            if not part.all_finite:
                raise ValueError(f"{name} must be finite everywhere")
            if not part.is_convex(tol=_PART_TOL):
                raise ValueError(f"{name} fails the convexity certificate")
        sum_norms = self.part_plus.sup_norm() + self.part_minus.sup_norm()
        scale = max(1.0, sum_norms)
        if self.norm_upper < sum_norms - 1e-12 * scale:
            raise ValueError("norm_upper must dominate the stored decomposition")

    @property
    def grid(self) -> Grid1D:
        return self.interval

    @property
    def values(self) -> np.ndarray:
        return self.part_plus.values - self.part_minus.values

    def as_grid_function(self) -> GridFunction:
        return GridFunction(self.interval, self.values)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def negate(self) -> "DCFunction1D":
        """-f swaps the parts; the certified bound is unchanged."""
        return DCFunction1D(self.part_minus, self.part_plus, self.interval, self.norm_upper)

    def to_csv(self, path_or_buffer) -> None:
        def _write(fh) -> None:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["x", "part_plus", "part_minus"])
            for x, p, q in zip(
                self.interval.points, self.part_plus.values, self.part_minus.values
            ):
                writer.writerow([repr(float(x)), repr(float(p)), repr(float(q))])

        if isinstance(path_or_buffer, (str, bytes)) or hasattr(path_or_buffer, "__fspath__"):
            with open(path_or_buffer, "w", encoding="utf-8", newline="") as fh:
                _write(fh)
        else:
            _write(path_or_buffer)

    @classmethod
    def from_csv(cls, path_or_buffer) -> "DCFunction1D":
        if isinstance(path_or_buffer, (str, bytes)) or hasattr(path_or_buffer, "__fspath__"):
            with open(path_or_buffer, "r", encoding="utf-8", newline="") as fh:
                text = fh.read()
        else:
            text = path_or_buffer.read()
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != ["x", "part_plus", "part_minus"]:
            raise ValueError("expected header 'x,part_plus,part_minus'")
        xs = np.array([float(r[0]) for r in rows[1:]])
        plus = np.array([float(r[1]) for r in rows[1:]])
        minus = np.array([float(r[2]) for r in rows[1:]])
        grid = Grid1D(float(xs[0]), float(xs[-1]), xs.size)
        gp = GridFunction(grid, plus)
        gq = GridFunction(grid, minus)
        return cls(gp, gq, grid, gp.sup_norm() + gq.sup_norm())


# ---------------------------------------------------------------------------
# splitting and the certified norm


def _double_cumsum(second_diffs: np.ndarray) -> np.ndarray:
    """Array whose discrete second differences equal ``second_diffs``, started
    flat at zero."""
    slopes = np.concatenate([[0.0], np.cumsum(second_diffs)])
    return np.concatenate([[0.0], np.cumsum(slopes)])


def _shift_cost(plus: np.ndarray, minus: np.ndarray, x: np.ndarray, slope: float) -> float:
    """Best achievable ``||plus - a||_inf + ||minus - a||_inf`` over affine
    ``a`` with the given slope; the optimal intercept is closed form."""
    p = plus - slope * x
    q = minus - slope * x
    half_p = (p.max() - p.min()) / 2.0
    half_q = (q.max() - q.min()) / 2.0
    mid_gap = abs((p.max() + p.min()) - (q.max() + q.min())) / 2.0
    return half_p + half_q + mid_gap


def _optimal_common_shift(
    plus: np.ndarray, minus: np.ndarray, x: np.ndarray
) -> tuple[float, float, float]:
    """Deterministic search for the common affine shift minimizing the summed
    sup norms: coarse slope scan, then 64 golden-section refinements.

    Returns ``(slope, intercept, cost)``.
    """
    h = x[1] - x[0]
    slope_scale = max(
        np.max(np.abs(np.diff(plus))), np.max(np.abs(np.diff(minus))), h
    ) / h
    lo, hi = -slope_scale, slope_scale
    coarse = np.linspace(lo, hi, 33)
    costs = [_shift_cost(plus, minus, x, b) for b in coarse]
    k = int(np.argmin(costs))
    a = coarse[max(k - 1, 0)]
    b = coarse[min(k + 1, 32)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = _shift_cost(plus, minus, x, c)
    fd = _shift_cost(plus, minus, x, d)
    for _ in range(64):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = _shift_cost(plus, minus, x, c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = _shift_cost(plus, minus, x, d)
    slope = c if fc < fd else d
    p = plus - slope * x
    q = minus - slope * x
    intercept = ((p.max() + p.min()) / 2.0 + (q.max() + q.min()) / 2.0) / 2.0
    cost = _shift_cost(plus, minus, x, slope)
    return float(slope), float(intercept), float(cost)


def dc_from_convex(f: GridFunction) -> DCFunction1D:
    """Wrap an already convex (or concave) function as a one-sided split."""
    zeros = GridFunction(f.grid, np.zeros(f.grid.n))
    if f.is_convex(tol=_PART_TOL):
        return DCFunction1D(f, zeros, f.grid, f.sup_norm())
    neg = GridFunction(f.grid, -f.values)
    if neg.is_convex(tol=_PART_TOL):
        return DCFunction1D(zeros, neg, f.grid, f.sup_norm())
    raise ValueError("function is neither convex nor concave on its grid")


def dc_split(f: GridFunction) -> DCFunction1D:
    """Split ``f`` into convex parts through its discrete second differences.

    The negative curvature mass is double-cumulative-summed into the minus
    part; the plus part is then ``f + part_minus``, so the difference
    reproduces ``f`` at every node to machine precision.  Both parts are
    finally shifted by a common affine function chosen to shrink the summed
    sup norms (the difference is unchanged), and a one-sided decomposition is
    used instead whenever ``f`` itself is convex or concave and that is
    cheaper.
    """
    if not f.all_finite:
        raise ValueError("split needs a function that is finite everywhere")
    vals = f.finite_values
    x = f.grid.points
    d2 = np.diff(vals, 2)
    minus = _double_cumsum(np.clip(-d2, 0.0, None))
    plus = vals + minus
    slope, intercept, cost = _optimal_common_shift(plus, minus, x)
    shift = slope * x + intercept
    candidates: list[tuple[float, np.ndarray, np.ndarray]] = [
        (cost, plus - shift, minus - shift)
    ]
    zero = np.zeros_like(vals)
    if f.is_convex(tol=_PART_TOL):
        candidates.append((f.sup_norm(), vals, zero))
    if GridFunction(f.grid, -vals).is_convex(tol=_PART_TOL):
        candidates.append((f.sup_norm(), zero, -vals))
    best = min(candidates, key=lambda c: c[0])
    gp = GridFunction(f.grid, best[1])
    gq = GridFunction(f.grid, best[2])
    return DCFunction1D(gp, gq, f.grid, gp.sup_norm() + gq.sup_norm())


def dc_norm_upper(f: DCFunction1D, optimize_affine: bool = True) -> float:
    """Certified DC-size upper bound from the stored decomposition, optionally
    sharpened by the common-affine-shift search and by the one-sided
    decomposition when the represented function is convex or concave.  Never
    smaller than the plain sup norm, which lower-bounds every decomposition.
    """
    best = f.part_plus.sup_norm() + f.part_minus.sup_norm()
    if optimize_affine:
        _, _, cost = _optimal_common_shift(
            f.part_plus.values, f.part_minus.values, f.interval.points
        )
        best = min(best, cost)
    rep = f.as_grid_function()
    if rep.is_convex(tol=_PART_TOL) or GridFunction(f.interval, -rep.values).is_convex(
        tol=_PART_TOL
    ):
        best = min(best, rep.sup_norm())
    return float(best)


def dc_max(f: DCFunction1D, g: DCFunction1D) -> DCFunction1D:
    """Pointwise maximum through the exchange construction
    ``max(f, g) = max(f1 + g2, f2 + g1) - (f2 + g2)``.

    Both output parts are convex, the values agree with the plain pointwise
    maximum, and the certified bound at most doubles the sum of the inputs'.
    """
    if f.interval != g.interval:
        raise ValueError("operands must share a grid")
    m1 = np.maximum(
        f.part_plus.values + g.part_minus.values,
        f.part_minus.values + g.part_plus.values,
    )
    m2 = f.part_minus.values + g.part_minus.values
    gp = GridFunction(f.interval, m1)
    gq = GridFunction(f.interval, m2)
    return DCFunction1D(gp, gq, f.interval, gp.sup_norm() + gq.sup_norm())


def dc_min(f: DCFunction1D, g: DCFunction1D) -> DCFunction1D:
    """Pointwise minimum via ``min(f, g) = -max(-f, -g)`` (a part swap)."""
    return dc_max(f.negate(), g.negate()).negate()


# ---------------------------------------------------------------------------
# Hamiltonians and the power-type family


@dataclass(frozen=True, eq=False)
class Hamiltonian1D:
    """One-dimensional Hamiltonian described by a sampled profile.

    A profile on ``[0, L]`` is read radially (``H(p) = profile(|p|)``); a
    profile on ``[-L, L]`` is a general 1-d Hamiltonian.  ``convex_flag``
    certifies convexity of ``H`` itself, so for radial profiles it requires
    the profile to be both convex and nondecreasing.
    """

    profile: GridFunction
    convex_flag: bool
    lipschitz_bound: float
    min_value: float

    def __post_init__(self) -> None:
        if not self.profile.all_finite:
            raise ValueError("profile must be finite everywhere")
        if self.convex_flag:
            if not self.profile.is_convex():
                raise ValueError("convex_flag set but profile is not convex")
            if self.is_radial and self.profile.min_slope() < -1e-9:
                raise ValueError("convex_flag set but radial profile decreases")
        if self.lipschitz_bound < self.profile.lipschitz() - 1e-9:
            raise ValueError("lipschitz_bound below the profile's max slope")

    @property
    def is_radial(self) -> bool:
        return abs(self.profile.grid.lo) <= 1e-12 * max(1.0, abs(self.profile.grid.hi))

    @property
    def radius(self) -> float:
        return self.profile.grid.hi

    @classmethod
    def from_profile(cls, profile: GridFunction) -> "Hamiltonian1D":
        radial = abs(profile.grid.lo) <= 1e-12 * max(1.0, abs(profile.grid.hi))
        convex = profile.is_convex() and (
            profile.min_slope() >= -1e-9 if radial else True
        )
        return cls(
            profile=profile,
            convex_flag=bool(convex),
            lipschitz_bound=profile.lipschitz(),
            min_value=float(np.min(profile.values)),
        )

    @classmethod
    def power(cls, beta: float, radius: float, n: int = 4097) -> "Hamiltonian1D":
        """``H(p) = |p|^beta`` sampled radially on ``[0, radius]``."""
        if not 0 < beta <= 1:
            raise ValueError("exponent must lie in (0, 1]")
        grid = Grid1D(0.0, radius, n)
        prof = GridFunction(grid, grid.points**beta)
        return cls.from_profile(prof)

    @classmethod
    def power_truncated(
        cls, beta: float, delta: float, radius: float, n: int = 4097
    ) -> "Hamiltonian1D":
        """``H(p) = max(|p|^beta, delta^beta)``: the flattened power profile,
        Lipschitz with constant ``beta * delta^(beta-1)``."""
        if not 0 < beta < 1:
            raise ValueError("exponent must lie in (0, 1)")
        if not 0 < delta <= radius:
            raise ValueError("need 0 < delta <= radius")
        grid = Grid1D(0.0, radius, n)
        prof = GridFunction(grid, np.maximum(grid.points**beta, delta**beta))
        return cls(
            profile=prof,
            convex_flag=False,
            lipschitz_bound=beta * delta ** (beta - 1.0),
            min_value=float(delta**beta),
        )

    def __call__(self, p: np.ndarray | float) -> np.ndarray | float:
        """Evaluate ``H`` with linear edge extension beyond the profile."""
        arr = np.abs(np.asarray(p, dtype=np.float64)) if self.is_radial else np.asarray(
            p, dtype=np.float64
        )
        g = self.profile.grid
        vals = self.profile.values
        out = np.interp(arr, g.points, vals)
        s_hi = (vals[-1] - vals[-2]) / g.spacing
        over = arr > g.hi
        if np.any(over):
            out = np.where(over, vals[-1] + s_hi * (arr - g.hi), out)
        if not self.is_radial:
            s_lo = (vals[1] - vals[0]) / g.spacing
            under = arr < g.lo
            if np.any(under):
                out = np.where(under, vals[0] + s_lo * (arr - g.lo), out)
        return out if np.ndim(p) else float(out)

    def values_on(self, grid: Grid1D) -> GridFunction:
        return GridFunction(grid, self(grid.points))


def power_dc_truncation(
    beta: float, delta: float, radius: float, n: int = 2049
) -> tuple[DCFunction1D, float]:
    """Closed-form DC decomposition of ``max(|p|^beta, delta^beta)`` on
    ``[-radius, radius]`` and the exact sup distance ``delta^beta`` to the
    untruncated power.

    The plus part is the supporting cone ``beta delta^(beta-1) (|p|-delta)_+``;
    the minus part (plus minus the function) is C^1 and convex because the
    power is concave beyond ``delta``.
    """
    if not 0 < beta < 1:
        raise ValueError("exponent must lie in (0, 1)")
    if delta <= 0:
        raise ValueError("truncation height must be positive")
    if delta > radius:
        raise ValueError("truncation radius exceeds the domain")
    if n % 2 == 0:
        n += 1  # keep the origin on the grid: the sup distance sits there
    grid = Grid1D(-radius, radius, n)
    p = np.abs(grid.points)
    trunc = np.maximum(p**beta, delta**beta)
    sup_error = float(delta**beta)
    if delta == radius:
        # constant function: represent it on the plus side
        gp = GridFunction(grid, np.full(n, delta**beta))
        gq = GridFunction(grid, np.zeros(n))
        return DCFunction1D(gp, gq, grid, sup_error), sup_error
    plus = beta * delta ** (beta - 1.0) * np.clip(p - delta, 0.0, None)
    minus = plus - trunc
    gp = GridFunction(grid, plus)
    gq = GridFunction(grid, minus)
    dc = DCFunction1D(gp, gq, grid, gp.sup_norm() + gq.sup_norm())
    return dc, sup_error


def power_truncation_family(
    beta: float, radius: float, n: int = 2049
) -> Callable[[int], list[DCFunction1D]]:
    """Level-matched truncation candidates for the K-profile of the power
    Hamiltonian: level ``m`` proposes the truncation at ``delta = 2^-m``."""

    def candidates(level: int) -> list[DCFunction1D]:
        delta = min(2.0**-level, radius)
        return [power_dc_truncation(beta, delta, radius, n)[0]]

    return candidates


# ---------------------------------------------------------------------------
# mollification and K-profiles


def mollify_grid(f: GridFunction, scale: float) -> GridFunction:
    """Smooth by the even quartic bump ``(1-u^2)^2`` at the given scale, with
    constant extension past the endpoints; scales under one spacing act as
    the identity."""
    if not f.all_finite:
        raise ValueError("mollification needs a function finite everywhere")
    h = f.grid.spacing
    m = int(np.floor(scale / h))
    if m < 1:
        return f
    u = np.arange(-m, m + 1) * h / scale
    w = (1.0 - u * u) ** 2
    w /= w.sum()
    padded = np.pad(f.values, m, mode="edge")
    return GridFunction(f.grid, np.convolve(padded, w, mode="valid"))


def k_dc_profile(
    f: GridFunction,
    radius: float,
    n_max: int,
    family: Callable[[int], Iterable[DCFunction1D]]
    | Sequence[DCFunction1D]
    | None = None,
) -> KProfile:
    """Upper bounds for the splitting K-functional of ``f`` between the DC
    and uniform norms at arguments ``2^n``, ``n = 0..n_max``.

    Every entry is ``min over candidates g of dc_norm(g) + 2^n ||f - g||_inf``.
    The built-in candidates are the direct split of ``f`` and splits of
    mollified copies at scales ``radius * 2^(-k/2)`` (computed on a capped
    resolution for very fine grids; a coarse candidate's linear interpolant
    carries the same certified parts); ``family`` can inject analytic
    candidates per level (richer candidate sets only lower entries).
    """
    if n_max < 1:
        raise ValueError("need n_max >= 1")
    base: list[tuple[float, float]] = []  # (certified norm, sup distance)

    def add(g: DCFunction1D, pool: list[tuple[float, float]]) -> None:
        if g.interval.n != f.grid.n or abs(g.interval.lo - f.grid.lo) > 1e-9:
            diff = float(np.max(np.abs(f.values - np.interp(
                f.grid.points, g.interval.points, g.values
            ))))
        else:
            diff = float(np.max(np.abs(f.values - g.values)))
        pool.append((dc_norm_upper(g), diff))

    add(dc_split(f), base)
    smooth_src = f
    if f.grid.n > 4097:
        coarse = Grid1D(f.grid.lo, f.grid.hi, 4097)
        smooth_src = GridFunction(coarse, np.interp(coarse.points, f.grid.points, f.values))
    k = 0
    while True:
        scale = radius * 2.0 ** (-k / 2.0)
        if scale < 2.0 * smooth_src.grid.spacing or k > n_max:
            break
        add(dc_split(mollify_grid(smooth_src, scale)), base)
        k += 1

    per_level: Callable[[int], Iterable[DCFunction1D]]
    if family is None:
        per_level = lambda level: ()
    elif callable(family):
        per_level = family
    else:
        fixed = list(family)
        per_level = lambda level: fixed

    levels = np.arange(n_max + 1)
    upper = np.empty(n_max + 1)
    for i, n in enumerate(levels):
        pool = list(base)
        for g in per_level(int(n)):
            add(g, pool)
        t = 2.0 ** float(n)
        upper[i] = min(norm + t * diff for norm, diff in pool)
    return KProfile("large", levels, upper)


def h_membership_partial_sums(
    f: GridFunction,
    alpha: float,
    radius: float,
    n_terms: int,
    family: Callable[[int], Iterable[DCFunction1D]]
    | Sequence[DCFunction1D]
    | None = None,
    tol: float = 1e-3,
) -> SeriesTail:
    """Partial sums of ``2^(-n alpha) K_hat(2^n)`` as membership evidence for
    the interpolation class at exponent ``alpha``.

    A geometric Cauchy tail below ``tol`` certifies membership of the upper
    bound series; growth yields a fitted log2 rate (the expected rate for the
    power family with exponent ``beta`` is ``1 - alpha - beta``), which is
    evidence, not proof, of non-membership.
    """
    if n_terms < 2:
        raise ValueError("need at least two terms")
    if not 0 < alpha < 1:
        raise ValueError("interpolation exponent must lie in (0, 1)")
    profile = k_dc_profile(f, radius, n_terms, family)
    weights = 2.0 ** (-alpha * profile.levels.astype(np.float64))
    return diagnose_series(weights * profile.upper, tol)
