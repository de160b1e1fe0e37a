"""Solution engines for pathwise Hamilton-Jacobi flows du = H(Du) dW.

Two engines cover the two data regimes.  For convex radial initial data the
flow is propagated exactly in conjugate space: across a time interval on
which the driving signal is affine with increment dW, the radial conjugate
of the solution moves by u* -> envelope(u* - dW H), where the envelope is
the greatest convex nondecreasing minorant on the dual interval.  Stepping
at the knots of a piecewise-linear path therefore reproduces the pathwise
solution up to dual-grid resolution only.  For general Lipschitz data a
monotone Lax-Friedrichs scheme discretizes the same flow in the primal
variables under a CFL restriction.

The module also carries the exact sawtooth machinery used to cross-check
both engines: the closed-form solutions driven by the unit sawtooth, the
plateau growth recursion with its two-sided bounds, and composition bounds
built from the running extrema of each driving component, which sandwich
any admissible solution between two computable convex profiles.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import _accel
from .dc_toolkit import DCFunction1D, Hamiltonian1D
from .grid_convex import Grid1D, GridFunction, monotone_conjugate
from .paths import PiecewiseLinearPath

__all__ = [
    "ConjugateState",
    "FDResult",
    "StabilityReport",
    "ToothRecursion",
    "conjugate_init",
    "hopf_step",
    "hopf_solve",
    "eval_primal",
    "s_convex",
    "envelope_bounds",
    "fd_solve",
    "fd_domain_radius",
    "hamiltonian_from_dc",
    "stability_report",
    "tooth_recursion",
    "closedform_tooth_solution",
    "save_snapshots",
    "path_digest",
]

_DUST = 1e-12


def _primal_max(r: np.ndarray, dual_vals: np.ndarray, radii: np.ndarray) -> np.ndarray:
    """max over dual nodes of r*|x| - u*(r), blocked to bound the temporary."""
    out = np.empty(radii.size)
    chunk = max(1, int(4e6 // max(r.size, 1)))
    for start in range(0, radii.size, chunk):
        block = radii[start : start + chunk, None] * r[None, :] - dual_vals[None, :]
        out[start : start + chunk] = block.max(axis=1)
    return out


@dataclass(frozen=True, eq=False)
class ConjugateState:
    """Radial conjugate of a convex solution profile at a fixed time.

    ``values`` lives on ``dual_grid`` over ``[0, slope_bound]``; nodes outside
    the effective domain are ``+inf`` and the finite part must be convex with
    the origin included.  The effective domain can only shrink under the flow,
    which is the conjugate form of the primal gradient bound.
    """

    dual_grid: Grid1D
    values: GridFunction
    time: float
    slope_bound: float

    def __post_init__(self) -> None:
        if self.values.grid != self.dual_grid:
            raise ValueError("values must live on the stated dual grid")
        scale = max(1.0, abs(self.slope_bound))
        if abs(self.dual_grid.lo) > _DUST * scale:
            raise ValueError("dual grid must start at 0")
        if abs(self.dual_grid.hi - self.slope_bound) > 1e-9 * scale:
            raise ValueError("dual grid must end at the slope bound")
        if self.slope_bound <= 0:
            raise ValueError("slope bound must be positive")
        if not math.isfinite(self.time):
            raise ValueError("time must be finite")
        if self.values._lo_idx != 0:
            raise ValueError("origin must lie in the effective domain")
        if not self.values.is_convex():
            raise ValueError("conjugate values must be convex")

    def support_bound(self) -> float:
        """Rightmost finite dual node: the current primal Lipschitz bound."""
        return float(self.values.finite_points[-1])


@dataclass(frozen=True, eq=False)
class FDResult:
    """Finite-difference run record: snapshots at the requested times plus
    the step count and the largest viscosity weight actually used."""

    x_grid: Grid1D
    snapshots: dict[float, GridFunction]
    cfl_used: float
    steps: int

    def __post_init__(self) -> None:
        for t, snap in self.snapshots.items():
            if snap.grid != self.x_grid:
                raise ValueError(f"snapshot at t={t} is not on the run grid")


def conjugate_init(
    u0_profile: GridFunction, L: float, dual_grid: Grid1D
) -> ConjugateState:
    """Initial conjugate state u0* on ``[0, L]`` for a convex radial profile.

    The conjugate is computed against the profile's grid nodes, so it is the
    exact conjugate of the piecewise-linear interpolant.  Beyond the profile's
    Lipschitz slope the true conjugate is infinite; nodes past that slope
    (with one grid cell of slack for curvature hiding inside a cell) are
    marked ``+inf`` so the effective domain starts out equal to the slope
    support.
    """
    scale = max(1.0, abs(L))
    if abs(u0_profile.grid.lo) > _DUST * max(1.0, abs(u0_profile.grid.hi)):
        raise ValueError("radial profile must live on [0, R]")
    if not u0_profile.is_convex():
        raise ValueError("conjugate propagation needs a convex profile")
    lip = u0_profile.max_slope()
    if lip > L + 1e-9 * scale:
        raise ValueError(f"profile slope {lip} exceeds the bound {L}")
    conj = monotone_conjugate(u0_profile, dual_grid)
    vals = np.array(conj.values)
    # grid slopes under-read the true Lipschitz constant by at most one
    # cell of curvature, hence the spacing-wide slack before cutting
    cut = lip + u0_profile.grid.spacing + _DUST * scale
    vals[dual_grid.points > cut] = np.inf
    return ConjugateState(
        dual_grid=dual_grid,
        values=GridFunction(dual_grid, vals),
        time=0.0,
        slope_bound=float(L),
    )


def hopf_step(
    state: ConjugateState, H: Hamiltonian1D, dW: float, elapsed: float = 0.0
) -> ConjugateState:
    """One conjugate-space increment: envelope of u* - dW H on the dual grid.

    This is the exact solution map across a time interval where the driving
    signal is affine with total increment ``dW``; re-convexifying even when
    the increment preserves convexity costs O(n) and needs no case analysis.
    ``elapsed`` is bookkeeping only and advances the recorded time stamp.
    """
    if not H.is_radial:
        raise ValueError("conjugate stepping needs a radial Hamiltonian")
    sl = state.values.finite_slice
    r = state.values.finite_points
    shifted = state.values.finite_values - dW * np.asarray(H(r), dtype=np.float64)
    env = _accel.radial_envelope(r, np.ascontiguousarray(shifted))
    vals = np.full(state.dual_grid.n, np.inf)
    vals[sl] = env
    return ConjugateState(
        dual_grid=state.dual_grid,
        values=GridFunction(state.dual_grid, vals),
        time=state.time + elapsed,
        slope_bound=state.slope_bound,
    )


def _merged_events(W: PiecewiseLinearPath, samples: np.ndarray) -> np.ndarray:
    tol = 1e-9 * max(1.0, W.horizon)
    if samples.size:
        if samples.min() < -tol or samples.max() > W.horizon + tol:
            raise ValueError("sample time outside the path horizon")
    return np.unique(np.concatenate([W.times, samples]))


def hopf_solve(
    u0: GridFunction,
    H: Hamiltonian1D,
    W: PiecewiseLinearPath,
    sample_times: Sequence[float],
    dual_grid: Grid1D | None = None,
    slope_bound: float | None = None,
) -> list[ConjugateState]:
    """Propagate convex radial data along a piecewise-linear driving path.

    Between consecutive elements of knots(W) union sample_times the path is
    affine, so a single conjugate increment per interval is exact; the only
    error is dual-grid resolution.  Returns one state per requested sample
    time, in the order given.  The loop carries raw arrays and materializes
    ``ConjugateState`` objects at sample times only.
    """
    if not H.is_radial:
        raise ValueError("conjugate stepping needs a radial Hamiltonian")
    samples = np.atleast_1d(np.asarray(sample_times, dtype=np.float64))
    L = float(u0.max_slope()) if slope_bound is None else float(slope_bound)
    if dual_grid is None:
        dual_grid = Grid1D(0.0, L, 2049)
    state0 = conjugate_init(u0, L, dual_grid)
    events = _merged_events(W, samples)
    w_ev = np.asarray(W(events), dtype=np.float64)

    sl = state0.values.finite_slice
    r = state0.values.finite_points
    h_fin = np.ascontiguousarray(np.asarray(H(r), dtype=np.float64))
    vals = np.array(state0.values.finite_values)

    wanted = {float(s) for s in samples}
    by_time: dict[float, ConjugateState] = {}
    for i, t in enumerate(events):
        if i > 0:
            dW = w_ev[i] - w_ev[i - 1]
            if dW != 0.0:
                vals = _accel.radial_envelope(
                    r, np.ascontiguousarray(vals - dW * h_fin)
                )
        t = float(t)
        if t in wanted:
            full = np.full(dual_grid.n, np.inf)
            full[sl] = vals
            by_time[t] = ConjugateState(
                dual_grid=dual_grid,
                values=GridFunction(dual_grid, full),
                time=t,
                slope_bound=L,
            )
    return [by_time[float(s)] for s in samples]


def eval_primal(
    state: ConjugateState, x_values: Sequence[float] | np.ndarray | float
) -> np.ndarray | float:
    """Invert the conjugate at the given points: u(x) = max_r (r|x| - u*(r)).

    The maximum runs over the finite dual nodes, so the result is the exact
    primal value of the piecewise-linear conjugate interpolant, a supremum
    of affine functions of |x| and hence convex radial.
    """
    xs = np.abs(np.asarray(x_values, dtype=np.float64))
    r = state.values.finite_points
    v = state.values.finite_values
    out = _primal_max(r, v, np.atleast_1d(xs).ravel())
    if xs.ndim == 0:
        return float(out[0])
    return out.reshape(xs.shape)


def _require_normalized(H: Hamiltonian1D) -> None:
    """Composition bounds rest on monotonicity of tau -> S_H(tau) phi, which
    holds exactly when H >= 0 with minimum 0; convexity of H is not needed
    (the data stays convex, and that is what the per-factor formula uses)."""
    scale = max(1.0, float(np.max(np.abs(H.profile.values))))
    if abs(H.min_value) > 1e-9 * scale or float(np.min(H.profile.values)) < -1e-9 * scale:
        raise ValueError("Hamiltonian must be normalized to minimum value 0")


def _convex_flow(
    phi: GridFunction, H: Hamiltonian1D, tau: float, dual_n: int
) -> GridFunction:
    """Apply the constant-slope solution map for time increment ``tau`` to a
    convex radial profile and return the profile on the same primal grid.

    ``tau`` may be negative (an erosion step); convexity of the result is
    automatic because the primal reconstruction is a maximum of affine
    functions.  Zero increments and zero Hamiltonians return ``phi`` itself
    so that degenerate factors are exact no-ops.
    """
    if tau == 0.0:
        return phi
    lip = phi.max_slope()
    if lip <= _DUST:
        # flat profile: the gradient vanishes identically and the flow is a
        # rigid vertical shift by tau H(0)
        return GridFunction(phi.grid, phi.values + tau * float(H(0.0)))
    dual = Grid1D(0.0, lip, dual_n)
    state = conjugate_init(phi, lip, dual)
    r = state.values.finite_points
    h_fin = np.asarray(H(r), dtype=np.float64)
    if not np.any(h_fin):
        return phi
    shifted = state.values.finite_values - tau * h_fin
    env = _accel.radial_envelope(r, np.ascontiguousarray(shifted))
    vals = _primal_max(r, env, np.abs(phi.grid.points))
    return GridFunction(phi.grid, vals)


def s_convex(
    phi: GridFunction, H: Hamiltonian1D, tau: float, dual_n: int = 2049
) -> GridFunction:
    """Solution operator at time ``tau >= 0`` for a normalized Hamiltonian.

    For the cone phi = L|x| this equals sup over |p| <= L of (p x + tau H(p));
    in general it is one conjugate increment followed by primal inversion.
    The normalization min H = 0 is a contract: callers owning a shifted H
    must do their own shift bookkeeping.
    """
    if tau < 0:
        raise ValueError("flow time must be nonnegative")
    _require_normalized(H)
    return _convex_flow(phi, H, float(tau), dual_n)


def envelope_bounds(
    u0: GridFunction,
    pairs: Sequence[tuple[Hamiltonian1D, PiecewiseLinearPath]],
    t: float,
    reverse: bool = False,
    dual_n: int = 2049,
) -> tuple[GridFunction, GridFunction]:
    """Two-sided composition bounds at time ``t`` from running path extrema.

    The lower bound composes the convex solution operators at the running
    minima of each driving component over [0, t], the upper bound at the
    running maxima.  Operators need not commute, so the factors are applied
    in list order by default; ``reverse`` applies them in reversed order.
    """
    if t < 0:
        raise ValueError("time must be nonnegative")
    seq = list(pairs)
    if reverse:
        seq = seq[::-1]
    lower = upper = u0
    for H_j, W_j in seq:
        _require_normalized(H_j)
        if t > W_j.horizon + 1e-9 * max(1.0, W_j.horizon):
            raise ValueError("time exceeds a driving path horizon")
        if t <= 0.0:
            w_min = w_max = 0.0
        else:
            seg = W_j.restrict(min(t, W_j.horizon))
            w_min = float(np.min(seg.values))
            w_max = float(np.max(seg.values))
        lower = _convex_flow(lower, H_j, w_min, dual_n)
        upper = _convex_flow(upper, H_j, w_max, dual_n)
    return lower, upper


def fd_domain_radius(
    x_max: float, lip_h: float, variation: float, margin: float = 1.0
) -> float:
    """Radius keeping the boundary causally irrelevant on ``|x| <= x_max``:
    information travels at most Lip(H) per unit of path variation."""
    if x_max < 0 or lip_h < 0 or variation < 0 or margin < 0:
        raise ValueError("radius ingredients must be nonnegative")
    return x_max + lip_h * variation + margin


def _edge_extended(u0: GridFunction, xs: np.ndarray) -> np.ndarray:
    """Sample ``u0`` with linear extension beyond its grid at the edge slopes."""
    pts = u0.finite_points
    vals = u0.finite_values
    out = np.interp(xs, pts, vals)
    h = u0.grid.spacing
    s_lo = (vals[1] - vals[0]) / h
    s_hi = (vals[-1] - vals[-2]) / h
    with np.errstate(over="ignore"):
        out = np.where(xs < pts[0], vals[0] + s_lo * (xs - pts[0]), out)
        out = np.where(xs > pts[-1], vals[-1] + s_hi * (xs - pts[-1]), out)
    return out


def fd_solve(
    u0: GridFunction,
    H: Hamiltonian1D,
    W: PiecewiseLinearPath,
    x_grid: Grid1D,
    cfl: float = 0.9,
    sample_times: Sequence[float] = (),
) -> FDResult:
    """Monotone Lax-Friedrichs scheme for du = H(Du) dW on a fixed grid.

    Per path segment with slope sigma the update is

        u_j += dt sigma H((u_{j+1} - u_{j-1}) / (2 dx)) + (theta/2) (u_{j+1} - 2 u_j + u_{j-1})

    with theta = |sigma| Lip(H) dt / dx held at or below ``cfl``, which is
    exactly the monotonicity threshold of the scheme.  Segment step counts
    are chosen so steps land exactly on path knots and sample times.  Ghost
    values extend the solution linearly at the slopes of the initial data,
    frozen for the whole run; the grid should be wide enough (see
    :func:`fd_domain_radius`) that this choice is causally invisible.
    """
    if not 0.0 < cfl <= 1.0:
        raise ValueError("cfl factor must lie in (0, 1]")
    if not u0.all_finite:
        raise ValueError("finite-difference data must be finite everywhere")
    samples = np.atleast_1d(np.asarray(sample_times, dtype=np.float64))
    events = _merged_events(W, samples)
    w_ev = np.asarray(W(events), dtype=np.float64)

    dx = x_grid.spacing
    lip_h = float(H.lipschitz_bound)
    u = _edge_extended(u0, x_grid.points)
    h0 = u0.grid.spacing
    s_lo = (u0.finite_values[1] - u0.finite_values[0]) / h0
    s_hi = (u0.finite_values[-1] - u0.finite_values[-2]) / h0

    wanted = {float(s) for s in samples}
    snapshots: dict[float, GridFunction] = {}
    steps = 0
    cfl_used = 0.0
    pad = np.empty(u.size + 2)

    def record(t: float) -> None:
        snapshots[t] = GridFunction(x_grid, u.copy())

    t0 = float(events[0])
    if t0 in wanted:
        record(t0)
    for i in range(1, events.size):
        duration = float(events[i] - events[i - 1])
        sigma = (w_ev[i] - w_ev[i - 1]) / duration
        if sigma != 0.0:
            if lip_h <= _DUST:
                # constant Hamiltonian: gradient dependence drops out and the
                # whole segment is one exact vertical shift
                u = u + (w_ev[i] - w_ev[i - 1]) * float(H(0.0))
                steps += 1
            else:
                dt_max = cfl * dx / (abs(sigma) * lip_h)
                m = max(1, math.ceil(duration / dt_max * (1.0 - _DUST)))
                dt = duration / m
                theta = abs(sigma) * lip_h * dt / dx
                cfl_used = max(cfl_used, theta)
                with np.errstate(over="ignore", invalid="ignore"):
                    for _ in range(m):
                        pad[1:-1] = u
                        pad[0] = u[0] - s_lo * dx
                        pad[-1] = u[-1] + s_hi * dx
                        slopes = (pad[2:] - pad[:-2]) / (2.0 * dx)
                        u = (
                            u
                            + (dt * sigma) * np.asarray(H(slopes), dtype=np.float64)
                            + (0.5 * theta) * (pad[2:] - 2.0 * u + pad[:-2])
                        )
                steps += m
            if not np.all(np.isfinite(u)):
                raise FloatingPointError(
                    f"finite-difference run diverged near t={events[i]}"
                )
        t = float(events[i])
        if t in wanted:
            record(t)
    return FDResult(x_grid=x_grid, snapshots=snapshots, cfl_used=cfl_used, steps=steps)


def hamiltonian_from_dc(f: DCFunction1D) -> Hamiltonian1D:
    """Radial Hamiltonian from an even DC function on a symmetric interval.

    The right half of the represented values becomes the radial profile;
    evenness within 1e-9 of scale is required because the solvers only see
    H through |p|.
    """
    grid = f.interval
    scale = max(1.0, abs(grid.hi))
    if abs(grid.lo + grid.hi) > 1e-9 * scale:
        raise ValueError("DC Hamiltonian must live on a symmetric interval")
    vals = f.values
    vscale = max(1.0, float(np.max(np.abs(vals))))
    if np.max(np.abs(vals - vals[::-1])) > 1e-9 * vscale:
        raise ValueError("DC Hamiltonian must be even")
    if grid.n % 2 == 1:
        mid = grid.n // 2
        half = np.array(vals[mid:])
        radial = Grid1D(0.0, grid.hi, grid.n - mid)
    else:
        radial = Grid1D(0.0, grid.hi, grid.n // 2 + 1)
        half = np.interp(radial.points, grid.points, vals)
    return Hamiltonian1D.from_profile(GridFunction(radial, half))


@dataclass(frozen=True)
class StabilityReport:
    """Measured path-stability gap next to its two theoretical ceilings.

    ``dc_bound`` is the DC-size bound norm_upper * sup|W1 - W2|; ``easy_bound``
    is sup|H| times the variation of the path difference, sharper only when
    the difference is close to monotone.  Ratios are measured/bound, zero
    when both vanish.
    """

    sup_difference: float
    path_gap: float
    variation_gap: float
    dc_bound: float
    easy_bound: float
    ratio_dc: float
    ratio_easy: float
    engine: str


def _ratio(measured: float, bound: float) -> float:
    if bound > 0.0:
        return measured / bound
    return 0.0 if measured == 0.0 else math.inf


def stability_report(
    H: DCFunction1D,
    W1: PiecewiseLinearPath,
    W2: PiecewiseLinearPath,
    u0: GridFunction,
    L: float,
    dual_n: int = 2049,
) -> StabilityReport:
    """Solve the same problem under two driving paths and compare the gap
    with the DC-size and variation bounds.

    Convex radial data goes through the conjugate engine on a dual grid
    ``[0, L]``; anything else runs the finite-difference scheme on a domain
    wide enough for both paths.  The sup difference is measured at the
    common final time over the span of ``u0``.
    """
    scale = max(1.0, abs(L))
    if u0.lipschitz() > L + 1e-9 * scale:
        raise ValueError(f"initial data slope exceeds the bound {L}")
    T = W1.horizon
    if abs(W2.horizon - T) > 1e-9 * max(1.0, T):
        raise ValueError("paths must share a horizon")
    if H.interval.hi < L - 1e-9 * scale:
        raise ValueError("DC Hamiltonian must cover the slope ball")

    grid_times = np.unique(np.concatenate([W1.times, W2.times]))
    gap_vals = np.asarray(W1(grid_times)) - np.asarray(W2(grid_times))
    path_gap = float(np.max(np.abs(gap_vals)))
    variation_gap = float(np.sum(np.abs(np.diff(gap_vals))))

    ham = hamiltonian_from_dc(H)
    radial = abs(u0.grid.lo) <= _DUST * max(1.0, abs(u0.grid.hi))
    if radial and u0.is_convex() and u0.min_slope() >= -1e-9:
        dual = Grid1D(0.0, L, dual_n)
        probe = u0.finite_points
        final1 = hopf_solve(u0, ham, W1, [T], dual_grid=dual, slope_bound=L)[0]
        final2 = hopf_solve(u0, ham, W2, [T], dual_grid=dual, slope_bound=L)[0]
        diff = np.abs(
            np.asarray(eval_primal(final1, probe)) - np.asarray(eval_primal(final2, probe))
        )
        engine = "conjugate"
    else:
        span = float(np.max(np.abs(u0.finite_points)))
        tv = max(W1.total_variation(), W2.total_variation())
        radius = fd_domain_radius(span, ham.lipschitz_bound, tv)
        n = max(513, 2 * int(radius / max(u0.grid.spacing, 1e-3)) + 1)
        x_grid = Grid1D(-radius, radius, n)
        res1 = fd_solve(u0, ham, W1, x_grid, sample_times=[T])
        res2 = fd_solve(u0, ham, W2, x_grid, sample_times=[T])
        mask = np.abs(x_grid.points) <= span + _DUST
        diff = np.abs(
            res1.snapshots[T].values[mask] - res2.snapshots[T].values[mask]
        )
        engine = "difference"

    sup_diff = float(np.max(diff))
    dc_bound = float(H.norm_upper) * path_gap
    hvals = np.abs(np.asarray(ham(np.linspace(0.0, L, 1025))))
    easy_bound = float(np.max(hvals)) * variation_gap
    return StabilityReport(
        sup_difference=sup_diff,
        path_gap=path_gap,
        variation_gap=variation_gap,
        dc_bound=dc_bound,
        easy_bound=easy_bound,
        ratio_dc=_ratio(sup_diff, dc_bound),
        ratio_easy=_ratio(sup_diff, easy_bound),
        engine=engine,
    )


@dataclass(frozen=True, eq=False)
class ToothRecursion:
    """Plateau growth sequence with its proved two-sided envelope.

    ``values[k-1]`` is a_k.  ``lower_bound`` is the exact power-law floor
    beta^-(1-beta) k^(1-beta) and ``bound_satisfied`` records it pointwise.
    ``growth_statistic`` normalizes the upper-bound excess by log k; it is
    NaN at k = 1 and should stay bounded if the growth law is sharp.
    """

    exponent: float
    values: np.ndarray
    lower_bound: np.ndarray
    bound_satisfied: np.ndarray
    growth_statistic: np.ndarray


def tooth_recursion(a1: float, beta: float, k_max: int) -> ToothRecursion:
    """Iterate a_{k+1} = a_k + ((1-beta)/beta) a_k^(-beta/(1-beta)).

    The seed must sit at or above beta^-(1-beta), the fixed floor of the
    recursion; below it the comparison argument behind the bounds fails and
    the call is refused.  The iteration itself runs in compiled code, so a
    million terms cost milliseconds.
    """
    if not 0.0 < beta < 1.0:
        raise ValueError("exponent must lie in (0, 1)")
    if k_max < 1:
        raise ValueError("need at least one term")
    floor = beta ** (-(1.0 - beta))
    if a1 < floor * (1.0 - _DUST):
        raise ValueError(f"seed {a1} below the admissible floor {floor}")
    a = np.asarray(_accel.tooth_sequence(float(a1), float(beta), int(k_max)))
    k = np.arange(1, k_max + 1, dtype=np.float64)
    lower = floor * k ** (1.0 - beta)
    ok = a >= lower * (1.0 - 1e-12) - 1e-12
    q = 1.0 / (1.0 - beta)
    stat = np.full(k_max, np.nan)
    if k_max >= 2:
        stat[1:] = (a[1:] ** q - a[0] ** q - (k[1:] - 1.0) / beta) / np.log(k[1:])
    for arr in (a, lower, ok, stat):
        arr.flags.writeable = False
    return ToothRecursion(
        exponent=float(beta),
        values=a,
        lower_bound=lower,
        bound_satisfied=ok,
        growth_statistic=stat,
    )


def closedform_tooth_solution(beta: float, a: float, x: float, t: float) -> float:
    """Exact sawtooth-driven solution value for H = (1/beta)|p|^beta.

    Starting from the cone |x| (``a = 0``) the solution is known on the whole
    first tooth: |x| + t/beta while the path rises, then
    max(|x|, (t-1)/beta) + (2-t)/beta as it falls.  Starting from a plateau
    cone max(|x|, a) with a at or above beta^-(1-beta), only the endpoints of
    the tooth have closed forms; interior times for a > 0 are refused rather
    than approximated.
    """
    if not 0.0 < beta < 1.0:
        raise ValueError("exponent must lie in (0, 1)")
    if not -_DUST <= t <= 2.0 + _DUST:
        raise ValueError("time outside the tooth window [0, 2]")
    r = abs(x)
    if a < 0.0:
        raise ValueError("plateau height must be nonnegative")
    if a == 0.0:
        if t <= 1.0:
            return r + t / beta
        return max(r, (t - 1.0) / beta) + (2.0 - t) / beta
    floor = beta ** (-(1.0 - beta))
    if a < floor * (1.0 - _DUST):
        raise ValueError(f"plateau {a} below the admissible floor {floor}")
    if t <= _DUST:
        return max(r, a)
    if t >= 2.0 - _DUST:
        return max(r, a + ((1.0 - beta) / beta) * a ** (-beta / (1.0 - beta)))
    raise ValueError("interior tooth times have no closed form for a > 0")


def path_digest(W: PiecewiseLinearPath) -> str:
    """Short stable fingerprint of a path's knots, for run metadata."""
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(W.times).tobytes())
    h.update(np.ascontiguousarray(W.values).tobytes())
    return h.hexdigest()[:16]


def save_snapshots(
    directory: str | os.PathLike,
    snapshots: Mapping[float, GridFunction],
    metadata: Mapping[str, object] | None = None,
) -> dict:
    """Write one ``x,u`` CSV per snapshot time plus a JSON sidecar.

    Files are named by ascending time index; the sidecar maps each file to
    its time and carries the caller's metadata (grids, CFL, seeds, path
    fingerprints).  Returns the manifest that was written.
    """
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, t in enumerate(sorted(snapshots)):
        snap = snapshots[t]
        name = f"snapshot_{i:03d}.csv"
        with open(out / name, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["x", "u"])
            for x, v in zip(snap.grid.points, snap.values):
                writer.writerow([repr(float(x)), "inf" if np.isinf(v) else repr(float(v))])
        entries.append({"time": float(t), "file": name})
    manifest: dict = dict(metadata or {})
    manifest["snapshots"] = entries
    with open(out / "metadata.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest
