"""Conjugate-space and finite-difference engines, bounds, and oracles."""

import math

import numpy as np
import pytest

from pathwise_hj import solver as sv
from pathwise_hj.dc_toolkit import Hamiltonian1D, dc_split, power_dc_truncation
from pathwise_hj.grid_convex import Grid1D, GridFunction
from pathwise_hj.paths import PiecewiseLinearPath, teeth


def profile(lo, hi, n, fun):
    return GridFunction.from_callable(Grid1D(lo, hi, n), fun)


def radial_h(fun, radius=1.0, n=2049):
    return Hamiltonian1D.from_profile(profile(0.0, radius, n, fun))


def make_path(times, values):
    return PiecewiseLinearPath(np.asarray(times, float), np.asarray(values, float))


def random_convex_profile(rng, grid, unit_slope=True):
    """Convex nondecreasing radial profile; the last slope is forced to 1 so
    paired draws share their slope support exactly."""
    slopes = np.sort(rng.uniform(0.0, 1.0, grid.n - 1))
    if unit_slope:
        slopes[-1] = 1.0
    vals = np.concatenate(([rng.uniform(-1.0, 2.0)], np.cumsum(slopes * grid.spacing)))
    vals[1:] += vals[0]
    return GridFunction(grid, vals)


def random_drive(rng, k=6, horizon=2.0):
    dts = rng.uniform(0.1, 1.0, k)
    times = np.concatenate(([0.0], np.cumsum(dts)))
    times *= horizon / times[-1]
    vals = np.concatenate(([0.0], np.cumsum(rng.uniform(-0.8, 0.8, k))))
    return PiecewiseLinearPath(times, vals)


H_SQRT = radial_h(lambda r: 2.0 * np.sqrt(r))          # (1/beta) r^beta at beta = 1/2
H_LIN = radial_h(lambda r: r)

PRIMAL = Grid1D(0.0, 4.0, 1025)
CONE = GridFunction.from_callable(PRIMAL, lambda x: x)
CONE1 = GridFunction.from_callable(PRIMAL, lambda x: np.maximum(x, 1.0))
DUAL = Grid1D(0.0, 1.0, 2049)


class TestConjugateState:
    def test_fields_and_support(self):
        st = sv.conjugate_init(CONE1, 1.0, DUAL)
        assert st.time == 0.0
        assert st.slope_bound == 1.0
        assert st.dual_grid == DUAL
        assert st.support_bound() == 1.0

    def test_dual_grid_must_start_at_zero(self):
        bad = Grid1D(0.5, 1.0, 33)
        with pytest.raises(ValueError, match="start at 0"):
            sv.ConjugateState(bad, GridFunction(bad, np.zeros(33)), 0.0, 1.0)

    def test_slope_bound_must_match_grid(self):
        with pytest.raises(ValueError, match="slope bound"):
            sv.ConjugateState(DUAL, GridFunction(DUAL, np.zeros(DUAL.n)), 0.0, 2.0)

    def test_values_must_be_convex(self):
        vals = -np.abs(DUAL.points - 0.5)
        with pytest.raises(ValueError, match="convex"):
            sv.ConjugateState(DUAL, GridFunction(DUAL, vals), 0.0, 1.0)

    def test_origin_must_be_finite(self):
        vals = np.zeros(DUAL.n)
        vals[0] = np.inf
        with pytest.raises(ValueError, match="origin"):
            sv.ConjugateState(DUAL, GridFunction(DUAL, vals), 0.0, 1.0)


class TestConjugateInit:
    def test_plateau_cone_conjugate_is_affine(self):
        st = sv.conjugate_init(CONE1, 1.0, Grid1D(0.0, 1.0, 4097))
        expect = st.dual_grid.points - 1.0
        assert np.max(np.abs(st.values.values - expect)) == 0.0

    def test_cone_conjugate_vanishes(self):
        st = sv.conjugate_init(CONE, 1.0, DUAL)
        assert np.max(np.abs(st.values.values)) == 0.0

    def test_parabola_conjugate_is_parabola(self):
        g = Grid1D(0.0, 2.0, 2049)
        para = GridFunction.from_callable(g, lambda x: 0.5 * x * x)
        st = sv.conjugate_init(para, 2.0, Grid1D(0.0, 2.0, 2049))
        assert st.values.all_finite
        assert np.max(np.abs(st.values.values - 0.5 * st.dual_grid.points ** 2)) < 1e-12

    def test_infinite_beyond_slope_support(self):
        # Lipschitz 1 data on a dual interval of radius 2: the tail is cut
        st = sv.conjugate_init(CONE1, 2.0, Grid1D(0.0, 2.0, 513))
        r = st.dual_grid.points
        vals = st.values.values
        slack = CONE1.grid.spacing
        assert np.all(np.isinf(vals[r > 1.0 + slack + 1e-9]))
        fin = np.isfinite(vals)
        assert np.max(np.abs(vals[fin & (r <= 1.0)] - (r[fin & (r <= 1.0)] - 1.0))) == 0.0

    def test_nonconvex_profile_rejected(self):
        bump = GridFunction.from_callable(PRIMAL, lambda x: np.sin(x) + x)
        with pytest.raises(ValueError, match="convex"):
            sv.conjugate_init(bump, 2.0, Grid1D(0.0, 2.0, 65))

    def test_slope_above_bound_rejected(self):
        steep = GridFunction.from_callable(PRIMAL, lambda x: 2.0 * x)
        with pytest.raises(ValueError, match="exceeds"):
            sv.conjugate_init(steep, 1.0, DUAL)

    def test_profile_must_be_radial(self):
        full = GridFunction.from_callable(Grid1D(-1.0, 1.0, 65), lambda x: x * x)
        with pytest.raises(ValueError, match=r"\[0, R\]"):
            sv.conjugate_init(full, 2.0, DUAL)


class TestHopfStep:
    def test_zero_increment_is_identity(self):
        st = sv.conjugate_init(CONE1, 1.0, DUAL)
        out = sv.hopf_step(st, H_SQRT, 0.0)
        assert np.max(np.abs(out.values.values - st.values.values)) < 1e-14

    def test_unit_erosion_of_cone(self):
        st = sv.conjugate_init(CONE, 1.0, DUAL)
        out = sv.hopf_step(st, H_LIN, -1.0)
        xs = np.linspace(0.0, 4.0, 401)
        u = np.asarray(sv.eval_primal(out, xs))
        assert np.max(np.abs(u - np.maximum(xs - 1.0, 0.0))) < 1e-12

    def test_one_tooth_grows_the_plateau(self):
        st = sv.conjugate_init(CONE1, 1.0, Grid1D(0.0, 1.0, 4097))
        up = sv.hopf_step(st, H_SQRT, 1.0, elapsed=1.0)
        down = sv.hopf_step(up, H_SQRT, -1.0, elapsed=1.0)
        xs = np.linspace(-4.0, 4.0, 801)
        u = np.asarray(sv.eval_primal(down, xs))
        assert np.max(np.abs(u - np.maximum(np.abs(xs), 2.0))) < 1e-12
        assert down.time == 2.0

    def test_effective_domain_is_preserved(self):
        st = sv.conjugate_init(CONE1, 2.0, Grid1D(0.0, 2.0, 513))
        stepped = sv.hopf_step(sv.hopf_step(st, H_SQRT, 0.7), H_SQRT, -0.4)
        assert stepped.values.finite_slice == st.values.finite_slice

    def test_nonradial_hamiltonian_rejected(self):
        full = Hamiltonian1D.from_profile(
            GridFunction.from_callable(Grid1D(-1.0, 1.0, 65), lambda p: p * p)
        )
        st = sv.conjugate_init(CONE, 1.0, DUAL)
        with pytest.raises(ValueError, match="radial"):
            sv.hopf_step(st, full, 0.5)


class TestHopfSolve:
    def test_zero_path_freezes_the_data(self):
        w = make_path([0.0, 3.0], [0.0, 0.0])
        states = sv.hopf_solve(CONE1, H_SQRT, w, [0.0, 1.3, 3.0])
        xs = np.linspace(0.0, 4.0, 257)
        for st in states:
            assert np.max(np.abs(np.asarray(sv.eval_primal(st, xs)) - np.maximum(xs, 1.0))) == 0.0

    def test_rising_tooth_formula(self):
        xs = np.linspace(-3.0, 3.0, 241)
        states = sv.hopf_solve(CONE, H_SQRT, teeth(2), [0.25, 0.6, 1.0], dual_grid=DUAL)
        for st, t in zip(states, [0.25, 0.6, 1.0]):
            u = np.asarray(sv.eval_primal(st, xs))
            assert np.max(np.abs(u - (np.abs(xs) + 2.0 * t))) < 1e-12

    def test_full_tooth_reaches_the_plateau(self):
        (st,) = sv.hopf_solve(CONE, H_SQRT, teeth(2), [2.0], dual_grid=DUAL)
        xs = np.linspace(-3.0, 3.0, 241)
        u = np.asarray(sv.eval_primal(st, xs))
        assert np.max(np.abs(u - np.maximum(np.abs(xs), 2.0))) < 1e-12

    def test_matches_closed_form_everywhere_on_first_tooth(self):
        xs = np.linspace(-2.5, 2.5, 101)
        for t in (0.3, 1.0, 1.4, 1.9, 2.0):
            (st,) = sv.hopf_solve(CONE, H_SQRT, teeth(2), [t], dual_grid=DUAL)
            u = np.asarray(sv.eval_primal(st, xs))
            ref = np.array([sv.closedform_tooth_solution(0.5, 0.0, x, t) for x in xs])
            assert np.max(np.abs(u - ref)) < 1e-12

    def test_trajectory_matches_recursion(self):
        times = [2.0 * k for k in range(1, 13)]
        states = sv.hopf_solve(
            CONE, H_SQRT, teeth(24), times, dual_grid=Grid1D(0.0, 1.0, 8193)
        )
        rec = sv.tooth_recursion(2.0, 0.5, 12)
        for k, st in enumerate(states):
            assert abs(sv.eval_primal(st, 0.0) - rec.values[k]) < 1e-4

    def test_states_come_back_in_request_order(self):
        states = sv.hopf_solve(CONE, H_SQRT, teeth(2), [1.5, 0.5, 1.5], dual_grid=DUAL)
        assert [st.time for st in states] == [1.5, 0.5, 1.5]

    def test_sample_outside_horizon_rejected(self):
        with pytest.raises(ValueError, match="horizon"):
            sv.hopf_solve(CONE, H_SQRT, teeth(2), [2.5], dual_grid=DUAL)
        with pytest.raises(ValueError, match="horizon"):
            sv.hopf_solve(CONE, H_SQRT, teeth(2), [-0.5], dual_grid=DUAL)


class TestEvalPrimal:
    def test_zero_state_gives_the_cone(self):
        st = sv.conjugate_init(CONE, 1.0, DUAL)
        xs = np.array([-3.0, -0.2, 0.0, 1.7, 4.0])
        assert np.max(np.abs(np.asarray(sv.eval_primal(st, xs)) - np.abs(xs))) == 0.0

    def test_affine_state_gives_the_plateau_cone(self):
        st = sv.conjugate_init(CONE1, 1.0, DUAL)
        xs = np.linspace(-4.0, 4.0, 321)
        assert np.max(np.abs(np.asarray(sv.eval_primal(st, xs)) - np.maximum(np.abs(xs), 1.0))) == 0.0

    def test_parabola_round_trip(self):
        g = Grid1D(0.0, 2.0, 2049)
        para = GridFunction.from_callable(g, lambda x: 0.5 * x * x)
        st = sv.conjugate_init(para, 2.0, Grid1D(0.0, 2.0, 2049))
        assert np.max(np.abs(np.asarray(sv.eval_primal(st, g.points)) - para.values)) < 1e-12

    def test_scalar_input_returns_float(self):
        st = sv.conjugate_init(CONE, 1.0, DUAL)
        out = sv.eval_primal(st, -2.5)
        assert isinstance(out, float)
        assert out == 2.5


class TestSConvex:
    def test_zero_time_returns_the_profile(self):
        assert sv.s_convex(CONE1, H_SQRT, 0.0) is CONE1

    def test_linear_hamiltonian_lifts_the_cone(self):
        out = sv.s_convex(CONE, H_LIN, 1.0)
        assert np.max(np.abs(out.values - (PRIMAL.points + 1.0))) < 1e-12

    def test_sqrt_hamiltonian_on_plateau(self):
        out = sv.s_convex(CONE1, H_SQRT, 1.0)
        assert abs(out.values[0] - 2.0) < 1e-12
        assert out.grid == PRIMAL
        assert out.is_convex()

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError, match="nonnegative"):
            sv.s_convex(CONE1, H_SQRT, -0.1)

    def test_unnormalized_hamiltonian_rejected(self):
        shifted = radial_h(lambda r: r + 0.5)
        with pytest.raises(ValueError, match="normalized"):
            sv.s_convex(CONE1, shifted, 1.0)

    def test_flat_profile_shifts_rigidly(self):
        flat = GridFunction(PRIMAL, np.full(PRIMAL.n, 3.0))
        out = sv.s_convex(flat, H_SQRT, 2.0)
        # gradient is identically zero, so the flow adds 2 H(0) = 0
        assert np.max(np.abs(out.values - 3.0)) == 0.0


class TestEnvelopeBounds:
    def test_zero_paths_return_the_data(self):
        w = make_path([0.0, 2.0], [0.0, 0.0])
        lo, up = sv.envelope_bounds(CONE1, [(H_SQRT, w), (H_LIN, w)], 1.5)
        assert lo is CONE1 and up is CONE1

    def test_single_tooth_bracket(self):
        lo, up = sv.envelope_bounds(CONE1, [(H_SQRT, teeth(2))], 2.0)
        assert abs(lo.values[0] - 1.0) < 1e-12
        assert abs(up.values[0] - 2.0) < 1e-12
        (st,) = sv.hopf_solve(CONE1, H_SQRT, teeth(2), [2.0], dual_grid=DUAL)
        exact = sv.eval_primal(st, 0.0)
        assert lo.values[0] - 1e-9 <= exact <= up.values[0] + 1e-9

    def test_zero_hamiltonian_factor_is_a_no_op(self):
        zero_h = radial_h(lambda r: 0.0 * r, n=33)
        lo, up = sv.envelope_bounds(CONE1, [(H_SQRT, teeth(2))], 2.0)
        lo2, up2 = sv.envelope_bounds(
            CONE1, [(H_SQRT, teeth(2)), (zero_h, teeth(2))], 2.0
        )
        assert np.array_equal(lo2.values, lo.values)
        assert np.array_equal(up2.values, up.values)

    def test_both_orders_sandwich_a_two_driver_solution(self):
        w1 = teeth(2)
        w2 = make_path([0.0, 0.5, 2.0], [0.0, 0.75, -0.25])
        dual = Grid1D(0.0, 1.0, 2049)
        state = sv.conjugate_init(CONE1, 1.0, dual)
        h1 = np.asarray(H_SQRT(dual.points))
        h2 = np.asarray(H_LIN(dual.points))
        events = np.unique(np.concatenate([w1.times, w2.times]))
        for i in range(1, events.size):
            d1 = float(w1(events[i]) - w1(events[i - 1]))
            d2 = float(w2(events[i]) - w2(events[i - 1]))
            mixed = Hamiltonian1D.from_profile(GridFunction(dual, d1 * h1 + d2 * h2))
            state = sv.hopf_step(state, mixed, 1.0)
        u = np.asarray(sv.eval_primal(state, PRIMAL.points))
        for reverse in (False, True):
            lo, up = sv.envelope_bounds(
                CONE1, [(H_SQRT, w1), (H_LIN, w2)], 2.0, reverse=reverse
            )
            assert np.max(lo.values - u) <= 1e-9
            assert np.max(u - up.values) <= 1e-9

    def test_unnormalized_factor_rejected(self):
        shifted = radial_h(lambda r: r + 0.25)
        with pytest.raises(ValueError, match="normalized"):
            sv.envelope_bounds(CONE1, [(shifted, teeth(2))], 1.0)

    def test_time_beyond_a_horizon_rejected(self):
        with pytest.raises(ValueError, match="horizon"):
            sv.envelope_bounds(CONE1, [(H_SQRT, teeth(2))], 3.0)


class TestFdSolve:
    LINE = make_path([0.0, 1.0], [0.0, 1.0])
    H_ABS = radial_h(lambda r: r, radius=2.0, n=1025)

    def test_cone_expansion_is_sharp(self):
        xg = Grid1D(-3.0, 3.0, 257)
        u0 = GridFunction.from_callable(xg, np.abs)
        res = sv.fd_solve(u0, self.H_ABS, self.LINE, xg, sample_times=[1.0])
        mask = np.abs(xg.points) <= 1.5
        err = np.max(np.abs(res.snapshots[1.0].values[mask] - (np.abs(xg.points[mask]) + 1.0)))
        assert err < 1e-12
        assert res.cfl_used <= 0.9 + 1e-12
        assert res.steps > 0

    def test_erosion_converges_at_half_order(self):
        errs = []
        for n in (257, 513):
            xg = Grid1D(-3.0, 3.0, n)
            u0 = GridFunction.from_callable(xg, lambda x: -np.abs(x))
            res = sv.fd_solve(u0, self.H_ABS, self.LINE, xg, sample_times=[1.0])
            mask = np.abs(xg.points) <= 1.5
            ref = -np.maximum(np.abs(xg.points[mask]) - 1.0, 0.0)
            errs.append(np.max(np.abs(res.snapshots[1.0].values[mask] - ref)))
            assert errs[-1] <= 0.5 * math.sqrt(xg.spacing)
        order = math.log2(errs[0] / errs[1])
        assert 0.3 <= order <= 0.8

    def test_sawtooth_cross_validates_against_conjugate_engine(self):
        h_fd = Hamiltonian1D.from_profile(
            profile(0.0, 1.5, 129, lambda r: 2.0 * np.sqrt(r))
        )
        errs = []
        for n in (257, 513, 1025):
            xg = Grid1D(-4.0, 4.0, n)
            u0 = GridFunction.from_callable(xg, np.abs)
            res = sv.fd_solve(u0, h_fd, teeth(2), xg, sample_times=[1.0])
            mask = np.abs(xg.points) <= 2.0
            err = np.max(
                np.abs(res.snapshots[1.0].values[mask] - (np.abs(xg.points[mask]) + 2.0))
            )
            errs.append(err)
        orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
        assert min(orders) >= 0.85

    def test_snapshot_at_zero_is_the_initial_data(self):
        xg = Grid1D(-2.0, 2.0, 129)
        u0 = GridFunction.from_callable(xg, np.abs)
        res = sv.fd_solve(u0, self.H_ABS, self.LINE, xg, sample_times=[0.0, 1.0])
        assert np.array_equal(res.snapshots[0.0].values, u0.values)

    def test_gradient_bound_holds(self):
        xg = Grid1D(-6.0, 6.0, 513)
        u0 = GridFunction.from_callable(xg, lambda x: np.maximum(np.abs(x), 1.0))
        h_fd = Hamiltonian1D.from_profile(
            profile(0.0, 1.5, 129, lambda r: 2.0 * np.sqrt(r))
        )
        res = sv.fd_solve(u0, h_fd, teeth(2), xg, sample_times=[1.0, 2.0])
        for snap in res.snapshots.values():
            grads = np.abs(np.diff(snap.values)) / xg.spacing
            assert np.max(grads) <= 1.0 + 1e-9

    def test_initial_data_resampled_with_edge_extension(self):
        small = GridFunction.from_callable(Grid1D(-2.0, 2.0, 65), np.abs)
        xg = Grid1D(-4.0, 4.0, 129)
        res = sv.fd_solve(small, self.H_ABS, self.LINE, xg, sample_times=[0.0])
        assert np.max(np.abs(res.snapshots[0.0].values - np.abs(xg.points))) < 1e-12

    def test_cfl_out_of_range_rejected(self):
        xg = Grid1D(-2.0, 2.0, 65)
        u0 = GridFunction.from_callable(xg, np.abs)
        for bad in (0.0, -0.5, 1.5):
            with pytest.raises(ValueError, match="cfl"):
                sv.fd_solve(u0, self.H_ABS, self.LINE, xg, cfl=bad)

    def test_overflow_raises_numerical_failure(self):
        xg = Grid1D(-3.0, 3.0, 129)
        u0 = GridFunction(xg, 5e307 * np.abs(xg.points))
        with pytest.raises(FloatingPointError, match="diverged"):
            sv.fd_solve(u0, self.H_ABS, self.LINE, xg, sample_times=[1.0])

    def test_nonfinite_initial_data_rejected(self):
        xg = Grid1D(-2.0, 2.0, 65)
        vals = np.abs(xg.points)
        vals[0] = np.inf
        with pytest.raises(ValueError, match="finite"):
            sv.fd_solve(GridFunction(xg, vals), self.H_ABS, self.LINE, xg)


class TestEngineInvariants:
    """Contraction, constant commutation, monotonicity, gradient bound."""

    def test_conjugate_contraction_and_monotonicity(self):
        rng = np.random.default_rng(7)
        grid = Grid1D(0.0, 3.0, 257)
        probe = np.linspace(0.0, 3.0, 301)
        for _ in range(8):
            f = random_convex_profile(rng, grid)
            g0 = random_convex_profile(rng, grid)
            # lift g0 until it dominates f; both keep unit slope support
            g = GridFunction(grid, g0.values + np.max(f.values - g0.values))
            w = random_drive(rng)
            t = w.horizon
            sf = sv.hopf_solve(f, H_SQRT, w, [t], dual_grid=DUAL, slope_bound=1.0)[0]
            sg = sv.hopf_solve(g, H_SQRT, w, [t], dual_grid=DUAL, slope_bound=1.0)[0]
            uf = np.asarray(sv.eval_primal(sf, probe))
            ug = np.asarray(sv.eval_primal(sg, probe))
            gap0 = np.max(np.abs(f.values - g.values))
            assert np.max(np.abs(uf - ug)) <= gap0 + 1e-10
            assert np.min(ug - uf) >= -1e-10  # g >= f propagates

    def test_conjugate_constants_commute(self):
        rng = np.random.default_rng(11)
        grid = Grid1D(0.0, 3.0, 257)
        probe = np.linspace(0.0, 3.0, 301)
        for _ in range(6):
            f = random_convex_profile(rng, grid)
            c = rng.uniform(-5.0, 5.0)
            g = GridFunction(grid, f.values + c)
            w = random_drive(rng)
            sf = sv.hopf_solve(f, H_SQRT, w, [w.horizon], dual_grid=DUAL, slope_bound=1.0)[0]
            sg = sv.hopf_solve(g, H_SQRT, w, [w.horizon], dual_grid=DUAL, slope_bound=1.0)[0]
            uf = np.asarray(sv.eval_primal(sf, probe))
            ug = np.asarray(sv.eval_primal(sg, probe))
            assert np.max(np.abs(ug - uf - c)) < 1e-10

    def test_conjugate_gradient_bound(self):
        rng = np.random.default_rng(13)
        grid = Grid1D(0.0, 3.0, 257)
        for _ in range(6):
            f = random_convex_profile(rng, grid)
            w = random_drive(rng)
            st = sv.hopf_solve(f, H_SQRT, w, [w.horizon], dual_grid=DUAL, slope_bound=1.0)[0]
            assert st.support_bound() <= 1.0 + 1e-12
            xs = np.linspace(0.0, 3.0, 601)
            u = np.asarray(sv.eval_primal(st, xs))
            assert np.max(np.abs(np.diff(u))) / (xs[1] - xs[0]) <= 1.0 + 1e-9

    def test_fd_contraction_monotonicity_and_commutation(self):
        rng = np.random.default_rng(17)
        xg = Grid1D(-4.0, 4.0, 257)
        h_fd = Hamiltonian1D.from_profile(
            profile(0.0, 1.5, 129, lambda r: 2.0 * np.sqrt(r))
        )
        w = teeth(2)
        for _ in range(4):
            base = np.cumsum(rng.uniform(-1.0, 1.0, xg.n)) * xg.spacing
            f = GridFunction(xg, base)
            # interior tent perturbation: vanishes at the edges, so both runs
            # freeze identical ghost slopes and the max principle is exact
            center = rng.uniform(-2.0, 2.0)
            width = rng.uniform(0.5, 1.5)
            amp = rng.uniform(0.1, 0.5)
            tent = amp * np.maximum(0.0, 1.0 - np.abs(xg.points - center) / width)
            g = GridFunction(xg, base + tent)
            c = rng.uniform(-3.0, 3.0)
            rf = sv.fd_solve(f, h_fd, w, xg, sample_times=[2.0])
            rg = sv.fd_solve(g, h_fd, w, xg, sample_times=[2.0])
            rc = sv.fd_solve(GridFunction(xg, base + c), h_fd, w, xg, sample_times=[2.0])
            uf = rf.snapshots[2.0].values
            ug = rg.snapshots[2.0].values
            uc = rc.snapshots[2.0].values
            gap0 = np.max(np.abs(f.values - g.values))
            assert np.max(np.abs(uf - ug)) <= gap0 + 1e-10
            assert np.min(ug - uf) >= -1e-10
            assert np.max(np.abs(uc - uf - c)) < 1e-10

    def test_sandwich_on_the_tooth_scenario(self):
        xs = PRIMAL.points
        for t in (0.5, 1.0, 1.5, 2.0):
            (st,) = sv.hopf_solve(CONE1, H_SQRT, teeth(2), [t], dual_grid=DUAL)
            u = np.asarray(sv.eval_primal(st, xs))
            lo, up = sv.envelope_bounds(CONE1, [(H_SQRT, teeth(2))], t)
            assert np.max(lo.values - u) <= 1e-9
            assert np.max(u - up.values) <= 1e-9

    def test_teeth_snapshots_respect_two_sided_bounds(self):
        rec = sv.tooth_recursion(2.0, 0.5, 6)
        states = sv.hopf_solve(
            CONE, H_SQRT, teeth(12),
            [2.0 * k + s for k in range(1, 6) for s in (0.4, 1.0, 1.7)],
            dual_grid=Grid1D(0.0, 1.0, 4097),
        )
        i = 0
        for k in range(1, 6):
            for _ in range(3):
                val = sv.eval_primal(states[i], 0.0)
                assert rec.values[k - 1] - 1e-6 <= val <= rec.values[k] + 1e-6
                i += 1


class TestStabilityReport:
    H_DC = power_dc_truncation(0.5, 0.25, 2.0)[0]

    def test_equal_paths_give_zero_gap(self):
        w = teeth(2)
        rep = sv.stability_report(self.H_DC, w, w, CONE1, 1.0)
        assert rep.sup_difference == 0.0
        assert rep.dc_bound == 0.0
        assert rep.ratio_dc == 0.0
        assert rep.engine == "conjugate"

    def test_bound_scales_linearly_with_the_gap(self):
        zero = make_path([0.0, 2.0], [0.0, 0.0])
        reps = []
        for eps in (0.25, 0.5):
            w = make_path(teeth(2).times, eps * teeth(2).values)
            reps.append(sv.stability_report(self.H_DC, w, zero, CONE1, 1.0))
        assert abs(reps[1].dc_bound - 2.0 * reps[0].dc_bound) < 1e-12
        assert abs(reps[1].path_gap - 0.5) < 1e-12

    def test_variation_bound_holds_for_monotone_difference(self):
        # difference of the two paths is a single monotone ramp
        w1 = make_path([0.0, 2.0], [0.0, 0.6])
        w2 = make_path([0.0, 2.0], [0.0, 0.0])
        rep = sv.stability_report(self.H_DC, w1, w2, CONE1, 1.0)
        assert rep.variation_gap == pytest.approx(0.6)
        assert rep.sup_difference <= rep.easy_bound + 1e-9

    def test_fd_engine_used_for_nonconvex_data(self):
        grid = Grid1D(-2.0, 2.0, 129)
        wavy = GridFunction.from_callable(grid, lambda x: np.minimum(np.abs(x), 1.0))
        w1 = make_path(teeth(2).times, 0.25 * teeth(2).values)
        w2 = make_path([0.0, 2.0], [0.0, 0.0])
        rep = sv.stability_report(self.H_DC, w1, w2, wavy, 1.0)
        assert rep.engine == "difference"
        assert rep.sup_difference > 0.0
        assert math.isfinite(rep.ratio_dc)

    def test_slope_above_bound_rejected(self):
        steep = GridFunction.from_callable(PRIMAL, lambda x: 1.5 * x)
        with pytest.raises(ValueError, match="slope"):
            sv.stability_report(self.H_DC, teeth(2), teeth(2), steep, 1.0)

    def test_mismatched_horizons_rejected(self):
        with pytest.raises(ValueError, match="horizon"):
            sv.stability_report(self.H_DC, teeth(2), teeth(4), CONE1, 1.0)


class TestHamiltonianFromDc:
    def test_truncated_power_profile_round_trip(self):
        dc = power_dc_truncation(0.5, 0.25, 2.0)[0]
        ham = sv.hamiltonian_from_dc(dc)
        r = ham.profile.grid.points
        assert np.max(np.abs(ham.profile.values - np.maximum(np.sqrt(r), 0.5))) < 1e-9
        assert ham.is_radial
        assert abs(ham.min_value - 0.5) < 1e-9

    def test_even_grid_resamples(self):
        g = Grid1D(-1.0, 1.0, 64)
        dc = dc_split(GridFunction.from_callable(g, lambda p: p * p))
        ham = sv.hamiltonian_from_dc(dc)
        r = ham.profile.grid.points
        assert np.max(np.abs(ham.profile.values - r * r)) < 1e-3

    def test_asymmetric_interval_rejected(self):
        g = Grid1D(-1.0, 2.0, 61)
        dc = dc_split(GridFunction.from_callable(g, lambda p: p * p))
        with pytest.raises(ValueError, match="symmetric"):
            sv.hamiltonian_from_dc(dc)

    def test_odd_function_rejected(self):
        g = Grid1D(-1.0, 1.0, 65)
        dc = dc_split(GridFunction.from_callable(g, lambda p: p))
        with pytest.raises(ValueError, match="even"):
            sv.hamiltonian_from_dc(dc)


class TestToothRecursion:
    def test_first_terms_at_one_half(self):
        rec = sv.tooth_recursion(2.0, 0.5, 4)
        assert np.allclose(rec.values, [2.0, 2.5, 2.9, 2.9 + 1.0 / 2.9], rtol=0, atol=1e-12)

    def test_equality_seed_first_step(self):
        rec = sv.tooth_recursion(math.sqrt(2.0), 0.5, 2)
        assert rec.values[1] == pytest.approx(math.sqrt(2.0) + 1.0 / math.sqrt(2.0))
        assert rec.values[1] >= 2.0

    def test_lower_bound_holds_across_exponents(self):
        for beta in (0.25, 0.5, 0.75):
            rec = sv.tooth_recursion(1.0 / beta, beta, 10**4)
            assert bool(rec.bound_satisfied.all())
            expect = beta ** (-(1.0 - beta)) * np.arange(1, 10**4 + 1) ** (1.0 - beta)
            assert np.max(np.abs(rec.lower_bound - expect)) < 1e-9

    def test_growth_statistic_is_bounded(self):
        rec = sv.tooth_recursion(2.0, 0.5, 10**4)
        assert math.isnan(rec.growth_statistic[0])
        stat = rec.growth_statistic[1:]
        assert np.all(np.isfinite(stat))
        assert np.max(np.abs(stat)) < 1.0

    def test_seed_below_floor_rejected(self):
        with pytest.raises(ValueError, match="floor"):
            sv.tooth_recursion(1.0, 0.5, 10)

    def test_exponent_out_of_range_rejected(self):
        for beta in (0.0, 1.0, -0.5):
            with pytest.raises(ValueError, match="exponent"):
                sv.tooth_recursion(2.0, beta, 10)

    def test_arrays_are_frozen(self):
        rec = sv.tooth_recursion(2.0, 0.5, 10)
        with pytest.raises(ValueError):
            rec.values[0] = 0.0


class TestClosedformToothSolution:
    def test_rising_branch(self):
        for beta, x, t in [(0.5, 0.3, 0.7), (0.25, -1.2, 1.0), (0.75, 0.0, 0.0)]:
            assert sv.closedform_tooth_solution(beta, 0.0, x, t) == pytest.approx(
                abs(x) + t / beta
            )

    def test_falling_branch_midpoint(self):
        for x in (-2.0, -0.4, 0.0, 0.9, 3.0):
            assert sv.closedform_tooth_solution(0.5, 0.0, x, 1.5) == pytest.approx(
                max(abs(x), 1.0) + 1.0
            )

    def test_branches_agree_at_the_seams(self):
        for beta in (0.3, 0.5, 0.8):
            for x in (0.0, 0.7, 2.5):
                up = sv.closedform_tooth_solution(beta, 0.0, x, 1.0)
                down = sv.closedform_tooth_solution(beta, 0.0, x, 1.0 + 1e-12)
                assert up == pytest.approx(down, abs=1e-9)

    def test_full_tooth_ends_on_the_plateau(self):
        assert sv.closedform_tooth_solution(0.5, 0.0, 0.0, 2.0) == pytest.approx(2.0)
        assert sv.closedform_tooth_solution(0.5, 0.0, 3.0, 2.0) == pytest.approx(3.0)

    def test_plateau_endpoints(self):
        a = math.sqrt(2.0)
        assert sv.closedform_tooth_solution(0.5, a, 0.5, 0.0) == pytest.approx(a)
        assert sv.closedform_tooth_solution(0.5, a, 0.0, 2.0) == pytest.approx(
            a + 1.0 / a
        )

    def test_interior_time_with_plateau_rejected(self):
        with pytest.raises(ValueError, match="closed form"):
            sv.closedform_tooth_solution(0.5, 2.0, 0.0, 1.0)

    def test_time_outside_window_rejected(self):
        for t in (-0.1, 2.3):
            with pytest.raises(ValueError, match="window"):
                sv.closedform_tooth_solution(0.5, 0.0, 0.0, t)

    def test_plateau_below_floor_rejected(self):
        with pytest.raises(ValueError, match="floor"):
            sv.closedform_tooth_solution(0.5, 1.2, 0.0, 2.0)

    def test_negative_plateau_rejected(self):
        with pytest.raises(ValueError, match="nonnegative"):
            sv.closedform_tooth_solution(0.5, -1.0, 0.0, 1.0)


class TestSnapshotStorage:
    def test_csv_and_sidecar_round_trip(self, tmp_path):
        xg = Grid1D(-1.0, 1.0, 5)
        snaps = {
            0.0: GridFunction.from_callable(xg, np.abs),
            1.0: GridFunction.from_callable(xg, lambda x: np.abs(x) + 1.0),
        }
        manifest = sv.save_snapshots(tmp_path, snaps, {"cfl": 0.9})
        assert manifest["cfl"] == 0.9
        assert [e["time"] for e in manifest["snapshots"]] == [0.0, 1.0]
        first = (tmp_path / "snapshot_000.csv").read_text().splitlines()
        assert first[0] == "x,u"
        assert first[1] == "-1.0,1.0"
        import json

        sidecar = json.loads((tmp_path / "metadata.json").read_text())
        assert sidecar == manifest

    def test_path_digest_is_stable_and_sensitive(self):
        d1 = sv.path_digest(teeth(2))
        d2 = sv.path_digest(teeth(2))
        d3 = sv.path_digest(teeth(4))
        assert d1 == d2
        assert d1 != d3
        assert len(d1) == 16
