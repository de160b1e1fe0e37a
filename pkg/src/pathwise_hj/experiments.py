"""Reproducible experiment runner: configs in, CSV tables and a JSON
assertion summary out.

Every scenario is a pure function of its configuration: randomness flows
through counter-based streams keyed by (seed, stream), runs execute trials
sequentially in index order, and no artifact carries a timestamp, so a rerun
from the echoed config reproduces every byte.  Configs are plain
``key = value`` text under ``[run]``, ``[parameters]`` and ``[resolution]``
headers with comma-separated lists; unknown sections, keys, or scenarios are
rejected up front.
"""

from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .dc_toolkit import DCFunction1D, Hamiltonian1D, dc_split, power_dc_truncation
from .grid_convex import Grid1D, GridFunction
from .paths import (
    PiecewiseLinearPath,
    RngSeed,
    brownian,
    count_N,
    embedded_walk,
    holder_seminorm,
    p_alpha_norm,
    p_variation,
    rademacher_walk,
    scale_path,
    scaled_random_walk,
    teeth,
    walk_exit_count,
    walk_exit_times,
)
from .solver import (
    closedform_tooth_solution,
    envelope_bounds,
    eval_primal,
    fd_solve,
    hopf_solve,
    path_digest,
    save_snapshots,
    stability_report,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "RunArtifact",
    "SCENARIOS",
    "default_config",
    "parse_config",
    "render_config",
    "execute",
    "run_blowup",
    "run_limit",
    "run_brownian_study",
    "run_walk_convergence",
    "run_crossval",
    "run_stability",
]


class ConfigError(ValueError):
    """Raised for malformed, unknown, or inconsistent run configuration."""


# ---------------------------------------------------------------------------
# config text format

_INT_RE = re.compile(r"[+-]?\d+")
_SECTIONS = ("run", "parameters", "resolution")
_RUN_KEYS = ("scenario", "seed", "seed_stream", "output_dir")


def _parse_scalar(text: str) -> object:
    t = text.strip()
    if _INT_RE.fullmatch(t):
        return int(t)
    try:
        return float(t)
    except ValueError:
        return t


def _parse_value(text: str) -> object:
    if "," in text:
        parts = [p.strip() for p in text.split(",")]
        if any(p == "" for p in parts):
            raise ConfigError("empty element in comma-separated list")
        return tuple(_parse_scalar(p) for p in parts)
    return _parse_scalar(text)


def _format_scalar(v: object) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _format_value(v: object) -> str:
    if isinstance(v, (tuple, list)):
        return ", ".join(_format_scalar(x) for x in v)
    return _format_scalar(v)


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete description of one run: scenario name, scalar/list parameters,
    root randomness label, destination directory, and discretization sizes.

    Instances come out of :func:`default_config` or :func:`parse_config`
    already validated against the scenario's schema; the echo written by
    every run parses back to an equal instance.
    """

    scenario: str
    parameters: dict
    seed: RngSeed
    output_dir: Path
    resolution: dict


def _scenario(name: str) -> "ScenarioSpec":
    try:
        return SCENARIOS[name]
    except KeyError:
        known = ", ".join(sorted(SCENARIOS))
        raise ConfigError(f"unknown scenario '{name}' (known: {known})") from None


def _coerce_scalar(key: str, value: object, default: object) -> object:
    if isinstance(default, str):
        return str(value)
    if isinstance(default, (int, np.integer)):
        if isinstance(value, (int, np.integer)):
            return int(value)
        raise ConfigError(f"key '{key}' expects an integer, got {value!r}")
    if isinstance(default, float):
        if isinstance(value, (int, float, np.integer, np.floating)):
            return float(value)
        raise ConfigError(f"key '{key}' expects a number, got {value!r}")
    raise ConfigError(f"key '{key}' has an unsupported schema type")


def _coerce_value(key: str, value: object, default: object) -> object:
    if isinstance(default, tuple):
        items = value if isinstance(value, tuple) else (value,)
        return tuple(_coerce_scalar(key, x, default[0]) for x in items)
    if isinstance(value, tuple):
        raise ConfigError(f"key '{key}' expects a single value, got a list")
    return _coerce_scalar(key, value, default)


def _coerce_section(
    scenario: str, label: str, given: Mapping[str, object], defaults: Mapping[str, object]
) -> dict:
    out = dict(defaults)
    for key, value in given.items():
        if key not in defaults:
            raise ConfigError(
                f"unknown {label} key '{key}' for scenario '{scenario}'"
            )
        out[key] = _coerce_value(key, value, defaults[key])
    return out


def default_config(
    scenario: str,
    *,
    parameters: Mapping[str, object] | None = None,
    resolution: Mapping[str, object] | None = None,
    seed: int | RngSeed = 0,
    output_dir: str | Path | None = None,
) -> ExperimentConfig:
    """Scenario defaults overlaid with the given overrides, fully validated."""
    spec = _scenario(scenario)
    params = _coerce_section(scenario, "parameter", dict(parameters or {}), spec.params)
    res = _coerce_section(scenario, "resolution", dict(resolution or {}), spec.resolution)
    if isinstance(seed, RngSeed):
        rng = seed
    else:
        try:
            rng = RngSeed(int(seed), 0)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
    out = Path(output_dir) if output_dir is not None else Path("runs") / scenario
    spec.validate(params, res)
    return ExperimentConfig(scenario, params, rng, out, res)


def parse_config(text: str) -> ExperimentConfig:
    """Read the plain-text format; ``#`` starts a comment, lists use commas."""
    run: dict[str, object] = {}
    sections: dict[str, dict[str, object]] = {"parameters": {}, "resolution": {}}
    current: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in _SECTIONS:
                raise ConfigError(f"line {lineno}: unknown section [{name}]")
            current = name
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        if current is None:
            raise ConfigError(f"line {lineno}: assignment before any [section]")
        key, _, value = line.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        target = run if current == "run" else sections[current]
        if key in target:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        try:
            target[key] = _parse_value(value.strip())
        except ConfigError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None

    unknown = sorted(set(run) - set(_RUN_KEYS))
    if unknown:
        raise ConfigError(f"unknown [run] keys: {', '.join(unknown)}")
    scenario = run.get("scenario")
    if not isinstance(scenario, str):
        raise ConfigError("[run] must name a scenario")
    seed = run.get("seed", 0)
    stream = run.get("seed_stream", 0)
    if not isinstance(seed, int) or not isinstance(stream, int):
        raise ConfigError("seed and seed_stream must be integers")
    try:
        label = RngSeed(seed, stream)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    out = run.get("output_dir")
    return default_config(
        scenario,
        parameters=sections["parameters"],
        resolution=sections["resolution"],
        seed=label,
        output_dir=str(out) if out is not None else None,
    )


def render_config(cfg: ExperimentConfig) -> str:
    """Canonical text for a config; ``parse_config`` of the result is equal
    to ``cfg``, which is what makes the per-run echo a replay recipe."""
    spec = _scenario(cfg.scenario)
    lines = ["[run]", f"scenario = {cfg.scenario}", f"seed = {cfg.seed.seed}"]
    if cfg.seed.stream_id:
        lines.append(f"seed_stream = {cfg.seed.stream_id}")
    lines.append(f"output_dir = {cfg.output_dir}")
    lines += ["", "[parameters]"]
    lines += [f"{k} = {_format_value(cfg.parameters[k])}" for k in spec.params]
    lines += ["", "[resolution]"]
    lines += [f"{k} = {_format_value(cfg.resolution[k])}" for k in spec.resolution]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# run artifacts

_COMPARATORS: dict[str, Callable[[float, float, float], bool]] = {
    "within": lambda m, e, tol: abs(m - e) <= tol,
    "at_most": lambda m, e, tol: m <= e + tol,
    "at_least": lambda m, e, tol: m >= e - tol,
    "less": lambda m, e, tol: m < e,
    "exact": lambda m, e, tol: m == e,
}


def _cell(v: object) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


@dataclass
class RunArtifact:
    """What one run left on disk: table and figure names relative to the
    output directory, assertion rows, and free-form scalar metrics.

    ``summary()`` serializes all of it; the summary deliberately omits the
    output directory itself so that the same config and seed written to two
    different places produce byte-identical summaries.
    """

    scenario: str
    output_dir: Path
    seed: RngSeed
    tables: list = field(default_factory=list)
    figures: list = field(default_factory=list)
    assertions: list = field(default_factory=list)
    metrics: dict = field(default_factory=dict)
    config_file: str = "config_echo.txt"

    @property
    def passed(self) -> bool:
        return all(row["passed"] for row in self.assertions)

    def add_table(self, name: str, header: Sequence[str], rows: Sequence[Sequence]) -> None:
        with open(self.output_dir / name, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(list(header))
            for row in rows:
                writer.writerow([_cell(v) for v in row])
        self.tables.append(name)

    def check(
        self,
        name: str,
        claim: str,
        measured: float,
        expected: float,
        tolerance: float = 0.0,
        mode: str = "within",
    ) -> bool:
        """Record one pass/fail row; the claim is a self-contained sentence
        stating what is being compared, so the summary reads on its own."""
        ok = _COMPARATORS[mode](float(measured), float(expected), float(tolerance))
        self.assertions.append(
            {
                "name": name,
                "claim": claim,
                "measured": float(measured),
                "expected": float(expected),
                "tolerance": float(tolerance),
                "mode": mode,
                "passed": bool(ok),
            }
        )
        return ok

    def summary(self) -> dict:
        return {
            "scenario": self.scenario,
            "seed": {"seed": self.seed.seed, "stream": self.seed.stream_id},
            "passed": self.passed,
            "config_file": self.config_file,
            "tables": list(self.tables),
            "figures": list(self.figures),
            "assertions": list(self.assertions),
            "metrics": {k: self.metrics[k] for k in sorted(self.metrics)},
        }

    def write_summary(self) -> Path:
        path = self.output_dir / "summary.json"
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.summary(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path


def execute(cfg: ExperimentConfig, render_figures: bool = True) -> RunArtifact:
    """Run one configured scenario end to end.

    Writes the config echo first, then the scenario's tables, then figures
    (unless disabled), then ``summary.json``.  Figures are rendered from the
    emitted CSV files, not from in-memory state, so the plotted data is
    exactly the shipped data.
    """
    spec = _scenario(cfg.scenario)
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    art = RunArtifact(cfg.scenario, cfg.output_dir, cfg.seed)
    with open(cfg.output_dir / art.config_file, "w", encoding="utf-8") as fh:
        fh.write(render_config(cfg))
    spec.runner(cfg, art)
    if render_figures:
        from . import figures

        art.figures = figures.render(art)
    art.write_summary()
    return art


# ---------------------------------------------------------------------------
# shared runner helpers


def _cone(grid: Grid1D) -> GridFunction:
    return GridFunction(grid, grid.points.copy())


def _scaled(W: PiecewiseLinearPath, amp: float) -> PiecewiseLinearPath:
    return PiecewiseLinearPath(W.times, amp * W.values)


def _zero_path(horizon: float) -> PiecewiseLinearPath:
    return PiecewiseLinearPath(np.array([0.0, horizon]), np.zeros(2))


def _even_span(n: int, horizon: float) -> int:
    d = 2.0**n * horizon
    k = round(d)
    if abs(d - k) > 1e-9 or k <= 0 or k % 2:
        raise ConfigError(
            f"horizon {horizon} puts 2^{n} teeth on a span of {d}, "
            "which must be a positive even integer"
        )
    return int(k)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def _int_list(values: Sequence, key: str, minimum: int, ascending: bool = True) -> None:
    _require(len(values) >= 2, f"{key} needs at least two entries")
    _require(all(v >= minimum for v in values), f"{key} entries must be >= {minimum}")
    if ascending:
        _require(
            all(b > a for a, b in zip(values, values[1:])),
            f"{key} must be strictly increasing",
        )


def _power_hamiltonian(
    beta: float, delta: float, prefactor: float, radius: float, nodes: int
) -> Hamiltonian1D:
    """``prefactor * max(r^beta, delta^beta)`` as a sampled radial profile;
    ``delta = 0`` gives the untruncated power."""
    grid = Grid1D(0.0, radius, nodes)
    vals = grid.points**beta
    if delta > 0.0:
        vals = np.maximum(vals, delta**beta)
    return Hamiltonian1D.from_profile(GridFunction(grid, prefactor * vals))


# ---------------------------------------------------------------------------
# scenario: blowup


def _validate_blowup(p: dict, r: dict) -> None:
    _require(0.0 < p["alpha"] <= 1.0, "alpha must lie in (0, 1]")
    _require(0.0 < p["beta"] <= 1.0, "beta must lie in (0, 1]")
    _require(
        p["alpha"] + p["beta"] < 1.0,
        "growth requires alpha + beta < 1; at or above 1 the solutions stay bounded",
    )
    _int_list(p["n_list"], "n_list", 1)
    _require(p["horizon"] > 0.0, "horizon must be positive")
    for n in p["n_list"]:
        _even_span(int(n), p["horizon"])
    _require(p["slope_tolerance"] > 0.0, "slope_tolerance must be positive")
    _require(r["dual_nodes"] >= 65 and r["primal_nodes"] >= 65, "grids too coarse")


def _run_blowup(cfg: ExperimentConfig, art: RunArtifact) -> None:
    p, r = cfg.parameters, cfg.resolution
    alpha, beta, T = p["alpha"], p["beta"], p["horizon"]
    n_list = [int(n) for n in p["n_list"]]
    H = Hamiltonian1D.power(beta, 1.0)
    dual = Grid1D(0.0, 1.0, r["dual_nodes"])
    u0 = _cone(Grid1D(0.0, 4.0, r["primal_nodes"]))

    rows = []
    logs = []
    for n in n_list:
        W = scale_path(teeth(_even_span(n, T)), n, alpha, amp=1.0 / beta)
        state = hopf_solve(u0, H, W, [T], dual_grid=dual, slope_bound=1.0)[0]
        v = float(eval_primal(state, 0.0))
        logs.append(math.log2(v))
        rows.append([n, v, logs[-1]])
    slope = float(np.polyfit(np.asarray(n_list, dtype=np.float64), logs, 1)[0])
    target = 1.0 - alpha - beta

    art.add_table("growth.csv", ["n", "value", "log2_value"], rows)
    art.metrics["fitted_slope"] = slope
    art.metrics["target_slope"] = target
    art.check(
        "growth-exponent",
        "least-squares slope of log2 u_n(0, T) against the scaling level n "
        "matches the predicted growth exponent 1 - alpha - beta",
        slope,
        target,
        p["slope_tolerance"],
    )


# ---------------------------------------------------------------------------
# scenario: limit


def _validate_limit(p: dict, r: dict) -> None:
    _require(0.0 < p["alpha"] < 1.0, "alpha must lie in (0, 1)")
    _require(p["c0"] > 0.0, "c0 must be positive")
    _int_list(p["n_list"], "n_list", 1)
    _require(p["horizon"] > 0.0, "horizon must be positive")
    for n in p["n_list"]:
        _even_span(int(n), p["horizon"])
    _require(len(p["t_probes"]) >= 1, "need at least one probe time")
    _require(
        all(0.0 < t <= p["horizon"] for t in p["t_probes"]),
        "probe times must lie in (0, horizon]",
    )
    _require(
        p["x_span"] >= p["c0"] * p["horizon"] ** p["alpha"] + 0.5,
        "x_span too small to see the cone region outside the plateau",
    )
    _require(p["error_threshold"] > 0.0, "error_threshold must be positive")
    _require(p["doubling_tolerance"] > 0.0, "doubling_tolerance must be positive")


def _limit_values(
    alpha: float,
    lam: float,
    n: int,
    T: float,
    t_probes: Sequence[float],
    xs: np.ndarray,
    u0: GridFunction,
    H: Hamiltonian1D,
    dual: Grid1D,
) -> list[np.ndarray]:
    W = scale_path(teeth(_even_span(n, T)), n, alpha, amp=lam)
    states = hopf_solve(u0, H, W, t_probes, dual_grid=dual, slope_bound=1.0)
    return [np.asarray(eval_primal(s, xs)) for s in states]


def _run_limit(cfg: ExperimentConfig, art: RunArtifact) -> None:
    p, r = cfg.parameters, cfg.resolution
    alpha, c0, T = p["alpha"], p["c0"], p["horizon"]
    beta = 1.0 - alpha
    lam = 2.0**alpha * (1.0 - alpha) ** alpha * c0
    n_list = [int(n) for n in p["n_list"]]
    t_probes = [float(t) for t in p["t_probes"]]
    span = p["x_span"]

    dual = Grid1D(0.0, 1.0, r["dual_nodes"])
    prof = GridFunction(dual, dual.points**beta / beta)
    H = Hamiltonian1D.from_profile(prof)
    u0 = _cone(Grid1D(0.0, max(4.0, span), r["primal_nodes"]))
    xs = np.linspace(-span, span, r["x_nodes"])

    errors = []
    finest = None
    for n in n_list:
        vals = _limit_values(alpha, lam, n, T, t_probes, xs, u0, H, dual)
        e = 0.0
        for t, u in zip(t_probes, vals):
            ref = np.maximum(np.abs(xs), c0 * t**alpha)
            e = max(e, float(np.max(np.abs(u - ref))))
        errors.append(e)
        finest = vals
    art.add_table(
        "errors.csv", ["n", "sup_error"], [[n, e] for n, e in zip(n_list, errors)]
    )

    t_star = max(t_probes)
    u_star = finest[t_probes.index(t_star)]
    ref_star = np.maximum(np.abs(xs), c0 * t_star**alpha)
    art.add_table(
        "profile.csv",
        ["x", "u", "limit"],
        [[x, u, v] for x, u, v in zip(xs, u_star, ref_star)],
    )

    drops = [b - a for a, b in zip(errors, errors[1:])]
    art.metrics["amplitude"] = lam
    art.metrics["sup_errors"] = [float(e) for e in errors]
    art.check(
        "errors-strictly-decreasing",
        "the sup distance to the plateau-versus-cone limit shrinks strictly "
        "at every step up the scaling ladder",
        max(drops),
        0.0,
        mode="less",
    )
    art.check(
        "final-error",
        "at the finest scaling level the sup distance to the limit is below "
        "the configured threshold",
        errors[-1],
        p["error_threshold"],
        mode="at_most",
    )

    far = np.abs(xs) >= c0 * t_star**alpha + 0.25
    far_err = float(np.max(np.abs(u_star[far] - np.abs(xs[far]))))
    art.check(
        "far-field-cone",
        "outside the plateau radius the solution follows the initial cone",
        far_err,
        p["error_threshold"],
        mode="at_most",
    )

    v1 = float(np.interp(0.0, xs, u_star))
    vals2 = _limit_values(
        alpha, 2.0 * lam, n_list[-1], T, [t_star], xs, u0, H, dual
    )
    v2 = float(np.interp(0.0, xs, vals2[0]))
    ratio = v2 / v1 if v1 != 0.0 else math.inf
    art.metrics["plateau_ratio"] = ratio
    art.check(
        "plateau-doubling",
        "doubling the plateau coefficient doubles the central plateau value",
        ratio,
        2.0,
        p["doubling_tolerance"],
    )


# ---------------------------------------------------------------------------
# scenario: brownian


def _validate_brownian(p: dict, r: dict) -> None:
    _require(r["samples"] >= 50, "need at least 50 Brownian samples")
    _require(r["walks"] >= 100, "need at least 100 walks for the tail study")
    _require(2 <= r["n_levels"] <= 30, "n_levels must lie in [2, 30]")
    _require(8 <= r["dt_exponent"] <= 24, "dt_exponent must lie in [8, 24]")
    _require(p["band_m"] >= 2, "band half-width must be at least 2")
    _require(p["lam"] > 1.0, "lam must exceed 1 for the tail bound to be finite")
    _require(p["walk_steps"] >= 100, "walk_steps too small")
    t, m2 = float(p["walk_steps"]), float(p["band_m"]) ** 2
    _require((p["lam"] - 1.0) * t > m2, "tail bound needs (lam - 1) t > M^2")
    _require(p["horizon"] > 0.0, "horizon must be positive")
    _require(p["norm_cap"] > 0.0, "norm_cap must be positive")


def _run_brownian(cfg: ExperimentConfig, art: RunArtifact) -> None:
    p, r = cfg.parameters, cfg.resolution
    samples, walks = r["samples"], r["walks"]
    n_levels = r["n_levels"]
    M, lam, t_steps = p["band_m"], p["lam"], p["walk_steps"]
    T = p["horizon"]
    steps = 2 ** r["dt_exponent"]

    norm_root = cfg.seed.substream(1)
    sup_counts = np.empty(samples)
    p_norms = np.empty(samples)
    norm_rows = []
    for i in range(samples):
        W = brownian(T, steps, norm_root.substream(i))
        counts = [
            2.0**-n * count_N(W, 2.0 ** (-n / 2.0)) for n in range(2, n_levels + 1)
        ]
        sup_counts[i] = max(counts)
        p_norms[i] = p_alpha_norm(W, 0.5, math.inf)
        norm_rows.append([i, sup_counts[i], p_norms[i]])
    art.add_table("path_norms.csv", ["index", "sup_count", "p_norm"], norm_rows)

    qrows = []
    for label, data in (("sup_count", sup_counts), ("p_norm", p_norms)):
        for q in (0.5, 0.95):
            qrows.append([label, q, float(np.quantile(data, q))])
    art.add_table("quantiles.csv", ["statistic", "probability", "value"], qrows)

    walk_root = cfg.seed.substream(2)
    threshold = lam * t_steps / M**2
    firsts = np.empty(walks)
    exceed = 0
    tail_rows = []
    for i in range(walks):
        walk = rademacher_walk(t_steps, walk_root.substream(i))
        k = walk_exit_count(walk, M, float(t_steps))
        taus = walk_exit_times(walk, M)
        first = float(taus[0]) if taus.size else float(t_steps)
        over = k > threshold
        exceed += over
        firsts[i] = first
        tail_rows.append([i, k, first, over])
    art.add_table(
        "walk_tail.csv", ["index", "exit_count", "first_epoch", "exceeds"], tail_rows
    )

    tm, m2 = float(t_steps), float(M) ** 2
    bound = 2.0 * lam * (m2 - 1.0) * tm / (3.0 * ((lam - 1.0) * tm - m2) ** 2)
    freq = exceed / walks
    se_tail = math.sqrt(bound * (1.0 - bound) / walks)
    mean_first = float(np.mean(firsts))
    se_first = float(np.std(firsts, ddof=1)) / math.sqrt(walks)
    q95_count = float(np.quantile(sup_counts, 0.95))
    q95_norm = float(np.quantile(p_norms, 0.95))

    art.metrics.update(
        tail_bound=bound,
        tail_frequency=freq,
        first_epoch_mean=mean_first,
        supcount_q95=q95_count,
        pnorm_q95=q95_norm,
    )
    art.check(
        "tail-frequency",
        "the fraction of walks with more than lam t / M^2 band exits stays "
        "within three standard errors of the second-moment tail bound",
        freq,
        bound,
        3.0 * se_tail,
        mode="at_most",
    )
    art.check(
        "first-epoch-mean",
        "the mean time of the first exit from a band of half-width M matches "
        "M^2, the exact expectation for a simple symmetric walk",
        mean_first,
        m2,
        3.0 * se_first,
    )
    art.check(
        "count-quantile",
        "the 95th percentile of the scaled oscillation-count statistic over "
        "the Brownian sample stays bounded",
        q95_count,
        p["norm_cap"],
        mode="at_most",
    )
    art.check(
        "interpolation-norm-quantile",
        "the 95th percentile of the interpolation-space norm estimator at "
        "the diffusive exponent stays bounded",
        q95_norm,
        p["norm_cap"],
        mode="at_most",
    )


# ---------------------------------------------------------------------------
# scenario: walks


def _validate_walks(p: dict, r: dict) -> None:
    _require(0.5 < p["beta"] < 1.0, "candidate Hamiltonians need beta in (1/2, 1)")
    _require(0.0 < p["delta"] <= 1.0, "delta must lie in (0, 1]")
    _int_list(p["n_list"], "n_list", 2)
    _require(len(p["x_probes"]) >= 1, "need at least one spatial probe")
    _require(p["horizon"] > 0.0, "horizon must be positive")
    _require(
        p["driver_horizon"] >= 2.0 * p["horizon"],
        "driver_horizon should dominate the walk horizon comfortably",
    )
    _require(r["samples"] >= 10, "need at least 10 samples per ensemble")
    _require(8 <= r["dt_exponent"] <= 22, "dt_exponent must lie in [8, 22]")


def _run_walks(cfg: ExperimentConfig, art: RunArtifact) -> None:
    p, r = cfg.parameters, cfg.resolution
    n_list = [int(n) for n in p["n_list"]]
    probes = np.asarray([float(x) for x in p["x_probes"]])
    T, TB = p["horizon"], p["driver_horizon"]
    samples = r["samples"]
    levels = np.array([0.05, 0.25, 0.5, 0.75, 0.95])

    H = Hamiltonian1D.power_truncated(p["beta"], p["delta"], 1.0)
    dual = Grid1D(0.0, 1.0, r["dual_nodes"])
    u0 = _cone(Grid1D(0.0, p["x_span"], r["primal_nodes"]))
    steps0 = int(math.ceil(TB * 2 ** r["dt_exponent"]))

    vals = {
        (n, src): np.empty((samples, probes.size))
        for n in n_list
        for src in ("walk", "interp")
    }
    for i in range(samples):
        stream = cfg.seed.substream(i)
        B = brownian(TB, steps0, stream)
        grow = 1
        for n in n_list:
            while True:
                try:
                    Ww = embedded_walk(B, n, T)
                    break
                except ValueError:
                    # the driver ran out of band exits; the counter-based
                    # generator extends it pathwise, keeping earlier levels
                    grow *= 2
                    B = brownian(TB * grow, steps0 * grow, stream)
            Wb = PiecewiseLinearPath(Ww.times, np.asarray(B(Ww.times)))
            for src, W in (("walk", Ww), ("interp", Wb)):
                st = hopf_solve(u0, H, W, [T], dual_grid=dual, slope_bound=1.0)[0]
                vals[(n, src)][i] = np.asarray(eval_primal(st, probes))

    ens_rows = []
    gap_rows = []
    qgaps = {}
    mean_gaps = {}
    pooled = {}
    for n in n_list:
        vw, vb = vals[(n, "walk")], vals[(n, "interp")]
        for src, v in (("walk", vw), ("interp", vb)):
            for j, x in enumerate(probes):
                qs = np.quantile(v[:, j], levels)
                ens_rows.append(
                    [n, src, x, float(np.mean(v[:, j])), float(np.var(v[:, j], ddof=1))]
                    + [float(q) for q in qs]
                )
        qg = 0.0
        for j in range(probes.size):
            qw = np.quantile(vw[:, j], levels)
            qb = np.quantile(vb[:, j], levels)
            qg_j = float(np.max(np.abs(qw - qb)))
            qg = max(qg, qg_j)
            mg = abs(float(np.mean(vw[:, j]) - np.mean(vb[:, j])))
            se = math.sqrt(
                np.var(vw[:, j], ddof=1) / samples + np.var(vb[:, j], ddof=1) / samples
            )
            gap_rows.append([n, float(probes[j]), mg, se, qg_j])
            mean_gaps[(n, j)] = mg
            pooled[(n, j)] = se
        qgaps[n] = qg

    art.add_table(
        "ensembles.csv",
        ["n", "source", "x", "mean", "variance", "q05", "q25", "q50", "q75", "q95"],
        ens_rows,
    )
    art.add_table(
        "gaps.csv", ["n", "x", "mean_gap", "pooled_se", "quantile_gap"], gap_rows
    )
    for n in n_list:
        art.metrics[f"quantile_gap_{n}"] = qgaps[n]

    zero = hopf_solve(u0, H, _zero_path(T), [T], dual_grid=dual, slope_bound=1.0)[0]
    zerr = float(np.max(np.abs(np.asarray(eval_primal(zero, probes)) - np.abs(probes))))
    art.check(
        "zero-driver",
        "a driving path that never moves returns the initial data exactly",
        zerr,
        0.0,
        mode="exact",
    )
    art.check(
        "quantile-gap-endpoint",
        "the largest quantile discrepancy between walk-driven and Brownian-"
        "interpolant-driven solution ensembles shrinks from the coarsest to "
        "the finest walk scale",
        qgaps[n_list[-1]],
        qgaps[n_list[0]],
        mode="less",
    )
    n_fin = n_list[-1]
    for j, x in enumerate(probes):
        art.check(
            f"mean-gap-x{j}",
            f"at the finest walk scale the ensemble means at x = {float(x)} "
            "agree within three pooled standard errors",
            mean_gaps[(n_fin, j)],
            0.0,
            3.0 * pooled[(n_fin, j)],
        )


# ---------------------------------------------------------------------------
# scenario: crossval


def _validate_crossval(p: dict, r: dict) -> None:
    _require(0.0 < p["beta"] < 1.0, "beta must lie in (0, 1)")
    _require(p["x_span"] >= 2.0, "x_span must cover the comparison window")
    _require(p["h_radius"] > 1.0, "the Hamiltonian profile must cover slopes up to 1")
    _require(0.0 < p["cfl"] <= 1.0, "cfl must lie in (0, 1]")
    _require(0.0 < p["order_floor"] < 2.0, "order_floor must lie in (0, 2)")
    nodes = r["fd_nodes"]
    _int_list(nodes, "fd_nodes", 17)
    _require(len(nodes) >= 3, "need at least three refinement levels")
    _require(
        all(b == 2 * a - 1 for a, b in zip(nodes, nodes[1:])),
        "fd_nodes must refine dyadically (each 2n - 1 of the last)",
    )
    _require(r["sandwich_nodes"] % 2 == 1, "sandwich_nodes must be odd")


def _run_crossval(cfg: ExperimentConfig, art: RunArtifact) -> None:
    p, r = cfg.parameters, cfg.resolution
    beta, span, cfl = p["beta"], p["x_span"], p["cfl"]
    t_rise, t_full = 1.0, 2.0
    hg = Grid1D(0.0, p["h_radius"], r["h_nodes"])
    H = Hamiltonian1D.from_profile(GridFunction(hg, hg.points**beta / beta))
    W = teeth(2)
    rise = W.restrict(t_rise)

    errs = []
    fd_rows = []
    for nodes in [int(n) for n in r["fd_nodes"]]:
        xg = Grid1D(-span, span, nodes)
        u0 = GridFunction(xg, np.abs(xg.points))
        res = fd_solve(u0, H, rise, xg, cfl=cfl, sample_times=[t_rise])
        u = res.snapshots[t_rise].values
        mask = np.abs(xg.points) <= span / 2.0
        target = np.abs(xg.points[mask]) + t_rise / beta
        e = float(np.max(np.abs(u[mask] - target)))
        ratio = errs[-1] / e if errs else math.nan
        order = math.log2(ratio) if errs else math.nan
        errs.append(e)
        fd_rows.append([nodes, xg.spacing, e, ratio, order])
    art.add_table(
        "fd_errors.csv", ["nodes", "dx", "sup_error", "ratio", "order"], fd_rows
    )
    ratios = [row[3] for row in fd_rows[1:]]
    orders = [row[4] for row in fd_rows[1:]]
    art.metrics["orders"] = [float(o) for o in orders]

    art.check(
        "errors-decrease",
        "the scheme's sup error against the rising-phase closed form falls "
        "at every dyadic refinement",
        max(b - a for a, b in zip(errs, errs[1:])),
        0.0,
        mode="less",
    )
    art.check(
        "error-ratio-low",
        "each refinement cuts the error by at least 1.6x (halving minus 20%)",
        min(ratios),
        1.6,
        mode="at_least",
    )
    art.check(
        "error-ratio-high",
        "each refinement cuts the error by at most 2.4x (halving plus 20%)",
        max(ratios),
        2.4,
        mode="at_most",
    )
    art.check(
        "convergence-order",
        "the empirical convergence order clears the configured floor at "
        "every refinement",
        min(orders),
        p["order_floor"],
        mode="at_least",
    )

    dual = Grid1D(0.0, 1.0, r["dual_nodes"])
    half = (r["sandwich_nodes"] + 1) // 2
    radg = Grid1D(0.0, span, half)
    u0r = _cone(radg)
    xs = np.linspace(0.0, span, r["probe_nodes"])
    st_full = hopf_solve(u0r, H, W, [t_rise, t_full], dual_grid=dual, slope_bound=1.0)
    ref = np.array([closedform_tooth_solution(beta, 0.0, x, t_full) for x in xs])
    conj_err = float(np.max(np.abs(np.asarray(eval_primal(st_full[1], xs)) - ref)))
    art.metrics["conjugate_error"] = conj_err
    art.check(
        "conjugate-closed-form",
        "after one full tooth the conjugate engine matches the closed-form "
        "plateau solution to within two dual grid spacings",
        conj_err,
        2.0 * dual.spacing,
        mode="at_most",
    )

    Wz = _zero_path(t_full)
    z_state = hopf_solve(u0r, H, Wz, [t_full], dual_grid=dual, slope_bound=1.0)[0]
    z_hopf = float(
        np.max(np.abs(np.asarray(eval_primal(z_state, radg.points)) - radg.points))
    )
    xg0 = Grid1D(-span, span, int(r["fd_nodes"][0]))
    u00 = GridFunction(xg0, np.abs(xg0.points))
    z_fd_res = fd_solve(u00, H, Wz, xg0, cfl=cfl, sample_times=[t_full])
    z_fd = float(np.max(np.abs(z_fd_res.snapshots[t_full].values - u00.values)))
    art.check(
        "zero-path-exact",
        "with a flat driving path both engines return the initial data exactly",
        max(z_hopf, z_fd),
        0.0,
        mode="exact",
    )

    nsw = r["sandwich_nodes"]
    xgs = Grid1D(-span, span, nsw)
    u0f = GridFunction(xgs, np.abs(xgs.points))
    res_s = fd_solve(u0f, H, W, xgs, cfl=cfl, sample_times=[t_rise, t_full])
    lip = H.lipschitz_bound
    sandwich_rows = []
    for t in (t_rise, t_full):
        lo, up = envelope_bounds(u0r, [(H, W)], t, dual_n=r["dual_nodes"])
        tv = W.restrict(t).total_variation()
        tol_fd = lip * xgs.spacing * tv
        u_fd = res_s.snapshots[t].values[(nsw - 1) // 2 :]
        viol_fd = max(
            float(np.max(lo.values - u_fd)), float(np.max(u_fd - up.values)), 0.0
        )
        idx = 0 if t == t_rise else 1
        u_h = np.asarray(eval_primal(st_full[idx], radg.points))
        viol_h = max(
            float(np.max(lo.values - u_h)), float(np.max(u_h - up.values)), 0.0
        )
        sandwich_rows.append([t, viol_h, 2.0 * dual.spacing, viol_fd, tol_fd])
        art.check(
            f"sandwich-hopf-t{int(t)}",
            "the conjugate solution sits between the running-extrema envelope "
            "bounds up to dual-grid tolerance",
            viol_h,
            0.0,
            2.0 * dual.spacing,
            mode="at_most",
        )
        art.check(
            f"sandwich-fd-t{int(t)}",
            "the difference-scheme solution sits between the running-extrema "
            "envelope bounds up to the scheme's artificial-viscosity scale",
            viol_fd,
            0.0,
            2.0 * tol_fd,
            mode="at_most",
        )
    art.add_table(
        "sandwich.csv",
        ["t", "hopf_violation", "hopf_tolerance", "fd_violation", "fd_tolerance"],
        sandwich_rows,
    )


# ---------------------------------------------------------------------------
# scenario: stability


def _validate_stability(p: dict, r: dict) -> None:
    _require(r["trials"] >= 10, "stability needs at least 10 randomized trials")
    _require(0.0 < p["beta"] < 1.0, "beta must lie in (0, 1)")
    _require(0.0 < p["delta"] <= 1.0, "delta must lie in (0, 1]")
    _require(
        0 < p["eps_min_exponent"] < p["eps_max_exponent"] <= 40,
        "epsilon exponents must satisfy 0 < min < max <= 40",
    )
    _require(p["ratio_cap"] > 0.0, "ratio_cap must be positive")
    _require(p["variation_cap"] >= 1.0, "variation_cap must be at least 1")
    h = p["horizon"]
    _require(
        h > 0 and h == math.floor(h) and int(h) % 2 == 0,
        "horizon must be a positive even integer (whole teeth)",
    )


def _run_stability(cfg: ExperimentConfig, art: RunArtifact) -> None:
    p, r = cfg.parameters, cfg.resolution
    T = p["horizon"]
    dual_n = r["dual_nodes"]
    Hdc, _ = power_dc_truncation(p["beta"], p["delta"], 2.0, r["h_nodes"])
    rad4 = Grid1D(0.0, 4.0, 513)
    u0p = GridFunction(rad4, np.maximum(rad4.points, 1.0))
    Wz = _zero_path(T)
    base = teeth(int(T))

    ratios = []
    sweep_rows = []
    sweep_ratios = []
    for k in range(int(p["eps_min_exponent"]), int(p["eps_max_exponent"]) + 1):
        eps = 2.0**-k
        rep = stability_report(Hdc, _scaled(base, eps), Wz, u0p, 1.0, dual_n=dual_n)
        sweep_rows.append(
            [k, eps, rep.sup_difference, rep.dc_bound, rep.ratio_dc, rep.ratio_easy]
        )
        if rep.ratio_dc > 0.0:
            sweep_ratios.append(rep.ratio_dc)
        ratios.append(rep.ratio_dc)
    art.add_table(
        "sweep.csv",
        ["exponent", "eps", "sup_difference", "dc_bound", "ratio_dc", "ratio_easy"],
        sweep_rows,
    )
    variation = (
        max(sweep_ratios) / min(sweep_ratios) if sweep_ratios else 1.0
    )

    rep0 = stability_report(Hdc, _scaled(base, 0.5), _scaled(base, 0.5), u0p, 1.0, dual_n=dual_n)
    art.check(
        "identical-paths",
        "driving the same problem twice with the same path leaves no gap",
        rep0.sup_difference,
        0.0,
        mode="exact",
    )

    trial_rows = []
    x4 = Grid1D(-4.0, 4.0, 513)
    for i in range(r["trials"]):
        g = cfg.seed.substream(i).generator()
        b = float(g.uniform(0.3, 0.8))
        d = float(g.uniform(0.15, 0.5))
        Hi, _ = power_dc_truncation(b, d, 2.0, r["h_nodes"])
        knots = np.linspace(0.0, T, 7)
        v1 = np.concatenate(([0.0], np.cumsum(g.normal(0.0, 0.5, 6))))
        W1 = PiecewiseLinearPath(knots, v1)
        scale = 2.0 ** -int(g.integers(1, 6))
        bump = np.sin(np.pi * knots / T) * float(g.uniform(0.5, 1.0)) * scale
        W2 = PiecewiseLinearPath(knots, v1 + bump)
        if i % 2 == 0:
            a = float(g.uniform(0.4, 1.6))
            u0 = GridFunction(rad4, np.maximum(rad4.points - a, 0.0))
        else:
            u0 = GridFunction(x4, np.minimum(np.abs(x4.points), 2.0))
        rep = stability_report(Hi, W1, W2, u0, 1.0, dual_n=dual_n)
        trial_rows.append(
            [i, b, d, rep.engine, rep.path_gap, rep.sup_difference, rep.dc_bound, rep.ratio_dc]
        )
        ratios.append(rep.ratio_dc)
    art.add_table(
        "trials.csv",
        ["trial", "beta", "delta", "engine", "path_gap", "sup_difference", "dc_bound", "ratio_dc"],
        trial_rows,
    )

    pg = Grid1D(-2.0, 2.0, 257)
    Hc = dc_split(GridFunction(pg, np.abs(pg.points)))
    cone4 = _cone(rad4)
    convex_rows = []
    excess = -math.inf
    for eps in (0.5, 0.25, 0.125):
        rep = stability_report(Hc, _scaled(base, eps), Wz, cone4, 1.0, dual_n=dual_n)
        convex_rows.append(
            [eps, rep.sup_difference, rep.easy_bound, rep.ratio_easy]
        )
        excess = max(excess, rep.sup_difference - rep.easy_bound)
    art.add_table(
        "convex.csv", ["eps", "sup_difference", "easy_bound", "ratio_easy"], convex_rows
    )

    max_ratio = max(ratios)
    art.metrics["max_ratio"] = max_ratio
    art.metrics["sweep_variation"] = variation
    art.check(
        "ratio-bounded",
        "the measured gap over the DC-size bound stays below the recorded "
        "cap across every trial and sweep point",
        max_ratio,
        p["ratio_cap"],
        mode="at_most",
    )
    art.check(
        "sweep-variation",
        "shrinking the path gap by powers of two leaves the gap-to-bound "
        "ratio constant up to the allowed factor",
        variation,
        p["variation_cap"],
        mode="at_most",
    )
    art.check(
        "convex-easy-bound",
        "for a convex Hamiltonian the sup-times-variation bound is never "
        "exceeded",
        excess,
        0.0,
        1e-9,
        mode="at_most",
    )


# ---------------------------------------------------------------------------
# scenario: solve (utility front end, no assertions)

_INITIALS = ("cone", "plateau")
_ENGINES = ("hopf", "fd")
_PATH_KINDS = ("teeth", "brownian", "walk", "zero")


def _validate_solve(p: dict, r: dict) -> None:
    _require(p["engine"] in _ENGINES, f"engine must be one of {_ENGINES}")
    _require(p["initial"] in _INITIALS, f"initial must be one of {_INITIALS}")
    _require(p["path"] in _PATH_KINDS, f"path must be one of {_PATH_KINDS}")
    _require(0.0 < p["beta"] <= 1.0, "beta must lie in (0, 1]")
    _require(p["delta"] >= 0.0, "delta must be nonnegative")
    _require(p["prefactor"] > 0.0, "prefactor must be positive")
    _require(p["plateau"] > 0.0, "plateau height must be positive")
    _require(p["duration"] > 0.0, "duration must be positive")
    if p["path"] == "teeth":
        d = p["duration"]
        _require(
            d == math.floor(d) and int(d) % 2 == 0,
            "teeth need an even integer duration",
        )
    _require(len(p["sample_times"]) >= 1, "need at least one sample time")
    _require(
        all(0.0 < t <= p["duration"] for t in p["sample_times"]),
        "sample times must lie in (0, duration]",
    )
    _require(p["walk_n"] >= 1, "walk_n must be positive")
    _require(0.0 < p["cfl"] <= 1.0, "cfl must lie in (0, 1]")
    _require(p["x_span"] > 0.0, "x_span must be positive")
    _require(r["x_nodes"] % 2 == 1, "x_nodes must be odd, keeping 0 on the grid")


def _build_path(
    kind: str, p: dict, r: dict, seed: RngSeed, horizon: float
) -> PiecewiseLinearPath:
    amp = p["amplitude"]
    if kind == "teeth":
        return _scaled(teeth(int(p["duration"])), amp)
    if kind == "brownian":
        return _scaled(brownian(horizon, r["path_steps"], seed.substream(1)), amp)
    if kind == "walk":
        return _scaled(
            scaled_random_walk(int(p["walk_n"]), horizon, seed.substream(1)), amp
        )
    return _zero_path(horizon)


def _run_solve(cfg: ExperimentConfig, art: RunArtifact) -> None:
    p, r = cfg.parameters, cfg.resolution
    span = p["x_span"]
    sample_times = [float(t) for t in p["sample_times"]]
    W = _build_path(p["path"], p, r, cfg.seed, p["duration"])
    H = _power_hamiltonian(p["beta"], p["delta"], p["prefactor"], 1.5, r["h_nodes"])
    xs = Grid1D(-span, span, r["x_nodes"])

    meta = {
        "engine": p["engine"],
        "initial": p["initial"],
        "beta": p["beta"],
        "delta": p["delta"],
        "prefactor": p["prefactor"],
        "path_kind": p["path"],
        "path_digest": path_digest(W),
        "seed": cfg.seed.seed,
        "seed_stream": cfg.seed.stream_id,
    }
    if p["engine"] == "hopf":
        radg = Grid1D(0.0, span, (r["x_nodes"] + 1) // 2)
        vals = radg.points if p["initial"] == "cone" else np.maximum(
            radg.points, p["plateau"]
        )
        u0 = GridFunction(radg, vals)
        dual = Grid1D(0.0, 1.0, r["dual_nodes"])
        states = hopf_solve(u0, H, W, sample_times, dual_grid=dual, slope_bound=1.0)
        snaps = {
            t: GridFunction(xs, np.asarray(eval_primal(s, xs.points)))
            for t, s in zip(sample_times, states)
        }
        meta["dual_nodes"] = r["dual_nodes"]
    else:
        vals = np.abs(xs.points) if p["initial"] == "cone" else np.maximum(
            np.abs(xs.points), p["plateau"]
        )
        u0 = GridFunction(xs, vals)
        res = fd_solve(u0, H, W, xs, cfl=p["cfl"], sample_times=sample_times)
        snaps = res.snapshots
        meta["cfl_used"] = res.cfl_used
        meta["steps"] = res.steps
    W.to_csv(cfg.output_dir / "path.csv")
    art.tables.append("path.csv")
    manifest = save_snapshots(cfg.output_dir, snaps, metadata=meta)
    art.tables.extend(entry["file"] for entry in manifest["snapshots"])
    art.metrics["path_digest"] = meta["path_digest"]
    art.metrics["engine"] = p["engine"]


# ---------------------------------------------------------------------------
# scenario: paths (generator front end)

_GEN_KINDS = ("teeth", "scaled_teeth", "brownian", "walk", "zero")


def _validate_paths(p: dict, r: dict) -> None:
    _require(p["kind"] in _GEN_KINDS, f"kind must be one of {_GEN_KINDS}")
    _require(p["duration"] > 0.0, "duration must be positive")
    if p["kind"] in ("teeth", "scaled_teeth"):
        d = p["duration"] * (2 ** p["n"] if p["kind"] == "scaled_teeth" else 1)
        _require(
            abs(d - round(d)) < 1e-9 and round(d) > 0 and round(d) % 2 == 0,
            "the unscaled teeth span must be a positive even integer",
        )
    _require(0.0 < p["alpha"] <= 1.0, "alpha must lie in (0, 1]")
    _require(p["n"] >= 0, "n must be nonnegative")
    _require(p["walk_n"] >= 1, "walk_n must be positive")
    _require(r["steps"] >= 1, "steps must be positive")


def _run_paths(cfg: ExperimentConfig, art: RunArtifact) -> None:
    p, r = cfg.parameters, cfg.resolution
    kind, amp = p["kind"], p["amplitude"]
    if kind == "teeth":
        W = _scaled(teeth(int(round(p["duration"]))), amp)
    elif kind == "scaled_teeth":
        n = int(p["n"])
        W = scale_path(
            teeth(int(round(p["duration"] * 2**n))), n, p["alpha"], amp=amp
        )
    elif kind == "brownian":
        W = _scaled(brownian(p["duration"], r["steps"], cfg.seed.substream(1)), amp)
    elif kind == "walk":
        W = _scaled(
            scaled_random_walk(int(p["walk_n"]), p["duration"], cfg.seed.substream(1)),
            amp,
        )
    else:
        W = _zero_path(p["duration"])
    W.to_csv(cfg.output_dir / "path.csv")
    art.tables.append("path.csv")
    metrics = {
        "sup_norm": W.sup_norm(),
        "total_variation": W.total_variation(),
        "horizon": W.horizon,
        "knots": int(W.times.size),
        "digest": path_digest(W),
    }
    art.metrics.update(metrics)
    art.add_table(
        "metrics.csv", ["metric", "value"], [[k, v] for k, v in metrics.items()]
    )


# ---------------------------------------------------------------------------
# scenario: norms (estimator front end)

_NORM_SOURCES = ("teeth", "brownian", "walk", "file")


def _validate_norms(p: dict, r: dict) -> None:
    _require(p["source"] in _NORM_SOURCES, f"source must be one of {_NORM_SOURCES}")
    if p["source"] == "file":
        _require(bool(p["file"]), "source 'file' needs a file path")
    elif p["source"] == "teeth":
        d = p["duration"]
        _require(
            d == math.floor(d) and int(d) % 2 == 0,
            "teeth need an even integer duration",
        )
    _require(p["duration"] > 0.0, "duration must be positive")
    _require(p["p"] >= 1.0, "p must be at least 1")
    _require(0.0 < p["alpha"] < 1.0, "alpha must lie in (0, 1)")
    _require(1 <= p["n_max"] <= 30, "n_max must lie in [1, 30]")
    _require(p["walk_n"] >= 1, "walk_n must be positive")
    _require(r["steps"] >= 1, "steps must be positive")


def _run_norms(cfg: ExperimentConfig, art: RunArtifact) -> None:
    p, r = cfg.parameters, cfg.resolution
    src, amp = p["source"], p["amplitude"]
    if src == "teeth":
        W = _scaled(teeth(int(round(p["duration"]))), amp)
    elif src == "brownian":
        W = _scaled(brownian(p["duration"], r["steps"], cfg.seed.substream(1)), amp)
    elif src == "walk":
        W = _scaled(
            scaled_random_walk(int(p["walk_n"]), p["duration"], cfg.seed.substream(1)),
            amp,
        )
    else:
        try:
            W = PiecewiseLinearPath.from_csv(p["file"])
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read path file '{p['file']}': {exc}") from None

    rows = []
    for n in range(1, int(p["n_max"]) + 1):
        band = 2.0 ** (-n / 2.0)
        count = count_N(W, band)
        rows.append([n, band, count, 2.0**-n * count])
    art.add_table("norms.csv", ["n", "band", "count", "scaled_count"], rows)

    metrics = {
        "sup_norm": W.sup_norm(),
        "total_variation": W.total_variation(),
        "p_variation": p_variation(W, p["p"]),
        "holder_seminorm": holder_seminorm(W, p["alpha"]),
        "p_alpha_norm": p_alpha_norm(W, p["alpha"]),
    }
    art.metrics.update(metrics)
    art.add_table(
        "metrics.csv", ["metric", "value"], [[k, v] for k, v in metrics.items()]
    )


# ---------------------------------------------------------------------------
# scenario registry and public entry points


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    description: str
    params: dict
    resolution: dict
    validate: Callable[[dict, dict], None]
    runner: Callable[[ExperimentConfig, RunArtifact], None]


SCENARIOS: dict[str, ScenarioSpec] = {
    s.name: s
    for s in (
        ScenarioSpec(
            "blowup",
            "growth of u_n(0, T) along the scaled-teeth construction",
            {
                "alpha": 0.25,
                "beta": 0.25,
                "n_list": (2, 3, 4, 5, 6, 7, 8, 9, 10),
                "horizon": 1.0,
                "slope_tolerance": 0.1,
            },
            {"dual_nodes": 2049, "primal_nodes": 513},
            _validate_blowup,
            _run_blowup,
        ),
        ScenarioSpec(
            "limit",
            "convergence to the plateau-versus-cone limit at the critical scaling",
            {
                "alpha": 0.5,
                "c0": 1.0,
                "n_list": (2, 4, 8),
                "horizon": 1.0,
                "t_probes": (0.25, 0.5, 0.75, 1.0),
                "x_span": 2.0,
                "error_threshold": 0.1,
                "doubling_tolerance": 0.1,
            },
            {"dual_nodes": 2049, "x_nodes": 81, "primal_nodes": 513},
            _validate_limit,
            _run_limit,
        ),
        ScenarioSpec(
            "brownian",
            "oscillation counts, interpolation norms, and exit-time tails of Brownian drivers",
            {
                "band_m": 10,
                "walk_steps": 10000,
                "lam": 2.0,
                "horizon": 1.0,
                "norm_cap": 20.0,
            },
            {"samples": 200, "walks": 2000, "n_levels": 8, "dt_exponent": 16},
            _validate_brownian,
            _run_brownian,
        ),
        ScenarioSpec(
            "walks",
            "solution ensembles along rescaled random walks versus Brownian interpolants",
            {
                "beta": 0.75,
                "delta": 0.25,
                "n_list": (4, 8, 16),
                "x_probes": (0.0, 0.5),
                "horizon": 1.0,
                "driver_horizon": 3.0,
                "x_span": 4.0,
            },
            {"samples": 500, "dt_exponent": 14, "dual_nodes": 513, "primal_nodes": 1025},
            _validate_walks,
            _run_walks,
        ),
        ScenarioSpec(
            "crossval",
            "difference scheme versus conjugate engine versus closed forms",
            {
                "beta": 0.5,
                "x_span": 4.0,
                "h_radius": 1.5,
                "order_floor": 0.8,
                "cfl": 0.9,
            },
            {
                "fd_nodes": (129, 257, 513, 1025),
                "h_nodes": 129,
                "dual_nodes": 4097,
                "sandwich_nodes": 513,
                "probe_nodes": 81,
            },
            _validate_crossval,
            _run_crossval,
        ),
        ScenarioSpec(
            "stability",
            "measured path-stability gaps against the DC-size and variation bounds",
            {
                "beta": 0.5,
                "delta": 0.25,
                "eps_min_exponent": 2,
                "eps_max_exponent": 11,
                "ratio_cap": 50.0,
                "variation_cap": 2.0,
                "horizon": 2.0,
            },
            {"trials": 12, "dual_nodes": 2049, "h_nodes": 1025},
            _validate_stability,
            _run_stability,
        ),
        ScenarioSpec(
            "solve",
            "single solve with snapshot output (either engine, any stock path)",
            {
                "engine": "hopf",
                "initial": "cone",
                "plateau": 1.0,
                "beta": 0.5,
                "delta": 0.25,
                "prefactor": 1.0,
                "path": "teeth",
                "duration": 2.0,
                "amplitude": 1.0,
                "walk_n": 8,
                "sample_times": (1.0, 2.0),
                "x_span": 6.0,
                "cfl": 0.9,
            },
            {"dual_nodes": 2049, "x_nodes": 513, "h_nodes": 513, "path_steps": 1024},
            _validate_solve,
            _run_solve,
        ),
        ScenarioSpec(
            "paths",
            "stock driving-path generators with basic metrics",
            {
                "kind": "teeth",
                "duration": 2.0,
                "amplitude": 1.0,
                "n": 6,
                "alpha": 0.5,
                "walk_n": 8,
            },
            {"steps": 1024},
            _validate_paths,
            _run_paths,
        ),
        ScenarioSpec(
            "norms",
            "oscillation counts and regularity estimators for one path",
            {
                "source": "teeth",
                "file": "",
                "duration": 2.0,
                "amplitude": 1.0,
                "p": 2.0,
                "alpha": 0.5,
                "n_max": 10,
                "walk_n": 8,
            },
            {"steps": 4096},
            _validate_norms,
            _run_norms,
        ),
    )
}


def run_blowup(
    alpha: float,
    beta: float,
    n_list: Sequence[int],
    *,
    horizon: float = 1.0,
    seed: int | RngSeed = 0,
    output_dir: str | Path | None = None,
    resolution: Mapping[str, object] | None = None,
    render_figures: bool = False,
) -> RunArtifact:
    """Growth-exponent study along the scaled-teeth construction."""
    cfg = default_config(
        "blowup",
        parameters={
            "alpha": alpha,
            "beta": beta,
            "n_list": tuple(n_list),
            "horizon": horizon,
        },
        resolution=resolution,
        seed=seed,
        output_dir=output_dir,
    )
    return execute(cfg, render_figures=render_figures)


def run_limit(
    alpha: float,
    c0: float,
    n_list: Sequence[int],
    *,
    seed: int | RngSeed = 0,
    output_dir: str | Path | None = None,
    resolution: Mapping[str, object] | None = None,
    render_figures: bool = False,
) -> RunArtifact:
    """Critical-scaling convergence study toward the plateau-versus-cone limit."""
    cfg = default_config(
        "limit",
        parameters={"alpha": alpha, "c0": c0, "n_list": tuple(n_list)},
        resolution=resolution,
        seed=seed,
        output_dir=output_dir,
    )
    return execute(cfg, render_figures=render_figures)


def run_brownian_study(
    samples: int,
    n_levels: int,
    seed: int | RngSeed,
    *,
    output_dir: str | Path | None = None,
    parameters: Mapping[str, object] | None = None,
    resolution: Mapping[str, object] | None = None,
    render_figures: bool = False,
) -> RunArtifact:
    """Monte Carlo study of Brownian oscillation counts, norm estimators,
    and band-exit tails."""
    res = dict(resolution or {})
    res.setdefault("samples", samples)
    res.setdefault("n_levels", n_levels)
    cfg = default_config(
        "brownian",
        parameters=parameters,
        resolution=res,
        seed=seed,
        output_dir=output_dir,
    )
    return execute(cfg, render_figures=render_figures)


def run_walk_convergence(
    n_list: Sequence[int],
    samples: int,
    x_probes: Sequence[float],
    seed: int | RngSeed,
    *,
    output_dir: str | Path | None = None,
    parameters: Mapping[str, object] | None = None,
    resolution: Mapping[str, object] | None = None,
    render_figures: bool = False,
) -> RunArtifact:
    """Ensemble comparison of walk-driven and Brownian-interpolant-driven
    solutions across walk scales."""
    params = dict(parameters or {})
    params.setdefault("n_list", tuple(n_list))
    params.setdefault("x_probes", tuple(x_probes))
    res = dict(resolution or {})
    res.setdefault("samples", samples)
    cfg = default_config(
        "walks",
        parameters=params,
        resolution=res,
        seed=seed,
        output_dir=output_dir,
    )
    return execute(cfg, render_figures=render_figures)


def run_crossval(
    resolutions: Sequence[int] | None = None,
    *,
    output_dir: str | Path | None = None,
    parameters: Mapping[str, object] | None = None,
    render_figures: bool = False,
) -> RunArtifact:
    """Refinement study of the difference scheme against the conjugate
    engine and the first-tooth closed forms."""
    res: dict[str, object] = {}
    if resolutions is not None:
        res["fd_nodes"] = tuple(resolutions)
    cfg = default_config(
        "crossval", parameters=parameters, resolution=res, output_dir=output_dir
    )
    return execute(cfg, render_figures=render_figures)


def run_stability(
    trials: int,
    seed: int | RngSeed,
    *,
    output_dir: str | Path | None = None,
    parameters: Mapping[str, object] | None = None,
    resolution: Mapping[str, object] | None = None,
    render_figures: bool = False,
) -> RunArtifact:
    """Randomized path-stability trials plus a deterministic epsilon sweep."""
    res = dict(resolution or {})
    res.setdefault("trials", trials)
    cfg = default_config(
        "stability",
        parameters=parameters,
        resolution=res,
        seed=seed,
        output_dir=output_dir,
    )
    return execute(cfg, render_figures=render_figures)
