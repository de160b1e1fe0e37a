"""Figure rendering for run artifacts.

Each renderer reads the CSV tables a scenario just wrote and turns them into
PNG files in the same directory, so the plots cannot drift from the shipped
data.  Rendering is optional (the CLI exposes a switch) and the tables are
the authoritative output; a scenario without a renderer simply produces no
figures.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import TYPE_CHECKING, Callable

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

if TYPE_CHECKING:  # pragma: no cover
    from .experiments import RunArtifact

__all__ = ["render"]


def _read_table(path: Path) -> tuple[list[str], list[list[str]]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def _column(header: list[str], rows: list[list[str]], name: str) -> np.ndarray:
    j = header.index(name)
    return np.array([float(r[j]) for r in rows])


def _text_column(header: list[str], rows: list[list[str]], name: str) -> list[str]:
    j = header.index(name)
    return [r[j] for r in rows]


def _save(fig, out: Path, name: str) -> str:
    fig.savefig(out / name, dpi=110, bbox_inches="tight")
    plt.close(fig)
    return name


def _render_blowup(art: "RunArtifact") -> list[str]:
    header, rows = _read_table(art.output_dir / "growth.csv")
    n = _column(header, rows, "n")
    logv = _column(header, rows, "log2_value")
    slope, intercept = np.polyfit(n, logv, 1)
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.plot(n, logv, "o", label="measured")
    ax.plot(n, slope * n + intercept, "-", label=f"fit, slope {slope:.3f}")
    ax.set_xlabel("scaling level n")
    ax.set_ylabel("log2 u_n(0, T)")
    ax.legend()
    ax.grid(True, alpha=0.3)
    return [_save(fig, art.output_dir, "growth.png")]


def _render_limit(art: "RunArtifact") -> list[str]:
    out = []
    header, rows = _read_table(art.output_dir / "errors.csv")
    n = _column(header, rows, "n")
    e = _column(header, rows, "sup_error")
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.semilogy(n, e, "o-")
    ax.set_xlabel("scaling level n")
    ax.set_ylabel("sup error to the limit")
    ax.grid(True, alpha=0.3)
    out.append(_save(fig, art.output_dir, "errors.png"))

    header, rows = _read_table(art.output_dir / "profile.csv")
    x = _column(header, rows, "x")
    u = _column(header, rows, "u")
    ref = _column(header, rows, "limit")
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.plot(x, u, "-", label="finest-level solution")
    ax.plot(x, ref, "--", label="plateau-versus-cone limit")
    ax.set_xlabel("x")
    ax.set_ylabel("u")
    ax.legend()
    ax.grid(True, alpha=0.3)
    out.append(_save(fig, art.output_dir, "profile.png"))
    return out


def _render_brownian(art: "RunArtifact") -> list[str]:
    out = []
    header, rows = _read_table(art.output_dir / "path_norms.csv")
    counts = _column(header, rows, "sup_count")
    norms = _column(header, rows, "p_norm")
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.6))
    axes[0].hist(counts, bins=24)
    axes[0].set_xlabel("sup-scaled oscillation count")
    axes[1].hist(norms, bins=24)
    axes[1].set_xlabel("interpolation-norm estimator")
    for ax in axes:
        ax.grid(True, alpha=0.3)
    out.append(_save(fig, art.output_dir, "norms.png"))

    header, rows = _read_table(art.output_dir / "walk_tail.csv")
    k = _column(header, rows, "exit_count")
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.hist(k, bins=30)
    ax.set_xlabel("band exits per walk")
    ax.set_ylabel("walks")
    ax.grid(True, alpha=0.3)
    out.append(_save(fig, art.output_dir, "tail.png"))
    return out


def _render_walks(art: "RunArtifact") -> list[str]:
    header, rows = _read_table(art.output_dir / "gaps.csv")
    n = _column(header, rows, "n")
    qg = _column(header, rows, "quantile_gap")
    levels = sorted(set(n))
    worst = [max(q for m, q in zip(n, qg) if m == lev) for lev in levels]
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.semilogy(levels, worst, "o-")
    ax.set_xlabel("walk scale n")
    ax.set_ylabel("max quantile gap")
    ax.grid(True, alpha=0.3)
    return [_save(fig, art.output_dir, "gaps.png")]


def _render_crossval(art: "RunArtifact") -> list[str]:
    header, rows = _read_table(art.output_dir / "fd_errors.csv")
    dx = _column(header, rows, "dx")
    e = _column(header, rows, "sup_error")
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.loglog(dx, e, "o-", label="scheme error")
    ax.loglog(dx, e[0] * dx / dx[0], "--", label="first order")
    ax.set_xlabel("grid spacing")
    ax.set_ylabel("sup error")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    return [_save(fig, art.output_dir, "convergence.png")]


def _render_stability(art: "RunArtifact") -> list[str]:
    header, rows = _read_table(art.output_dir / "sweep.csv")
    eps = _column(header, rows, "eps")
    ratio = _column(header, rows, "ratio_dc")
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.semilogx(eps, ratio, "o-")
    ax.set_xlabel("path gap scale")
    ax.set_ylabel("measured gap / DC-size bound")
    ax.set_ylim(bottom=0.0)
    ax.grid(True, alpha=0.3)
    return [_save(fig, art.output_dir, "sweep.png")]


def _render_solve(art: "RunArtifact") -> list[str]:
    fig, ax = plt.subplots(figsize=(5.5, 4))
    for name in sorted(t for t in art.tables if t.startswith("snapshot_")):
        header, rows = _read_table(art.output_dir / name)
        x = _column(header, rows, "x")
        u = _column(header, rows, "u")
        ax.plot(x, u, "-", label=name.replace(".csv", ""))
    ax.set_xlabel("x")
    ax.set_ylabel("u")
    ax.legend()
    ax.grid(True, alpha=0.3)
    return [_save(fig, art.output_dir, "snapshots.png")]


def _render_paths(art: "RunArtifact") -> list[str]:
    header, rows = _read_table(art.output_dir / "path.csv")
    t = _column(header, rows, "t")
    w = _column(header, rows, "w")
    fig, ax = plt.subplots(figsize=(6.5, 3.6))
    ax.plot(t, w, "-", linewidth=0.9)
    ax.set_xlabel("t")
    ax.set_ylabel("W")
    ax.grid(True, alpha=0.3)
    return [_save(fig, art.output_dir, "path.png")]


def _render_norms(art: "RunArtifact") -> list[str]:
    header, rows = _read_table(art.output_dir / "norms.csv")
    n = _column(header, rows, "n")
    scaled = _column(header, rows, "scaled_count")
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.plot(n, scaled, "o-")
    ax.set_xlabel("level n")
    ax.set_ylabel("2^-n N(2^(-n/2))")
    ax.set_ylim(bottom=0.0)
    ax.grid(True, alpha=0.3)
    return [_save(fig, art.output_dir, "counts.png")]


_RENDERERS: dict[str, Callable[["RunArtifact"], list[str]]] = {
    "blowup": _render_blowup,
    "limit": _render_limit,
    "brownian": _render_brownian,
    "walks": _render_walks,
    "crossval": _render_crossval,
    "stability": _render_stability,
    "solve": _render_solve,
    "paths": _render_paths,
    "norms": _render_norms,
}


def render(art: "RunArtifact") -> list[str]:
    """Render the figures for one artifact; returns the file names written."""
    renderer = _RENDERERS.get(art.scenario)
    if renderer is None:
        return []
    return renderer(art)
