"""Figure rendering from run artifacts.

Each figure kind is a pure function of the input CSV/JSON files; nothing is
recomputed from the model.  Mass plots draw a reference line at 8*pi and
classification plots at the dimensional threshold C_d read from report.json.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

__all__ = ["FigureSpec", "FIGURE_KINDS", "MissingColumnError", "render"]

FIGURE_KINDS = ("moments", "concentration", "scaling", "annulus", "phase")
EIGHT_PI = 8.0 * math.pi


class MissingColumnError(KeyError):
    """A required CSV column is absent; carries the column name."""

    def __init__(self, column: str, path):
        super().__init__(column)
        self.column = column
        self.path = str(path)

    def __str__(self) -> str:
        return f"missing column {self.column!r} in {self.path}"


@dataclass
class FigureSpec:
    """What to render and where to write it."""

    input_path: str  # run directory, or a sweep CSV for scaling/phase
    kind: str
    output_path: str  # extension ignored; .svg and .png are both written
    log_x: bool = False
    log_y: bool = False
    title: Optional[str] = None
    formats: tuple = ("svg", "png")

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"kind must be one of {FIGURE_KINDS}, got {self.kind!r}")


def _read_csv(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"missing artifact: {path}")
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if len(rows) < 2:
        raise ValueError(f"artifact {path} has no data rows")
    header = rows[0]
    cols = {}
    for k, name in enumerate(header):
        vals = []
        for r in rows[1:]:
            try:
                vals.append(float(r[k]))
            except ValueError:
                vals.append(np.nan)
        cols[name] = np.asarray(vals)
    return cols


def _need(cols: dict, name: str, path) -> np.ndarray:
    if name not in cols:
        raise MissingColumnError(name, path)
    return cols[name]


def _need_prefix(cols: dict, prefix: str, path) -> list[str]:
    names = sorted(
        (c for c in cols if c.startswith(prefix)),
        key=lambda c: int(c[len(prefix):]),
    )
    if not names:
        raise MissingColumnError(f"{prefix}<j>", path)
    return names


def _run_inputs(spec: FigureSpec):
    run_dir = Path(spec.input_path)
    cols = _read_csv(run_dir / "diagnostics.csv")
    report = {}
    report_path = run_dir / "report.json"
    if report_path.exists():
        with open(report_path) as f:
            report = json.load(f)
    return cols, report, run_dir / "diagnostics.csv"


def _save(fig, spec: FigureSpec) -> list[Path]:
    base = Path(spec.output_path)
    base.parent.mkdir(parents=True, exist_ok=True)
    written = []
    for ext in spec.formats:
        out = base.with_suffix(f".{ext}")
        fig.savefig(out, bbox_inches="tight")
        written.append(out)
    plt.close(fig)
    return written


def _fig_moments(spec: FigureSpec) -> list[Path]:
    cols, report, src = _run_inputs(spec)
    t = _need(cols, "t", src)
    names = _need_prefix(cols, "w_R_", src)
    probe_radii = report.get("metadata", {}).get("probe_radii")
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for j, name in enumerate(names):
        label = f"R = {probe_radii[j]:.3g}" if probe_radii else name
        ax.plot(t, cols[name], lw=1.2, label=label)
    ax.axhline(EIGHT_PI, color="k", ls="--", lw=1, label=r"$8\pi$")
    ax.set_xlabel("t")
    ax.set_ylabel(r"local moment $w_R$")
    ax.set_title(spec.title or "Local moments along the trajectory")
    ax.legend(fontsize=8, ncol=2)
    if spec.log_x:
        ax.set_xscale("log")
    if spec.log_y:
        ax.set_yscale("log")
    return _save(fig, spec)


def _fig_concentration(spec: FigureSpec) -> list[Path]:
    cols, report, src = _run_inputs(spec)
    t = _need(cols, "t", src)
    names = _need_prefix(cols, "ball_mass_", src)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for name in names:
        ax.plot(t, cols[name], lw=1.2, label=name)
    ax.axhline(EIGHT_PI, color="k", ls="--", lw=1, label=r"$8\pi$")
    thr = report.get("threshold")
    if thr is not None and abs(thr - EIGHT_PI) > 1e-9:
        ax.axhline(thr, color="r", ls=":", lw=1, label=r"$C_d$")
    ax.set_xlabel("t")
    ax.set_ylabel("mass in ball")
    ax.set_title(spec.title or "Mass concentration in balls")
    ax.legend(fontsize=8)
    return _save(fig, spec)


def _fig_annulus(spec: FigureSpec) -> list[Path]:
    cols, _, src = _run_inputs(spec)
    t = _need(cols, "t", src)
    H = _need(cols, "annulus_mass", src)
    pos = H > 0.0
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.semilogy(t[pos], H[pos], "o-", ms=2.5, lw=1, label="H(t)")
    if np.count_nonzero(pos) >= 3:
        # least-squares exponential fit on the decaying tail
        k0 = int(np.argmax(H))
        tt, hh = t[k0:], H[k0:]
        keep = hh > 0.0
        tt, hh = tt[keep], hh[keep]
        if tt.size >= 3:
            A = np.stack([np.ones_like(tt), tt], axis=-1)
            coef, *_ = np.linalg.lstsq(A, np.log(hh), rcond=None)
            ax.semilogy(tt, np.exp(A @ coef), "r--", lw=1.2,
                        label=rf"fit $\hat C$ = {-coef[1]:.3g}")
    ax.set_xlabel("t")
    ax.set_ylabel("annulus mass H")
    ax.set_title(spec.title or "Annulus mass with exponential lower-bound fit")
    ax.legend(fontsize=8)
    return _save(fig, spec)


def _read_sweep(spec: FigureSpec):
    path = Path(spec.input_path)
    if path.is_dir():
        path = path / "sweep.csv"
    cols = _read_csv(path)
    # verdict column parses as NaN floats; reread as text
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    return cols, rows, path


def _fig_scaling(spec: FigureSpec) -> list[Path]:
    cols, rows, src = _read_sweep(spec)
    if "value" not in cols:
        raise MissingColumnError("value", src)
    if "t_blowup" not in cols:
        raise MissingColumnError("t_blowup", src)
    x = cols["value"]
    y = cols["t_blowup"]
    ok = np.isfinite(x) & np.isfinite(y) & (x > 0) & (y > 0)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.loglog(x[ok], y[ok], "o", ms=5)
    if np.count_nonzero(ok) >= 2:
        A = np.stack([np.ones(np.count_nonzero(ok)), np.log(x[ok])], axis=-1)
        coef, *_ = np.linalg.lstsq(A, np.log(y[ok]), rcond=None)
        xs = np.linspace(x[ok].min(), x[ok].max(), 50)
        ax.loglog(xs, np.exp(coef[0]) * xs ** coef[1], "r--",
                  label=f"slope = {coef[1]:.3f}")
        ax.legend()
    ax.set_xlabel(rows[0]["parameter"] if rows else "parameter")
    ax.set_ylabel(r"$T_b$")
    ax.set_title(spec.title or "Blowup time scaling")
    return _save(fig, spec)


def _fig_phase(spec: FigureSpec) -> list[Path]:
    cols, rows, src = _read_sweep(spec)
    if "value" not in cols:
        raise MissingColumnError("value", src)
    if not rows or "verdict" not in rows[0]:
        raise MissingColumnError("verdict", src)
    fig, ax = plt.subplots(figsize=(7, 2.8))
    seen = set()
    style = {
        "blew-up": ("v", "tab:red"),
        "ran-to-horizon": ("^", "tab:blue"),
        "inconclusive": ("s", "tab:gray"),
        "": ("x", "k"),
    }
    for r in rows:
        v = float(r["value"])
        verdict = r.get("verdict", "")
        marker, color = style.get(verdict, ("x", "k"))
        ax.plot([v], [0.0], marker=marker, color=color, ms=9,
                label=verdict if verdict not in seen else None)
        seen.add(verdict)
    ax.axvline(EIGHT_PI, color="k", ls="--", lw=1, label=r"$8\pi$")
    ax.set_yticks([])
    ax.set_xlabel(rows[0]["parameter"] if rows else "parameter")
    ax.set_title(spec.title or "Verdict phase diagram")
    ax.legend(fontsize=8, loc="upper left")
    return _save(fig, spec)


_RENDERERS = {
    "moments": _fig_moments,
    "concentration": _fig_concentration,
    "annulus": _fig_annulus,
    "scaling": _fig_scaling,
    "phase": _fig_phase,
}


def render(spec: FigureSpec) -> list[Path]:
    """Render one figure; returns the written file paths (SVG and PNG)."""
    return _RENDERERS[spec.kind](spec)
