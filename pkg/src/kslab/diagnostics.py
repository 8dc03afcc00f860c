"""Time-series diagnostics, blowup reports, and their serialization.

CSV column order is fixed:
  t, dt, sup_u, mass_total, w_R_<j>..., ball_mass_<j>..., second_moment,
  annulus_mass, residual_R_<j>...
with 17 significant digits.  The probe radii behind the <j> indices are
recorded in the run report / manifest.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .analysis import (
    annulus_moment,
    concentrated_mass,
    local_moment_with_error,
    moment_inequality_residual,
    second_moment,
)
from .errors import ConfigError

__all__ = [
    "VERDICT_BLEWUP",
    "VERDICT_HORIZON",
    "VERDICT_INCONCLUSIVE",
    "DiagnosticsSeries",
    "BlowupReport",
    "estimate_blowup_time",
]

VERDICT_BLEWUP = "blew-up"
VERDICT_HORIZON = "ran-to-horizon"
VERDICT_INCONCLUSIVE = "inconclusive"

_FMT = "%.17g"


@dataclass
class DiagnosticsSeries:
    """Recorded trajectory of the paper functionals."""

    probe_radii: np.ndarray
    ball_radii: np.ndarray
    annulus_delta: float
    annulus_plateau: float
    d: int
    t: list = field(default_factory=list)
    dt: list = field(default_factory=list)
    sup_u: list = field(default_factory=list)
    mass_total: list = field(default_factory=list)
    w: list = field(default_factory=list)  # per row: (n_probe,) moments
    w_err: list = field(default_factory=list)
    ball_mass: list = field(default_factory=list)
    second_moment: list = field(default_factory=list)
    annulus_mass: list = field(default_factory=list)
    residual: Optional[np.ndarray] = None  # (n_rows, n_probe), NaN at the edges

    def record(self, state, dt: float, sup_u: float, mass_total: float) -> None:
        if self.t and state.t <= self.t[-1]:
            return
        self.t.append(float(state.t))
        self.dt.append(float(dt))
        self.sup_u.append(float(sup_u))
        self.mass_total.append(float(mass_total))
        wv, we = [], []
        for R in self.probe_radii:
            v, e = local_moment_with_error(state, float(R))
            wv.append(v)
            we.append(e)
        self.w.append(wv)
        self.w_err.append(we)
        self.ball_mass.append([concentrated_mass(state, float(p)) for p in self.ball_radii])
        self.second_moment.append(second_moment(state))
        self.annulus_mass.append(
            annulus_moment(state, self.annulus_delta, self.annulus_plateau)
        )

    @property
    def n_rows(self) -> int:
        return len(self.t)

    def arrays(self) -> dict:
        return {
            "t": np.asarray(self.t),
            "dt": np.asarray(self.dt),
            "sup_u": np.asarray(self.sup_u),
            "mass_total": np.asarray(self.mass_total),
            "w": np.asarray(self.w),
            "w_err": np.asarray(self.w_err),
            "ball_mass": np.asarray(self.ball_mass),
            "second_moment": np.asarray(self.second_moment),
            "annulus_mass": np.asarray(self.annulus_mass),
        }

    def finalize_residuals(self) -> None:
        """Compute the moment-inequality residual columns (post-run)."""
        n = self.n_rows
        res = np.full((n, len(self.probe_radii)), np.nan)
        if n >= 3:
            t = np.asarray(self.t)
            w = np.asarray(self.w)
            werr = np.asarray(self.w_err)
            for j, R in enumerate(self.probe_radii):
                r, _ = moment_inequality_residual(t, w[:, j], float(R), self.d, werr[:, j])
                res[1:-1, j] = r
        self.residual = res

    def residual_tolerances(self) -> np.ndarray:
        """(n_rows-2, n_probe) tolerance bound matching the residual columns."""
        t = np.asarray(self.t)
        w = np.asarray(self.w)
        werr = np.asarray(self.w_err)
        out = np.empty((self.n_rows - 2, len(self.probe_radii)))
        for j, R in enumerate(self.probe_radii):
            _, tol = moment_inequality_residual(t, w[:, j], float(R), self.d, werr[:, j])
            out[:, j] = tol
        return out

    def column_names(self) -> list[str]:
        np_, nb = len(self.probe_radii), len(self.ball_radii)
        cols = ["t", "dt", "sup_u", "mass_total"]
        cols += [f"w_R_{j}" for j in range(np_)]
        cols += [f"ball_mass_{j}" for j in range(nb)]
        cols += ["second_moment", "annulus_mass"]
        cols += [f"residual_R_{j}" for j in range(np_)]
        return cols

    def to_csv(self, path) -> None:
        if self.residual is None:
            self.finalize_residuals()
        a = self.arrays()
        cols = self.column_names()
        with open(path, "w") as f:
            f.write(",".join(cols) + "\n")
            for i in range(self.n_rows):
                row = [a["t"][i], a["dt"][i], a["sup_u"][i], a["mass_total"][i]]
                row += list(a["w"][i])
                row += list(a["ball_mass"][i])
                row += [a["second_moment"][i], a["annulus_mass"][i]]
                row += list(self.residual[i])
                f.write(",".join(_FMT % v for v in row) + "\n")

    @staticmethod
    def read_csv(path) -> dict:
        """Read a diagnostics CSV back as {column_name: array}."""
        with open(path) as f:
            header = f.readline().strip().split(",")
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        if data.shape[1] != len(header):
            raise ConfigError(f"malformed diagnostics CSV {path}")
        return {name: data[:, k] for k, name in enumerate(header)}


@dataclass
class BlowupReport:
    """Outcome of one run."""

    verdict: str
    t_blowup: Optional[float] = None
    t_blowup_uncertainty: Optional[float] = None
    concentrated_mass: Optional[float] = None
    rho_probe: Optional[float] = None
    detection_time: Optional[float] = None
    classification_margin: Optional[float] = None
    concentration_initial: Optional[float] = None
    threshold: Optional[float] = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in (VERDICT_BLEWUP, VERDICT_HORIZON, VERDICT_INCONCLUSIVE):
            raise ConfigError(f"unknown verdict {self.verdict!r}")
        if self.verdict == VERDICT_BLEWUP and self.t_blowup is None:
            raise ConfigError("blew-up verdict requires a blowup-time estimate")

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "verdict": self.verdict,
            "t_blowup": self.t_blowup,
            "t_blowup_uncertainty": self.t_blowup_uncertainty,
            "concentrated_mass": self.concentrated_mass,
            "rho_probe": self.rho_probe,
            "detection_time": self.detection_time,
            "classification_margin": self.classification_margin,
            "concentration_initial": self.concentration_initial,
            "threshold": self.threshold,
            "metadata": self.metadata,
        }

    def to_json(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)
            f.write("\n")

    @classmethod
    def from_json(cls, path) -> "BlowupReport":
        with open(path) as f:
            d = json.load(f)
        d.pop("schema_version", None)
        return cls(**d)


def estimate_blowup_time(t_hist: np.ndarray, dt_hist: np.ndarray) -> tuple[float, float]:
    """Extrapolate the blowup time from a collapsing step-size sequence.

    If dt decays geometrically with ratio q < 1 the remaining time is the
    geometric tail dt * q / (1 - q).  Returns (T_b, uncertainty).
    """
    t_hist = np.asarray(t_hist, dtype=float)
    dt_hist = np.asarray(dt_hist, dtype=float)
    t_last, dt_last = float(t_hist[-1]), float(dt_hist[-1])
    if dt_hist.size < 4:
        return t_last + dt_last, dt_last
    ratios = dt_hist[1:] / dt_hist[:-1]
    q = float(np.median(ratios[-8:]))
    if not (0.0 < q < 1.0) or not math.isfinite(q):
        return t_last + dt_last, dt_last
    remaining = dt_last * q / (1.0 - q)
    unc = max(dt_last / (1.0 - q), remaining * (1.0 - q))
    return t_last + remaining, unc
