"""Run configuration, orchestration, artifact persistence, sweeps, and the
static verification suite.

A run is fully described by one ``ExperimentConfig`` (loadable from YAML or
JSON).  ``run_experiment`` integrates the configured solver and writes three
artifacts into the output directory:

  diagnostics.csv   fixed-column time series (17 significant digits)
  report.json       verdict, blowup-time estimate, concentrated mass
  manifest.json     config hash, artifact checksums, probe radii, seeds

Identical configs produce byte-identical CSV output: the solvers are
deterministic and the only randomized component (the weight-constant
estimate) uses a fixed seed recorded in the manifest.
"""
from __future__ import annotations

import concurrent.futures
import copy
import hashlib
import json
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from . import __version__
from .analysis import (
    classify_datum,
    default_probe_radii,
    distribution_identity_check,
    genbl_parameters,
    radial_concentration,
)
from .diagnostics import BlowupReport, DiagnosticsSeries
from .errors import ConfigError
from .grids import PolarState, RadialState, polar_faces, radial_grid, reconstruct_density
from .initial_data import DatumSpec, make_polar_datum, make_radial_datum, support_radius
from .nsym2d import Run2dSettings, run2d, solve_potential
from .radial import RadialRunSettings, run_radial
from .weights import (
    DEFAULT_B_SEED,
    blowup_constant,
    estimate_B,
    psi_laplacian,
    psi_eval,
    sphere_area,
)

__all__ = [
    "ExperimentConfig",
    "RunArtifacts",
    "run_experiment",
    "sweep",
    "SweepRow",
    "find_verdict_transition",
    "verify_static",
    "CheckResult",
    "summarize_run",
    "CANNED_CONFIGS",
    "canned_config",
]

SCHEMA_VERSION = 1

# factor converting the deepest grid cell to the datum support radius; deep
# enough that the adaptive step collapses below dt_min during a blowup while
# rho_probe = 10 r_1 still captures the concentrated core at detection
R1_SUPPORT_FACTOR = 4e-6


def _require(cond: bool, fieldname: str, msg: str) -> None:
    if not cond:
        raise ConfigError(f"{fieldname}: {msg}")


@dataclass
class ExperimentConfig:
    """One self-contained run description (see module docstring)."""

    name: str
    solver: str  # "radial" | "nsym2d"
    datum: DatumSpec
    d: int = 2
    symmetry_order: int = 1  # N, nsym2d only
    # grid
    n_r: int = 2048
    n_theta: int = 8  # nsym2d only
    r_max: Optional[float] = None  # default 10 * support radius
    r_min_frac: Optional[float] = None  # default R1_SUPPORT_FACTOR * support / r_max
    # integrator
    t_end_factor: float = 50.0  # t_end = factor * t_scale
    dt_max_factor: float = 0.01  # dt_max = factor * t_scale
    dt_min_factor: float = 1e-12  # dt_min = factor * t_scale
    adv_tol: float = 1e-2  # radial accuracy limiter
    cfl: float = 0.4  # nsym2d advection CFL factor
    theta_scheme: float = 1.0  # radial implicitness in [0.5, 1]
    k_max: int = 64  # nsym2d angular mode cap
    # detection
    u_threshold_factor: float = 1e6  # vs initial sup density
    rho_probe_factor: float = 10.0  # vs r_1
    # diagnostics
    cadence_factor: float = 0.01  # record interval = factor * t_scale
    n_probe_radii: int = 8
    probe_radii: Optional[list] = None  # explicit override
    ball_radii: Optional[list] = None
    annulus_delta: float = 1.0
    annulus_plateau: float = 4.0
    output_dir: str = "runs"
    expected_verdict: Optional[str] = None  # canned-experiment annotation

    def __post_init__(self):
        if isinstance(self.datum, dict):
            self.datum = DatumSpec(**self.datum)
        _require(self.solver in ("radial", "nsym2d"), "solver",
                 f"must be 'radial' or 'nsym2d', got {self.solver!r}")
        _require(self.d >= 2, "d", f"must be >= 2, got {self.d}")
        if self.solver == "nsym2d":
            _require(self.d == 2, "d", "nsym2d requires d = 2")
            _require(self.n_theta >= 1, "n_theta", f"must be >= 1, got {self.n_theta}")
            _require(self.symmetry_order >= 1, "symmetry_order",
                     f"must be >= 1, got {self.symmetry_order}")
        _require(self.datum.d == self.d, "datum.d",
                 f"must match config d = {self.d}, got {self.datum.d}")
        _require(self.n_r >= 8, "n_r", f"must be >= 8, got {self.n_r}")
        for f in ("t_end_factor", "dt_max_factor", "dt_min_factor", "adv_tol",
                  "cfl", "u_threshold_factor", "rho_probe_factor",
                  "cadence_factor", "annulus_delta", "annulus_plateau"):
            _require(getattr(self, f) > 0.0, f, f"must be positive, got {getattr(self, f)}")
        if self.r_max is not None:
            _require(self.r_max > 0.0, "r_max", f"must be positive, got {self.r_max}")
        if self.r_min_frac is not None:
            _require(0.0 < self.r_min_frac < 1.0, "r_min_frac",
                     f"must lie in (0, 1), got {self.r_min_frac}")
        _require(0.5 <= self.theta_scheme <= 1.0, "theta_scheme",
                 f"must lie in [0.5, 1], got {self.theta_scheme}")
        _require(self.n_probe_radii >= 1, "n_probe_radii",
                 f"must be >= 1, got {self.n_probe_radii}")

    # -- derived scales -------------------------------------------------------

    @property
    def support(self) -> float:
        return support_radius(self.datum)

    @property
    def t_scale(self) -> float:
        return self.support**2

    def resolved_r_max(self) -> float:
        return self.r_max if self.r_max is not None else 10.0 * self.support

    def resolved_r_min_frac(self) -> float:
        if self.r_min_frac is not None:
            return self.r_min_frac
        return R1_SUPPORT_FACTOR * self.support / self.resolved_r_max()

    # -- (de)serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["schema_version"] = SCHEMA_VERSION
        datum = doc["datum"]
        if datum.get("table") is not None:
            datum["table"] = np.asarray(datum["table"]).tolist()
        else:
            datum.pop("table", None)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        doc = copy.deepcopy(doc)
        version = doc.pop("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigError(
                f"schema_version: expected {SCHEMA_VERSION}, got {version}"
            )
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"{sorted(unknown)[0]}: unknown config field")
        try:
            return cls(**doc)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        text = Path(path).read_text()
        try:
            # JSON first: YAML 1.1 misreads bare scientific notation ("1e-12")
            # as a string
            doc = json.loads(text)
        except json.JSONDecodeError:
            try:
                doc = yaml.safe_load(text)
            except yaml.YAMLError as exc:
                raise ConfigError(f"config file {path}: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError(f"config file {path}: expected a mapping at top level")
        return cls.from_dict(doc)

    def save(self, path) -> None:
        with open(path, "w") as f:
            yaml.safe_dump(self.to_dict(), f, sort_keys=True)

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


# ---------------------------------------------------------------------------
# run orchestration
# ---------------------------------------------------------------------------


@dataclass
class RunArtifacts:
    """Paths + in-memory results of one completed run."""

    run_dir: Path
    config: ExperimentConfig
    report: BlowupReport
    series: DiagnosticsSeries
    csv_path: Path
    report_path: Path
    manifest_path: Path


def _build_state(config: ExperimentConfig):
    r_max = config.resolved_r_max()
    frac = config.resolved_r_min_frac()
    if config.solver == "radial":
        return make_radial_datum(config.datum, radial_grid(config.n_r, r_max, frac))
    faces = polar_faces(config.n_r, r_max, frac)
    return make_polar_datum(config.datum, faces, config.n_theta, config.symmetry_order)


def _build_settings(config: ExperimentConfig, state):
    tsc = config.t_scale
    if config.solver == "radial":
        grid = state.r
        sup0 = float(np.max(reconstruct_density(state)))
    else:
        grid = state.r_faces
        sup0 = float(np.max(state.u))
    r1 = float(grid[1])
    if config.probe_radii is not None:
        probes = np.asarray(config.probe_radii, dtype=float)
    else:
        probes = default_probe_radii(grid)[: config.n_probe_radii]
    if config.ball_radii is not None:
        balls = np.asarray(config.ball_radii, dtype=float)
    else:
        Rs = config.support
        balls = np.array([0.1 * Rs, 0.5 * Rs, 2.0 * Rs])
    common = dict(
        t_end=config.t_end_factor * tsc,
        dt_max=config.dt_max_factor * tsc,
        dt_min=config.dt_min_factor * tsc,
        u_threshold=config.u_threshold_factor * sup0,
        rho_probe=config.rho_probe_factor * r1,
        probe_radii=probes,
        ball_radii=balls,
        annulus_delta=config.annulus_delta,
        annulus_plateau=config.annulus_plateau,
        cadence=config.cadence_factor * tsc,
    )
    if config.solver == "radial":
        return RadialRunSettings(theta=config.theta_scheme, adv_tol=config.adv_tol, **common)
    return Run2dSettings(cfl=config.cfl, k_max=config.k_max, **common)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run_experiment(config: ExperimentConfig, output_dir=None) -> RunArtifacts:
    """Integrate the configured run and persist its artifacts."""
    run_dir = Path(output_dir) if output_dir is not None else Path(config.output_dir) / config.name
    run_dir.mkdir(parents=True, exist_ok=True)

    state = _build_state(config)
    settings = _build_settings(config, state)
    cls = classify_datum(state, d=config.d)
    wall0 = time.perf_counter()
    if config.solver == "radial":
        result = run_radial(state, settings)
    else:
        result = run2d(state, settings)
    wall = time.perf_counter() - wall0

    report = result.report
    report.classification_margin = cls.margin
    report.concentration_initial = cls.concentration
    report.threshold = cls.threshold
    report.metadata.update(
        {
            "config_hash": config.config_hash(),
            "wall_time_s": wall,
            "t_scale": config.t_scale,
            "t_end": settings.t_end,
        }
    )

    csv_path = run_dir / "diagnostics.csv"
    report_path = run_dir / "report.json"
    manifest_path = run_dir / "manifest.json"
    config_path = run_dir / "config.yaml"
    result.series.to_csv(csv_path)
    report.to_json(report_path)
    config.save(config_path)
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "package_version": __version__,
        "config_hash": config.config_hash(),
        "weight_constant_seed": DEFAULT_B_SEED,
        "probe_radii": [float(x) for x in settings.probe_radii],
        "ball_radii": [float(x) for x in settings.ball_radii],
        "artifacts": {
            "diagnostics.csv": _sha256(csv_path),
            "report.json": _sha256(report_path),
            "config.yaml": _sha256(config_path),
        },
    }
    if config.d >= 3:
        # the two-dimensional scaling family is a paper statement; its d >= 3
        # analogue (mass scaling by lambda^(2-d)) is standard but recorded as
        # metadata only
        manifest["scaling_note"] = (
            "d>=3 scaling analogue u -> lam^2 u(lam x, lam^2 t) multiplies "
            "mass by lam^(2-d); informational, not an asserted claim"
        )
    with open(manifest_path, "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return RunArtifacts(
        run_dir=run_dir,
        config=config,
        report=report,
        series=result.series,
        csv_path=csv_path,
        report_path=report_path,
        manifest_path=manifest_path,
    )


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


@dataclass
class SweepRow:
    parameter: str
    value: float
    verdict: Optional[str]
    t_blowup: Optional[float]
    concentrated_mass: Optional[float]
    error: str = ""


def _set_parameter(config: ExperimentConfig, parameter: str, value: float) -> ExperimentConfig:
    doc = config.to_dict()
    target = doc
    parts = parameter.split(".")
    for p in parts[:-1]:
        if p not in target or not isinstance(target[p], dict):
            raise ConfigError(f"{parameter}: no such sweep parameter")
        target = target[p]
    if parts[-1] not in target:
        raise ConfigError(f"{parameter}: no such sweep parameter")
    target[parts[-1]] = value
    doc["name"] = f"{config.name}-{parts[-1]}-{value:.9g}"
    return ExperimentConfig.from_dict(doc)


def _sweep_one(args) -> SweepRow:
    config, parameter, value, out_dir = args
    try:
        cfg = _set_parameter(config, parameter, value)
        art = run_experiment(cfg, Path(out_dir) / cfg.name)
        return SweepRow(
            parameter=parameter,
            value=float(value),
            verdict=art.report.verdict,
            t_blowup=art.report.t_blowup,
            concentrated_mass=art.report.concentrated_mass,
        )
    except Exception as exc:  # per-row failure: record and continue
        return SweepRow(
            parameter=parameter,
            value=float(value),
            verdict=None,
            t_blowup=None,
            concentrated_mass=None,
            error=f"{type(exc).__name__}: {exc}",
        )


def sweep(config: ExperimentConfig, parameter: str, values, output_dir,
          max_workers: Optional[int] = None) -> list[SweepRow]:
    """Run independent simulations across ``values`` of one config parameter.

    Failures are recorded per row; the aggregate is ordered by parameter
    value regardless of completion order.  Writes ``sweep.csv`` in
    ``output_dir``.
    """
    _set_parameter(config, parameter, list(values)[0])  # validate up front
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(config, parameter, float(v), str(out)) for v in values]
    if max_workers is not None and max_workers <= 1:
        rows = [_sweep_one(j) for j in jobs]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(_sweep_one, jobs))
    rows.sort(key=lambda r: r.value)
    csv_path = out / "sweep.csv"
    with open(csv_path, "w") as f:
        f.write("parameter,value,verdict,t_blowup,concentrated_mass,error\n")
        for r in rows:
            tb = "%.17g" % r.t_blowup if r.t_blowup is not None else ""
            cm = "%.17g" % r.concentrated_mass if r.concentrated_mass is not None else ""
            f.write(
                f"{r.parameter},{'%.17g' % r.value},{r.verdict or ''},{tb},{cm},"
                f"\"{r.error}\"\n"
            )
    return rows


def find_verdict_transition(config: ExperimentConfig, lo: float, hi: float,
                            parameter: str = "datum.mass",
                            width: float = 0.5 * math.pi,
                            output_dir=None) -> tuple[float, float]:
    """Bisect the verdict transition of ``parameter`` to a bracket <= width.

    ``lo`` must run to horizon and ``hi`` must blow up; both are verified.
    """
    import tempfile

    own = output_dir is None
    out = Path(tempfile.mkdtemp(prefix="kslab-bisect-")) if own else Path(output_dir)

    def verdict_at(v):
        cfg = _set_parameter(config, parameter, v)
        art = run_experiment(cfg, out / cfg.name)
        return art.report.verdict

    from .diagnostics import VERDICT_BLEWUP

    if verdict_at(lo) == VERDICT_BLEWUP:
        raise ConfigError(f"lower endpoint {lo} already blows up")
    if verdict_at(hi) != VERDICT_BLEWUP:
        raise ConfigError(f"upper endpoint {hi} does not blow up")
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if verdict_at(mid) == VERDICT_BLEWUP:
            hi = mid
        else:
            lo = mid
    return lo, hi


# ---------------------------------------------------------------------------
# static verification suite
# ---------------------------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _check_psi_inequality(n_points: int = 100_000) -> CheckResult:
    from scipy.stats import qmc

    worst = np.inf
    violations = 0
    for d in (2, 3, 4, 5):
        sampler = qmc.Sobol(d=d, scramble=True, seed=DEFAULT_B_SEED)
        pow2 = int(math.ceil(math.log2(n_points)))
        x = (2.0 * sampler.random_base2(pow2)[:n_points] - 1.0) * 1.5
        margin = psi_laplacian(x, d) + ((d + 2) ** 2 / 2.0) * psi_eval(x)
        violations += int(np.count_nonzero(margin < 0.0))
        worst = min(worst, float(np.min(margin)))
    return CheckResult(
        name="weight-laplacian-inequality",
        passed=violations == 0,
        detail=f"{violations} violations over {n_points} pts x 4 dims, min margin {worst:.3e}",
    )


def _check_distribution_identity() -> CheckResult:
    rng = np.random.default_rng(DEFAULT_B_SEED)
    worst = 0.0
    for _ in range(50):
        d = int(rng.integers(2, 5))
        n_modes = int(rng.integers(1, 4))
        amps = rng.uniform(0.1, 2.0, n_modes)
        cents = rng.uniform(0.0, 2.0, n_modes)
        wids = rng.uniform(0.2, 1.0, n_modes)
        R = float(rng.uniform(2.0, 6.0))

        def omega(r, amps=amps, cents=cents, wids=wids):
            out = np.zeros_like(r)
            for a, c, w in zip(amps, cents, wids):
                out += a * np.exp(-((r - c) ** 2) / (2.0 * w**2))
            return out

        lhs, rhs = distribution_identity_check(omega, R, d)
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    return CheckResult(
        name="distribution-function-identity",
        passed=worst < 1e-6,
        detail=f"max relative error {worst:.3e} over 50 random densities (tol 1e-6)",
    )


def _check_radial_drift_identity() -> CheckResult:
    """Radial Poisson identity grad v . x = -M(|x|)/(2 pi) on the 2D solver."""
    spec = DatumSpec(kind="gaussian", mass=6.0 * math.pi, d=2, sigma=0.5)
    faces = polar_faces(1024, 12.0, 1e-3)
    st = make_polar_datum(spec, faces, 4, 1)
    pot = solve_potential(st)
    r_c = st.r_centers
    Q = st.cumulative_mass()
    Q_c = np.interp(r_c, st.r_faces, Q)
    lhs = pot.dv_dr[:, 0] * r_c
    rhs = -Q_c / (2.0 * math.pi)
    scale = np.max(np.abs(rhs))
    err = np.abs(lhs - rhs)[1:] / scale  # away from the origin cell
    worst = float(np.max(err))
    return CheckResult(
        name="radial-drift-identity",
        passed=worst < 1e-3,
        detail=f"max relative error {worst:.3e} away from origin cell (tol 1e-3)",
    )


def _check_genbl_side_conditions() -> CheckResult:
    B = estimate_B().B
    rng = np.random.default_rng(DEFAULT_B_SEED)
    bad = 0
    for _ in range(100):
        M = 8.0 * math.pi * float(rng.uniform(1.001, 4.0))
        eps = float(rng.uniform(1e-6, 1.0)) * (M - 8.0 * math.pi)
        p = genbl_parameters(M, eps, B)
        if not (p.gamma < p.eta and p.eta**2 <= 0.5):
            bad += 1
    return CheckResult(
        name="parameter-cascade-side-conditions",
        passed=bad == 0,
        detail=f"{bad} violations over 100 admissible (M, eps) samples, B = {B:.4g}",
    )


def _check_blowup_constants() -> CheckResult:
    c2 = abs(blowup_constant(2) - 8.0 * math.pi)
    c3 = abs(blowup_constant(3) - 25.0 * math.pi)
    worst = max(c2 / (8.0 * math.pi), c3 / (25.0 * math.pi))
    return CheckResult(
        name="blowup-constants",
        passed=worst < 1e-12,
        detail=f"max relative deviation {worst:.3e} (tol 1e-12)",
    )


def verify_static() -> list[CheckResult]:
    """Execute the full static identity/inequality suite."""
    return [
        _check_psi_inequality(),
        _check_distribution_identity(),
        _check_radial_drift_identity(),
        _check_genbl_side_conditions(),
        _check_blowup_constants(),
    ]


# ---------------------------------------------------------------------------
# run summaries
# ---------------------------------------------------------------------------


def summarize_run(run_dir) -> dict:
    """Summarize a completed run directory (verdict, extrema, fits)."""
    run_dir = Path(run_dir)
    report_path = run_dir / "report.json"
    csv_path = run_dir / "diagnostics.csv"
    manifest_path = run_dir / "manifest.json"
    for p in (report_path, csv_path, manifest_path):
        if not p.exists():
            raise FileNotFoundError(f"missing run artifact: {p}")
    report = BlowupReport.from_json(report_path)
    cols = DiagnosticsSeries.read_csv(csv_path)
    with open(manifest_path) as f:
        manifest = json.load(f)

    res_cols = [c for c in cols if c.startswith("residual_R_")]
    res = np.concatenate([cols[c] for c in res_cols]) if res_cols else np.array([np.nan])
    res = res[np.isfinite(res)]
    summary = {
        "verdict": report.verdict,
        "t_blowup": report.t_blowup,
        "t_final": float(cols["t"][-1]),
        "concentrated_mass": report.concentrated_mass,
        "concentrated_mass_over_8pi": (
            report.concentrated_mass / (8.0 * math.pi)
            if report.concentrated_mass is not None
            else None
        ),
        "rho_probe": report.rho_probe,
        "classification_margin": report.classification_margin,
        "sup_u_initial": float(cols["sup_u"][0]),
        "sup_u_final": float(cols["sup_u"][-1]),
        "sup_u_trend": "growing" if cols["sup_u"][-1] > cols["sup_u"][0] else "decaying",
        "mass_drift": float(np.max(np.abs(cols["mass_total"] - cols["mass_total"][0]))),
        "residual_min": float(np.min(res)) if res.size else None,
        "residual_max": float(np.max(res)) if res.size else None,
        "config_hash": manifest.get("config_hash"),
    }
    H = cols["annulus_mass"]
    t = cols["t"]
    pos = H > 0.0
    if np.count_nonzero(pos) >= 3:
        from .analysis import fit_exponential_lower_bound

        k0 = int(np.argmax(H))
        tail_t, tail_H = t[k0:], H[k0:]
        if np.count_nonzero(tail_H > 0.0) >= 3:
            fit = fit_exponential_lower_bound(tail_t, tail_H)
            summary["annulus_decay_C_hat"] = fit.C_hat
            summary["annulus_fit_r_squared"] = fit.r_squared
    return summary


# ---------------------------------------------------------------------------
# canned experiments
# ---------------------------------------------------------------------------


def canned_config(name: str) -> ExperimentConfig:
    """Return one of the shipped experiment configurations by name."""
    if name not in CANNED_CONFIGS:
        raise ConfigError(
            f"name: unknown canned config {name!r}; choose from {sorted(CANNED_CONFIGS)}"
        )
    return ExperimentConfig.from_dict(copy.deepcopy(CANNED_CONFIGS[name]))


CANNED_CONFIGS = {
    # supercritical mass in d = 2: blows up with ~8 pi concentrated at the core
    "radial_supercritical_d2": {
        "name": "radial_supercritical_d2",
        "solver": "radial",
        "d": 2,
        "datum": {"kind": "gaussian", "mass": 12.0 * math.pi, "d": 2, "sigma": 0.5},
        "n_r": 2048,
        "expected_verdict": "blew-up",
    },
    # subcritical mass: global solution, runs to the 50 t_scale horizon
    "radial_subcritical_d2": {
        "name": "radial_subcritical_d2",
        "solver": "radial",
        "d": 2,
        "datum": {"kind": "gaussian", "mass": 6.0 * math.pi, "d": 2, "sigma": 0.5},
        # diffusion-dominated horizon run: a coarser grid keeps the long
        # 50 t_scale integration cheap without affecting the verdict
        "n_r": 1024,
        "expected_verdict": "ran-to-horizon",
    },
    # d = 3: concentration above 1.2 C_3 forces blowup (sufficient condition)
    "radial_supercritical_d3": {
        "name": "radial_supercritical_d3",
        "solver": "radial",
        "d": 3,
        "datum": {"kind": "gaussian", "mass": 200.0, "d": 3, "sigma": 0.3},
        "n_r": 2048,
        "expected_verdict": "blew-up",
    },
    # 8-fold ring of bumps above 8 pi: merges and collapses at the origin
    "nsym2d_ring_n8": {
        "name": "nsym2d_ring_n8",
        "solver": "nsym2d",
        "d": 2,
        "symmetry_order": 8,
        "datum": {
            "kind": "n_bumps",
            "mass": 10.0 * math.pi,
            "d": 2,
            "ring_radius": 0.8,
            "ring_width": 0.5,
            "n_bumps": 8,
        },
        "n_r": 512,
        "n_theta": 12,
        # a compact domain keeps the explicit-advection step count tractable,
        # and the fine relative grading (about 3% per cell, r_1 = 1e-6) lets
        # the CFL step cross the detection threshold while mass is still
        # accreting supercritically, before the slow critical-core asymptotics
        "r_max": 6.0,
        "r_min_frac": 1.667e-7,
        "cfl": 0.45,
        "dt_max_factor": 0.005,
        "annulus_delta": 0.2,
        "expected_verdict": "blew-up",
    },
}
