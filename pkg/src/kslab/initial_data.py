"""Initial-datum families with exact prescribed mass and symmetry."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammainc

from .errors import ConfigError
from .grids import PolarState, RadialState
from .weights import sphere_area

__all__ = ["DatumSpec", "make_radial_datum", "make_polar_datum", "rescale_datum", "support_radius"]

KINDS = ("gaussian", "uniform_ball", "ring", "n_bumps", "custom_table")


@dataclass
class DatumSpec:
    """Descriptor of an initial condition.

    kind:
      gaussian      -- isotropic Gaussian at the origin, width ``sigma``
      uniform_ball  -- constant density on the ball of ``radius``
      ring          -- radial Gaussian shell at ``ring_radius``, width ``ring_width``
      n_bumps       -- N isotropic bumps on a ring (2D sector data only)
      custom_table  -- radial density sampled as two columns (r, u)
    """

    kind: str
    mass: float
    d: int = 2
    sigma: float = 0.5
    radius: float = 1.0
    ring_radius: float = 1.5
    ring_width: float = 0.25
    n_bumps: int = 8
    table: Optional[np.ndarray] = None  # shape (m, 2): columns r, u

    def __post_init__(self):
        self.kind = str(self.kind).replace("-", "_")
        if self.kind not in KINDS:
            raise ConfigError(f"datum.kind must be one of {KINDS}, got {self.kind!r}")
        if self.mass <= 0.0:
            raise ConfigError(f"datum.mass must be positive, got {self.mass}")
        if self.d < 2:
            raise ConfigError(f"datum.d must be >= 2, got {self.d}")
        if self.kind == "custom_table":
            if self.table is None:
                raise ConfigError("datum.table is required for kind=custom_table")
            self.table = np.asarray(self.table, dtype=float)
            if self.table.ndim != 2 or self.table.shape[1] != 2:
                raise ConfigError("datum.table must have two columns (r, u)")

    def finest_scale(self) -> float:
        """Smallest length scale that the grid must resolve."""
        if self.kind == "gaussian":
            return self.sigma
        if self.kind == "uniform_ball":
            return self.radius
        if self.kind in ("ring", "n_bumps"):
            return self.ring_width
        r = self.table[:, 0]
        return float(np.min(np.diff(r)[np.diff(r) > 0])) * 8.0


def support_radius(spec: DatumSpec) -> float:
    """Effective support radius of the datum (sets the time scale)."""
    if spec.kind == "gaussian":
        return 4.0 * spec.sigma
    if spec.kind == "uniform_ball":
        return spec.radius
    if spec.kind in ("ring", "n_bumps"):
        return spec.ring_radius + 4.0 * spec.ring_width
    return float(spec.table[-1, 0])


def _check_resolution(spec: DatumSpec, r: np.ndarray, center: float) -> None:
    scale = spec.finest_scale()
    lo, hi = max(0.0, center - 2.0 * scale), center + 2.0 * scale
    h = np.diff(r)
    mids = 0.5 * (r[:-1] + r[1:])
    sel = (mids >= lo) & (mids <= hi)
    if not np.any(sel):
        raise ConfigError(f"grid does not cover the datum scale interval [{lo}, {hi}]")
    h_max = float(np.max(h[sel]))
    if h_max > scale / 8.0:
        raise ConfigError(
            f"under-resolved datum: max cell size {h_max:.3g} exceeds "
            f"scale/8 = {scale / 8.0:.3g} (need >= 8 cells per {scale:.3g})"
        )


def _radial_Q(spec: DatumSpec, r: np.ndarray) -> np.ndarray:
    """Cumulative mass of the datum at the grid nodes (before normalization)."""
    d, M = spec.d, spec.mass
    if spec.kind == "gaussian":
        return M * gammainc(d / 2.0, r**2 / (2.0 * spec.sigma**2))
    if spec.kind == "uniform_ball":
        return M * np.minimum(1.0, (r / spec.radius) ** d)
    if spec.kind == "ring":
        u = np.exp(-((r - spec.ring_radius) ** 2) / (2.0 * spec.ring_width**2))
        integrand = sphere_area(d) * r ** (d - 1) * u
        Q = np.concatenate([[0.0], np.cumsum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(r))])
        return Q
    if spec.kind == "custom_table":
        rt, ut = spec.table[:, 0], spec.table[:, 1]
        if np.any(ut < 0.0):
            raise ConfigError("custom_table density must be non-negative")
        u = np.interp(r, rt, ut, left=ut[0], right=0.0)
        integrand = sphere_area(d) * r ** (d - 1) * u
        return np.concatenate([[0.0], np.cumsum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(r))])
    raise ConfigError(f"datum kind {spec.kind!r} is not radial")


def make_radial_datum(spec: DatumSpec, r: np.ndarray) -> RadialState:
    """Sample the datum on grid ``r`` and renormalize to exact total mass."""
    if spec.kind == "n_bumps":
        raise ConfigError("n_bumps data live on the 2D sector grid; use make_polar_datum")
    center = 0.0 if spec.kind in ("gaussian", "uniform_ball", "custom_table") else spec.ring_radius
    _check_resolution(spec, r, center)
    Q = _radial_Q(spec, r)
    if Q[-1] <= 0.0:
        raise ConfigError("datum has no mass inside the computational domain")
    Q = Q * (spec.mass / Q[-1])
    return RadialState(d=spec.d, r=r, Q=Q, t=0.0)


def _bump_field(r_c, theta, N, a, w):
    """Sum of N isotropic Gaussian bumps of width w on the ring |x| = a,
    evaluated on the sector mesh (values wrap periodically)."""
    rr = r_c[:, None]
    tt = theta[None, :]
    u = np.zeros((r_c.size, theta.size))
    centers = (np.arange(N) + 0.5) * (2.0 * math.pi / N)
    for tc in centers:
        # squared distance between (r, theta) and (a, tc)
        d2 = rr**2 + a**2 - 2.0 * a * rr * np.cos(tt - tc)
        u += np.exp(-d2 / (2.0 * w**2))
    return u


def make_polar_datum(spec: DatumSpec, r_faces: np.ndarray, n_theta: int, N: int) -> PolarState:
    """Sample the datum on the sector grid; sector mass is exactly mass/N."""
    if spec.d != 2:
        raise ConfigError("polar data require d = 2")
    r_c = 0.5 * (r_faces[:-1] + r_faces[1:])
    dtheta = 2.0 * math.pi / N / n_theta
    theta = (np.arange(n_theta) + 0.5) * dtheta

    if spec.kind == "n_bumps":
        if N % spec.n_bumps != 0 and spec.n_bumps % N != 0:
            raise ConfigError(
                f"n_bumps={spec.n_bumps} is incompatible with sector symmetry N={N}"
            )
        _check_resolution(spec, r_faces, spec.ring_radius)
        dtheta_needed = spec.ring_width / spec.ring_radius / 8.0
        if dtheta > dtheta_needed:
            raise ConfigError(
                f"under-resolved angular bump: dtheta {dtheta:.3g} exceeds "
                f"{dtheta_needed:.3g} (need >= 8 cells per angular width)"
            )
        u = _bump_field(r_c, theta, spec.n_bumps, spec.ring_radius, spec.ring_width)
    else:
        # radial kinds: average the radial profile onto cells via node values
        tmp = make_radial_datum(spec, r_faces)
        rho = tmp.density()
        u = np.repeat(0.5 * (rho[:-1] + rho[1:])[:, None], n_theta, axis=1)

    state = PolarState(N=N, r_faces=r_faces, u=u, t=0.0)
    sm = state.sector_mass
    if sm <= 0.0:
        raise ConfigError("datum has no mass inside the computational domain")
    state.u *= (spec.mass / N) / sm
    return state


def rescale_datum(state, lam: float):
    """Scaling map u -> lam^2 u(lam x) applied to a state at t = 0.

    In d = 2 the total mass is preserved; for d >= 3 the mass scales by
    lam^(2-d) (the solver-level scaling analogue).
    """
    if lam <= 0.0:
        raise ConfigError(f"scaling factor must be positive, got {lam}")
    if isinstance(state, RadialState):
        Q_new = lam ** (2 - state.d) * np.interp(
            lam * state.r, state.r, state.Q, right=float(state.Q[-1])
        )
        return RadialState(d=state.d, r=state.r.copy(), Q=Q_new, t=state.t)
    if isinstance(state, PolarState):
        r_c = state.r_centers
        prof = np.empty_like(state.u)
        for k in range(state.n_theta):
            prof[:, k] = np.interp(lam * r_c, r_c, state.u[:, k], right=0.0)
        return PolarState(N=state.N, r_faces=state.r_faces.copy(), u=lam**2 * prof, t=state.t)
    raise ConfigError(f"cannot rescale object of type {type(state).__name__}")
