"""Functionals on densities and trajectories.

Local moments w_R, the scale-invariant concentration functional, Morrey-norm
estimates, second moments, annulus masses, the moment-inequality residual
along recorded trajectories, blowup classification, and the explicit
parameter cascade (eta, alpha, lambda, gamma).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import betainc

from .errors import ConfigError
from .grids import PolarState, RadialState
from .weights import blowup_constant, phi_eval, psi_radial, sphere_area

__all__ = [
    "ConcentrationProfile",
    "MorreyEstimate",
    "GenblParams",
    "DatumClassification",
    "default_probe_radii",
    "local_moment",
    "radial_concentration",
    "morrey_estimate",
    "second_moment",
    "concentrated_mass",
    "annulus_moment",
    "distribution_identity_check",
    "moment_inequality_residual",
    "genbl_parameters",
    "classify_datum",
    "fit_exponential_lower_bound",
]


# ---------------------------------------------------------------------------
# quadrature helpers
# ---------------------------------------------------------------------------


def _stieltjes_moment(state: RadialState, weight: Callable[[np.ndarray], np.ndarray]) -> float:
    """Midpoint Stieltjes integral of a radial weight against dQ."""
    mids = 0.5 * (state.r[:-1] + state.r[1:])
    return float(np.sum(weight(mids) * np.diff(state.Q)))


def _stieltjes_moment_trap(state: RadialState, weight) -> float:
    """Trapezoid variant; the spread against the midpoint value estimates
    the quadrature error."""
    w = weight(state.r)
    return float(np.sum(0.5 * (w[:-1] + w[1:]) * np.diff(state.Q)))


def _polar_moment(state: PolarState, weight) -> float:
    """Full-plane integral of weight(|x|) * u for a sector state."""
    w = weight(state.r_centers)
    return state.N * float(np.sum(w[:, None] * state.u * state.cell_areas[:, None]))


def _moment_pair(state, weight):
    """(midpoint, companion) quadratures of a radial weight against the state."""
    if isinstance(state, RadialState):
        return _stieltjes_moment(state, weight), _stieltjes_moment_trap(state, weight)
    if isinstance(state, PolarState):
        v = _polar_moment(state, weight)
        return v, v
    raise ConfigError(f"unsupported state type {type(state).__name__}")


# ---------------------------------------------------------------------------
# local moments and concentration
# ---------------------------------------------------------------------------


def local_moment(state, R: float) -> float:
    """w_R = integral of psi(x/R) against the density."""
    if R <= 0.0:
        raise ConfigError(f"probe radius must be positive, got {R}")
    return _moment_pair(state, lambda s: psi_radial(s / R))[0]


def local_moment_with_error(state, R: float) -> tuple[float, float]:
    """w_R together with a quadrature-error estimate."""
    mid, trap = _moment_pair(state, lambda s: psi_radial(s / R))
    return mid, abs(mid - trap)


def default_probe_radii(r: np.ndarray, ratio: float = 2.0**0.25) -> np.ndarray:
    """Quarter-octave geometric probe set spanning [4 r_1, R_max]."""
    lo, hi = 4.0 * r[1], r[-1]
    n = max(2, int(math.floor(math.log(hi / lo) / math.log(ratio))) + 1)
    return lo * ratio ** np.arange(n)


@dataclass(frozen=True)
class ConcentrationProfile:
    """Scan of c(R) = R^(2-d) w_R over a probe set."""

    probe_radii: np.ndarray
    values: np.ndarray
    sup_value: float
    argmax_radius: float

    def __post_init__(self):
        if self.probe_radii.size == 0:
            raise ConfigError("probe set must be non-empty")


def radial_concentration(state, d: Optional[int] = None, probe_radii=None) -> ConcentrationProfile:
    """Concentration functional sup_R R^(2-d) w_R over a geometric probe set."""
    if d is None:
        d = state.d if isinstance(state, RadialState) else 2
    if probe_radii is None:
        if isinstance(state, RadialState):
            probe_radii = default_probe_radii(state.r)
        else:
            probe_radii = default_probe_radii(state.r_faces)
    probe_radii = np.asarray(probe_radii, dtype=float)
    if probe_radii.size == 0:
        raise ConfigError("probe set must be non-empty")
    vals = np.array([R ** (2 - d) * local_moment(state, R) for R in probe_radii])
    k = int(np.argmax(vals))
    return ConcentrationProfile(
        probe_radii=probe_radii,
        values=vals,
        sup_value=float(vals[k]),
        argmax_radius=float(probe_radii[k]),
    )


# ---------------------------------------------------------------------------
# Morrey estimate
# ---------------------------------------------------------------------------


def _cap_fraction(cos_t: np.ndarray, d: int) -> np.ndarray:
    """Fraction of the unit sphere in R^d with polar angle <= arccos(cos_t)."""
    cos_t = np.clip(cos_t, -1.0, 1.0)
    sin2 = 1.0 - cos_t**2
    half = 0.5 * betainc((d - 1) / 2.0, 0.5, np.clip(sin2, 0.0, 1.0))
    return np.where(cos_t >= 0.0, half, 1.0 - half)


def _radial_ball_mass(state: RadialState, c: float, R: float) -> float:
    """Mass of B(c e_1, R) for a radial density (c = center offset)."""
    if c == 0.0:
        return float(np.interp(R, state.r, state.Q))
    r = 0.5 * (state.r[:-1] + state.r[1:])
    frac = np.zeros_like(r)
    inside = R >= r + c
    shell = (~inside) & (R > np.abs(r - c))
    frac[inside] = 1.0
    rs = r[shell]
    cos_t = (rs**2 + c**2 - R**2) / (2.0 * rs * c)
    frac[shell] = _cap_fraction(cos_t, state.d)
    return float(np.sum(frac * np.diff(state.Q)))


@dataclass(frozen=True)
class MorreyEstimate:
    """Discretized sup over centers and radii of R^(2-d) * ball mass."""

    p: float
    value: float
    argmax_center: float
    argmax_radius: float


def morrey_estimate(state, d: Optional[int] = None, centers=None, radii=None) -> MorreyEstimate:
    """Estimate the M^{d/2} norm by a coarse scan over (center, radius).

    Radial inputs restrict centers to one axis; 2D sector inputs scan cell
    centers of the sector (enough by symmetry).
    """
    if isinstance(state, RadialState):
        if d is None:
            d = state.d
        if radii is None:
            radii = default_probe_radii(state.r, ratio=2.0**0.5)
        if centers is None:
            centers = np.concatenate([[0.0], default_probe_radii(state.r, ratio=2.0**0.5)])
        best, bc, br = -np.inf, 0.0, 0.0
        for c in centers:
            for R in radii:
                v = R ** (2 - d) * _radial_ball_mass(state, float(c), float(R))
                if v > best:
                    best, bc, br = v, float(c), float(R)
        return MorreyEstimate(p=d / 2.0, value=float(best), argmax_center=bc, argmax_radius=br)

    if isinstance(state, PolarState):
        d = 2
        if radii is None:
            radii = default_probe_radii(state.r_faces, ratio=2.0**0.5)
        radii = np.sort(np.asarray(radii, dtype=float))
        r_c = state.r_centers
        # replicate the sector to the full circle once, scan centers coarsely
        n_rep = state.N * state.n_theta
        theta_full = (np.arange(n_rep) + 0.5) * (2.0 * math.pi / n_rep)
        u_full = np.tile(state.u, (1, state.N))
        area = state.cell_areas
        xs = r_c[:, None] * np.cos(theta_full[None, :])
        ys = r_c[:, None] * np.sin(theta_full[None, :])
        m_cell = (u_full * area[:, None]).ravel()
        xs, ys = xs.ravel(), ys.ravel()
        step_r = max(1, state.n_r // 24)
        step_t = max(1, state.n_theta // 8)
        cx = [0.0]
        cy = [0.0]
        for j in range(0, state.n_r, step_r):
            for k in range(0, state.n_theta, step_t):
                cx.append(r_c[j] * math.cos(state.theta[k]))
                cy.append(r_c[j] * math.sin(state.theta[k]))
        best, bc, br = -np.inf, 0.0, 0.0
        for x0, y0 in zip(cx, cy):
            dist = np.hypot(xs - x0, ys - y0)
            order = np.argsort(dist)
            cum = np.cumsum(m_cell[order])
            masses = np.interp(radii, dist[order], cum, left=0.0)
            vals = masses  # d = 2: R^0 prefactor
            k = int(np.argmax(vals))
            if vals[k] > best:
                best, bc, br = float(vals[k]), math.hypot(x0, y0), float(radii[k])
        return MorreyEstimate(p=1.0, value=best, argmax_center=bc, argmax_radius=br)

    raise ConfigError(f"unsupported state type {type(state).__name__}")


# ---------------------------------------------------------------------------
# plain moments
# ---------------------------------------------------------------------------


def second_moment(state) -> float:
    """Integral of |x|^2 against the density."""
    return _moment_pair(state, lambda s: s**2)[0]


def concentrated_mass(state, rho: float) -> float:
    """Mass inside the ball of radius rho."""
    if rho < 0.0:
        raise ConfigError(f"probe radius must be non-negative, got {rho}")
    if isinstance(state, RadialState):
        if rho > state.r_max:
            return state.mass
        return float(np.interp(rho, state.r, state.Q))
    if isinstance(state, PolarState):
        Q = state.cumulative_mass()
        if rho > state.r_faces[-1]:
            return float(Q[-1])
        return float(np.interp(rho, state.r_faces, Q))
    raise ConfigError(f"unsupported state type {type(state).__name__}")


def annulus_moment(state, delta: float, plateau_end: float) -> float:
    """H = integral of phi(|x|/delta) u, with plateau [delta, delta*plateau_end].

    The weight vanishes inside delta/2 and outside 3*delta*plateau_end.
    """
    if delta <= 0.0:
        raise ConfigError(f"delta must be positive, got {delta}")
    return _moment_pair(state, lambda s: phi_eval(s / delta, plateau_end))[0]


# ---------------------------------------------------------------------------
# identities
# ---------------------------------------------------------------------------


def distribution_identity_check(
    omega: Callable[[np.ndarray], np.ndarray], R: float, d: int, n_quad: int = 200001
) -> tuple[float, float]:
    """Two independent quadratures of the distribution-function identity.

    lhs = integral over {|x| <= R} of omega(|x|) M(|x|) dx, rhs = M(R)^2 / 2,
    with M the cumulative mass of omega.  Both are computed from the density
    alone on a dense uniform grid.
    """
    sigma = sphere_area(d)
    r = np.linspace(0.0, R, n_quad)
    w = np.asarray(omega(r), dtype=float)
    shell = sigma * r ** (d - 1) * w
    h = r[1] - r[0]
    M = np.concatenate([[0.0], np.cumsum(0.5 * (shell[1:] + shell[:-1]) * h)])
    lhs = float(np.trapezoid(shell * M, r))
    rhs = 0.5 * float(M[-1]) ** 2
    return lhs, rhs


# ---------------------------------------------------------------------------
# moment-inequality residual along a trajectory
# ---------------------------------------------------------------------------


def moment_inequality_residual(
    t: np.ndarray,
    w: np.ndarray,
    R: float,
    d: int,
    w_quad_err: Optional[np.ndarray] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Residual of the differential inequality satisfied by w_R(t).

    residual(t) = dw/dt - [ -((d+2)^2/2) R^-2 w + (2/sigma_d) R^-d w^2 ]
    evaluated at interior record times by centered differences.  Returns
    (residual, tol) where tol combines the time-differencing error estimate
    (spread of the one-sided difference quotients) with the propagated
    quadrature error of w itself.  For exact radial solutions residual >= -tol.
    """
    t = np.asarray(t, dtype=float)
    w = np.asarray(w, dtype=float)
    if t.size < 3:
        raise ConfigError("need at least 3 recorded times for differencing")
    sigma = sphere_area(d)
    dt_m = t[1:-1] - t[:-2]
    dt_p = t[2:] - t[1:-1]
    fwd = (w[2:] - w[1:-1]) / dt_p
    bwd = (w[1:-1] - w[:-2]) / dt_m
    # nonuniform centered difference
    dwdt = (dt_m * fwd + dt_p * bwd) / (dt_m + dt_p)
    wc = w[1:-1]
    rhs = -((d + 2) ** 2 / 2.0) * wc / R**2 + (2.0 / sigma) * wc**2 / R**d
    residual = dwdt - rhs
    tol_diff = 0.5 * np.abs(fwd - bwd)
    if w_quad_err is None:
        qe = 1e-10 * np.max(np.abs(w)) * np.ones_like(wc)
    else:
        qe = np.asarray(w_quad_err, dtype=float)[1:-1]
    drhs_dw = np.abs(-((d + 2) ** 2 / 2.0) / R**2 + (4.0 / sigma) * wc / R**d)
    tol_quad = qe * drhs_dw + 2.0 * qe / np.minimum(dt_m, dt_p)
    return residual, tol_diff + tol_quad


# ---------------------------------------------------------------------------
# explicit parameter cascade
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GenblParams:
    """Parameters of the uniform blowup-time construction (d = 2)."""

    M: float
    eps: float
    B: float
    eta: float
    alpha: float
    lam: float
    gamma: float

    @property
    def gamma_sq(self) -> float:
        return self.gamma**2


def genbl_parameters(M: float, eps: float, B: float) -> GenblParams:
    """eta = eps/(100 M^2 B), alpha = 1/(100 M B), lam = 100 M^2 B/eps + 1,
    gamma^2 = alpha eta^2 eps / (2 M B)."""
    if M <= 8.0 * math.pi:
        raise ConfigError(f"total mass must exceed 8*pi, got {M}")
    if not (0.0 < eps <= M - 8.0 * math.pi):
        raise ConfigError(
            f"excess eps must lie in (0, M - 8*pi] = (0, {M - 8 * math.pi:.6g}], got {eps}"
        )
    if B < 1.0:
        raise ConfigError(f"weight constant B must be >= 1, got {B}")
    eta = eps / (100.0 * M**2 * B)
    alpha = 1.0 / (100.0 * M * B)
    lam = 100.0 * M**2 * B / eps + 1.0
    gamma_sq = alpha * eta**2 * eps / (2.0 * M * B)
    return GenblParams(M=M, eps=eps, B=B, eta=eta, alpha=alpha, lam=lam, gamma=math.sqrt(gamma_sq))


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DatumClassification:
    """Sufficient-condition flag: concentration above C_d forces blowup.

    Below-threshold says nothing for d >= 3 (small-mass blowup exists).
    """

    above_threshold: bool
    margin: float
    concentration: float
    argmax_radius: float
    threshold: float


def classify_datum(state, d: Optional[int] = None, probe_radii=None) -> DatumClassification:
    prof = radial_concentration(state, d=d, probe_radii=probe_radii)
    if d is None:
        d = state.d if isinstance(state, RadialState) else 2
    C_d = blowup_constant(d)
    return DatumClassification(
        above_threshold=prof.sup_value > C_d,
        margin=prof.sup_value - C_d,
        concentration=prof.sup_value,
        argmax_radius=prof.argmax_radius,
        threshold=C_d,
    )


# ---------------------------------------------------------------------------
# exponential lower-bound fit for annulus masses
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExponentialFit:
    """Least-squares fit of log H(t) = log H(0) - C_hat * t."""

    C_hat: float
    r_squared: float
    C_envelope: float  # smallest C such that H(t) >= H(0) exp(-C t) holds


def fit_exponential_lower_bound(t: np.ndarray, H: np.ndarray) -> ExponentialFit:
    t = np.asarray(t, dtype=float)
    H = np.asarray(H, dtype=float)
    ok = H > 0.0
    if np.count_nonzero(ok) < 3:
        raise ConfigError("need at least 3 positive samples to fit")
    t, H = t[ok], H[ok]
    y = np.log(H)
    A = np.stack([np.ones_like(t), t], axis=-1)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    fitted = A @ coef
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0
    pos = t > t[0]
    env = float(np.max((y[0] - y[pos]) / (t[pos] - t[0]))) if np.any(pos) else 0.0
    return ExponentialFit(C_hat=float(-coef[1]), r_squared=r2, C_envelope=max(env, 0.0))
