"""Weight functions used by the moment functionals.

The bump weight ``psi(x) = (1 - |x|^2)^2`` on the unit ball drives the local
moments ``w_R``; the annulus weight ``phi`` measures mass trapped between two
radii.  Everything here is a pure function of its arguments.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DimConstants",
    "sphere_area",
    "blowup_constant",
    "psi_eval",
    "psi_radial",
    "psi_grad",
    "psi_laplacian",
    "phi_eval",
    "phi_deriv",
    "estimate_B",
    "BEstimate",
]


def sphere_area(d: int) -> float:
    """Area of the unit sphere in d dimensions, 2*pi^(d/2)/Gamma(d/2)."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def blowup_constant(d: int) -> float:
    """Radial-concentration threshold (d+2)^2 * sigma_d / 4 above which
    radial solutions cannot stay classical."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    return (d + 2) ** 2 * sphere_area(d) / 4.0


@dataclass(frozen=True)
class DimConstants:
    """Dimension-dependent constants bundled for convenience."""

    d: int
    sigma_d: float
    C_d: float

    @classmethod
    def for_dimension(cls, d: int) -> "DimConstants":
        return cls(d=d, sigma_d=sphere_area(d), C_d=blowup_constant(d))


def psi_radial(s):
    """psi as a function of the radius |x| (scale 1)."""
    s = np.asarray(s, dtype=float)
    out = np.where(s <= 1.0, (1.0 - s * s) ** 2, 0.0)
    if out.ndim == 0:
        return float(out)
    return out


def psi_eval(x, R: float = 1.0):
    """Evaluate psi_R(x) = (1 - |x/R|^2)^2 for |x| <= R, 0 outside.

    ``x`` is a point (or array of points, last axis = coordinates) in R^d.
    """
    if R <= 0.0:
        raise ValueError(f"scale R must be positive, got {R}")
    x = np.asarray(x, dtype=float) / R  # scale first: psi_R(x) == psi(x/R) exactly
    s = np.linalg.norm(x, axis=-1) if x.ndim > 0 else np.abs(x)
    return psi_radial(s)


def psi_grad(x, R: float = 1.0):
    """Gradient of psi_R: -4 x/R^2 (1 - |x/R|^2) inside the ball, 0 outside."""
    if R <= 0.0:
        raise ValueError(f"scale R must be positive, got {R}")
    x = np.asarray(x, dtype=float)
    s2 = np.sum((x / R) ** 2, axis=-1)
    factor = np.where(s2 <= 1.0, -4.0 * (1.0 - s2), 0.0) / R**2
    return factor[..., None] * x


def psi_laplacian(x, d: int, R: float = 1.0):
    """Laplacian of psi_R: (-4d + 4(d+2)|x/R|^2)/R^2 inside the ball."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    if R <= 0.0:
        raise ValueError(f"scale R must be positive, got {R}")
    x = np.asarray(x, dtype=float)
    if x.ndim > 0 and x.shape[-1] == d:
        s2 = np.sum((x / R) ** 2, axis=-1)
    else:  # radius given directly
        s2 = (x / R) ** 2
    out = np.where(s2 <= 1.0, (-4.0 * d + 4.0 * (d + 2) * s2) / R**2, 0.0)
    if out.ndim == 0:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# Annulus weight phi
#
# Piecewise definition on s >= 0, with plateau [1, R] and support [1/2, 3R]:
#   0              s <= 1/2
#   (2s-1)^2       1/2 <= s <= 3/4
#   hermite fill   3/4 <= s <= 1      (1/4 -> 1, slopes 2 -> 0)
#   1              1 <= s <= R
#   hermite fill   R <= s <= 2R       (1 -> 1/4, slopes 0 -> -1/(2R))
#   (1-(s-R)/2R)^2 2R <= s <= 3R
#   0              s >= 3R
# The two Hermite fills are monotone (slopes lie inside the Fritsch-Carlson
# region), so phi increases on [0, R] and decreases on [R, 3R].
# ---------------------------------------------------------------------------


def _hermite(s, a, b, fa, fb, da, db):
    """Cubic Hermite on [a, b] with endpoint values/derivatives."""
    h = b - a
    t = (s - a) / h
    h00 = (1 + 2 * t) * (1 - t) ** 2
    h10 = t * (1 - t) ** 2
    h01 = t * t * (3 - 2 * t)
    h11 = t * t * (t - 1)
    return h00 * fa + h10 * h * da + h01 * fb + h11 * h * db


def _hermite_deriv(s, a, b, fa, fb, da, db):
    h = b - a
    t = (s - a) / h
    d00 = 6 * t * (t - 1) / h
    d10 = (1 - t) * (1 - 3 * t)
    d01 = -6 * t * (t - 1) / h
    d11 = t * (3 * t - 2)
    return d00 * fa + d10 * da + d01 * fb + d11 * db


def _check_phi_args(R: float) -> None:
    if R < 4.0:
        raise ValueError(f"plateau end R must be >= 4, got {R}")


def phi_eval(s, R: float):
    """Annulus weight phi(s) with plateau [1, R] and support [1/2, 3R]."""
    _check_phi_args(R)
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)

    m = (s >= 0.5) & (s <= 0.75)
    out = np.where(m, (2.0 * s - 1.0) ** 2, out)
    m = (s > 0.75) & (s < 1.0)
    out = np.where(m, _hermite(s, 0.75, 1.0, 0.25, 1.0, 2.0, 0.0), out)
    m = (s >= 1.0) & (s <= R)
    out = np.where(m, 1.0, out)
    m = (s > R) & (s < 2.0 * R)
    out = np.where(m, _hermite(s, R, 2.0 * R, 1.0, 0.25, 0.0, -0.5 / R), out)
    m = (s >= 2.0 * R) & (s <= 3.0 * R)
    out = np.where(m, (1.0 - (s - R) / (2.0 * R)) ** 2, out)
    if out.ndim == 0:
        return float(out)
    return out


def phi_deriv(s, R: float):
    """First derivative of phi (piecewise analytic)."""
    _check_phi_args(R)
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)

    m = (s >= 0.5) & (s <= 0.75)
    out = np.where(m, 4.0 * (2.0 * s - 1.0), out)
    m = (s > 0.75) & (s < 1.0)
    out = np.where(m, _hermite_deriv(s, 0.75, 1.0, 0.25, 1.0, 2.0, 0.0), out)
    m = (s > R) & (s < 2.0 * R)
    out = np.where(m, _hermite_deriv(s, R, 2.0 * R, 1.0, 0.25, 0.0, -0.5 / R), out)
    m = (s >= 2.0 * R) & (s <= 3.0 * R)
    out = np.where(m, -(1.0 - (s - R) / (2.0 * R)) / R, out)
    if out.ndim == 0:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# Numerical estimation of the Lipschitz-type constant B for psi (d = 2)
#
# B >= 1 must satisfy, for all x, y in R^2 and each delta in (0, 1):
#   (a) |psi(x) - 1| <= B |x|^2
#   (b) |grad psi(x) - grad psi(y) + 4(x - y)| <= B delta |x - y|,  |x|,|y| <= delta
#   (c) |(x - y).(grad psi(x) - grad psi(y))| <= B min(|x-y|^2, |x-y|)
# ---------------------------------------------------------------------------

DEFAULT_B_SEED = 20240817


@dataclass(frozen=True)
class BEstimate:
    """Estimated weight constant with its per-inequality suprema."""

    B: float
    sup_quadratic: float  # inequality (a)
    sup_gradient_delta: float  # inequality (b), max over the delta scan
    sup_bilinear: float  # inequality (c)
    sample_count: int
    seed: int


def _pair_ratio_bilinear(x, y):
    """|(x-y).(grad psi(x)-grad psi(y))| / min(|x-y|^2, |x-y|) for 2D samples."""
    gx = psi_grad(x)
    gy = psi_grad(y)
    dxy = x - y
    num = np.abs(np.sum(dxy * (gx - gy), axis=-1))
    dist2 = np.sum(dxy * dxy, axis=-1)
    dist = np.sqrt(dist2)
    denom = np.minimum(dist2, dist)
    ok = denom > 1e-14
    return num[ok] / denom[ok]


def estimate_B(sample_count: int = 10**6, seed: int = DEFAULT_B_SEED) -> BEstimate:
    """Estimate the smallest admissible B by sampling, inflated by 5%.

    Point pairs are drawn uniformly from the disk of radius 4; a deterministic
    radial scan sharpens the suprema that are attained on near-coincident or
    near-boundary configurations.
    """
    if sample_count < 10**4:
        raise ValueError(f"sample_count must be >= 1e4, got {sample_count}")
    rng = np.random.default_rng(seed)

    # (a) sup |psi - 1| / s^2: scan radii densely, sup = 2 - s^2 -> 2 at 0.
    # radii below 1e-4 are excluded: there 1 - psi cancels catastrophically
    # in double precision while the true quotient is already within 1e-8 of
    # its supremum 2
    s = np.concatenate([np.geomspace(1e-4, 4.0, 20000), rng.uniform(0.0, 4.0, sample_count // 10)])
    s = s[s > 1e-4]
    sup_a = float(np.max(np.abs(psi_radial(s) - 1.0) / s**2))

    # (b) scan delta in {0.1, ..., 0.9}.  Inside the unit ball
    # grad psi + 4x = 4 x |x|^2, so the ratio reduces to a Lipschitz
    # quotient of that cubic field.
    sup_b = 0.0
    n_b = max(sample_count // 9, 10**4)
    for delta in np.arange(0.1, 0.95, 0.1):
        r = delta * np.sqrt(rng.uniform(0.0, 1.0, (n_b, 2)))
        ang = rng.uniform(0.0, 2.0 * math.pi, (n_b, 2))
        x = np.stack([r[:, 0] * np.cos(ang[:, 0]), r[:, 0] * np.sin(ang[:, 0])], axis=-1)
        y = np.stack([r[:, 1] * np.cos(ang[:, 1]), r[:, 1] * np.sin(ang[:, 1])], axis=-1)
        # include near-coincident radial pairs at the boundary of the delta ball
        t = np.linspace(0.5 * delta, delta, 2000)
        xb = np.stack([t, np.zeros_like(t)], axis=-1)
        yb = np.stack([t - 1e-6 * delta, np.zeros_like(t)], axis=-1)
        x = np.concatenate([x, xb])
        y = np.concatenate([y, yb])
        g = 4.0 * x * np.sum(x * x, axis=-1, keepdims=True) - 4.0 * y * np.sum(
            y * y, axis=-1, keepdims=True
        )
        dxy = x - y
        dist = np.linalg.norm(dxy, axis=-1)
        ok = dist > 1e-14
        ratio = np.linalg.norm(g, axis=-1)[ok] / (delta * dist[ok])
        sup_b = max(sup_b, float(np.max(ratio)))

    # (c) random pairs in the disk of radius 4 plus collinear pairs that
    # straddle the support boundary |x| = 1, where the quotient peaks.
    r = 4.0 * np.sqrt(rng.uniform(0.0, 1.0, (sample_count, 2)))
    ang = rng.uniform(0.0, 2.0 * math.pi, (sample_count, 2))
    x = np.stack([r[:, 0] * np.cos(ang[:, 0]), r[:, 0] * np.sin(ang[:, 0])], axis=-1)
    y = np.stack([r[:, 1] * np.cos(ang[:, 1]), r[:, 1] * np.sin(ang[:, 1])], axis=-1)
    sup_c = float(np.max(_pair_ratio_bilinear(x, y)))
    t_in = rng.uniform(0.9, 1.0, 50000)
    t_out = t_in + rng.uniform(0.0, 0.2, 50000)
    x = np.stack([t_in, np.zeros_like(t_in)], axis=-1)
    y = np.stack([t_out, np.zeros_like(t_out)], axis=-1)
    sup_c = max(sup_c, float(np.max(_pair_ratio_bilinear(x, y))))
    # near-coincident interior pairs probe the local curvature bound
    x = np.stack([r[:, 0] * np.cos(ang[:, 0]), r[:, 0] * np.sin(ang[:, 0])], axis=-1)
    y = x + rng.normal(0.0, 1e-5, x.shape)
    sup_c = max(sup_c, float(np.max(_pair_ratio_bilinear(x, y))))

    B = 1.05 * max(1.0, sup_a, sup_b, sup_c)
    return BEstimate(
        B=B,
        sup_quadratic=sup_a,
        sup_gradient_delta=sup_b,
        sup_bilinear=sup_c,
        sample_count=sample_count,
        seed=seed,
    )
