"""Tests for the density/trajectory functionals and the parameter cascade."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kslab.analysis import (
    annulus_moment,
    classify_datum,
    concentrated_mass,
    default_probe_radii,
    distribution_identity_check,
    fit_exponential_lower_bound,
    genbl_parameters,
    local_moment,
    moment_inequality_residual,
    morrey_estimate,
    radial_concentration,
    second_moment,
)
from kslab.errors import ConfigError
from kslab.grids import RadialState, radial_grid
from kslab.initial_data import DatumSpec, make_polar_datum, make_radial_datum, rescale_datum
from kslab.weights import blowup_constant, sphere_area


def _uniform_disk(M=12.0 * math.pi, n=2048):
    r = np.linspace(0.0, 1.0, n + 1)
    return RadialState(d=2, r=r, Q=M * r**2)


def _gaussian_state(M=4.0, sigma=0.5, d=2, n=2048, r_max=8.0):
    return make_radial_datum(
        DatumSpec(kind="gaussian", mass=M, d=d, sigma=sigma), radial_grid(n, r_max)
    )


# ---------------------------------------------------------------------------
# local moments
# ---------------------------------------------------------------------------


def test_local_moment_uniform_disk():
    # closed form: w_1 = M * 2 int_0^1 (1-r^2)^2 r dr = M/3
    M = 12.0 * math.pi
    st_ = _uniform_disk(M)
    assert local_moment(st_, 1.0) == pytest.approx(M / 3.0, rel=1e-6)


def test_local_moment_large_R_approaches_mass():
    st_ = _gaussian_state(M=5.0, sigma=0.1)
    assert local_moment(st_, 200.0) == pytest.approx(5.0, rel=1e-3)


def test_local_moment_scaling_substitution():
    """w_R(u_lambda) = w_{lambda R}(u) in d=2 (change of variables)."""
    st_ = _gaussian_state(M=4.0, sigma=0.4)
    lam = 2.0
    st2 = rescale_datum(st_, lam)
    for R in (0.5, 1.0, 2.0):
        assert local_moment(st2, R) == pytest.approx(local_moment(st_, lam * R), rel=1e-4)


def test_local_moment_validates_radius():
    with pytest.raises(ConfigError):
        local_moment(_uniform_disk(), 0.0)


# ---------------------------------------------------------------------------
# concentration and classification
# ---------------------------------------------------------------------------


def test_concentration_zero_density():
    r = radial_grid(64, 2.0)
    st_ = RadialState(d=2, r=r, Q=np.zeros_like(r))
    prof = radial_concentration(st_)
    assert prof.sup_value == 0.0


def test_concentration_narrow_gaussian_approaches_mass():
    # d=2: psi(x/R) -> 1 on the support as sigma -> 0, so sup -> M
    M = 6.0
    st_ = _gaussian_state(M=M, sigma=1e-3, n=4096, r_max=2.0)
    prof = radial_concentration(st_, probe_radii=np.geomspace(1e-2, 1.0, 30))
    assert prof.sup_value == pytest.approx(M, rel=1e-3)


def test_concentration_scale_invariance():
    """|||u_lambda||| = |||u||| with matched probe grids."""
    st_ = _gaussian_state(M=4.0, sigma=0.4)
    lam = 2.0
    st2 = rescale_datum(st_, lam)
    probes = np.geomspace(0.05, 4.0, 40)
    a = radial_concentration(st_, probe_radii=probes)
    b = radial_concentration(st2, probe_radii=probes / lam)
    assert b.sup_value == pytest.approx(a.sup_value, rel=1e-4)


def test_classify_supercritical_d2():
    st_ = _gaussian_state(M=12.0 * math.pi, sigma=0.5)
    cls = classify_datum(st_)
    assert cls.above_threshold
    assert cls.threshold == pytest.approx(8.0 * math.pi)
    assert cls.margin > 0.0


def test_classify_vacuum():
    r = radial_grid(64, 2.0)
    st_ = RadialState(d=2, r=r, Q=np.zeros_like(r))
    cls = classify_datum(st_)
    assert not cls.above_threshold
    assert cls.margin == pytest.approx(-blowup_constant(2))


def test_classify_d3_scaled_above_threshold():
    """Scale a d=3 Gaussian until the concentration scan crosses 1.2*C_3."""
    st_ = _gaussian_state(M=50.0, sigma=0.5, d=3)
    base = radial_concentration(st_, d=3).sup_value
    # concentration scales linearly in lam for d=3 (R^{-1} w_R under Eq. scale)
    lam = 1.3 * blowup_constant(3) / base
    spec = DatumSpec(kind="gaussian", mass=50.0 * lam, d=3, sigma=0.5)
    st2 = make_radial_datum(spec, radial_grid(2048, 8.0))
    cls = classify_datum(st2, d=3)
    assert cls.concentration >= 1.2 * blowup_constant(3)
    assert cls.above_threshold


# ---------------------------------------------------------------------------
# Morrey estimate
# ---------------------------------------------------------------------------


def test_morrey_dominates_ball_concentration():
    for st_ in (_gaussian_state(M=4.0, sigma=0.5), _uniform_disk(6.0)):
        est = morrey_estimate(st_)
        # plain-ball concentration sup_R R^{2-d} * mass(B_R), d=2
        radii = default_probe_radii(st_.r, ratio=2.0**0.5)
        ball_sup = max(float(np.interp(R, st_.r, st_.Q)) for R in radii)
        assert est.value >= ball_sup - 1e-12


def test_morrey_zero_density():
    r = radial_grid(64, 2.0)
    st_ = RadialState(d=2, r=r, Q=np.zeros_like(r))
    assert morrey_estimate(st_).value == 0.0


def test_morrey_point_mass_d2():
    st_ = _gaussian_state(M=7.0, sigma=1e-3, n=4096, r_max=2.0)
    est = morrey_estimate(st_)
    assert est.value == pytest.approx(7.0, rel=1e-6)


def test_morrey_polar_matches_radial():
    spec = DatumSpec(kind="gaussian", mass=4.0, d=2, sigma=0.5)
    rad = make_radial_datum(spec, radial_grid(2048, 4.0))
    pol = make_polar_datum(spec, radial_grid(128, 4.0, 1e-2), n_theta=32, N=4)
    a = morrey_estimate(rad).value
    b = morrey_estimate(pol).value
    assert b == pytest.approx(a, rel=0.05)


# ---------------------------------------------------------------------------
# plain moments
# ---------------------------------------------------------------------------


def test_second_moment_gaussian():
    # d=2 Gaussian: int |x|^2 u = 2 sigma^2 M
    M, sigma = 5.0, 0.5
    st_ = _gaussian_state(M=M, sigma=sigma)
    assert second_moment(st_) == pytest.approx(2.0 * sigma**2 * M, rel=1e-5)


def test_concentrated_mass_edges():
    st_ = _uniform_disk(4.0)
    assert concentrated_mass(st_, 0.0) == 0.0
    assert concentrated_mass(st_, 5.0) == pytest.approx(4.0)
    assert concentrated_mass(st_, 0.5) == pytest.approx(1.0)  # M r^2 at 1/2


def test_annulus_moment_uniform_density():
    # constant u: annulus moment = u * 2 pi int phi(r/delta) r dr
    u0 = 2.0
    r = np.linspace(0.0, 30.0, 30001)
    st_ = RadialState(d=2, r=r, Q=u0 * math.pi * r**2)
    delta, Rp = 1.0, 4.0
    from kslab.weights import phi_eval

    rr = np.linspace(0.0, 3.0 * Rp * delta, 200001)
    exact = u0 * 2.0 * math.pi * np.trapezoid(phi_eval(rr / delta, Rp) * rr, rr)
    assert annulus_moment(st_, delta, Rp) == pytest.approx(exact, rel=1e-4)


# ---------------------------------------------------------------------------
# distribution-function identity
# ---------------------------------------------------------------------------


def test_distribution_identity_uniform_disk():
    M = 3.0
    omega = lambda r: np.where(r <= 1.0, M / math.pi, 0.0)
    lhs, rhs = distribution_identity_check(omega, 1.0, 2)
    assert rhs == pytest.approx(M**2 / 2.0, rel=1e-8)
    assert lhs == pytest.approx(rhs, rel=1e-8)


def test_distribution_identity_zero():
    lhs, rhs = distribution_identity_check(lambda r: 0.0 * r, 1.0, 2)
    assert lhs == 0.0 and rhs == 0.0


def test_distribution_identity_gaussian_d3():
    sigma = 0.7
    omega = lambda r: np.exp(-(r**2) / (2 * sigma**2))
    lhs, rhs = distribution_identity_check(omega, 2.0 * sigma, 3)
    assert lhs == pytest.approx(rhs, rel=1e-8)


def test_distribution_identity_random_family():
    """50 random Gaussian/ring mixtures, d in {2,3,4}: relative error < 1e-6."""
    rng = np.random.default_rng(20240817)
    worst = 0.0
    for k in range(50):
        d = int(rng.integers(2, 5))
        n_comp = int(rng.integers(1, 4))
        amps = rng.uniform(0.1, 2.0, n_comp)
        cens = rng.uniform(0.0, 1.5, n_comp)
        wids = rng.uniform(0.1, 0.6, n_comp)

        def omega(r, a=amps, c=cens, w=wids):
            out = np.zeros_like(r)
            for ai, ci, wi in zip(a, c, w):
                out += ai * np.exp(-((r - ci) ** 2) / (2 * wi**2))
            return out

        R = float(rng.uniform(0.5, 3.0))
        lhs, rhs = distribution_identity_check(omega, R, d)
        worst = max(worst, abs(lhs - rhs) / max(abs(rhs), 1e-300))
    assert worst < 1e-6


# ---------------------------------------------------------------------------
# moment-inequality residual
# ---------------------------------------------------------------------------


def test_residual_wiring_d2():
    """The d=2 specialization must read R^2 dw/dt >= -8 w + w^2/pi."""
    R = 1.7
    w0 = 2.3
    t = np.array([0.0, 0.1, 0.2])
    w = np.full(3, w0)
    res, _ = moment_inequality_residual(t, w, R, 2)
    # dw/dt = 0, so residual = -rhs = (8 w - w^2/pi)/R^2
    expected = (8.0 * w0 - w0**2 / math.pi) / R**2
    assert res[0] == pytest.approx(expected, rel=1e-12)


def test_residual_vacuum():
    t = np.linspace(0.0, 1.0, 9)
    res, tol = moment_inequality_residual(t, np.zeros(9), 1.0, 2)
    assert np.all(res == 0.0)


def test_residual_exact_exponential():
    # w(t) = exp(a t) has centered-difference derivative close to a w
    a = -3.0
    t = np.linspace(0.0, 1.0, 201)
    w = np.exp(a * t)
    res, tol = moment_inequality_residual(t, w, 1.0, 2)
    d = 2
    rhs = -((d + 2) ** 2 / 2.0) * w[1:-1] + (2.0 / sphere_area(d)) * w[1:-1] ** 2
    assert np.allclose(res, a * w[1:-1] - rhs, atol=1e-3)


def test_residual_needs_three_rows():
    with pytest.raises(ConfigError):
        moment_inequality_residual(np.array([0.0, 1.0]), np.array([1.0, 1.0]), 1.0, 2)


# ---------------------------------------------------------------------------
# parameter cascade
# ---------------------------------------------------------------------------


def test_genbl_stated_values():
    M, eps, B = 10.0 * math.pi, math.pi, 8.0
    p = genbl_parameters(M, eps, B)
    assert p.alpha == pytest.approx(1.0 / (8000.0 * math.pi), rel=1e-14)
    assert p.lam == pytest.approx(80000.0 * math.pi + 1.0, rel=1e-14)
    assert p.eta == pytest.approx(eps / (100.0 * M**2 * B), rel=1e-14)
    assert p.gamma_sq == pytest.approx(p.alpha * p.eta**2 * eps / (2.0 * M * B), rel=1e-14)
    assert p.gamma_sq <= 1.0


def test_genbl_domain_errors():
    with pytest.raises(ConfigError):
        genbl_parameters(7.0 * math.pi, 0.1, 8.0)  # M <= 8 pi
    with pytest.raises(ConfigError):
        genbl_parameters(10.0 * math.pi, 3.0 * math.pi, 8.0)  # eps > M - 8 pi
    with pytest.raises(ConfigError):
        genbl_parameters(10.0 * math.pi, math.pi, 0.5)  # B < 1


@given(
    M=st.floats(8.0 * math.pi + 1e-6, 100.0 * math.pi),
    frac=st.floats(1e-6, 1.0),
    B=st.floats(1.0, 20.0),
)
@settings(max_examples=300, deadline=None)
def test_genbl_side_conditions(M, frac, B):
    """gamma < eta and eta^2 <= 1/2 for every admissible triple."""
    eps = frac * (M - 8.0 * math.pi)
    if eps <= 0.0:
        return
    p = genbl_parameters(M, eps, B)
    assert p.gamma < p.eta
    assert p.eta**2 <= 0.5
    assert p.gamma_sq <= 1.0


# ---------------------------------------------------------------------------
# exponential lower-bound fit
# ---------------------------------------------------------------------------


def test_fit_recovers_exact_exponential():
    t = np.linspace(0.0, 2.0, 50)
    H = 3.0 * np.exp(-1.7 * t)
    fit = fit_exponential_lower_bound(t, H)
    assert fit.C_hat == pytest.approx(1.7, rel=1e-10)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.C_envelope == pytest.approx(1.7, rel=1e-10)


def test_fit_envelope_bounds_below():
    rng = np.random.default_rng(5)
    t = np.linspace(0.0, 1.0, 80)
    H = np.exp(-2.0 * t) * np.exp(rng.normal(0.0, 0.05, t.size))
    fit = fit_exponential_lower_bound(t, H)
    # H(t) >= H(0) exp(-C_envelope t) by construction
    assert np.all(H[1:] >= H[0] * np.exp(-fit.C_envelope * t[1:]) * (1.0 - 1e-12))


def test_fit_requires_positive_samples():
    with pytest.raises(ConfigError):
        fit_exponential_lower_bound(np.array([0.0, 1.0, 2.0]), np.array([0.0, 0.0, 0.0]))
