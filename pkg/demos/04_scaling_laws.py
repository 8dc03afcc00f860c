"""Parabolic scaling laws of the blowup time.

Two experiments on supercritical Gaussian data (mass 12 pi):

1. Covariance: evolving the rescaled datum u_lam = lam^2 u(lam x) on the
   correspondingly rescaled grid multiplies the blowup time by lam^-2.
2. Width scaling: shrinking the datum width by gamma multiplies the blowup
   time by gamma^2 (log-log slope = 2).

Runs in about a minute.
"""
import math

import numpy as np

from kslab.analysis import default_probe_radii
from kslab.grids import radial_grid
from kslab.initial_data import DatumSpec, make_radial_datum, rescale_datum, support_radius
from kslab.radial import RadialRunSettings, run_radial


def blowup_time(spec, r_max, lam=1.0):
    tsc = support_radius(spec) ** 2 / lam**2
    r = radial_grid(2048, r_max, 4e-7)
    st = make_radial_datum(spec, r)
    if lam != 1.0:
        st = rescale_datum(st, lam)
    settings = RadialRunSettings(
        t_end=50.0 * tsc,
        dt_max=tsc / 100.0,
        dt_min=1e-12 * tsc,
        u_threshold=1e6 * float(np.max(st.density())),
        rho_probe=10.0 * r[1],
        probe_radii=default_probe_radii(r)[:8],
        ball_radii=np.array([0.5, 1.0, 2.0]),
    )
    res = run_radial(st, settings)
    assert res.report.verdict == "blew-up", res.report.verdict
    return res.report.t_blowup


def main():
    M = 12.0 * math.pi
    spec = DatumSpec(kind="gaussian", mass=M, d=2, sigma=0.5)

    print("1. scaling covariance (lam = 2)")
    tb = blowup_time(spec, r_max=20.0)
    tb_lam = blowup_time(spec, r_max=10.0, lam=2.0)
    print(f"   T_b(u)      = {tb:.6f}")
    print(f"   T_b(u_lam)  = {tb_lam:.6f}")
    print(f"   lam^2 ratio = {tb_lam * 4.0 / tb:.6f}  (exact value: 1)")

    print("2. width scaling T_b ~ gamma^2")
    gammas = [1.0, 0.5, 0.25]
    tbs = []
    for g in gammas:
        sp = DatumSpec(kind="gaussian", mass=M, d=2, sigma=0.5 * g)
        tbs.append(blowup_time(sp, r_max=20.0 * g))
        print(f"   gamma = {g:5.2f}  T_b = {tbs[-1]:.6f}")
    A = np.stack([np.ones(len(gammas)), np.log(gammas)], axis=-1)
    coef, *_ = np.linalg.lstsq(A, np.log(tbs), rcond=None)
    print(f"   log-log slope = {coef[1]:.4f}  (exact value: 2)")


if __name__ == "__main__":
    main()
