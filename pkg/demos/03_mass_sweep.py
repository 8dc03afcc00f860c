"""Sweeping the total mass across the 8 pi threshold.

Runs a parallel sweep of the Gaussian datum's mass through the critical value
and then bisects the verdict transition to a bracket narrower than 0.5 pi.
Writes ``sweep.csv`` (consumed by the secondary plotting package's ``phase``
figure).

Equivalent CLI:
    kslab sweep --canned radial_supercritical_d2 --parameter datum.mass \
        --values 18.85,21.99,25.13,28.27,31.42 --output-dir runs/mass-sweep

Takes several minutes (the subcritical rows integrate to their horizon).
"""
import math
import tempfile

from kslab.experiment import canned_config, find_verdict_transition, sweep


def main():
    cfg = canned_config("radial_supercritical_d2")
    # a coarser grid and shorter horizon are plenty to classify the verdicts
    doc = cfg.to_dict()
    doc.update(n_r=1024, t_end_factor=20.0)
    from kslab.experiment import ExperimentConfig

    cfg = ExperimentConfig.from_dict(doc)

    out = tempfile.mkdtemp(prefix="kslab-demo-sweep-")
    values = [(6.0 + 1.5 * k) * math.pi for k in range(5)]  # 6 pi .. 12 pi
    print(f"sweeping datum.mass over {[f'{v/math.pi:.1f} pi' for v in values]}")
    rows = sweep(cfg, "datum.mass", values, out)
    for r in rows:
        tb = f"T_b = {r.t_blowup:.4f}" if r.t_blowup is not None else ""
        print(f"  mass = {r.value / math.pi:5.2f} pi  ->  {r.verdict}  {tb}")
    print(f"sweep.csv written to {out}")

    lo, hi = find_verdict_transition(cfg, 6.0 * math.pi, 12.0 * math.pi,
                                     output_dir=out)
    print(f"verdict transition bracket: ({lo / math.pi:.3f} pi, {hi / math.pi:.3f} pi)"
          f"  [contains 8 pi: {lo < 8.0 * math.pi < hi}]")


if __name__ == "__main__":
    main()
