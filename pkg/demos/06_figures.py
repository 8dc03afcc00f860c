"""Artifact handoff to the secondary plotting package.

Produces a quick supercritical run, then renders figures from its CSV/JSON
artifacts with the ``ksplots`` CLI (the plotting package reads only the
serialized artifacts; it never touches the solvers).

Requires the plots/ package: ``pip install -e plots/``.
"""
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

from kslab.experiment import canned_config, run_experiment


def main():
    if shutil.which("ksplots") is None:
        sys.exit("ksplots is not installed; run: pip install -e plots/")

    out = Path(tempfile.mkdtemp(prefix="kslab-demo-figs-"))
    print("running the canned supercritical experiment...")
    art = run_experiment(canned_config("radial_supercritical_d2"), out / "run")

    for kind in ("moments", "concentration", "annulus"):
        cmd = ["ksplots", "render", "--input", str(art.run_dir),
               "--kind", kind, "--output", str(out / kind)]
        subprocess.run(cmd, check=True)
    print(f"figures written under {out}")


if __name__ == "__main__":
    main()
