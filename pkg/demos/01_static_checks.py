"""Static identity and inequality suite.

Runs the five closed-form checks that anchor the laboratory: the weight
Laplacian inequality, the distribution-function identity, the radial drift
identity on the 2D Poisson solver, the explicit parameter cascade's side
conditions, and the dimensional blowup constants C_2 = 8 pi, C_3 = 25 pi.

Equivalent CLI: ``kslab verify``.
"""
from kslab.experiment import verify_static


def main():
    print("Static identity/inequality suite")
    print("-" * 64)
    for check in verify_static():
        flag = "PASS" if check.passed else "FAIL"
        print(f"[{flag}] {check.name}")
        print(f"       {check.detail}")
    print("-" * 64)


if __name__ == "__main__":
    main()
