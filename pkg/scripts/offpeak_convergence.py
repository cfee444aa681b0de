"""Second-order convergence of the off-peak u - u_xx residual under grid refinement.

Below h ~ 5e-4 rounding in the second difference (about eps / h^2) takes over.
"""
import numpy as np

from peakons.verify import offpeak_residual


def main():
    previous = None
    print(f"{'h':>10} {'residual':>12} {'ratio':>8}")
    for h in (8e-3, 4e-3, 2e-3, 1e-3, 5e-4):
        res = offpeak_residual(([1.0, -0.5], [0.0, 6.0]), np.arange(1.0, 5.0, h))
        ratio = f"{previous / res:8.3f}" if previous else ""
        print(f"{h:10.2e} {res:12.4e} {ratio}")
        previous = res


if __name__ == "__main__":
    main()
