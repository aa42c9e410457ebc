"""Decay of the power-function sup and the matching spectral lower bound.

Part one fits the decay of the squared power-function sup for the three
kernel families on their natural axes: log-log for the Sobolev kernel
(polynomial decay), log versus m for the inverse multiquadric
(exponential decay), and successive ratios for the Gaussian
(superexponential decay, so the ratios themselves keep shrinking).

Part two checks that the smallest Gram eigenvalue on the uniform grid
sits above m * Gamma_m, the node-count times the tail mass of the
kernel's Fourier transform outside the grid's resolved band.

Run with:  python3 demos/power_decay.py
"""

from __future__ import annotations

from rfl import Kernel, rate_study_eigen, rate_study_power


def main() -> None:
    sobolev = Kernel("sobolev", r=2.0, dim=1)
    mq = Kernel("inverse_multiquadric", sigma=1.0, beta=1.0, dim=1)
    gauss = Kernel("gaussian", sigma=1.0, dim=1)

    print("power-function decay")
    study = rate_study_power(sobolev, [4, 8, 16, 32, 64])
    print(
        f"  sobolev r=2: log-log slope {study.slope:+.4f} "
        f"(R^2 {study.r_squared:.5f}), expected near -3"
    )
    study = rate_study_power(mq, [2, 4, 6, 8])
    print(
        f"  inverse multiquadric: log-linear slope {study.slope:+.4f} "
        f"(R^2 {study.r_squared:.5f}), exponential decay"
    )
    study = rate_study_power(gauss, [2, 4, 6, 8])
    ratios = ", ".join(f"{r:.5f}" for r in study.ratios)
    print(
        f"  gaussian: successive sup ratios [{ratios}] "
        f"strictly decreasing: {study.ratios_strictly_decreasing}"
    )

    print("spectral lower bound lambda_min >= m * Gamma_m (gaussian, d=1)")
    eigen = rate_study_eigen(gauss, [1, 2, 4, 8])
    print(f"  {'m':>3} {'lambda_min':>14} {'m*Gamma_m':>14} {'satisfied':>10}")
    for rep in eigen.reports:
        print(
            f"  {rep.m:>3} {rep.lambda_min:>14.3e} {rep.bound_m_gamma:>14.3e} "
            f"{str(rep.bound_satisfied).lower():>10}"
        )


if __name__ == "__main__":
    main()
