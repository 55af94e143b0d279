"""Compare the annular quadrature for p.v. cos(theta)/|y|^2 against its Fourier multiplier.

Prints the relative L2 error and wall time for each grid size.
"""
import argparse
import math
import time

import numpy as np

from roughcalc import GridSpec, make_bump, make_rough_kernel, singular_integral


def multiplier_oracle(f, pad=4):
    N, h = f.spec.points_per_axis, f.spec.spacing
    P = pad * N
    F = np.fft.fft2(f.values, (P, P))
    k = np.fft.fftfreq(P, d=h)
    K1, K2 = np.meshgrid(k, k, indexing="ij")
    r = np.hypot(K1, K2)
    r[0, 0] = 1.0
    m = -2j * math.pi * K1 / r
    m[0, 0] = 0.0
    return np.real(np.fft.ifft2(F * m))[:N, :N]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="64,128,256,512")
    ap.add_argument("--halfwidth", type=float, default=4.0)
    ap.add_argument("--radius", type=float, default=1.5)
    args = ap.parse_args()
    omega = make_rough_kernel("harmonic", k=1)
    print(f"{'N':>5} {'rel_L2':>10} {'seconds':>8}")
    for N in (int(s) for s in args.sizes.split(",")):
        f = make_bump(GridSpec(2, args.halfwidth, N), (0.0, 0.0), args.radius, 1.0)
        t0 = time.perf_counter()
        T = singular_integral(omega, f).values
        dt = time.perf_counter() - t0
        ref = multiplier_oracle(f)
        print(f"{N:5d} {np.linalg.norm(T - ref) / np.linalg.norm(ref):10.3e} {dt:8.2f}")


if __name__ == "__main__":
    main()
