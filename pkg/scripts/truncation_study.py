"""Truncated integrals T^t f as t -> 0 and the maximal truncation T* against |T f|.

Prints ||T^t f - T f||_2 / ||T f||_2 for t = h, h/2, ... and the largest
deficit of T* below |T f| for a few grid sizes.
"""
import argparse

import numpy as np

from roughcalc import GridSpec, make_bump, make_rough_kernel, maximal_truncated, singular_integral, truncated_integral
from roughcalc.operators import truncation_net


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="64,128,256")
    ap.add_argument("--kernel", default="sign", choices=["harmonic", "sign", "power"])
    args = ap.parse_args()
    params = {"harmonic": {"k": 1}, "sign": {"arcs": 2}, "power": {"a": 0.4}}[args.kernel]
    omega = make_rough_kernel(args.kernel, **params)
    for N in (int(s) for s in args.sizes.split(",")):
        spec = GridSpec(2, 4.0, N)
        f = make_bump(spec, (0.1, -0.2), 1.3, 1.0)
        T = singular_integral(omega, f).values
        nT = np.linalg.norm(T)
        h = spec.spacing
        gaps = [np.linalg.norm(truncated_integral(omega, f, h / 2**k).values - T) / nT for k in range(5)]
        star = maximal_truncated(omega, f, truncation_net(spec)).values
        deficit = float(np.max(np.abs(T) - star) / np.abs(T).max())
        print(f"N={N:4d}  gaps t=h/2^k: " + " ".join(f"{g:.2e}" for g in gaps) + f"  T* deficit {deficit:.2%}")


if __name__ == "__main__":
    main()
