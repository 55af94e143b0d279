"""Refinement behaviour of the sphere-integrable power kernel |theta - theta0|^-a (mean removed).

For each a the script reports ||Omega||_rho at two sphere resolutions and
the L2 norm of T f at two grid sizes, so one can see where the kernel's
L^rho norm stops being resolved (a*rho close to 1).
"""
import argparse

import numpy as np

from roughcalc import GridSpec, make_bump, make_rough_kernel, singular_integral, sphere_lp_norm


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--exponents", default="0.2,0.4,0.53,0.6")
    ap.add_argument("--rho", type=float, default=1.5)
    ap.add_argument("--sizes", default="128,256")
    ap.add_argument("--resolution", type=int, default=2048)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    print("a      a*rho  |O|_rho(M/2)  |O|_rho(M)  drift    " + "  ".join(f"|Tf|_2 N={N}" for N in sizes))
    for a in (float(s) for s in args.exponents.split(",")):
        full = make_rough_kernel("power", resolution=args.resolution, a=a)
        half = make_rough_kernel("power", resolution=args.resolution // 2, a=a)
        n_full, n_half = sphere_lp_norm(full, args.rho), sphere_lp_norm(half, args.rho)
        norms = []
        for N in sizes:
            spec = GridSpec(2, 4.0, N)
            Tf = singular_integral(full, make_bump(spec, (0.2, 0.0), 1.2, 1.0)).values
            norms.append(float(np.linalg.norm(Tf)) * spec.spacing)
        drift = abs(n_full - n_half) / n_full
        cols = "  ".join(f"{v:12.5f}" for v in norms)
        print(f"{a:<6.3g} {a * args.rho:<6.3g} {n_half:12.5f} {n_full:11.5f}  {drift:7.2%}  {cols}")


if __name__ == "__main__":
    main()
