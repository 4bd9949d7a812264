"""Harnack ratios of the shrinking extremal family against the sharp constants."""

import argparse

import numpy as np

from sharmonic import KernelParams
from sharmonic.verify import check_harnack_extremal


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--r", type=float, default=0.5)
    ap.add_argument("--dims", default="2,3")
    ap.add_argument("--orders", default="0.25,0.5,0.75")
    ap.add_argument("--eps", default="1e-1,3e-2,1e-2,3e-3,1e-3,3e-4")
    args = ap.parse_args(argv)
    eps = [float(v) for v in args.eps.split(",")]
    print("n,s,eps,lower_ratio,lower_target,upper_ratio,upper_target,deviation")
    for n in (int(v) for v in args.dims.split(",")):
        e = np.zeros(n)
        e[0] = 1.0
        for s in (float(v) for v in args.orders.split(",")):
            for row in check_harnack_extremal(eps, args.r, e, KernelParams(n, s)):
                print(
                    f"{n},{s},{row.eps:g},{row.lower_ratio:.10g},{row.lower_target:.10g},"
                    f"{row.upper_ratio:.10g},{row.upper_target:.10g},{row.deviation:.3e}"
                )


if __name__ == "__main__":
    main()
