"""Temperature along the axis of a heated arc for several fractional orders.

Writes CSV columns t,s,value,error_estimate,classical to stdout or --out.
"""

import argparse
import csv
import math
import sys

import numpy as np

from sharmonic import KernelParams, QuadratureSpec, solve
from sharmonic.datum import datum_arc
from sharmonic.solvers import classical_extension


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--half-width", type=float, default=math.pi / 4, help="half the arc angle")
    ap.add_argument("--orders", default="0.25,0.5,0.75,0.95")
    ap.add_argument("--t-max", type=float, default=0.9)
    ap.add_argument("--steps", type=int, default=19)
    ap.add_argument("--out", default=None)
    args = ap.parse_args(argv)

    f = datum_arc(-args.half_width, args.half_width)
    spec = QuadratureSpec()
    ts = np.linspace(-args.t_max, args.t_max, args.steps)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["t", "s", "value", "error_estimate", "classical"])
    for s in (float(v) for v in args.orders.split(",")):
        p = KernelParams(2, s)
        for t in ts:
            x = np.array([t, 0.0])
            res = solve(f, x, p, spec, "malmheden")
            classical = classical_extension(f, x, spec)
            w.writerow([repr(float(t)), s, repr(res.value), repr(res.error_estimate), repr(classical)])
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
