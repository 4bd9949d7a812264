"""Gap between fractional and classical solutions as s approaches 1."""

import argparse

import numpy as np

from sharmonic import QuadratureSpec, parse_datum
from sharmonic.solvers import s_limit_sweep


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data", default="bump:0:1.05:2:1,homog:0.2:cosk:1,homog:0.3:const")
    ap.add_argument("--point", default="0.3,0")
    ap.add_argument("--orders", default="0.5,0.7,0.8,0.9,0.95,0.99,0.999")
    args = ap.parse_args(argv)
    x = np.array([float(v) for v in args.point.split(",")])
    grid = [float(v) for v in args.orders.split(",")]
    print("datum,s,value,classical_value,gap,error_estimate")
    for text in args.data.split(","):
        f = parse_datum(text, len(x))
        for row in s_limit_sweep(f, x, grid, QuadratureSpec()):
            print(f"{text},{row.s},{row.value!r},{row.classical_value!r},{row.gap:.6e},{row.error_estimate:.2e}")


if __name__ == "__main__":
    main()
