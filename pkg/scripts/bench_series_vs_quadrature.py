"""Accuracy and wall time of the series form against kernel quadrature.

For a few parameter sets and test functions, compare the series of RL
integrals with tanh-sinh and Gauss-Jacobi quadrature of the kernel form,
using a 4x-node quadrature as the reference.

    python3 scripts/bench_series_vs_quadrature.py [--nodes 64] [--out bench.csv]
"""

import argparse
import math
import time
from dataclasses import asdict, dataclass, replace

import numpy as np

from prabhakar.cli import emit_output
from prabhakar.errors import PrabhakarError
from prabhakar.funcspace import PowerSum, QuadratureSpec, named_function
from prabhakar.operators import ParamSet, prabhakar_quadrature, prabhakar_series

CASES = {
    "mild": ParamSet(0.8, 0.6, 0.3, 1.2, 1, 0.0),
    "oscillating": ParamSet(1.4, 0.9, -1.0, 1.8, 1, 0.0),
    "general_kappa": ParamSet(0.9, 0.6, -0.4, 0.7, 1.3, 0.0),
    "terminating": ParamSet(0.5, 0.4, 0.8, -2, 1, 0.0),
}
FUNCTIONS = {
    "x^3+x": PowerSum.polynomial([0, 1, 0, 1], 0.0),
    "gaussian": named_function("gaussian"),
    "sin": named_function("sin"),
}


@dataclass
class Row:
    case: str
    function: str
    method: str
    nodes: int
    wall_time: float
    max_rel_dev: float


def timed(fn, xs):
    t0 = time.perf_counter()
    vals = [fn(x).value for x in xs]
    return vals, time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=64)
    ap.add_argument("--points", type=int, default=8)
    ap.add_argument("--out", default=None, help="CSV path (default: print only)")
    args = ap.parse_args()

    xs = list(np.linspace(0.1, 1.5, args.points))
    base = QuadratureSpec(nodes=args.nodes)
    rows = []
    for cname, p in CASES.items():
        for fname, f in FUNCTIONS.items():
            ref = [prabhakar_quadrature(p, f, x, replace(base, nodes=4 * args.nodes)).value for x in xs]

            def dev(vals):
                return max(abs(v - r) / max(abs(r), 1e-8) for v, r in zip(vals, ref))

            vals, wall = timed(lambda x: prabhakar_series(p, f, x, quad=base), xs)
            rows.append(Row(cname, fname, "series", args.nodes, wall, dev(vals)))
            for scheme in ("tanh-sinh", "gauss-jacobi"):
                qs = replace(base, scheme=scheme, rel_tol=math.inf)
                try:
                    vals, wall = timed(lambda x: prabhakar_quadrature(p, f, x, qs), xs)
                    rows.append(Row(cname, fname, scheme, args.nodes, wall, dev(vals)))
                except PrabhakarError:
                    rows.append(Row(cname, fname, scheme, args.nodes, 0.0, math.nan))

    print(f"{'case':14s} {'function':9s} {'method':13s} {'time [ms]':>10s} {'max rel dev':>12s}")
    for r in rows:
        print(f"{r.case:14s} {r.function:9s} {r.method:13s} {1e3 * r.wall_time:10.2f} {r.max_rel_dev:12.2e}")
    if args.out:
        emit_output([asdict(r) for r in rows], "csv", args.out)


if __name__ == "__main__":
    main()
