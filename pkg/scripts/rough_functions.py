"""Series against kernel quadrature on rough (non-analytic) inputs.

The identities are checked on power sums and analytic functions; this
measures how far the two evaluation routes drift apart on a kink, a
square-root cusp and a step, where both rely on quadrature of a
non-smooth integrand.  Nothing is asserted.  The series route refuses a
term whose inner quadrature error estimate is too large, so "refused"
counts points where only the kernel route produced a value.

    python3 scripts/rough_functions.py [--draws 5 --seed 0 --nodes 256]
"""

import argparse

import numpy as np

from prabhakar.errors import PrabhakarError
from prabhakar.funcspace import CallableFunction, QuadratureSpec
from prabhakar.operators import prabhakar_quadrature, prabhakar_series
from prabhakar.verify import draw_params, relative_deviation

ROUGH = {
    "kink |x-0.4|": CallableFunction(lambda t: np.abs(t - 0.4), smoothness_order=0, name="kink"),
    "cusp |x-0.4|^0.5": CallableFunction(lambda t: np.sqrt(np.abs(t - 0.4)), smoothness_order=0, name="cusp"),
    "step x>0.4": CallableFunction(lambda t: (t > 0.4).astype(float), smoothness_order=0, name="step"),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--draws", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--nodes", type=int, default=256)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    quad = QuadratureSpec(nodes=args.nodes, rel_tol=np.inf)
    params = [draw_params(rng, 0.0, span=1.0) for _ in range(args.draws)]
    xs = (0.25, 0.5, 0.75, 1.0)
    print(f"{'function':18s} {'max rel dev':>12s} {'refused':>8s} {'kernel err est':>15s}")
    for name, f in ROUGH.items():
        dev, refused, est = 0.0, 0, 0.0
        for p in params:
            for x in xs:
                q = prabhakar_quadrature(p, f, x, quad)
                est = max(est, q.err_estimate / max(abs(q.value), 1e-8))
                try:
                    s = prabhakar_series(p, f, x, quad=quad).value
                    dev = max(dev, relative_deviation(s, q.value))
                except PrabhakarError:
                    refused += 1
        print(f"{name:18s} {dev:12.2e} {refused:8d} {est:15.2e}")


if __name__ == "__main__":
    main()
