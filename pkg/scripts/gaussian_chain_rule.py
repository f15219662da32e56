"""Fractional integrals of a Gaussian through the chain rule.

Tabulates the chain-rule value for f = exp, g = -x^2 against direct
kernel quadrature of e^{-t^2}, along with how many outer terms the
Leibniz sum needed.

    python3 scripts/gaussian_chain_rule.py [--alpha 0.5 --beta 0.7 --omega 0.2 --rho 1]
"""

import argparse

import numpy as np

from prabhakar.funcspace import Exponential, PowerSum, named_function
from prabhakar.operators import ParamSet, prabhakar_quadrature
from prabhakar.rules import RuleTruncation, chain_rule_apply


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alpha", type=float, default=0.5)
    ap.add_argument("--beta", type=float, default=0.7)
    ap.add_argument("--omega", type=float, default=0.2)
    ap.add_argument("--rho", type=float, default=1.0)
    ap.add_argument("--outer", type=int, default=40, help="outer term cap")
    ap.add_argument("--xmax", type=float, default=2.0)
    args = ap.parse_args()

    p = ParamSet(args.alpha, args.beta, args.omega, args.rho, 1, 0.0)
    rt = RuleTruncation(outer_terms=args.outer)
    neg_sq = PowerSum.monomial(-1.0, 2, 0.0)
    gauss = named_function("gaussian")
    print(f"{'x':>6s} {'chain rule':>20s} {'quadrature':>20s} {'rel dev':>10s} {'outer':>6s}")
    for x in np.linspace(0.25, args.xmax, 8):
        r = chain_rule_apply(Exponential(1.0), neg_sq, p, x, rt)
        q = prabhakar_quadrature(p, gauss, x).value
        dev = abs(r.value - q) / abs(q)
        print(f"{x:6.3f} {r.value.real:20.15f} {q.real:20.15f} {dev:10.2e} {r.terms_used:6d}")


if __name__ == "__main__":
    main()
