"""High-precision reference values frozen into the test-suite.

Everything here uses mpmath at 50 digits and shares no code with the
package, so the numbers it prints are an independent check on it.

    python scripts/compute_oracles.py
"""

import mpmath as mp

mp.mp.dps = 50


def ml(alpha, beta, rho, kappa, z, terms=400):
    s = mp.mpf(0)
    for n in range(terms):
        s += mp.gamma(rho + kappa * n) / mp.gamma(rho) * z**n / (mp.gamma(alpha * n + beta) * mp.factorial(n))
    return s


def prabhakar_kernel_integral(alpha, beta, omega, rho, kappa, f, x, c=0):
    """Kernel form of the generalised Prabhakar integral, by tanh-sinh."""

    def integrand(t):
        u = x - t
        return u ** (beta - 1) * ml(alpha, beta, rho, kappa, omega * u**alpha, terms=120) * f(t)

    return mp.quad(integrand, [c, x])


def rl_integral(order, f, x, c=0):
    return mp.quad(lambda t: (x - t) ** (order - 1) * f(t), [c, x]) / mp.gamma(order)


def main():
    print("gamma(4.2+0.7i) =", mp.gamma(mp.mpc("4.2", "0.7")))

    a, b, n, m = mp.mpf("0.6"), mp.mpf("0.4"), 2, 3
    top = -a * n - b
    print("binom(-1.6, 3) via gamma =", mp.gamma(1 - b - a * n) / (mp.gamma(1 - b - a * n - m) * mp.factorial(m)))
    print("binom(-1.6, 3) via product =", top * (top - 1) * (top - 2) / 6)

    print("E_{2,1}(1) =", ml(2, 1, 1, 1, mp.mpf(1)))

    v = prabhakar_kernel_integral(mp.mpf("0.5"), mp.mpf("0.8"), mp.mpf("0.3"), mp.mpf("1.2"), 1, lambda t: t**2, mp.mpf(1))
    print("GP(0.5,0.8,0.3,1.2,1) x^2 at x=1 =", v)

    for x in ("0.25", "0.5", "1"):
        v = prabhakar_kernel_integral(
            mp.mpf("0.5"), mp.mpf("0.7"), mp.mpf("0.2"), mp.mpf(1), 1, lambda t: mp.exp(-t * t), mp.mpf(x)
        )
        print(f"GP(0.5,0.7,0.2,1,1) exp(-x^2) at x={x} =", v)

    print("I^0.3 sin at x=1 =", rl_integral(mp.mpf("0.3"), mp.sin, mp.mpf(1)))
    print("I^0.7 exp at x=1 =", rl_integral(mp.mpf("0.7"), mp.exp, mp.mpf(1)))
    print("ABI(0.5) x at x=1, B=1 =", mp.mpf("0.5") + mp.mpf("0.5") / mp.gamma(mp.mpf("2.5")))

    # generalised kernel with kappa != 1, against the three-parameter case
    v = prabhakar_kernel_integral(
        mp.mpf("0.9"), mp.mpf("0.6"), mp.mpf("-0.4"), mp.mpf("0.7"), mp.mpf("1.3"), lambda t: 1 + t, mp.mpf("1.5")
    )
    print("GP(0.9,0.6,-0.4,0.7,1.3) (1+x) at x=1.5 =", v)


if __name__ == "__main__":
    main()
