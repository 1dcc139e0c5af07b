"""Alternating binomial sums of (1+k^2)^(-1/2) up to n = 2000.

Prints a thinned table of a_n and a_n / 2^n, then the asymptotic verdict.
The sums cancel about n bits, so precision grows with n.
"""

import mpmath

from newtonforge import asymptotic_profile
from newtonforge.acceptance import bessel_sequence


def main(n_max: int = 2000) -> None:
    a = bessel_sequence(n_max)
    print(f"{'n':>6} {'a_n':>22} {'|a_n|/2^n':>12}")
    for n in list(range(0, 11)) + list(range(50, n_max + 1, 150)):
        print(f"{n:>6} {mpmath.nstr(a[n].to_mpf() if not a[n].is_exact else float(a[n]), 15):>22} "
              f"{mpmath.nstr(mpmath.ldexp(a[n].magnitude(), -n), 3):>12}")
    report = asymptotic_profile(a)
    print("verdict:", report.verdict)
    print("max |a_n| on [1000, 2000]:", mpmath.nstr(max(v.magnitude() for v in a[1000:]), 6))


if __name__ == "__main__":
    main()
