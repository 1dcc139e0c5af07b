"""Euler transformation of 1 - 1/2 + 1/3 - ... against ln 2."""

import mpmath

from newtonforge import Scalar, acceleration_report

with mpmath.workprec(256):
    LN2 = Scalar.floating(mpmath.log(2), 256)

report = acceleration_report("1/(z+1)", LN2, 60)
print(f"{'n':>3} {'raw error':>12} {'accelerated':>12} {'2^-n':>12}")
for n in range(0, 61, 6):
    print(f"{n:>3} {mpmath.nstr(report.raw_errors[n], 4):>12} "
          f"{mpmath.nstr(report.accel_errors[n], 4):>12} {mpmath.nstr(mpmath.ldexp(1, -n), 4):>12}")
print("trailing error ratio:", round(report.rate_ratio, 4))
print("partial sum 60 (exact):", report.accel_partials[60])
