"""Newton series of 1/(z+1) centred at 1, evaluated across the half-plane Re z > 1.

Convergence slows near the boundary: terms fall off like k^(-3 - Re(z - 1)),
so points close to Re z = 1 need far more terms than points further right.
"""

from newtonforge import Scalar, rational_newton_series, eval_newton_series
from newtonforge.oracles import RegionError

series = rational_newton_series("1/(z+1)", 1, 2000)

for text in ("5/4", "3/2", "2", "2+5i", "4", "4+5i", "8-3i"):
    z = Scalar.parse(text)
    value, diag = eval_newton_series(series, z, 1e-12)
    err = float((value - 1 / (z + 1)).magnitude())
    print(f"z = {text:>5}: terms {diag.terms_used:>5}  converged {diag.converged!s:>5}  "
          f"error {err:.2e}  majorant {diag.majorant_verdict}")

for text in ("1", "1/2+i"):
    try:
        eval_newton_series(series, Scalar.parse(text))
    except RegionError as exc:
        print(f"z = {text}: refused ({exc})")

try:
    rational_newton_series("1/((z-2)*(z+3))", 1)
except RegionError as exc:
    print("centre 1 for 1/((z-2)(z+3)):", exc)
