"""Closed-form element integrals against brute-force quadrature.

Run: python3 demos/01_kernel_check.py
"""

import math

from annulus_bem import BoundaryElement
from annulus_bem.kernel import evaluate
from annulus_bem.oracle import f1_quadrature, f2_quadrature

elem = BoundaryElement.from_points((0.0, 0.0), (1.0, 0.0), (0.0, 1.0))
print("unit element (0,0)->(1,0), normal (0,1)\n")
print(f"{'field point':>18}  {'f1 closed':>14}  {'f1 quad':>14}  {'f2 closed':>14}  {'f2 quad':>14}  case")

# far, close, very close, on the line, at the midpoint, at an endpoint
for fld in [(0.5, 1.0), (0.3, 0.05), (0.7, 1e-6), (2.0, 0.0), (0.5, 0.0), (1.0, 0.0)]:
    kv = evaluate(elem, fld)
    q1 = f1_quadrature(elem, fld, 1e-10)
    q2 = f2_quadrature(elem, fld, 1e-10)
    print(f"{str(fld):>18}  {kv.f1:14.10f}  {q1:14.10f}  {kv.f2:14.10f}  {q2:14.10f}  {kv.case_used.value}")

print("\nThe self term is (l / 2 pi)(ln(l / 2) - 1):", (math.log(0.5) - 1) / (2 * math.pi))
print("A point just above the element sees half of it, so f2 -> -1/2 from that side.")
