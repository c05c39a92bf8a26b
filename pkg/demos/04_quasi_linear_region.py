"""Evaluate the two-block region for a random input distribution and compare paths."""
import numpy as np

from macfb.channel import ExampleChannel
from macfb.region import InputDistribution, cl_reduction_region, quasi_linear_region, quasi_linear_terms

ch = ExampleChannel(0.1).table()
P = InputDistribution.random(ch, np.random.default_rng(3), u_size=2)

poly = quasi_linear_region(P)
for c in poly.constraints:
    print(f"{c.label:18s} {c.coeffs} <= {c.bound:.5f}")
print("largest symmetric rate:", poly.symmetric_max())

# each mutual-information term is available for inspection
terms = quasi_linear_terms(P)
print({k: round(v, 4) for k, v in list(terms.items())[:4]})

# inputs that ignore V collapse to a single-block evaluation
Q = P.independent_v()
a, b = quasi_linear_region(Q), cl_reduction_region(Q)
print("max difference between the two paths:", max(abs(a[l].bound - b[l].bound) for l in a.labels))

print(poly.diagonal_csv(5))
