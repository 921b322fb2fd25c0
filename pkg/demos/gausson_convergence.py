"""Convergence of the IMEX scheme against the exact Gausson in 1D.

The Gausson b exp(i(xζ - (a+ζ²)t) + (λ/2)|x - 2ζt|²) solves the equation
exactly, so the error at the final time is measured directly.  Temporal
refinement should give slope ~1, spatial refinement with P1 slope ~2.

Run:  python3 demos/gausson_convergence.py
"""

import numpy as np

from logse.experiments import converge_space, converge_time
from logse.solutions import GaussonSpec

gausson = GaussonSpec(d=1, b=1.0, lam=-1.0)  # a = 1, |u| = exp(-x²/2) for all t

# fixed h = 2^-5, tau halved five times
table = converge_time(gausson, h=2**-5, r=1)
print(table.to_csv())
print("slopes vs tau:", {k: round(v, 3) for k, v in table.slopes.items()})

# quadratic elements leave the temporal order unchanged
print("P2 slope vs tau:", round(converge_time(gausson, r=2).slope("e2"), 3))

# tau small enough that the spatial error dominates
table = converge_space(gausson, tau=1e-4, T=0.01, r=1)
print(table.to_csv())
print("slopes vs h:", {k: round(v, 3) for k, v in table.slopes.items()})

# errors per halving
e2 = table.column("e2")
print("e2 ratios:", np.round(e2[:-1] / e2[1:], 3))
