"""The nonlinearity f(z) = z ln|z| and the bounds used in the error analysis.

f is not Lipschitz at 0, but it is Hölder with any exponent below 1 on a
small disk, and Lipschitz with a logarithmic constant away from 0.  The
discrete Grönwall bound is compared with the worst sequence allowed by its
recurrence.

Run:  python3 demos/bounds_and_gronwall.py
"""


from logse import nonlinearity as nl
from logse.experiments import verify_lemmas
from logse.gronwall import GronwallParams, gronwall_bound, gronwall_relaxed_bound, maximal_sequence_oracle

# the Lipschitz quotient blows up like |ln r| near zero
for r in (1e-1, 1e-4, 1e-8, 1e-16):
    q = abs(nl.f(r) - nl.f(0.0)) / r
    print(f"|f(r) - f(0)| / r at r={r:g}: {q:.2f}")

# the Hölder constant peaks at delta_alpha
for alpha in (0.25, 0.5, 0.75):
    d = nl.delta_alpha(alpha)
    print(f"alpha={alpha}: delta={d:.4g}  H(delta)={nl.holder_constant(alpha, d):.4f}")

# randomized checks, seeded
print(verify_lemmas(seed=1, n_samples=20_000).text())

# bound vs worst-case sequence
p = GronwallParams(c1=1.0, c2=0.5, c3=0.1, alpha=0.5)
y = maximal_sequence_oracle(p, 30)
for n in (1, 5, 10, 20, 30):
    print(f"n={n:2d}  worst={y[n]:10.4f}  bound={gronwall_bound(p, n):10.4f}  "
          f"relaxed={gronwall_relaxed_bound(p, n):10.4f}")
