"""Finite-element IMEX solver and analysis tools for the logarithmic Schrödinger equation

    i u_t + Δu = λ u ln|u|^2

Modules
-------
mesh           uniform interval and structured triangle meshes
quadrature     Gauss-Legendre and triangle rules
banded         complex banded matrices and LAPACK LU
fem            P1/P2 spaces, assembly, interpolation, Ritz projection, norms
nonlinearity   ``f(z) = z ln|z|`` and its Hölder/Lipschitz bounds
gronwall       discrete nonlinear Grönwall bound and its brute-force oracle
solutions      Gausson and other closed-form data
imex           the time stepper, observables and truncation diagnostics
experiments    convergence studies, dynamics runs, randomized lemma checks
cli            ``logse`` command-line entry point
"""

__version__ = "0.1.0"
