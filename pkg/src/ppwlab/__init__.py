"""Numerical laboratory for PPW-type bounds on the first two Dirichlet
eigenvalues of Schrodinger operators -Laplace + V(|x|), with and without
Gaussian densities."""

__version__ = "0.1.0"
