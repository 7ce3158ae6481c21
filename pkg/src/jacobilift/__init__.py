"""Jacobi matrices on multigraphs, their finite and universal covers, and
Alon-Boppana type eigenvalue-gap bounds."""

__version__ = "0.1.0"
