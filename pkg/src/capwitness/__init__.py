"""Certified lower bounds on the classical capacity of noisy qubit channels."""
__version__ = "0.1.0"
