"""Simulation and cost estimation for dihedral coset problem algorithms."""

__version__ = "0.1.0"

__all__ = ["dcp_core", "sieve", "subset_sum", "dcp_solvers", "cost_models", "cli"]
