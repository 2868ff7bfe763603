"""Exact solvers and gadget compilers for unit-cost fortification and interdiction games."""

__version__ = "0.1.0"
