"""Exact computations in the restricted Hamiltonian Lie algebras H_n over finite fields."""

__version__ = "0.1.0"
