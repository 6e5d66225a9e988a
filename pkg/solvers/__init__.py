"""Solvers for normalized solutions: limit ground state, global minimum, mountain pass and linking."""
