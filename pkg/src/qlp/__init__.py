"""Finite orthomodular-lattice probability: s_n-maps, joint distributions of
non-compatible observables, and their classical representation."""

__version__ = "0.1.0"
