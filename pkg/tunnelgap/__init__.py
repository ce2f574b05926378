"""Minimum spectral gaps of barrier-tunneling annealing problems."""

__version__ = "0.1.0"
