"""Multiplicative approximations of circuit amplitudes, expectation values and
partition functions by truncated cluster expansions, with exact oracles."""

__version__ = "0.1.0"
