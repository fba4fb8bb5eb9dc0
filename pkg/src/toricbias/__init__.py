"""Threshold analysis of the rotated toric code under noise mismatch.

Monte Carlo minimum-weight matching decoding plus the random-bond Ising
model's analytic critical equations, cross-checked by brute-force
oracles at toy sizes.
"""

__all__ = [
    "analytic",
    "cli",
    "decoder",
    "exact",
    "harness",
    "lattice",
    "matching",
    "noise",
    "report",
]

__version__ = "0.1.0"
