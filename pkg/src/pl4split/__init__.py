"""Metric splitting of nonnegatively curved piecewise flat 4-manifolds.

Detects when a closed piecewise flat 4-manifold with cone angles at
most 2pi along its singular surfaces is a metric product of two
polyhedral spheres, and reconstructs the two factors.
"""

__version__ = "0.1.0"
