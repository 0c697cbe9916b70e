"""Boundary-slope bounds for hyperbolic 3-manifolds with totally geodesic
boundary, and numerical checks of the inequalities they rest on."""

__version__ = "0.1.0"
