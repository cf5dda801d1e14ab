"""Numerical anisotropic geometry of closed hypersurfaces."""
