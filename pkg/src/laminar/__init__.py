"""Numerical toolkit for laminations by holomorphic graphs and laminated currents."""

from .lamination import FamilyKind, LeafFamily, RealCubicFamily, SpaceCurveFamily

__version__ = "0.1.0"

__all__ = ["FamilyKind", "LeafFamily", "RealCubicFamily", "SpaceCurveFamily", "__version__"]
