"""
Image Planes and Pyramids
=========================

Building blocks shared by every fidelity measure.

Components:
- plane.py - ImagePlane, an immutable float64 luminance/band container
- filters.py - Separable filtering and sliding-window moments (mirror borders)
- pyramid.py - Gaussian/Laplacian decomposition, reduce/expand, reconstruction

Usage:
    from imaging.plane import ImagePlane
    from imaging.pyramid import PyramidPair

    pair = PyramidPair.build(reference, test, depth=4)
"""

__version__ = "1.0.0"
