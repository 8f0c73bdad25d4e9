"""
Figures
=======

Components:
- plots.py - (D, S_sim) scatter per SR algorithm and the weight curve (plotly)
"""

__version__ = "1.0.0"
