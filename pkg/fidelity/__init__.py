"""
Fidelity Measures
=================

Components:
- deterministic.py - DF: information-weighted structure comparison on Gaussian levels
- statistical.py - SF: KL divergence of normalized Laplacian band histograms
- sharpness.py - LPC-SI sharpness from log-Gabor phase coherence
- uncertainty.py - Sharpness/texture ratios, assorted factor, calibration, SRIF combination
- calibration_table.py - Plain-text calibration table read/write

Usage:
    from fidelity.deterministic import DfConfig, df_total
    from fidelity.statistical import SfConfig, sf_total
    from fidelity.uncertainty import lookup_weights, srif
"""

__version__ = "1.0.0"
