"""
Datasets and Manifests
======================

Components:
- manifest.py - Manifest CSV parsing/writing and split filtering
- loader.py - Image decoding to BT.601 luminance, pair loading with typed exclusions
- synthetic.py - Deterministic synthetic references, degradations and MOS

Usage:
    from datasets.manifest import parse_manifest
    from datasets.loader import load_pairs

    pairs, exclusions = load_pairs(parse_manifest("manifests/qads.csv"))
"""

__version__ = "1.0.0"
