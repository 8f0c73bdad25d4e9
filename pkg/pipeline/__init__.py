"""
Scoring Pipeline
================

Components:
- config.py - Run defaults, RunConfig, config files and the config hash
- scorer.py - Single-pair scoring (FidelityScorer, FidelityReport)
- batch_processor.py - Manifest scoring with a bounded process pool
- calibrator.py - Calibration runs producing a table and weight curve
- evaluator.py - Evaluation per scoring mode (srif, df_only, sf_only, avg)

Usage:
    from pipeline.config import load_config
    from pipeline.scorer import FidelityScorer

    scorer = FidelityScorer.from_config(load_config("my_run.conf"))
"""

__version__ = "1.0.0"
