"""
Agreement with Subjective Scores
================================

Components:
- correlation.py - SRCC, KRCC (tau-b) and Pearson correlation
- logistic.py - Five-parameter logistic mapping onto the MOS scale
- report.py - EvaluationReport and the full protocol

Usage:
    from evaluation.report import evaluate

    report = evaluate(scores, mos)
"""

__version__ = "1.0.0"
