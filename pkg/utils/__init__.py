"""
Utility Functions and Helpers
=============================

Components:
- errors.py - SrifError hierarchy with CLI exit codes
- report_formatter.py - key = value reports, ablation tables, hashed CSV files

Usage:
    from utils.errors import SrifError
    from utils.report_formatter import ReportFormatter
"""

__version__ = "1.0.0"
