"""
Command-line scripts for the SRIF toolkit
"""
