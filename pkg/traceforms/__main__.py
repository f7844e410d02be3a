"""
Main entry point for traceforms.

This module allows the package to be executed as:
    python -m traceforms
"""

from traceforms.cli import main

if __name__ == "__main__":
    main()
