#!/usr/bin/env python3
"""
Command-line interface entry point for formreg.
"""
import sys
import os

# Add the project root for the src package imports
sys.path.insert(0, os.path.dirname(__file__))

from src.cli.formreg_cli import main

if __name__ == "__main__":
    main()
