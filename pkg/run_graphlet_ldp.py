#!/usr/bin/env python3
"""
Runner script for the graphlet LDP command-line interface.

Usage:
    python run_graphlet_ldp.py experiment --n-list 10,20,30 --epsilon-list 1 --out results.csv
    python run_graphlet_ldp.py --help
"""

import sys

from graphlet_ldp.main import main

if __name__ == "__main__":
    sys.exit(main())
