#!/usr/bin/env python3
"""Entry point for py-phase-ident when run as module"""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
