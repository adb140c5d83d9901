#!/usr/bin/env python3
"""Main entry point for py-phase-ident from a source checkout"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent / "src"))

from py_phase_ident.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
