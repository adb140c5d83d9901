"""
Smart-meter phase identification

Voltage series of a feeder's meters are Fourier-compressed to a handful of
harmonics, grouped by Ward hierarchical clustering and checked against the
transformer topology and across time.
"""

__version__ = "0.1.0"

__all__ = ["main"]


def main() -> int:
    """Main entry point for the application"""
    from .cli import main as cli_main

    return cli_main()
