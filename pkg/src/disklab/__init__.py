"""disklab: quasimodes, billiard dynamics, and delocalization diagnostics on the unit disk."""

__version__ = "0.1.0"
