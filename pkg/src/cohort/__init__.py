"""Census-layer normalisation pipeline for longitudinal student registers."""

__version__ = "0.1.0"
