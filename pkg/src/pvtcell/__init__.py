"""Spectral and energy efficiency of random cellular networks with
unreliable channels."""

__version__ = "0.1.0"
