"""Proportionate-type LMS adaptive filters in floating point and a 16-bit LNS model."""

__version__ = "0.1.0"
