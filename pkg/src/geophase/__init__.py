"""Geometric phases of squeezed and displaced oscillator eigenstates."""

__version__ = "0.1.0"
