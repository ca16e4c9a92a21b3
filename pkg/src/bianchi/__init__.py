"""Modular symbols and Fourier expansions of Bianchi modular forms."""

__version__ = "0.1.0"
