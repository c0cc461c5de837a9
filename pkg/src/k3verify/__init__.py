"""Exact and numerical verification of the multiplication kernel K3 = 1/|det A|."""

__version__ = "0.1.0"
