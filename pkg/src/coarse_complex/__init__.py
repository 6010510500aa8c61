"""Computational core for coarse/L_p topology of uniformly locally finite complexes."""
__version__ = "0.1.0"
