"""Nodal structure and fixed-node quantum Monte Carlo for light atoms."""

__version__ = "0.1.0"
