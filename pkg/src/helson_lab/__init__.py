"""Desk-scale laboratory for Riesz-product Drury functions, moment-problem
measures, Helson-set spectral projectors, lacunary Riesz-product measures,
and Gaussian/Carleman diagnostics of stationary processes."""

__version__ = "0.1.0"
