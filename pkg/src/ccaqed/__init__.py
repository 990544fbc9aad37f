"""Coupled-cavity-array QED: giant-atom spectra, chirality and dynamics."""

__version__ = "0.1.0"
