"""Tridiagonal non-Hermitian beta ensembles: sampling, spectra and diagnostics."""

__version__ = "0.1.0"
