"""Frobenius traces, characteristic polynomials and ASD congruence checks for the Scholl representations of two noncongruence groups."""

__version__ = "0.1.0"
