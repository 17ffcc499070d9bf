"""Certified partial decision procedures for comparing C-finite functions."""

__version__ = "0.1.0"
