"""Bandit-guided mutation operator selection for toy-language program repair."""

__version__ = "0.1.0"
