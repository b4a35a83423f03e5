"""Dynamic parameter control for discrete black-box optimization."""
__version__ = "0.1.0"
