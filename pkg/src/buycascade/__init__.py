"""Two-stage cascaded classifier for e-commerce purchase prediction."""

__version__ = "0.1.0"
