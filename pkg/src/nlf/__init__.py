"""Net-load forecast comparison toolkit."""

__version__ = "0.1.0"
