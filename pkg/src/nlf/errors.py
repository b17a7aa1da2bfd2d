"""Shared exception base for the nlf package."""


class NlfError(Exception):
    """Base class for all errors raised by this package."""
