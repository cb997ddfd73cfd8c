"""Shared exception base for the privapi package.

Module-specific exceptions live next to the code that raises them and all
derive from :class:`PrivApiError` so callers can catch the whole family.
"""


class PrivApiError(Exception):
    """Base class for every error raised by privapi."""
