"""Shared exception types mapped to CLI exit codes."""


class CmapError(Exception):
    exit_code = 2


class DataError(CmapError):
    """Invalid or malformed input data."""
    exit_code = 2


class UsageError(CmapError):
    """Bad command-line usage or configuration."""
    exit_code = 1
