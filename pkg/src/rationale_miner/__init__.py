"""Commit-message rationale mining and conflict analysis toolkit."""

__version__ = "0.1.0"
