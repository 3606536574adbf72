"""Scoring sidecar: an HTTP service for text-pair and sentence models."""

__version__ = "0.1.0"
