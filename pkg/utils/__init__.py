"""Errors, defaults, configuration and the per-run cache."""
