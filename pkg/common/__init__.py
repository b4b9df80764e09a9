"""Shared settings, errors, logging and random-stream helpers."""
