"""Gradient checks through the whole generator."""
