"""Gradient checks for the training losses."""
