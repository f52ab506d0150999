"""Gradient checks for the engine's primitive operations."""
