"""Gradient checks for paired depth fusion."""
