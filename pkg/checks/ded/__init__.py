"""Gradient checks for the spectrally normalized critic."""
