"""Gradient checks for the frame encoder and decoders."""
