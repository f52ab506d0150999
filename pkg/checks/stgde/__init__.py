"""Gradient checks for masked attention blocks and the depth head."""
