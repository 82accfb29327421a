"""Deterministic evolution and stochastic sampling of the master equation."""
