"""Core utilities for randtomo."""
