"""Utility helpers for randtomo."""
