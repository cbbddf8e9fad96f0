"""Data models for randtomo."""

from .entities import AngleSet, Image, RngSeed, SinogramBlock

__all__ = ["AngleSet", "Image", "RngSeed", "SinogramBlock"]
