"""Homology of spaces of long and closed knots from companionship trees."""

__version__ = "0.1.0"
