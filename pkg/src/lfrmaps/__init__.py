"""Rational surface automorphisms from the recurrence f(x, y) = (y, (y+a)/(x+b))."""

__version__ = "0.1.0"
