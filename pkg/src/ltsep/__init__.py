"""Deciding separability of regular languages by locally (threshold) testable
languages, with checkable witnesses in both directions."""

__version__ = "0.1.0"
