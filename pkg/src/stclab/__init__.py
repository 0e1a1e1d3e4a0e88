"""Spanning tree congestion toolkit."""

__version__ = "0.1.0"
