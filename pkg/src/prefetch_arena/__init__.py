"""Adaptive-weight multi-source web prefetching: sources, aggregator, cache and simulator."""

__version__ = "0.1.0"
