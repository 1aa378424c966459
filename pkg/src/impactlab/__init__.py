"""Change impact prediction on learned call-graph weights."""

__version__ = "0.1.0"
