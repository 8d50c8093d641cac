"""Universal extensions of tropical structures of curves, computed exactly."""

__version__ = "0.1.0"
