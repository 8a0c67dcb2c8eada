"""Extended-precision tools for the Szego minimum problem on the unit circle."""

__version__ = "0.1.0"
