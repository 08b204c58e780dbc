"""agcal: generalized numbers and functions over asymptotic gauges."""

__version__ = "0.1.0"
