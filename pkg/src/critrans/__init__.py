"""Critical transitions in stochastic fast-slow systems."""

__version__ = "0.1.0"
