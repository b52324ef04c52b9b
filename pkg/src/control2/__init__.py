"""Machine checks of the 2-adic control theorem for Gamma_1(N 2^r)."""

__version__ = "0.1.0"
