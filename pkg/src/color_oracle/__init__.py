"""color-oracle - nearest colored node distance oracles."""

__version__ = "0.1.0"
