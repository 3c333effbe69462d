"""Zero-knowledge combinational equivalence checking."""

__version__ = "0.1.0"
