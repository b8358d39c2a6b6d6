"""Few-variable first-order sentences that tell two uniform random graphs apart."""

__version__ = "0.1.0"
