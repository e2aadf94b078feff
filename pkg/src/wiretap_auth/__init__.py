"""Authentication over a simulated wiretap channel: library and experiment harness."""

__version__ = "0.1.0"
