"""Zero-hour detection toolkit for malicious social network posts."""

__version__ = "0.1.0"
