"""Version information for bundle-solve."""

__version__ = "0.1.0"
