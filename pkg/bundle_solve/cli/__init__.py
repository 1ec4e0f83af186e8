"""CLI package for bundle-solve."""
