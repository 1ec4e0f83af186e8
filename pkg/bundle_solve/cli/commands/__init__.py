"""Command modules for the bundle-solve CLI."""
