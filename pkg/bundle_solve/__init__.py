"""bundle-solve - perfect equilibria of dynamic games by line search on the equilibrium bundle."""

from bundle_solve.version import __version__

__all__ = ["__version__"]
