"""quasispin - quasispin Stern-Gerlach splitters on bipartite tight-binding lattices."""

__version__ = "0.1.0"
