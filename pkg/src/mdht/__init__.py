"""mdht: directional and maximal directional Hilbert transforms on
periodic grids, exact stabbing geometry over direction-set covers, and
machine-checkable operator-norm certificates."""

__version__ = "0.1.0"
