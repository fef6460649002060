"""BCFW cells, promotion and tilings of the m=4 amplituhedron."""

__version__ = "0.1.0"
