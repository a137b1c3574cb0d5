"""Multipartite spectral embedding and clustering."""

__version__ = "0.1.0"
