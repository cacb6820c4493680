"""Exact lattice computations on negative definite plumbing graphs."""

from .errors import PlumbError
from .graph import PlumbingGraph, VertexData, parse_graph, serialize_graph

__all__ = ["PlumbError", "PlumbingGraph", "VertexData", "parse_graph", "serialize_graph"]
