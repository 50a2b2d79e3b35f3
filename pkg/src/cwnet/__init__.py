"""Analysis of networks with Hermitian complex edge weights."""
from ._backend import BACKEND
from .errors import CwnetError
from .graph import ComplexGraph, DirectedGraph, build_directed_graph, build_graph

__version__ = "0.1.0"

__all__ = ["BACKEND", "ComplexGraph", "CwnetError", "DirectedGraph",
           "build_directed_graph", "build_graph", "__version__"]
