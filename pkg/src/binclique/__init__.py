"""Desk-scale experiments on clique formulas over random k-partite graphs."""

from .graph import BlockGraph, complete_graph, empty_graph, load_graph, sample_graph, save_graph

__all__ = ["BlockGraph", "complete_graph", "empty_graph", "load_graph", "sample_graph", "save_graph"]
__version__ = "0.1.0"
