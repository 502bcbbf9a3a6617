"""Ensemble definitions shared by the exact and the Monte Carlo engines."""

from __future__ import annotations

from dataclasses import dataclass

from . import algebra
from .graph import Edge, QuditGraph, boundary_edges, check_subset, uniform_edge_distribution

MODELS = ("single-edge", "random-edge", "chain")
ORDERINGS = ("least-entangling", "reversed", "random-per-step")


@dataclass(frozen=True)
class EnsembleSpec:
    """States ``U_k ... U_1 |0...0>`` for ``k`` ticks of the chosen model.

    ``single-edge``: one Haar gate on the graph's only edge per tick.
    ``random-edge``: a uniformly random edge and a Haar gate per tick.
    ``chain``: a Haar gate on every edge per tick, in the ordering given by
    ``ordering``; ``random-per-step`` draws a fresh permutation each tick.
    """

    model: str
    graph: QuditGraph
    subset: int
    k: int
    ordering: str = "least-entangling"

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        if self.k < 0:
            raise ValueError("k must be >= 0")
        check_subset(self.graph, self.subset)
        if self.model == "single-edge" and len(self.graph.edges) != 1:
            raise ValueError("single-edge model needs a graph with exactly one edge")
        if self.model != "chain" and self.ordering not in ("least-entangling",):
            raise ValueError("orderings apply to the chain model only")
        if self.ordering not in ORDERINGS:
            raise ValueError(f"unknown ordering {self.ordering!r}")
        if not self.graph.edges:
            raise ValueError("graph has no edges")

    @property
    def q(self) -> float:
        return len(boundary_edges(self.graph, self.subset)) / len(self.graph.edges)

    def fixed_ordering(self) -> tuple[Edge, ...] | None:
        """Time ordering of one chain sweep, or None when drawn per tick."""
        if self.model != "chain" or self.ordering == "random-per-step":
            return None
        order = algebra.least_entangling_ordering(self.graph, self.subset)
        return order if self.ordering == "least-entangling" else tuple(reversed(order))

    def superop(self, seed: int = 0) -> algebra.SuperopSpec:
        """The averaging superoperator of one tick.

        For ``random-per-step`` the exact ordering average is used when the
        graph is small enough, otherwise a seeded single realization.
        """
        g = self.graph
        if self.model == "single-edge":
            return algebra.SingleEdge(g, g.edges[0])
        if self.model == "random-edge":
            return algebra.Mixture(g, uniform_edge_distribution(g))
        order = self.fixed_ordering()
        if order is not None:
            return algebra.OrderedChain(g, order)
        if len(g.edges) <= algebra.MAX_AVERAGED_EDGES:
            return algebra.AveragedOrderChain(g)
        return algebra.RandomOrderChain(g, seed)
