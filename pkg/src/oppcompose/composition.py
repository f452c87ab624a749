"""Service graph construction and composition selection.

A node prices candidate compositions on a directed graph with two vertex
classes: (service, host) vertices for every hosted copy it knows about,
and (type, owner) vertices anchoring the request's input and output at
the node itself.  Edge costs combine the estimated temporal distance
between the two hosts with the estimated load at the receiving host;
edges returning the final result to the owner carry distance only.  The
cheapest path from the input-type vertex to the output-type vertex is
the selected composition.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .service_model import Service, ServicePlacement

__all__ = [
    "ServiceGraph",
    "CompositionPath",
    "build_graph",
    "select_composition",
    "dijkstra_reuse",
]

Vertex = tuple  # ("t", type_id) or ("s", Service, host)


@dataclass
class CompositionPath:
    """An ordered stage list with its estimated cost (in time units)."""

    stages: tuple[tuple[Service, int], ...]
    cost: float
    input: int
    output: int

    def hosts(self) -> tuple[int, ...]:
        return tuple(n for _, n in self.stages)


class ServiceGraph:
    """Adjacency view of one node's composition choices for one request."""

    def __init__(self, owner: int, n_d: int):
        self.owner = owner
        self.n_d = n_d
        self.adjacency: dict[Vertex, list[tuple[Vertex, float]]] = {}
        self.service_vertices: list[Vertex] = []

    def add_edge(self, u: Vertex, v: Vertex, cost: float) -> None:
        self.adjacency.setdefault(u, []).append((v, cost))

    def edges_from(self, u: Vertex) -> list[tuple[Vertex, float]]:
        return self.adjacency.get(u, [])


def build_graph(
    owner: int,
    placement: ServicePlacement,
    n_d: int,
    request: tuple[int, int],
    t_hat: Callable[[int, int], float],
    l_hat: Callable[[int], float],
    known: Callable[[int], bool] | None = None,
    load_aware: bool = True,
    single_stage: bool = False,
) -> ServiceGraph:
    """Assemble the owner's service graph for one (input, output) request.

    ``t_hat(i, j)`` estimates the temporal distance between devices i and
    j and ``l_hat(j)`` the load at device j, both in time units.  Hosts
    the owner has no knowledge of are left out of the graph.  With
    ``single_stage`` only exact-match services (one stage) are reachable;
    with ``load_aware`` off the load term is dropped from the edge cost.
    """
    req_in, req_out = request
    g = ServiceGraph(owner, n_d)
    start: Vertex = ("t", req_in)

    hosted: list[tuple[Service, int]] = []
    for service in sorted(placement.by_service):
        for node in placement.by_service[service]:
            if node == owner or known is None or known(node):
                hosted.append((service, node))
    g.service_vertices = [("s", s, n) for s, n in hosted]

    def stage_cost(src_dev: int, service: Service, dst_dev: int) -> float:
        cost = t_hat(src_dev, dst_dev)
        if load_aware:
            cost += l_hat(dst_dev)
        return cost

    for service, node in hosted:
        v: Vertex = ("s", service, node)
        if service.input == req_in and (not single_stage or service.output == req_out):
            g.add_edge(start, v, stage_cost(owner, service, node))
        if service.output == req_out or not single_stage:
            # Return edge: distance back to the owner only (result routing).
            g.add_edge(v, ("t", service.output), t_hat(node, owner))
    if not single_stage:
        for s1, n1 in hosted:
            u: Vertex = ("s", s1, n1)
            for s2, n2 in hosted:
                if s1.output == s2.input:
                    g.add_edge(u, ("s", s2, n2), stage_cost(n1, s2, n2))
    return g


def _vertex_ranks(g: ServiceGraph, tie_rng: np.random.Generator | None) -> dict[Vertex, int]:
    ordered = sorted(g.service_vertices, key=lambda v: (v[1], v[2]))
    if tie_rng is not None:
        perm = tie_rng.permutation(len(ordered))
        return {v: int(perm[i]) for i, v in enumerate(ordered)}
    return {v: i for i, v in enumerate(ordered)}


def _dijkstra(
    g: ServiceGraph, source: Vertex, tie_rng: np.random.Generator | None = None
) -> dict[Vertex, tuple[float, tuple[tuple[Service, int], ...]]]:
    """Cheapest labels from ``source`` to every reachable vertex.

    Ties resolve to fewer stages, then to paths that finish at the owner
    (no remote return leg), then to the smallest stage-rank sequence;
    ranks are lexicographic by (service, host) unless a tie_rng supplies a
    random permutation (used when selection should not be biased by ids).
    """
    ranks = _vertex_ranks(g, tie_rng)
    best: dict[Vertex, tuple[float, int, int, tuple[int, ...]]] = {}
    settled: dict[Vertex, tuple[float, tuple[tuple[Service, int], ...]]] = {}
    heap: list = []
    heapq.heappush(heap, (0.0, 0, 0, (), source, ()))
    best[source] = (0.0, 0, 0, ())
    while heap:
        cost, n_stages, penalty, key, vertex, stages = heapq.heappop(heap)
        if vertex in settled:
            continue
        settled[vertex] = (cost, stages)
        for nxt, w in g.edges_from(vertex):
            if nxt in settled:
                continue
            if nxt[0] == "s":
                label = (
                    cost + w,
                    n_stages + 1,
                    penalty,
                    key + (ranks[nxt],),
                    nxt,
                    stages + ((nxt[1], nxt[2]),),
                )
            else:
                remote_return = 1 if vertex[0] == "s" and vertex[2] != g.owner else 0
                label = (cost + w, n_stages, penalty + remote_return, key, nxt, stages)
            probe = (label[0], label[1], label[2], label[3])
            if nxt not in best or probe < best[nxt]:
                best[nxt] = probe
                heapq.heappush(heap, label)
    return settled


def select_composition(
    g: ServiceGraph,
    req_in: int,
    req_out: int,
    tie_rng: np.random.Generator | None = None,
) -> CompositionPath | None:
    """Cheapest composition from ``req_in`` to ``req_out``, or None."""
    labels = _dijkstra(g, ("t", req_in), tie_rng)
    hit = labels.get(("t", req_out))
    if hit is None or not math.isfinite(hit[0]):
        return None
    cost, stages = hit
    if not stages:
        return None
    return CompositionPath(stages=stages, cost=cost, input=req_in, output=req_out)


def dijkstra_reuse(
    g: ServiceGraph, req_in: int, tie_rng: np.random.Generator | None = None
) -> dict[int, CompositionPath]:
    """One run from the input-type vertex, yielding the best composition for
    every reachable output type (shared by pending requests with one input)."""
    labels = _dijkstra(g, ("t", req_in), tie_rng)
    out: dict[int, CompositionPath] = {}
    for vertex, (cost, stages) in labels.items():
        if vertex[0] == "t" and vertex[1] != req_in and stages:
            out[vertex[1]] = CompositionPath(stages=stages, cost=cost, input=req_in, output=vertex[1])
    return out
