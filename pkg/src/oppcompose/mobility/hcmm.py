"""Community-based trace generator with social rewiring.

The area is split into a grid of community cells and every node gets one
home community.  Social links start as a clique inside each community;
each link is rewired with probability ``rewiring_p`` to a node of another
community.  A node picks its next goal community with probability
proportional to the total link weight toward that community's members, so
with zero rewiring nobody ever leaves home, and travel between
communities becomes more frequent as the rewiring probability grows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._dist import truncated_pareto
from .trace import PositionTrace, sample_segments

__all__ = ["HcmmParams", "generate_hcmm", "community_index", "home_communities"]


@dataclass(frozen=True)
class HcmmParams:
    grid: tuple[int, int] = (2, 2)
    rewiring_p: float = 0.1
    area: tuple[float, float] = (700.0, 700.0)
    speed: float = 1.0
    pause_exponent: float = 1.5
    pause_bounds: tuple[float, float] = (10.0, 300.0)

    def validate(self) -> None:
        if not (0.0 <= self.rewiring_p <= 1.0):
            raise ValueError(f"rewiring probability must lie in [0, 1], got {self.rewiring_p}")
        if self.grid[0] < 1 or self.grid[1] < 1:
            raise ValueError("community grid must have at least one cell")
        if self.area[0] <= 0 or self.area[1] <= 0:
            raise ValueError("area dimensions must be positive")

    @property
    def n_communities(self) -> int:
        return self.grid[0] * self.grid[1]

    def cell_bounds(self, community: int) -> tuple[float, float, float, float]:
        rows, cols = self.grid
        r, c = divmod(community, cols)
        cw, ch = self.area[0] / cols, self.area[1] / rows
        return c * cw, r * ch, cw, ch


def community_index(params: HcmmParams, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Community cell containing each (x, y) position."""
    rows, cols = params.grid
    ci = np.minimum((np.asarray(x) / params.area[0] * cols).astype(int), cols - 1)
    ri = np.minimum((np.asarray(y) / params.area[1] * rows).astype(int), rows - 1)
    return ri * cols + ci


def home_communities(params: HcmmParams, n_nodes: int, seed: int) -> np.ndarray:
    """Home community of each node (balanced random deal, same per seed)."""
    rng = np.random.default_rng(seed)
    homes = np.array([i % params.n_communities for i in range(n_nodes)])
    return homes[rng.permutation(n_nodes)]


def generate_hcmm(
    params: HcmmParams, n_nodes: int, duration: float, seed: int, sample_interval: float = 30.0
) -> PositionTrace:
    """Generate a community-driven trace for ``n_nodes`` over ``duration`` seconds."""
    params.validate()
    rng = np.random.default_rng(seed)
    homes = home_communities(params, n_nodes, seed)

    # Social links: clique within each home community, each link rewired
    # with probability rewiring_p to a node in some other community.
    links: list[list[tuple[int, float]]] = [[] for _ in range(n_nodes)]
    for node in range(n_nodes):
        peers = [m for m in range(n_nodes) if m != node and homes[m] == homes[node]]
        for peer in peers:
            if params.rewiring_p > 0 and rng.random() < params.rewiring_p:
                outside = [m for m in range(n_nodes) if homes[m] != homes[node]]
                if outside:
                    peer = outside[int(rng.integers(len(outside)))]
            links[node].append((peer, 1.0))

    n_comms = params.n_communities
    attraction = np.zeros((n_nodes, n_comms))
    for node in range(n_nodes):
        sizes = np.bincount(homes, minlength=n_comms).astype(float)
        for peer, wgt in links[node]:
            attraction[node, homes[peer]] += wgt
        attraction[node] /= np.maximum(sizes, 1.0)

    n_samples = int(round(duration / sample_interval)) + 1
    positions = np.empty((n_nodes, n_samples, 2))
    for node in range(n_nodes):
        x0, y0, cw, ch = params.cell_bounds(int(homes[node]))
        x = rng.uniform(x0, x0 + cw)
        y = rng.uniform(y0, y0 + ch)
        if duration == 0:
            positions[node, 0] = (x, y)
            continue
        knots = [(0.0, x, y)]
        t = 0.0
        weights = attraction[node]
        total = weights.sum()
        while t < duration:
            t += float(truncated_pareto(rng, params.pause_exponent, *params.pause_bounds))
            knots.append((t, x, y))
            if total > 0:
                goal = int(rng.choice(n_comms, p=weights / total))
            else:
                goal = int(homes[node])
            gx0, gy0, gcw, gch = params.cell_bounds(goal)
            nx = rng.uniform(gx0, gx0 + gcw)
            ny = rng.uniform(gy0, gy0 + gch)
            t += float(np.hypot(nx - x, ny - y)) / params.speed
            x, y = nx, ny
            knots.append((t, x, y))
        positions[node] = sample_segments(knots, duration, sample_interval)
    return PositionTrace(positions, sample_interval, params.area[0], params.area[1])
