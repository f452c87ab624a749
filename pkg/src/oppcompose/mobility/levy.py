"""Levy walk trace generator.

Nodes alternate straight-line flights and pauses; flight lengths and pause
times are drawn from truncated power laws, flight directions are uniform.
The area boundary reflects, which keeps the spatial distribution of users
roughly uniform over the area.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._dist import truncated_pareto
from .trace import PositionTrace, sample_segments

__all__ = ["LevyWalkParams", "generate_levy", "flight_lengths"]


@dataclass(frozen=True)
class LevyWalkParams:
    """Parameters of the Levy walk generator.

    ``speed_classes`` lists (node count, (v_min, v_max)) populations, e.g.
    a slow walking group and a fast vehicle-like group; counts must sum to
    the requested node count.
    """

    flight_exponent: float = 1.5
    pause_exponent: float = 1.5
    speed_classes: tuple[tuple[int, tuple[float, float]], ...] = ((10, (1.0, 1.0)), (10, (10.0, 10.0)))
    area: tuple[float, float] = (700.0, 700.0)
    flight_bounds: tuple[float, float] = (5.0, 500.0)
    pause_bounds: tuple[float, float] = (10.0, 300.0)

    def validate(self, n_nodes: int) -> None:
        if not (0 < self.flight_exponent <= 2 and 0 < self.pause_exponent <= 2):
            raise ValueError("exponents must lie in (0, 2] for the heavy-tailed regime")
        if self.area[0] <= 0 or self.area[1] <= 0:
            raise ValueError("area dimensions must be positive")
        total = sum(c for c, _ in self.speed_classes)
        if total != n_nodes:
            raise ValueError(f"speed class counts sum to {total}, expected {n_nodes}")


def _reflect(v: float, limit: float) -> float:
    """Fold a coordinate back into [0, limit] by mirror reflection."""
    period = 2.0 * limit
    v = v % period
    return v if v <= limit else period - v


def _crossing_fractions(p0: float, p1: float, limit: float) -> np.ndarray:
    """Fractions along the segment p0->p1 where it crosses a multiple of limit."""
    if p1 == p0:
        return np.empty(0)
    lo, hi = min(p0, p1), max(p0, p1)
    ks = np.arange(np.floor(lo / limit) + 1, np.ceil(hi / limit))
    return (ks * limit - p0) / (p1 - p0)


def generate_levy(
    params: LevyWalkParams, n_nodes: int, duration: float, seed: int, sample_interval: float = 30.0
) -> PositionTrace:
    """Generate a Levy walk trace for ``n_nodes`` over ``duration`` seconds."""
    params.validate(n_nodes)
    rng = np.random.default_rng(seed)
    w, h = params.area

    speeds = []
    for count, (v_lo, v_hi) in params.speed_classes:
        speeds.extend(rng.uniform(v_lo, v_hi, size=count) if v_hi > v_lo else [v_lo] * count)

    n_samples = int(round(duration / sample_interval)) + 1
    positions = np.empty((n_nodes, n_samples, 2))
    for node in range(n_nodes):
        x = rng.uniform(0, w)
        y = rng.uniform(0, h)
        if duration == 0:
            positions[node, 0] = (x, y)
            continue
        knots = [(0.0, x, y)]
        t = 0.0
        speed = speeds[node]
        while t < duration:
            length = float(truncated_pareto(rng, params.flight_exponent, *params.flight_bounds))
            angle = rng.uniform(0, 2 * np.pi)
            # Fly along the unfolded line and mirror back into the area,
            # adding a knot at every boundary crossing so the reflected
            # path stays exactly piecewise linear.
            fx = x + length * np.cos(angle)
            fy = y + length * np.sin(angle)
            flight_time = length / speed
            fracs = np.concatenate(
                [_crossing_fractions(x, fx, w), _crossing_fractions(y, fy, h), [1.0]]
            )
            for frac in np.sort(fracs):
                knots.append(
                    (
                        t + frac * flight_time,
                        _reflect(x + frac * (fx - x), w),
                        _reflect(y + frac * (fy - y), h),
                    )
                )
            t += flight_time
            x, y = knots[-1][1], knots[-1][2]
            pause = float(truncated_pareto(rng, params.pause_exponent, *params.pause_bounds))
            t += pause
            knots.append((t, x, y))
        positions[node] = sample_segments(knots, duration, sample_interval)
    return PositionTrace(positions, sample_interval, w, h)


def flight_lengths(
    params: LevyWalkParams, n_flights: int, seed: int
) -> np.ndarray:
    """Draw flight lengths exactly as the generator does (for distribution checks)."""
    rng = np.random.default_rng(seed)
    return np.asarray(truncated_pareto(rng, params.flight_exponent, *params.flight_bounds, size=n_flights))
