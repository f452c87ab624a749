"""Per-node distributed network state.

Every node keeps a timer per peer approximating its temporal distance
(time elapsed since a contact chain could have relayed information from
that peer), plus a load estimate per peer.  Timers tick once per time
unit; on contact two nodes adopt each other's strictly better entries,
paying a fixed ``t_av`` per relay hop.  Awareness levels determine how a
node prices graph edges between arbitrary peers from this state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "AWARENESS_LEVELS",
    "KnowledgeStore",
    "LoadTracker",
    "exchange",
    "exchange_all",
    "estimate_distance",
    "estimate_load",
    "gossip_payload",
    "dump_snapshot_csv",
]

AWARENESS_LEVELS = ("minimal", "local", "global", "perfect")


class KnowledgeStore:
    """Timers and load estimates one node keeps about all others.

    Timer values are in time units (one unit = ``unit_s`` seconds);
    ``math.inf`` marks an unknown or pruned peer.  The entry for the owner
    itself is pinned at zero.  When ``radius`` is set, entries whose timer
    exceeds it are dropped, bounding the state kept for far-away nodes.
    """

    __slots__ = ("owner", "n_nodes", "t_av", "radius", "timers", "loads",
                 "matrix", "matrix_obs", "dirty")

    def __init__(self, owner: int, n_nodes: int, t_av: float = 1.0,
                 radius: float | None = None, track_matrix: bool = False):
        self.owner = owner
        self.n_nodes = n_nodes
        self.t_av = t_av
        self.radius = radius
        self.timers = np.full(n_nodes, math.inf)
        self.timers[owner] = 0.0
        self.loads = np.zeros(n_nodes)
        # Full timer matrix for the distributed-global level: row i holds
        # the last observed timer vector of node i plus its observation
        # time (in units).  Row ``owner`` is implicit (live timers).
        self.matrix = np.full((n_nodes, n_nodes), math.inf) if track_matrix else None
        self.matrix_obs = np.full(n_nodes, -math.inf) if track_matrix else None
        self.dirty = False

    def tick(self, elapsed: float = 1.0) -> None:
        """Advance all timers except the owner's own entry."""
        if elapsed <= 0:
            raise ValueError("elapsed must be positive")
        self.timers += elapsed
        self.timers[self.owner] = 0.0
        self._prune()

    def _prune(self) -> None:
        if self.radius is not None:
            far = self.timers > self.radius
            far[self.owner] = False
            self.timers[far] = math.inf
            self.loads[far] = 0.0

    def known(self, peer: int) -> bool:
        return math.isfinite(self.timers[peer])


@dataclass
class LoadTracker:
    """Moving-window load estimate: pending backlog smoothed by a decay factor."""

    mean_exec: float = 30.0
    alpha: float = 0.5
    window: float = 30.0
    l_old: float = 0.0

    def update(self, pending_count: int) -> float:
        """Close a window: blend current backlog into the running estimate."""
        l_cw = pending_count * self.mean_exec
        value = self.alpha * l_cw + (1.0 - self.alpha) * self.l_old
        self.l_old = value
        return value


def _adopt(store: KnowledgeStore, peer_timers: np.ndarray, peer_loads: np.ndarray) -> bool:
    """Apply the contact update rule: for every i != owner, adopt the peer's
    entry when it is smaller by more than t_av, charging t_av for the hop."""
    candidate = peer_timers + store.t_av
    mask = peer_timers < store.timers - store.t_av
    mask[store.owner] = False
    if store.radius is not None:
        mask &= candidate <= store.radius
    if not mask.any():
        return False
    store.timers[mask] = candidate[mask]
    store.loads[mask] = peer_loads[mask]
    store.dirty = True
    return True


def _merge_matrix(store: KnowledgeStore, now: float,
                  peer_matrix: np.ndarray, peer_obs: np.ndarray,
                  peer_id: int, peer_timers: np.ndarray) -> None:
    newer = peer_obs > store.matrix_obs
    newer[store.owner] = False
    store.matrix[newer] = peer_matrix[newer]
    store.matrix_obs[newer] = peer_obs[newer]
    # The peer's own live row is always the freshest observation of it.
    store.matrix[peer_id] = peer_timers
    store.matrix_obs[peer_id] = now
    store.matrix[store.owner] = store.timers
    store.matrix_obs[store.owner] = now


def exchange(a: KnowledgeStore, b: KnowledgeStore, now: float = 0.0) -> bool:
    """Symmetric contact update between two stores; True if anything changed.

    Both directions use pre-exchange snapshots so the result does not
    depend on which side is applied first.
    """
    ta, la = a.timers.copy(), a.loads.copy()
    tb, lb = b.timers.copy(), b.loads.copy()
    changed = _adopt(a, tb, lb)
    changed |= _adopt(b, ta, la)
    if a.matrix is not None and b.matrix is not None:
        ma, oa = a.matrix.copy(), a.matrix_obs.copy()
        _merge_matrix(a, now, b.matrix, b.matrix_obs, b.owner, tb)
        _merge_matrix(b, now, ma, oa, a.owner, ta)
    return changed


def exchange_all(stores: list[KnowledgeStore], pairs: list[tuple[int, int]],
                 now: float = 0.0) -> None:
    """Run pairwise exchanges for all co-located pairs until stable.

    Nodes standing in mutual range keep exchanging while anything improves,
    so information can cross several co-located hops within one instant.
    """
    changed = True
    while changed:
        changed = False
        for i, j in pairs:
            changed |= exchange(stores[i], stores[j], now)


def estimate_distance(store: KnowledgeStore, level: str, i: int, j: int,
                      now: float = 0.0,
                      live_stores: list[KnowledgeStore] | None = None) -> float:
    """Estimated temporal distance between devices i and j, in time units.

    minimal: constant 1.  local: own timers; for two other nodes the sum
    t(i) + t(j), an upper bound on their mutual distance.  global: the
    gossiped timer row of node i, aged by its staleness.  perfect: node
    i's live timer for j, read straight from the simulator state.
    Unknown (pruned) peers yield infinity.
    """
    if i == j:
        return 0.0
    a = store.owner
    if level == "minimal":
        return 1.0
    if level == "perfect":
        if live_stores is None:
            raise ValueError("perfect awareness needs live store access")
        return float(live_stores[i].timers[j])
    if i == a:
        return float(store.timers[j])
    if j == a:
        return float(store.timers[i])
    if level == "local":
        return float(store.timers[i] + store.timers[j])
    if level == "global":
        if store.matrix is None:
            raise ValueError("global awareness needs matrix tracking enabled")
        obs = store.matrix_obs[i]
        if math.isfinite(store.matrix[i, j]) and obs > -math.inf:
            return float(store.matrix[i, j] + (now - obs))
        # No observed row yet: fall back to the local-style bound.
        return float(store.timers[i] + store.timers[j])
    raise ValueError(f"unknown awareness level {level!r}")


def estimate_load(store: KnowledgeStore, level: str, j: int,
                  true_loads: list[float] | None = None) -> float:
    """Estimated load backlog of node j in seconds."""
    if level == "minimal":
        return 0.0
    if level == "perfect":
        if true_loads is None:
            raise ValueError("perfect awareness needs live load access")
        return float(true_loads[j])
    return float(store.loads[j]) if store.known(j) or j == store.owner else 0.0


def gossip_payload(store: KnowledgeStore, level: str = "local") -> dict:
    """What one contact exchange carries, for overhead accounting.

    local: one timer + one load per known peer (O(N) scalars);
    global: additionally the known timer matrix rows (O(N^2) scalars).
    """
    known = [i for i in range(store.n_nodes) if i != store.owner and store.known(i)]
    payload = {
        "timers": {i: float(store.timers[i]) for i in known},
        "loads": {i: float(store.loads[i]) for i in known},
    }
    count = 2 * len(known)
    if level == "global" and store.matrix is not None:
        rows = {}
        for i in range(store.n_nodes):
            if store.matrix_obs[i] > -math.inf:
                rows[i] = store.matrix[i].tolist()
        payload["matrix_rows"] = rows
        count += sum(len(r) for r in rows.values())
    payload["scalar_count"] = count
    return payload


def dump_snapshot_csv(stores: list[KnowledgeStore], path) -> None:
    """Write ``owner,peer,timer,load`` rows for every known entry."""
    with open(path, "w") as fh:
        fh.write("owner,peer,timer,load\n")
        for store in stores:
            for peer in range(store.n_nodes):
                if peer == store.owner or not store.known(peer):
                    continue
                fh.write(f"{store.owner},{peer},{store.timers[peer]:.3f},{store.loads[peer]:.3f}\n")
