"""Discrete-event simulation of request composition over a contact trace.

The engine advances in time-ordered events: unit boundaries (timer ticks,
pairwise knowledge exchanges for co-located nodes, load-window updates),
contact starts (encounter stats, forwarding attempts), service
completions, Poisson request generation, forwarding sweeps, and deadline
expirations.  Identical (config, seed) pairs reproduce identical results.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .contact_engine import ContactTrace
from .composition import CompositionPath
from .forwarding import EncounterStats, Scheme, MT, should_relay
from .knowledge import KnowledgeStore, LoadTracker, exchange_all
from .service_model import Service, ServiceCatalog, ServicePlacement

__all__ = [
    "RequestPattern",
    "SimConfig",
    "RequestRecord",
    "RunResult",
    "run",
    "write_records_csv",
    "read_records_csv",
    "RECORD_FIELDS",
]

# Event priorities at equal timestamps.
_P_BOUNDARY = 0
_P_CONTACT = 1
_P_COMPLETION = 2
_P_GENERATE = 3
_P_SWEEP = 4
_P_DEADLINE = 5


@dataclass(frozen=True)
class RequestPattern:
    """Admissible (input, output) request pairs with draw weights."""

    pairs: tuple[tuple[int, int], ...]
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if not self.pairs:
            raise ValueError("request pattern admits no (input, output) pairs")
        if self.weights is not None and len(self.weights) != len(self.pairs):
            raise ValueError("weights must match pairs")

    @classmethod
    def min_functionality(cls, catalog: ServiceCatalog, k_min: int) -> "RequestPattern":
        return cls(pairs=tuple(catalog.request_pairs(min_k=k_min)))

    @classmethod
    def fixed_length(cls, catalog: ServiceCatalog, length: int,
                     start_weights: dict[int, float] | None = None) -> "RequestPattern":
        """Requests requiring exactly ``length`` unit services of the catalog."""
        pairs = tuple(catalog.request_pairs(min_k=length, max_k=length))
        if start_weights is None:
            return cls(pairs=pairs)
        weights = tuple(float(start_weights.get(x, 1.0)) for x, _ in pairs)
        return cls(pairs=pairs, weights=weights)

    def draw(self, rng: np.random.Generator) -> tuple[int, int]:
        if self.weights is None:
            return self.pairs[int(rng.integers(len(self.pairs)))]
        w = np.asarray(self.weights, dtype=float)
        return self.pairs[int(rng.choice(len(self.pairs), p=w / w.sum()))]


@dataclass
class SimConfig:
    catalog: ServiceCatalog
    placement: ServicePlacement
    pattern: RequestPattern
    awareness: str = "local"
    scheme: Scheme = MT
    request_rate_per_min: float = 0.4
    timeout_s: float = 900.0
    mean_exec_s: float = 30.0
    unit_s: float = 30.0
    t_av: float = 1.0
    radius: float | None = None
    load_alpha: float = 0.5
    delay_warmup_s: float = 7200.0
    opportunistic: str = "relay"  # off | relay | contact
    recompute_per_stage: bool = True
    replan_on_relay: bool = True
    load_aware: bool = True
    exact_match: bool = False
    exec_deterministic: bool = False
    # When set, requests come from this fixed list of
    # (time, origin, input, output) instead of the Poisson stream.
    scripted_requests: tuple[tuple[float, int, int, int], ...] | None = None
    seed: int = 0

    def validate(self) -> None:
        if self.request_rate_per_min < 0:
            raise ValueError("request rate must be nonnegative")
        if self.timeout_s <= 0:
            raise ValueError("timeout must be positive")
        if self.awareness not in ("minimal", "local", "global", "perfect"):
            raise ValueError(f"unknown awareness level {self.awareness!r}")
        if self.opportunistic not in ("off", "relay", "contact"):
            raise ValueError(f"unknown opportunistic mode {self.opportunistic!r}")


@dataclass
class RequestRecord:
    id: int
    origin: int
    input: int
    output: int
    created: float
    deadline: float
    status: str = "in-flight"
    completed: float | None = None
    hops: int = 0
    stages: list[tuple[Service, int, bool]] = field(default_factory=list)
    estimated_cost_s: float | None = None

    @property
    def delay(self) -> float | None:
        return None if self.completed is None else self.completed - self.created

    @property
    def opportunistic_stages(self) -> int:
        return sum(1 for _, _, opp in self.stages if opp)


@dataclass
class RunResult:
    records: list[RequestRecord]
    duration: float
    config_seed: int

    def counts(self) -> dict[str, int]:
        out = {"completed": 0, "timed-out": 0, "in-flight": 0}
        for r in self.records:
            out[r.status] += 1
        return out

    def completion_rate(self) -> float:
        return self.counts()["completed"] / len(self.records) if self.records else 0.0


RECORD_FIELDS = ("id,origin,in,out,created_s,status,completed_s,delay_s,hops,"
                 "stages,opportunistic_stages,estimated_cost_s")


def write_records_csv(result: RunResult, path) -> None:
    with open(path, "w") as fh:
        fh.write(RECORD_FIELDS + "\n")
        for r in sorted(result.records, key=lambda r: r.id):
            stages = "|".join(
                f"{s.input}-{s.output}@{node}" + ("*" if opp else "")
                for s, node, opp in r.stages
            )
            completed = f"{r.completed:.3f}" if r.completed is not None else ""
            delay = f"{r.delay:.3f}" if r.delay is not None else ""
            est = f"{r.estimated_cost_s:.3f}" if r.estimated_cost_s is not None else ""
            fh.write(f"{r.id},{r.origin},{r.input},{r.output},{r.created:.3f},{r.status},"
                     f"{completed},{delay},{r.hops},{stages},{r.opportunistic_stages},{est}\n")


def read_records_csv(path) -> list[dict]:
    """Rows back as dicts with numeric fields parsed (None for blanks)."""
    rows = []
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        for line in fh:
            parts = line.rstrip("\n").split(",")
            row = dict(zip(header, parts))
            row["id"] = int(row["id"])
            row["origin"] = int(row["origin"])
            row["in"] = int(row["in"])
            row["out"] = int(row["out"])
            row["created_s"] = float(row["created_s"])
            row["completed_s"] = float(row["completed_s"]) if row["completed_s"] else None
            row["delay_s"] = float(row["delay_s"]) if row["delay_s"] else None
            row["hops"] = int(row["hops"])
            row["opportunistic_stages"] = int(row["opportunistic_stages"])
            row["estimated_cost_s"] = float(row["estimated_cost_s"]) if row["estimated_cost_s"] else None
            rows.append(row)
    return rows


class _Item:
    """Mutable in-simulation request state."""

    __slots__ = ("record", "current_input", "phase", "location", "destination",
                 "planned_stage", "plan", "exec_token", "opp_flag")

    def __init__(self, record: RequestRecord):
        self.record = record
        self.current_input = record.input
        self.phase = "carried"           # carried | queued | executing | result | done
        self.location = record.origin
        self.destination: int | None = None
        self.planned_stage: Service | None = None
        self.plan: list[tuple[Service, int]] | None = None
        self.exec_token = -1
        self.opp_flag = False


class _GraphTemplate:
    """Placement-derived edge structure shared by every path computation.

    Vertices are ints: hosted service copies first, then one vertex per
    type.  Edge device endpoints use -1 where the graph owner's id must be
    substituted.  Costs are gathered per computation from the owner's
    device-distance and load vectors, so re-pricing the graph is O(edges).
    """

    def __init__(self, placement: ServicePlacement, n_d: int, single_stage: bool):
        self.n_d = n_d
        copies = [(s, n) for s in sorted(placement.by_service)
                  for n in placement.by_service[s]]
        self.copies = copies
        self.n_service_vertices = len(copies)
        self.type_vertex = {x: len(copies) + x - 1 for x in range(1, n_d + 1)}
        self.n_vertices = len(copies) + n_d
        edges_src: list[int] = []
        edges_dst: list[int] = []
        edges_sdev: list[int] = []
        edges_ddev: list[int] = []
        edges_load: list[bool] = []
        adjacency: list[list[int]] = [[] for _ in range(self.n_vertices)]

        def add(u, v, sdev, ddev, with_load):
            adjacency[u].append(len(edges_src))
            edges_src.append(u)
            edges_dst.append(v)
            edges_sdev.append(sdev)
            edges_ddev.append(ddev)
            edges_load.append(with_load)

        for vi, (s, n) in enumerate(copies):
            add(self.type_vertex[s.input], vi, -1, n, True)
            add(vi, self.type_vertex[s.output], n, -1, False)
            if not single_stage:
                for vj, (s2, n2) in enumerate(copies):
                    if s.output == s2.input:
                        add(vi, vj, n, n2, True)
        self.e_dst = np.array(edges_dst, dtype=np.int64)
        self.e_sdev = np.array(edges_sdev, dtype=np.int64)
        self.e_ddev = np.array(edges_ddev, dtype=np.int64)
        self.e_load = np.array(edges_load)
        self.adjacency = adjacency
        # Rank of each service vertex in (service, host) order, for ties.
        order = sorted(range(len(copies)), key=lambda i: copies[i])
        self.lex_rank = np.empty(len(copies), dtype=np.int64)
        for rank, vi in enumerate(order):
            self.lex_rank[vi] = rank
        self._single_stage = single_stage
        self._reachable: dict[int, frozenset[int]] = {}

    def reachable_outputs(self, req_in: int) -> frozenset[int]:
        """Output types attainable from ``req_in`` regardless of costs.

        Requests outside this set can never be routed under this placement,
        so re-planning them is pointless.
        """
        cached = self._reachable.get(req_in)
        if cached is not None:
            return cached
        step: dict[int, set[int]] = {}
        for s, _ in self.copies:
            step.setdefault(s.input, set()).add(s.output)
        if self._single_stage:
            seen = set(step.get(req_in, ()))
        else:
            seen = set()
            frontier = [req_in]
            while frontier:
                for y in step.get(frontier.pop(), ()):
                    if y not in seen:
                        seen.add(y)
                        frontier.append(y)
        result = frozenset(seen - {req_in})
        self._reachable[req_in] = result
        return result

    def edge_costs(self, owner: int, dist: np.ndarray, load: np.ndarray,
                   load_aware: bool) -> np.ndarray:
        sdev = np.where(self.e_sdev < 0, owner, self.e_sdev)
        ddev = np.where(self.e_ddev < 0, owner, self.e_ddev)
        costs = dist[sdev, ddev].astype(float)
        if load_aware:
            costs = costs + np.where(self.e_load, load[ddev], 0.0)
        return costs

    def shortest(self, owner: int, req_in: int, req_out: int,
                 dist: np.ndarray, load: np.ndarray, load_aware: bool,
                 ranks: np.ndarray | None = None) -> CompositionPath | None:
        """Dijkstra from the input-type vertex; ties prefer fewer stages,
        then finishing at the owner, then the smallest stage-rank sequence."""
        costs = self.edge_costs(owner, dist, load, load_aware)
        if ranks is None:
            ranks = self.lex_rank
        start = self.type_vertex[req_in]
        goal = self.type_vertex[req_out]
        best: dict[int, tuple] = {start: (0.0, 0, 0, ())}
        settled: dict[int, tuple] = {}
        heap: list = [(0.0, 0, 0, (), start, ())]
        n_svc = self.n_service_vertices
        while heap:
            cost, n_stages, penalty, key, vertex, stages = heapq.heappop(heap)
            if vertex in settled:
                continue
            settled[vertex] = (cost, stages)
            if vertex == goal:
                break
            if vertex >= n_svc and vertex != start:
                continue  # type vertices other than the source are terminals
            for ei in self.adjacency[vertex]:
                w = costs[ei]
                if not math.isfinite(w):
                    continue
                nxt = int(self.e_dst[ei])
                if nxt in settled:
                    continue
                if nxt < n_svc:
                    label = (cost + w, n_stages + 1, penalty,
                             key + (int(ranks[nxt]),), nxt, stages + (nxt,))
                else:
                    remote = 1 if vertex < n_svc and self.copies[vertex][1] != owner else 0
                    label = (cost + w, n_stages, penalty + remote, key, nxt, stages)
                probe = label[:4]
                if nxt not in best or probe < best[nxt]:
                    best[nxt] = probe
                    heapq.heappush(heap, label)
        hit = settled.get(goal)
        if hit is None or not hit[1]:
            return None
        cost, stage_idx = hit
        stages = tuple(self.copies[i] for i in stage_idx)
        return CompositionPath(stages=stages, cost=cost, input=req_in, output=req_out)


class _Engine:
    def __init__(self, config: SimConfig, contacts: ContactTrace):
        config.validate()
        self.cfg = config
        self.contacts = contacts
        self.n = contacts.n_nodes
        self.duration = contacts.duration
        self.rng = np.random.default_rng(config.seed)
        self.tie_rng = np.random.default_rng((config.seed, 0x7ee5))
        track_matrix = config.awareness == "global"
        self.stores = [KnowledgeStore(i, self.n, t_av=config.t_av, radius=config.radius,
                                      track_matrix=track_matrix) for i in range(self.n)]
        self.trackers = [LoadTracker(mean_exec=config.mean_exec_s, alpha=config.load_alpha,
                                     window=config.unit_s) for _ in range(self.n)]
        self.stats = EncounterStats(self.n, window=config.scheme.window)
        self.queues: list[list[_Item]] = [[] for _ in range(self.n)]
        self.executing: list[tuple[_Item, int] | None] = [None] * self.n
        self.carried: list[list[_Item]] = [[] for _ in range(self.n)]
        self.records: list[RequestRecord] = []
        self.items: dict[int, _Item] = {}
        self.heap: list = []
        self.seq = 0
        self.exec_tokens = 0
        self.unit_index = 0
        self.template = _GraphTemplate(config.placement, config.catalog.n_d, single_stage=False)
        self.template_exact = _GraphTemplate(config.placement, config.catalog.n_d, single_stage=True)
        self.boundary_pairs = contacts.boundary_pairs(config.unit_s)
        self._dist_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        self._pending_sweeps: set[tuple[int, float]] = set()
        # Forwarding-layer state: when each pair last met directly.  The
        # timer relay rules run on these encounter ages, not on the
        # gossiped composition timers (transitive updates keep every
        # node's gossiped value near the network minimum, which would
        # erase the relay gradient entirely).
        self.last_enc = np.full((self.n, self.n), -math.inf)

    # -- event plumbing ------------------------------------------------

    def push(self, t: float, prio: int, kind: str, payload=None) -> None:
        self.seq += 1
        heapq.heappush(self.heap, (t, prio, self.seq, kind, payload))

    def schedule_sweep(self, node: int, t: float) -> None:
        key = (node, t)
        if key not in self._pending_sweeps:
            self._pending_sweeps.add(key)
            self.push(t, _P_SWEEP, "sweep", node)

    # -- knowledge-driven cost matrices ---------------------------------

    def _distances(self, owner: int) -> tuple[np.ndarray, np.ndarray]:
        """(dist, load) vectors/matrices in time units for the current unit."""
        cached = self._dist_cache.get(owner)
        if cached is not None:
            return cached
        cfg = self.cfg
        level = cfg.awareness
        n = self.n
        if level == "minimal":
            dist = np.ones((n, n))
            np.fill_diagonal(dist, 0.0)
            load = np.zeros(n)
        elif level == "perfect":
            dist = np.stack([s.timers for s in self.stores])
            load = np.array([self._pending_count(j) * cfg.mean_exec_s for j in range(n)])
            load /= cfg.unit_s
        else:
            store = self.stores[owner]
            ta = store.timers
            dist = ta[:, None] + ta[None, :]
            if level == "global":
                seen = store.matrix_obs > -math.inf
                if seen.any():
                    age = self.unit_index - store.matrix_obs[seen]
                    rows = store.matrix[seen] + age[:, None]
                    dist[seen] = np.where(np.isfinite(store.matrix[seen]), rows, dist[seen])
            dist[owner, :] = ta
            dist[:, owner] = ta
            np.fill_diagonal(dist, 0.0)
            load = store.loads / cfg.unit_s
        self._dist_cache[owner] = (dist, load)
        return dist, load

    def routable(self, req_in: int, req_out: int) -> bool:
        template = self.template_exact if self.cfg.exact_match else self.template
        return req_out in template.reachable_outputs(req_in)

    def compute_path(self, node: int, req_in: int, req_out: int) -> CompositionPath | None:
        template = self.template_exact if self.cfg.exact_match else self.template
        if req_out not in template.reachable_outputs(req_in):
            return None
        dist, load = self._distances(node)
        ranks = None
        if self.cfg.awareness == "minimal":
            ranks = self.tie_rng.permutation(template.n_service_vertices)
        return template.shortest(node, req_in, req_out, dist, load,
                                 self.cfg.load_aware, ranks)

    # -- queueing and execution -----------------------------------------

    def _pending_count(self, node: int) -> int:
        return len(self.queues[node]) + (1 if self.executing[node] is not None else 0)

    def enqueue(self, node: int, item: _Item, service: Service, opportunistic: bool, t: float) -> None:
        item.phase = "queued"
        item.location = node
        item.destination = None
        item.planned_stage = service
        item.opp_flag = opportunistic
        self.queues[node].append(item)
        if self.executing[node] is None:
            self._start_execution(node, t)

    def _start_execution(self, node: int, t: float) -> None:
        if not self.queues[node]:
            return
        item = self.queues[node].pop(0)
        item.phase = "executing"
        if self.cfg.exec_deterministic:
            dt = self.cfg.mean_exec_s
        else:
            dt = float(self.rng.exponential(self.cfg.mean_exec_s))
        self.exec_tokens += 1
        item.exec_token = self.exec_tokens
        self.executing[node] = (item, item.exec_token)
        self.push(t + dt, _P_COMPLETION, "completion", (node, item.exec_token))

    def on_completion(self, t: float, node: int, token: int) -> None:
        current = self.executing[node]
        if current is None or current[1] != token:
            return  # canceled (deadline) execution
        item, _ = current
        self.executing[node] = None
        service = item.planned_stage
        item.current_input = service.output
        item.record.stages.append((service, node, item.opp_flag))
        self._start_execution(node, t)
        if item.current_input == item.record.output:
            item.phase = "result"
            item.destination = item.record.origin
            item.planned_stage = None
            if node == item.record.origin:
                self._complete(item, t)
            else:
                self.carried[node].append(item)
                self.schedule_sweep(node, t)
        else:
            self._route_next(item, node, t)

    def _complete(self, item: _Item, t: float) -> None:
        item.phase = "done"
        item.record.status = "completed"
        item.record.completed = t

    # -- routing ---------------------------------------------------------

    def _route_next(self, item: _Item, node: int, t: float,
                    defer_sweep: bool = False) -> None:
        """Pick the next stage for a request held at ``node`` (or stall).

        ``defer_sweep`` leaves any forwarding attempt to the next unit
        boundary; used after relay arrivals so re-planned destinations
        cannot cascade through several hand-offs within one instant.
        """
        item.phase = "carried"
        item.location = node
        stage = None
        if not self.cfg.recompute_per_stage and item.plan:
            while item.plan and item.plan[0][0].input != item.current_input:
                item.plan.pop(0)
            if item.plan:
                stage = item.plan.pop(0)
        else:
            path = self.compute_path(node, item.current_input, item.record.output)
            if path is not None:
                stage = path.stages[0]
        if stage is None:
            item.destination = None
            item.planned_stage = None
            self.carried[node].append(item)
            return
        service, host = stage
        if host == node:
            self.enqueue(node, item, service, opportunistic=False, t=t)
        else:
            item.destination = host
            item.planned_stage = service
            self.carried[node].append(item)
            if not defer_sweep:
                self.schedule_sweep(node, t)

    def _neighbors(self, node: int, t: float) -> list[int]:
        return [m for m in range(self.n)
                if m != node and self.contacts.in_contact(node, m, t)]

    def _transfer(self, item: _Item, src: int, dst: int, t: float) -> None:
        self.carried[src].remove(item)
        item.record.hops += 1
        item.location = dst
        if item.phase == "result":
            if dst == item.record.origin:
                self._complete(item, t)
            else:
                self.carried[dst].append(item)
                self.schedule_sweep(dst, t)
            return
        service = item.planned_stage
        if dst == item.destination:
            self.enqueue(dst, item, service, opportunistic=False, t=t)
        elif self.cfg.opportunistic != "off" and service in self.cfg.placement.services_at(dst):
            self.enqueue(dst, item, service, opportunistic=True, t=t)
        elif self.cfg.replan_on_relay and self.cfg.recompute_per_stage:
            # The holder changed: re-select the next stage from here, since
            # the topology may now offer a more feasible host.
            self._route_next(item, dst, t, defer_sweep=True)
        else:
            self.carried[dst].append(item)
            self.schedule_sweep(dst, t)

    def sweep(self, t: float, node: int) -> None:
        self._pending_sweeps.discard((node, t))
        if not self.carried[node]:
            return
        neighbors = self._neighbors(node, t)
        for item in sorted(self.carried[node], key=lambda it: it.record.id):
            if item.phase not in ("carried", "result") or item.location != node:
                continue
            if item.destination is None:
                if not self.routable(item.current_input, item.record.output):
                    continue
                self._route_next_stalled(item, node, t)
                if item.destination is None or item.location != node:
                    continue
            dest = item.destination
            carrier_ages = (t - self.last_enc[node]) / self.cfg.unit_s
            for peer in neighbors:
                if peer == dest:
                    self._transfer(item, node, peer, t)
                    break
                if (item.phase == "carried" and self.cfg.opportunistic == "contact"
                        and item.planned_stage in self.cfg.placement.services_at(peer)):
                    self._transfer(item, node, peer, t)
                    break
                peer_ages = (t - self.last_enc[peer]) / self.cfg.unit_s
                if should_relay(self.cfg.scheme, node, peer, dest,
                                carrier_ages, peer_ages, self.stats, t):
                    self._transfer(item, node, peer, t)
                    break

    def _route_next_stalled(self, item: _Item, node: int, t: float) -> None:
        """Retry path selection for a stalled request in place."""
        path = self.compute_path(node, item.current_input, item.record.output)
        if path is None:
            return
        service, host = path.stages[0]
        if host == node:
            self.carried[node].remove(item)
            self.enqueue(node, item, service, opportunistic=False, t=t)
        else:
            item.destination = host
            item.planned_stage = service

    # -- request generation and expiry ------------------------------------

    def on_generate(self, t: float, payload) -> None:
        cfg = self.cfg
        if isinstance(payload, tuple):
            node, req_in, req_out = payload
        else:
            node = payload
            req_in, req_out = cfg.pattern.draw(self.rng)
        rec = RequestRecord(
            id=len(self.records), origin=node, input=req_in, output=req_out,
            created=t, deadline=t + cfg.timeout_s,
        )
        self.records.append(rec)
        item = _Item(rec)
        self.items[rec.id] = item
        self.push(rec.deadline, _P_DEADLINE, "deadline", rec.id)
        path = self.compute_path(node, req_in, req_out)
        if path is not None:
            rec.estimated_cost_s = path.cost * cfg.unit_s
            if not cfg.recompute_per_stage:
                item.plan = list(path.stages)
            service, host = path.stages[0]
            if host == node:
                self.enqueue(node, item, service, opportunistic=False, t=t)
            else:
                item.destination = host
                item.planned_stage = service
                self.carried[node].append(item)
                self.schedule_sweep(node, t)
        else:
            self.carried[node].append(item)
        if not isinstance(payload, tuple):
            self._schedule_next_generation(node, t)

    def _schedule_next_generation(self, node: int, t: float) -> None:
        if self.cfg.request_rate_per_min <= 0:
            return
        gap = float(self.rng.exponential(60.0 / self.cfg.request_rate_per_min))
        nxt = t + gap
        if nxt <= self.duration - self.cfg.timeout_s:
            self.push(nxt, _P_GENERATE, "generate", node)

    def on_deadline(self, t: float, req_id: int) -> None:
        item = self.items[req_id]
        if item.phase == "done":
            return
        rec = item.record
        rec.status = "timed-out"
        node = item.location
        if item.phase == "queued":
            self.queues[node].remove(item)
        elif item.phase == "executing":
            self.executing[node] = None
            self._start_execution(node, t)
        elif item.phase in ("carried", "result"):
            self.carried[node].remove(item)
        item.phase = "done"

    # -- unit boundaries ---------------------------------------------------

    def on_boundary(self, t: float, k: int) -> None:
        self.unit_index = k
        self._dist_cache.clear()
        if k > 0:
            for store in self.stores:
                store.tick(1.0)
        pairs = self.boundary_pairs[k] if k < len(self.boundary_pairs) else []
        for a, b in pairs:
            self.last_enc[a, b] = self.last_enc[b, a] = t
        exchange_all(self.stores, pairs, now=float(k))
        for node in range(self.n):
            value = self.trackers[node].update(self._pending_count(node))
            self.stores[node].loads[node] = value
        active = set()
        for a, b in pairs:
            active.add(a)
            active.add(b)
        for node in range(self.n):
            if self.carried[node] and (node in active or self.stores[node].dirty):
                self.schedule_sweep(node, t)
            self.stores[node].dirty = False

    def on_contact_start(self, t: float, a: int, b: int) -> None:
        self.stats.record(a, t)
        self.stats.record(b, t)
        self.last_enc[a, b] = self.last_enc[b, a] = t
        if self.carried[a]:
            self.schedule_sweep(a, t)
        if self.carried[b]:
            self.schedule_sweep(b, t)

    # -- main loop ----------------------------------------------------------

    def run(self) -> RunResult:
        cfg = self.cfg
        n_units = int(round(self.duration / cfg.unit_s))
        for k in range(n_units + 1):
            self.push(k * cfg.unit_s, _P_BOUNDARY, "boundary", k)
        for ev in self.contacts.events:
            self.push(ev.start, _P_CONTACT, "contact", (min(ev.a, ev.b), max(ev.a, ev.b)))
        if cfg.scripted_requests is not None:
            for t, origin, req_in, req_out in cfg.scripted_requests:
                self.push(t, _P_GENERATE, "generate", (origin, req_in, req_out))
        else:
            for node in range(self.n):
                self._schedule_next_generation(node, 0.0)
        while self.heap:
            t, prio, _, kind, payload = heapq.heappop(self.heap)
            if t > self.duration + 1e-9:
                continue
            if kind == "boundary":
                self.on_boundary(t, payload)
            elif kind == "contact":
                self.on_contact_start(t, *payload)
            elif kind == "completion":
                self.on_completion(t, *payload)
            elif kind == "generate":
                self.on_generate(t, payload)
            elif kind == "sweep":
                self.sweep(t, payload)
            elif kind == "deadline":
                self.on_deadline(t, payload)
        return RunResult(records=self.records, duration=self.duration,
                         config_seed=cfg.seed)


def run(config: SimConfig, contacts: ContactTrace) -> RunResult:
    """Simulate one run of ``config`` over ``contacts``."""
    return _Engine(config, contacts).run()
