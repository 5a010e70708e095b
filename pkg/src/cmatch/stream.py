"""Bipartite configuration-model sampling, exposed as an online stream.

A degree-sequence pair fixes the half-edge counts of both sides, plus a
single balancing vertex that absorbs the total-degree deficit so a perfect
pairing of half-edges exists. The mutable pairing state is a flat pool of
offline half-edges with O(1) uniform removal (swap with the last live slot),
so the graph can be revealed one arriving vertex at a time, in exactly the
order a matching policy consumes it. Building the whole graph up front uses
the same stream, so the two constructions are coupled bit for bit at equal
seeds.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .degrees import DegreePMF

BALANCE_NONE = "none"
BALANCE_U = "U"
BALANCE_V = "V"


def pairing_stream(seed: int) -> random.Random:
    """Random stream driving half-edge pairing for a run with this seed."""
    return random.Random(2 * seed + 1)


def decision_stream(seed: int) -> random.Random:
    """Random stream driving policy decisions; independent of the pairing
    stream so every policy sees the identical realized graph."""
    return random.Random(2 * seed + 2)


@dataclass(frozen=True, eq=False)
class DegreeSequencePair:
    """Realized degree sequences for one run.

    ``deg_u`` has one entry per offline vertex, ``deg_v`` one per arrival in
    arrival order. The balancing vertex lives on whichever side is short of
    half-edges; its edges never count toward matchings.
    """

    deg_u: np.ndarray
    deg_v: np.ndarray
    balance_side: str
    balance_degree: int

    @property
    def n_offline(self) -> int:
        return len(self.deg_u)

    @property
    def n_arrivals(self) -> int:
        return len(self.deg_v)

    @property
    def total_u_half_edges(self) -> int:
        """Pool size: offline half-edges including the balancing vertex."""
        extra = self.balance_degree if self.balance_side == BALANCE_U else 0
        return int(self.deg_u.sum()) + extra

    @classmethod
    def from_degrees(cls, deg_u, deg_v) -> "DegreeSequencePair":
        """Pair two raw degree sequences, adding the balancing vertex."""
        deg_u = np.array(deg_u, dtype=np.int64)
        deg_v = np.array(deg_v, dtype=np.int64)
        if np.any(deg_u < 0) or np.any(deg_v < 0):
            raise ValueError("degrees must be nonnegative")
        diff = int(deg_u.sum()) - int(deg_v.sum())
        if diff == 0:
            side, extra = BALANCE_NONE, 0
        elif diff > 0:
            side, extra = BALANCE_V, diff
        else:
            side, extra = BALANCE_U, -diff
        deg_u.setflags(write=False)
        deg_v.setflags(write=False)
        return cls(deg_u=deg_u, deg_v=deg_v, balance_side=side, balance_degree=extra)


def sample_degree_sequences(pmf_u: DegreePMF, pmf_v: DegreePMF,
                            n: int, seed: int) -> DegreeSequencePair:
    """Draw i.i.d. degrees for n offline vertices and the matching number of
    arrivals, T = round(n * mean_u / mean_v)."""
    if n < 1:
        raise ValueError("need at least one offline vertex")
    if pmf_u.mean <= 0 or pmf_v.mean <= 0:
        raise ValueError("both degree laws need positive mean")
    t = int(np.floor(n * pmf_u.mean / pmf_v.mean + 0.5))
    t = max(t, 1)
    rng = np.random.default_rng(seed)
    deg_u = pmf_u.sample(rng, n)
    deg_v = pmf_v.sample(rng, t)
    return DegreeSequencePair.from_degrees(deg_u, deg_v)


class HalfEdgePool:
    """Mutable pool of unpaired offline half-edges.

    ``slots[:live_count]`` lists one vertex id per live half-edge; removal
    swaps with the last live slot. ``remaining_degree`` has length N+1, the
    final entry tracking the balancing vertex when it sits on the U side.
    Owned by a single run; never shared during mutation.
    """

    __slots__ = ("slots", "live_count", "remaining_degree", "n_offline")

    def __init__(self, slots: list, remaining_degree: list, n_offline: int):
        self.slots = slots
        self.live_count = len(slots)
        self.remaining_degree = remaining_degree
        self.n_offline = n_offline

    def pair_one(self, rng: random.Random) -> int:
        """Pair one arriving half-edge to a uniformly chosen live slot and
        return the offline endpoint; O(1)."""
        live = self.live_count
        if live <= 0:
            raise ValueError("half-edge pool exhausted")
        j = int(rng.random() * live)
        slots = self.slots
        u = slots[j]
        live -= 1
        slots[j] = slots[live]
        self.live_count = live
        self.remaining_degree[u] -= 1
        return u

    def reveal_vertex(self, d_v: int, rng: random.Random) -> list:
        """Pair all half-edges of one arrival, returning endpoints in pairing
        order (this order is the uniform random edge order policies see).
        A short list signals pool exhaustion."""
        out = []
        for _ in range(d_v):
            if self.live_count <= 0:
                break
            out.append(self.pair_one(rng))
        return out


def _pool_arrays(seq: DegreeSequencePair) -> tuple:
    """Slot and remaining-degree templates for a fresh pool."""
    n = seq.n_offline
    counts = seq.deg_u.astype(np.int64)
    slots = np.repeat(np.arange(n, dtype=np.int64), counts).tolist()
    remaining = counts.tolist() + [0]
    if seq.balance_side == BALANCE_U:
        slots.extend([n] * seq.balance_degree)
        remaining[n] = seq.balance_degree
    return slots, remaining


def new_pool(seq: DegreeSequencePair) -> HalfEdgePool:
    """Fresh pool holding every offline half-edge of the sequence pair."""
    slots, remaining = _pool_arrays(seq)
    return HalfEdgePool(slots, remaining, seq.n_offline)


@dataclass(frozen=True, eq=False)
class Multigraph:
    """Realized pairing. ``adjacency[v]`` lists the offline endpoints of
    arrival v in pairing order; multi-edges are retained. Edges touching the
    balancing vertex (offline id N, or the phantom arrival holding
    ``leftover``) are flagged and excluded from matching computations."""

    adjacency: tuple
    leftover: tuple
    n_offline: int
    n_arrivals: int
    balance_side: str
    balance_degree: int

    def edge_triples(self) -> list:
        """All edge records as (v, u, flag); flag=1 marks balancing edges."""
        out = []
        n = self.n_offline
        for v, endpoints in enumerate(self.adjacency):
            for u in endpoints:
                out.append((v, u, 1 if u == n else 0))
        for u in self.leftover:
            out.append((self.n_arrivals, u, 1))
        return out

    def real_edges(self) -> list:
        """Edges between real vertices only, multiplicity retained."""
        n = self.n_offline
        return [(v, u) for v, endpoints in enumerate(self.adjacency)
                for u in endpoints if u != n]

    def is_simple(self) -> bool:
        """No repeated (arrival, offline) pair among real edges."""
        edges = self.real_edges()
        return len(edges) == len(set(edges))


def build_full_graph(seq: DegreeSequencePair, seed: int,
                     simple_only: bool = False,
                     max_attempts: int = 100_000) -> Multigraph:
    """Realize the whole pairing for this sequence pair.

    Streaming order and random stream match a policy run at the same seed,
    so the edge set equals the union of reveal_vertex outputs. With
    ``simple_only`` the pairing is redrawn at seeds seed, seed+1, ... until
    the realized graph is simple.
    """
    attempt_seed = seed
    for _ in range(max_attempts):
        rng = pairing_stream(attempt_seed)
        pool = new_pool(seq)
        adjacency = tuple(tuple(pool.reveal_vertex(int(dv), rng))
                          for dv in seq.deg_v)
        leftover = tuple(pool.slots[: pool.live_count]) if seq.balance_side == BALANCE_V else ()
        graph = Multigraph(adjacency=adjacency, leftover=leftover,
                           n_offline=seq.n_offline, n_arrivals=seq.n_arrivals,
                           balance_side=seq.balance_side,
                           balance_degree=seq.balance_degree)
        if not simple_only or graph.is_simple():
            return graph
        attempt_seed += 1
    raise RuntimeError(f"no simple pairing found in {max_attempts} attempts")


def write_edge_list(graph: Multigraph, path) -> None:
    """Dump the realized graph: header "N T", then one "v u flag" per line."""
    with open(path, "w") as fh:
        fh.write(f"{graph.n_offline} {graph.n_arrivals}\n")
        for v, u, flag in graph.edge_triples():
            fh.write(f"{v} {u} {flag}\n")
