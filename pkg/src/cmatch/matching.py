"""Online matching policies over the streamed configuration model.

Each run owns two independent random streams derived from its seed: the
pairing stream builds the graph, the decision stream breaks policy ties.
Policies therefore act on the identical realized multigraph for a fixed
(sequence, seed), which sharpens paired comparisons.

Policies:

* ``greedy``   - match the arrival to the first revealed endpoint with spare
  capacity (half-edge order, the order pairing produced them).
* ``ranking``  - fix a uniform permutation of offline vertices up front;
  match to the free revealed endpoint of minimal rank.
* ``smallest`` / ``highest`` - lookahead baselines: free endpoint with the
  minimal / maximal residual degree after this arrival's pairings, ties
  broken uniformly from the decision stream.
* ``biased_greedy`` - for pools whose free endpoints have pre-arrival
  residual degree in {1, 2} only: prefer the degree-2 endpoint with a fixed
  probability (default 2/3, the bias that replicates ranking's choice law
  on 2-regular inputs).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .stream import (DegreeSequencePair, HalfEdgePool, decision_stream,
                     new_pool, pairing_stream, _pool_arrays)

GREEDY = "greedy"
RANKING = "ranking"
SMALLEST = "smallest"
HIGHEST = "highest"
BIASED_GREEDY = "biased_greedy"
POLICIES = (GREEDY, RANKING, SMALLEST, HIGHEST, BIASED_GREEDY)


@dataclass(frozen=True, eq=False)
class Checkpoint:
    """State snapshot after ``step`` arrivals (real offline vertices only).

    ``free`` maps residual degree to the count of vertices with spare
    capacity, ``saturated`` likewise for exhausted vertices, and
    ``free_by_capacity`` maps (residual degree, capacity left) pairs.
    """

    step: int
    free: dict
    saturated: dict
    free_by_capacity: dict


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Full record of one policy run.

    ``matched_at_step[k]`` is the matching size after k arrivals;
    ``capacity_total`` is the normalization denominator (sum of real
    capacities: N without capacities, C*N with a uniform capacity, and
    N*E[c] under a capacity profile).
    """

    matched_at_step: np.ndarray
    checkpoints: tuple
    policy: str
    seed: int
    n_offline: int
    n_arrivals: int
    capacity_total: int
    choice_events: tuple | None = None

    @property
    def final_matched(self) -> int:
        return int(self.matched_at_step[-1])


def _init_capacities(seq: DegreeSequencePair, capacities) -> list:
    """Capacity-left array of length N+1; the balancing slot is never
    matchable."""
    n = seq.n_offline
    if capacities is None:
        caps = [1] * n
    elif isinstance(capacities, (int, np.integer)):
        if capacities < 1:
            raise ValueError("uniform capacity must be >= 1")
        caps = [int(capacities)] * n
    else:
        caps = [int(c) for c in capacities]
        if len(caps) != n:
            raise ValueError(f"capacity array has length {len(caps)}, expected {n}")
        if any(c < 1 for c in caps):
            raise ValueError("capacities must all be >= 1")
    caps.append(0)
    return caps


def capacities_from_profile(fractions, n: int) -> np.ndarray:
    """Capacity array realizing a profile: fractions[i] of the n vertices get
    capacity i+1, apportioned by cumulative rounding."""
    fractions = np.asarray(fractions, dtype=float)
    if np.any(fractions < 0) or abs(fractions.sum() - 1.0) > 1e-9:
        raise ValueError("profile fractions must be nonnegative and sum to 1")
    bounds = np.floor(np.cumsum(fractions) * n + 0.5).astype(np.int64)
    caps = np.empty(n, dtype=np.int64)
    lo = 0
    for c, hi in enumerate(bounds, start=1):
        caps[lo:hi] = c
        lo = hi
    caps[lo:] = len(fractions)
    return caps


def _snapshot(pool: HalfEdgePool, caps: list, step: int) -> Checkpoint:
    free: dict = {}
    saturated: dict = {}
    by_cap: dict = {}
    rem = pool.remaining_degree
    for u in range(pool.n_offline):
        d = rem[u]
        c = caps[u]
        if c > 0:
            free[d] = free.get(d, 0) + 1
            key = (d, c)
            by_cap[key] = by_cap.get(key, 0) + 1
        else:
            saturated[d] = saturated.get(d, 0) + 1
    return Checkpoint(step=step, free=free, saturated=saturated,
                      free_by_capacity=by_cap)


def _pre_arrival_residuals(endpoints: list, rem: list) -> dict:
    """Residual degree of each distinct endpoint before this arrival paired
    its half-edges."""
    mult: dict = {}
    for u in endpoints:
        mult[u] = mult.get(u, 0) + 1
    return {u: rem[u] + k for u, k in mult.items()}


def run_policy(seq: DegreeSequencePair, capacities=None, policy: str = GREEDY,
               seed: int = 0, checkpoint_every: int | None = None,
               record_choice_events: bool = False,
               bias: float = 2.0 / 3.0) -> Trajectory:
    """Run one policy over the streamed graph and record its trajectory.

    Deterministic given (seq, seed). ``checkpoint_every`` controls histogram
    snapshots (default T // 100, plus the initial and final states). With
    ``record_choice_events`` the run counts decisions offered exactly one
    free endpoint of pre-arrival residual degree 1 and one of degree 2, and
    how often the degree-2 endpoint won.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}")
    rng_pair = pairing_stream(seed)
    rng_dec = decision_stream(seed)
    pool = new_pool(seq)
    caps = _init_capacities(seq, capacities)
    capacity_total = sum(caps[: seq.n_offline])
    n_arr = seq.n_arrivals

    ranks = None
    if policy == RANKING:
        ranks = list(range(seq.n_offline))
        rng_dec.shuffle(ranks)
        ranks.append(seq.n_offline)  # balancing slot, never free anyway

    every = checkpoint_every if checkpoint_every is not None else max(1, n_arr // 100)
    if every < 1:
        raise ValueError("checkpoint_every must be >= 1")

    matched_at = np.zeros(n_arr + 1, dtype=np.int64)
    checkpoints = [_snapshot(pool, caps, 0)]
    events = [0, 0] if record_choice_events else None
    rem = pool.remaining_degree
    matched = 0

    for t, dv in enumerate(seq.deg_v, start=1):
        endpoints = pool.reveal_vertex(int(dv), rng_pair)
        chosen = _decide(policy, endpoints, caps, rem, ranks, rng_dec, bias)
        if events is not None:
            _record_event(events, endpoints, caps, rem, chosen)
        if chosen >= 0:
            caps[chosen] -= 1
            matched += 1
        matched_at[t] = matched
        if t % every == 0 or t == n_arr:
            checkpoints.append(_snapshot(pool, caps, t))

    return Trajectory(matched_at_step=matched_at, checkpoints=tuple(checkpoints),
                      policy=policy, seed=seed, n_offline=seq.n_offline,
                      n_arrivals=n_arr, capacity_total=capacity_total,
                      choice_events=tuple(events) if events is not None else None)


def _decide(policy: str, endpoints: list, caps: list, rem: list,
            ranks, rng_dec, bias: float) -> int:
    """Pick the matched endpoint for one arrival, or -1 if none is free."""
    if policy == GREEDY:
        for u in endpoints:
            if caps[u] > 0:
                return u
        return -1

    free = []
    seen = set()
    for u in endpoints:
        if caps[u] > 0 and u not in seen:
            seen.add(u)
            free.append(u)
    if not free:
        return -1

    if policy == RANKING:
        return min(free, key=ranks.__getitem__)

    if policy in (SMALLEST, HIGHEST):
        vals = [rem[u] for u in free]
        best = min(vals) if policy == SMALLEST else max(vals)
        ties = [u for u, v in zip(free, vals) if v == best]
        if len(ties) == 1:
            return ties[0]
        return ties[int(rng_dec.random() * len(ties))]

    # biased greedy, defined for residual degrees {1, 2} only
    pre = _pre_arrival_residuals(endpoints, rem)
    deg1 = [u for u in free if pre[u] == 1]
    deg2 = [u for u in free if pre[u] == 2]
    if len(deg1) + len(deg2) != len(free):
        raise ValueError("biased_greedy needs free endpoints of residual degree 1 or 2")
    if deg1 and deg2:
        side = deg2 if rng_dec.random() < bias else deg1
    else:
        side = deg2 or deg1
    if len(side) == 1:
        return side[0]
    return side[int(rng_dec.random() * len(side))]


def _record_event(events: list, endpoints: list, caps: list, rem: list,
                  chosen: int) -> None:
    """Count {degree-1, degree-2} choice events and degree-2 wins.

    Called before the chosen endpoint's capacity is decremented, so the
    free set reflects the state the decision saw.
    """
    pre = _pre_arrival_residuals(endpoints, rem)
    free = [u for u in pre if caps[u] > 0]
    if len(free) != 2:
        return
    a, b = free
    da, db = pre[a], pre[b]
    if {da, db} != {1, 2}:
        return
    events[0] += 1
    deg2 = a if da == 2 else b
    if chosen == deg2:
        events[1] += 1


def final_matched_counts(seq: DegreeSequencePair, capacities=None,
                         runs: int = 1, seed: int = 0) -> np.ndarray:
    """Final greedy matched counts over ``runs`` independent graphs.

    Bulk Monte Carlo path: one pairing stream drives all runs, pool and
    capacity buffers are reset from templates. Consumes the pairing stream
    exactly like :func:`run_policy`, so run 0 with ``runs=1`` reproduces
    ``run_policy(seq, capacities, "greedy", seed)`` bit for bit.
    """
    base_slots, _ = _pool_arrays(seq)
    base_caps = _init_capacities(seq, capacities)
    deg_v = [int(d) for d in seq.deg_v]
    rand = pairing_stream(seed).random
    out = np.empty(runs, dtype=np.int64)
    for r in range(runs):
        slots = base_slots.copy()
        caps = base_caps.copy()
        live = len(slots)
        matched = 0
        for dv in deg_v:
            need = dv if dv <= live else live
            got = False
            for _ in range(need):
                j = int(rand() * live)
                u = slots[j]
                live -= 1
                slots[j] = slots[live]
                if not got and caps[u] > 0:
                    caps[u] -= 1
                    matched += 1
                    got = True
        out[r] = matched
    return out


def matched_fraction_at(traj: Trajectory, s: float) -> float:
    """Matching size after a proportion s of arrivals, normalized by the
    total capacity of the offline side."""
    if not 0.0 <= s <= 1.0:
        raise ValueError("s must lie in [0, 1]")
    idx = min(int(np.floor(s * traj.n_arrivals)), traj.n_arrivals)
    return float(traj.matched_at_step[idx]) / traj.capacity_total


def histograms_at(traj: Trajectory, step: int) -> tuple:
    """Snapshot (free, saturated, free-by-capacity) recorded at ``step``."""
    for cp in traj.checkpoints:
        if cp.step == step:
            return cp.free, cp.saturated, cp.free_by_capacity
    raise KeyError(f"no checkpoint recorded at step {step}")


def write_trajectory_csv(traj: Trajectory, path, hist_path=None) -> None:
    """Write the per-step matching size; optionally a histogram sidecar with
    one row per (checkpoint, kind, degree, capacity) cell."""
    with open(path, "w") as fh:
        fh.write("step,matched\n")
        for k, m in enumerate(traj.matched_at_step):
            fh.write(f"{k},{m}\n")
    if hist_path is None:
        return
    with open(hist_path, "w") as fh:
        fh.write("step,kind,degree,capacity,count\n")
        for cp in traj.checkpoints:
            for d in sorted(cp.free):
                fh.write(f"{cp.step},free,{d},,{cp.free[d]}\n")
            for d in sorted(cp.saturated):
                fh.write(f"{cp.step},saturated,{d},,{cp.saturated[d]}\n")
            for (d, c) in sorted(cp.free_by_capacity):
                fh.write(f"{cp.step},free_by_capacity,{d},{c},{cp.free_by_capacity[(d, c)]}\n")
