"""Random graph samplers, exact spanning-structure search, and Monte Carlo
containment-threshold estimation.

The search extends a vertex ordering position by position, checking at each
placement that every structure edge into already-placed positions is present
in the host, and pruning candidates whose host degree cannot support their
position.  It is a complete backtracking search: a None result means the host
provably contains no copy, and running out of node budget raises instead of
guessing.
"""
from __future__ import annotations

import csv
import io
import json
import os
import random
from dataclasses import dataclass, field

from .copyfamily import CopyFamily, graph_pair_mask, index_pair, pair_count
from .structures import (
    KIND_C4,
    LabeledGraph,
    StructureSpec,
    structure_position_edges,
)

DEFAULT_NODE_BUDGET = 100_000_000
_BUDGET_ENV = "SPANLAB_BUDGET"


def default_node_budget() -> int:
    raw = os.environ.get(_BUDGET_ENV)
    return int(raw) if raw else DEFAULT_NODE_BUDGET


class SearchBudgetExceeded(RuntimeError):
    """The backtracking search ran out of node expansions: outcome unknown."""


def sample_gnp(n: int, p: float, seed) -> LabeledGraph:
    """Binomial random graph: each pair kept independently with probability p."""
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"need 0 <= p <= 1, got {p}")
    rng = random.Random(seed)
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges.append((u, v))
    return LabeledGraph(n, frozenset(edges))


def sample_gnm(n: int, m: int, seed) -> LabeledGraph:
    """Uniform random graph with exactly m edges."""
    total = pair_count(n)
    if not (0 <= m <= total):
        raise ValueError(f"need 0 <= m <= {total}, got {m}")
    rng = random.Random(seed)
    chosen = rng.sample(range(total), m)
    return LabeledGraph(n, frozenset(index_pair(i, n) for i in chosen))


def _search_plan(spec: StructureSpec) -> tuple:
    """Per position: required earlier positions and the structure degree."""
    n = spec.n
    pos_edges = structure_position_edges(spec)
    req = [[] for _ in range(n)]
    deg = [0] * n
    for a, b in pos_edges:
        req[b].append(a)
        deg[a] += 1
        deg[b] += 1
    return req, deg


def contains_spanning(spec: StructureSpec, host: LabeledGraph, node_budget: int = None):
    """An ordering sigma with the relabelled structure inside the host, or
    None when no copy exists.  Raises SearchBudgetExceeded past the budget.

    For the c4e structure the construction symmetries act transitively on
    positions, so the search may pin host vertex 0 to position 0 without
    losing copies; clique rings branch over every start vertex.
    """
    if host.n != spec.n:
        raise ValueError(f"host has n={host.n}, spec needs n={spec.n}")
    budget = node_budget if node_budget is not None else default_node_budget()
    n = spec.n
    req, sdeg = _search_plan(spec)
    host_deg = host.degrees()
    adj = host.adjacency_masks()
    if host.is_complete():
        return tuple(range(n))
    # Vertices usable at a position of structure degree d need host degree >= d.
    deg_ok = [0] * (max(sdeg) + 1)
    for d in range(len(deg_ok)):
        mask = 0
        for v in range(n):
            if host_deg[v] >= d:
                mask |= 1 << v
        deg_ok[d] = mask
    if deg_ok[min(sdeg)].bit_count() < n:
        return None
    full = (1 << n) - 1
    sigma = [-1] * n
    cand_stack = [0] * n
    nodes = 0

    def candidates(pos: int, used: int) -> int:
        mask = deg_ok[sdeg[pos]] & ~used
        for a in req[pos]:
            mask &= adj[sigma[a]]
            if not mask:
                return 0
        return mask

    pin_start = spec.kind == KIND_C4
    pos = 0
    cand_stack[0] = 1 if pin_start else candidates(0, 0)
    used = 0
    while True:
        if cand_stack[pos] == 0:
            # Backtrack.
            pos -= 1
            if pos < 0:
                return None
            used ^= 1 << sigma[pos]
            sigma[pos] = -1
            continue
        low = cand_stack[pos] & -cand_stack[pos]
        cand_stack[pos] ^= low
        v = low.bit_length() - 1
        nodes += 1
        if nodes > budget:
            raise SearchBudgetExceeded(
                f"search for {spec.label()} exceeded {budget} node expansions"
            )
        sigma[pos] = v
        used |= low
        if pos == n - 1:
            return tuple(sigma)
        pos += 1
        cand_stack[pos] = candidates(pos, used)


def family_scan_contains(family: CopyFamily, host: LabeledGraph):
    """Brute-force oracle: scan the enumerated family for a copy inside host."""
    host_mask = graph_pair_mask(host)
    for cid, mask in enumerate(family.masks):
        if not mask & ~host_mask:
            return cid
    return None


def first_moment_lower_bound(spec: StructureSpec, copy_count: int = None, enumerate_cap: int = 1_000_000) -> float:
    """|F|^(-1/k0): the edge probability at which the expected number of
    copies equals one.

    Uses the true enumerated count when the family is small enough, and the
    closed-form count beyond that.
    """
    from .copyfamily import count_copies_formula, enumerate_copies, projected_copy_count

    k0 = len(structure_position_edges(spec))
    if copy_count is None:
        if projected_copy_count(spec) <= enumerate_cap:
            copy_count = len(enumerate_copies(spec, budget=enumerate_cap))
        else:
            copy_count = count_copies_formula(spec)
    if copy_count < 1:
        raise ValueError("need at least one copy")
    return copy_count ** (-1.0 / k0)


@dataclass
class ThresholdEstimate:
    spec_label: str
    p_grid: list
    trials: int
    contains: list
    unknown: list
    freq: list
    p_half: float
    first_moment_p: float
    seed: int
    config: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# {json.dumps(self.config, sort_keys=True)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["p", "trials", "contains", "unknown", "freq"])
        for i, p in enumerate(self.p_grid):
            writer.writerow(
                [repr(p), self.trials, self.contains[i], self.unknown[i], repr(self.freq[i])]
            )
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {
            "spec": self.spec_label,
            "p_grid": self.p_grid,
            "trials": self.trials,
            "contains": self.contains,
            "unknown": self.unknown,
            "freq": self.freq,
            "p_half": self.p_half,
            "first_moment_p": self.first_moment_p,
            "seed": self.seed,
            "config": self.config,
        }
        return json.dumps(payload, sort_keys=True)


def loglog_slope(points) -> float:
    """Least-squares slope of log(p) against log(n) for (n, p) pairs.

    A descriptive summary of how an estimated crossing point scales with the
    vertex count; reported, never asserted.
    """
    import math

    pts = [(math.log(n), math.log(p)) for n, p in points]
    if len(pts) < 2:
        raise ValueError("need at least two points")
    mean_x = sum(x for x, _ in pts) / len(pts)
    mean_y = sum(y for _, y in pts) / len(pts)
    num = sum((x - mean_x) * (y - mean_y) for x, y in pts)
    den = sum((x - mean_x) ** 2 for x, _ in pts)
    return num / den


def coupled_weights(n: int, seed) -> list:
    """One uniform weight per pair; thresholding at p yields nested hosts."""
    rng = random.Random(seed)
    return [rng.random() for _ in range(pair_count(n))]


def graph_from_weights(n: int, weights, p: float) -> LabeledGraph:
    edges = [index_pair(i, n) for i, w in enumerate(weights) if w <= p]
    return LabeledGraph(n, frozenset(edges))


def _trial_outcomes(spec, p_grid, weights, node_budget):
    """Containment outcome per grid point for one weight draw.

    Outcomes: 1 contains, 0 absent, -1 unknown.  The hosts are nested along
    the grid, so once a copy is found every later point contains that same
    copy and needs no further search.
    """
    n = spec.n
    out = []
    found_order = None
    for p in p_grid:
        if found_order is not None:
            out.append(1)
            continue
        host = graph_from_weights(n, weights, p)
        try:
            order = contains_spanning(spec, host, node_budget)
        except SearchBudgetExceeded:
            out.append(-1)
            continue
        if order is None:
            out.append(0)
        else:
            found_order = order
            out.append(1)
    return out


def _interpolate_half(p_grid, freq):
    for i in range(len(p_grid) - 1):
        lo, hi = freq[i], freq[i + 1]
        if lo < 0.5 <= hi:
            if hi == lo:
                return p_grid[i]
            return p_grid[i] + (0.5 - lo) * (p_grid[i + 1] - p_grid[i]) / (hi - lo)
    if freq and freq[0] >= 0.5:
        return p_grid[0]
    return None


def _run_trial_block(args):
    spec, p_grid, seed, trial_ids, node_budget = args
    results = []
    for t in trial_ids:
        weights = coupled_weights(spec.n, f"{seed}:{t}")
        results.append(_trial_outcomes(spec, p_grid, weights, node_budget))
    return results


def estimate_threshold(
    spec: StructureSpec,
    p_grid,
    trials_per_point: int,
    seed: int,
    node_budget: int = None,
    workers: int = 1,
) -> ThresholdEstimate:
    """Containment frequency along a probability grid, with the crossing
    point of frequency 1/2 interpolated linearly.

    Every trial couples all grid points through shared pair weights, so
    per-trial outcomes are monotone in p.  Unknown outcomes (budget) are
    tallied separately and excluded from frequencies.
    """
    p_grid = list(p_grid)
    if any(p_grid[i] >= p_grid[i + 1] for i in range(len(p_grid) - 1)):
        raise ValueError("p grid must be strictly increasing")
    if any(not 0.0 <= p <= 1.0 for p in p_grid):
        raise ValueError("p grid values must lie in [0, 1]")
    budget = node_budget if node_budget is not None else default_node_budget()
    trial_ids = list(range(trials_per_point))
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        chunks = [trial_ids[i::workers] for i in range(workers)]
        args = [(spec, p_grid, seed, chunk, budget) for chunk in chunks if chunk]
        outcome_rows = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for block in pool.map(_run_trial_block, args):
                outcome_rows.extend(block)
    else:
        outcome_rows = _run_trial_block((spec, p_grid, seed, trial_ids, budget))
    npts = len(p_grid)
    contains = [0] * npts
    unknown = [0] * npts
    for row in outcome_rows:
        for i, o in enumerate(row):
            if o == 1:
                contains[i] += 1
            elif o == -1:
                unknown[i] += 1
    freq = []
    for i in range(npts):
        decided = trials_per_point - unknown[i]
        freq.append(contains[i] / decided if decided else float("nan"))
    fm = first_moment_lower_bound(spec)
    return ThresholdEstimate(
        spec_label=spec.label(),
        p_grid=p_grid,
        trials=trials_per_point,
        contains=contains,
        unknown=unknown,
        freq=freq,
        p_half=_interpolate_half(p_grid, freq),
        first_moment_p=fm,
        seed=seed,
        config={
            "spec": spec.label(),
            "seed": seed,
            "trials_per_point": trials_per_point,
            "node_budget": budget,
            "coupled": True,
        },
    )
