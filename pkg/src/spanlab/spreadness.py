"""Spread and superspread measurements over an enumerated copy family.

A family F on ground set M is q-spread when |F ∩ <I>| <= q^|I| |F| for every
pair subset I, and (q, alpha, delta)-superspread when additionally
|F ∩ <I>| <= q^|I| k0^(-alpha * c_I) |F| for every I with at most
floor(delta * k0) pairs, where c_I counts the connected components of I.

Because the family is closed under vertex relabelling and relabelling
preserves both containment counts and component counts, it is enough to
examine subsets of one reference copy: every subset of M contained in some
copy is equivalent to one of those, and subsets contained in no copy satisfy
the inequalities trivially.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass

from .copyfamily import CopyFamily, index_pair, mask_to_indices

# Full subset lattices up to this size are scanned exhaustively.
_DEFAULT_LATTICE_BUDGET = 1 << 21
_DEFAULT_SIZE_CAP = 6
_DEFAULT_SAMPLES = 100_000
_FLOAT_SLACK = 1e-9


def components(edge_indices, n: int) -> int:
    """Connected components of a pair subset viewed as a subgraph of K_n."""
    if isinstance(edge_indices, int):
        edge_indices = mask_to_indices(edge_indices)
    parent = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in edge_indices:
        u, v = index_pair(i, n)
        for w in (u, v):
            if w not in parent:
                parent[w] = w
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    return len({find(x) for x in parent})


def spread_ratio(family: CopyFamily, subset) -> float:
    """The least q making the plain spread inequality tight for this subset."""
    from .copyfamily import copies_containing, _as_mask

    mask = _as_mask(subset)
    size = mask.bit_count()
    if size == 0:
        raise ValueError("spread_ratio needs a nonempty subset")
    count = copies_containing(family, mask)
    if count == 0:
        return 0.0
    return (count / len(family)) ** (1.0 / size)


@dataclass
class SpreadReport:
    q: float
    alpha: float
    delta: float
    verdict: bool
    worst_witness: tuple
    worst_margin: float
    per_size_margins: dict
    search_mode: str
    examined: int

    def to_json(self) -> str:
        payload = {
            "q": self.q,
            "alpha": self.alpha,
            "delta": self.delta,
            "verdict": "pass" if self.verdict else "fail",
            "worst_witness": list(self.worst_witness),
            "worst_margin": self.worst_margin,
            "per_size_margins": {str(k): v for k, v in sorted(self.per_size_margins.items())},
            "search_mode": self.search_mode,
            "examined": self.examined,
        }
        return json.dumps(payload, sort_keys=True)


@dataclass
class _SizeStats:
    """Per subset-size extremes collected during a lattice scan."""

    max_count: int = 0
    witness_plain: tuple = ()
    max_weighted: float = 0.0  # count * k0^(alpha * c_I), constrained sizes only
    witness_super: tuple = ()


def _scan_subsets(
    family: CopyFamily,
    alpha: float,
    delta: float,
    lattice_budget: int = _DEFAULT_LATTICE_BUDGET,
    size_cap: int = _DEFAULT_SIZE_CAP,
    samples: int = _DEFAULT_SAMPLES,
    seed: int = 0,
):
    """Walk subsets of the reference copy, returning per-size extremes.

    Exhausts the whole lattice when 2^k0 fits the budget, otherwise exhausts
    sizes up to the cap and samples uniform subsets of each larger size.
    """
    k0 = family.k0
    n = family.n
    ref = mask_to_indices(family.canonical_mask())
    rows = family.edge_bitsets()
    full = (1 << len(family)) - 1
    constrained_max = math.floor(delta * k0)
    stats = {size: _SizeStats() for size in range(1, k0 + 1)}

    def absorb(indices, bitset):
        count = bitset.bit_count()
        if count == 0:
            return
        size = len(indices)
        st = stats[size]
        if count > st.max_count:
            st.max_count = count
            st.witness_plain = tuple(indices)
        if size <= constrained_max:
            weighted = count * k0 ** (alpha * components(indices, n))
            if weighted > st.max_weighted:
                st.max_weighted = weighted
                st.witness_super = tuple(indices)

    exhaustive = (1 << k0) <= lattice_budget
    examined = 0
    if exhaustive:
        # Depth-first over the inclusion lattice; prune branches with no copies.
        stack = [(0, full, ())]
        while stack:
            start, bitset, indices = stack.pop()
            for j in range(start, k0):
                child = bitset & rows[ref[j]]
                if child == 0:
                    continue
                chosen = indices + (ref[j],)
                examined += 1
                absorb(chosen, child)
                stack.append((j + 1, child, chosen))
        return stats, "exhaustive", examined

    from itertools import combinations

    cap = min(size_cap, k0)
    for size in range(1, cap + 1):
        for combo in combinations(ref, size):
            acc = full
            for i in combo:
                acc &= rows[i]
                if acc == 0:
                    break
            examined += 1
            absorb(combo, acc)
    rng = random.Random(seed)
    for _ in range(samples):
        size = rng.randint(cap + 1, k0)
        combo = tuple(sorted(rng.sample(ref, size)))
        acc = full
        for i in combo:
            acc &= rows[i]
            if acc == 0:
                break
        examined += 1
        absorb(combo, acc)
    return stats, "exhaustive-to-cap+sampled", examined


def verify_superspread(
    family: CopyFamily,
    q: float,
    alpha: float,
    delta: float,
    lattice_budget: int = _DEFAULT_LATTICE_BUDGET,
    size_cap: int = _DEFAULT_SIZE_CAP,
    samples: int = _DEFAULT_SAMPLES,
    seed: int = 0,
) -> SpreadReport:
    """Check plain q-spread at every examined size and the component-weighted
    inequality at sizes up to floor(delta * k0)."""
    stats, mode, examined = _scan_subsets(
        family, alpha, delta, lattice_budget, size_cap, samples, seed
    )
    total = len(family)
    k0 = family.k0
    constrained_max = math.floor(delta * k0)
    per_size = {}
    worst = 0.0
    witness = ()
    for size, st in stats.items():
        if st.max_count == 0:
            continue
        plain = st.max_count / (q**size * total)
        margin = plain
        wit = st.witness_plain
        if size <= constrained_max and st.max_weighted > 0:
            superm = st.max_weighted / (q**size * total)
            if superm > margin:
                margin = superm
                wit = st.witness_super
        per_size[size] = margin
        if margin > worst:
            worst = margin
            witness = wit
    verdict = worst <= 1.0 + _FLOAT_SLACK
    return SpreadReport(
        q=q,
        alpha=alpha,
        delta=delta,
        verdict=verdict,
        worst_witness=witness,
        worst_margin=worst,
        per_size_margins=per_size,
        search_mode=mode,
        examined=examined,
    )


def minimal_superspread_constant(
    family: CopyFamily,
    alpha: float,
    delta: float,
    exponent: float,
    lattice_budget: int = _DEFAULT_LATTICE_BUDGET,
    size_cap: int = _DEFAULT_SIZE_CAP,
    samples: int = _DEFAULT_SAMPLES,
    seed: int = 0,
) -> float:
    """Least c such that the family passes with q = c * n^exponent over the
    examined subsets."""
    stats, _mode, _examined = _scan_subsets(
        family, alpha, delta, lattice_budget, size_cap, samples, seed
    )
    total = len(family)
    k0 = family.k0
    constrained_max = math.floor(delta * k0)
    scale = family.n**exponent
    needed = 0.0
    for size, st in stats.items():
        if st.max_count == 0:
            continue
        q_plain = (st.max_count / total) ** (1.0 / size)
        needed = max(needed, q_plain / scale)
        if size <= constrained_max and st.max_weighted > 0:
            q_super = (st.max_weighted / total) ** (1.0 / size)
            needed = max(needed, q_super / scale)
    return needed
