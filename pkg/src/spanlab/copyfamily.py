"""Exact enumeration of all copies of a structure inside the complete graph.

The ground set M is the set of all n(n-1)/2 vertex pairs, ordered
(0,1) < (0,2) < ... < (n-2,n-1).  A copy is an edge set represented as a
bitmask over pair indices; the copy family is the k0-uniform hypergraph of
all distinct copies.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations

from .structures import (
    KIND_C4,
    LabeledGraph,
    ParameterError,
    StructureSpec,
    UnsupportedRegimeError,
    structure_position_edges,
)

DEFAULT_COPY_BUDGET = 10_000_000

# Linear scans switch to per-edge bitsets after this many containment queries.
_INDEX_QUERY_THRESHOLD = 100


class BudgetError(RuntimeError):
    """An enumeration or scan would exceed its configured budget."""

    def __init__(self, message: str, required: int):
        super().__init__(message)
        self.required = required


def pair_count(n: int) -> int:
    return n * (n - 1) // 2

def pair_index(u: int, v: int, n: int) -> int:
    """Index of pair (u, v), u < v, in the canonical ordering of M."""
    if not (0 <= u < v < n):
        raise ParameterError(f"bad pair ({u},{v}) for n={n}")
    return u * (2 * n - u - 1) // 2 + (v - u - 1)


def index_pair(i: int, n: int) -> tuple:
    if not (0 <= i < pair_count(n)):
        raise ParameterError(f"bad pair index {i} for n={n}")
    u = 0
    row = n - 1
    while i >= row:
        i -= row
        u += 1
        row -= 1
    return (u, u + 1 + i)


def pair_table(n: int) -> list:
    """n x n lookup table: table[u][v] = pair index (u != v)."""
    table = [[-1] * n for _ in range(n)]
    for u in range(n):
        for v in range(u + 1, n):
            table[u][v] = table[v][u] = pair_index(u, v, n)
    return table


def indices_to_mask(indices) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def mask_to_indices(mask: int) -> tuple:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def edges_to_indices(edges, n: int) -> tuple:
    return tuple(sorted(pair_index(min(u, v), max(u, v), n) for u, v in edges))


def graph_pair_mask(g: LabeledGraph) -> int:
    return indices_to_mask(pair_index(u, v, g.n) for u, v in g.edges)


def mask_to_graph(mask: int, n: int) -> LabeledGraph:
    return LabeledGraph.from_edges(n, [index_pair(i, n) for i in mask_to_indices(mask)])


@dataclass
class CopyFamily:
    """All copies of a structure in K_n, as masks over pair indices."""

    spec: StructureSpec
    n: int
    ground_m: int
    k0: int
    masks: list

    _edge_bitsets: list = field(default=None, repr=False)
    _query_count: int = field(default=0, repr=False)

    def __len__(self) -> int:
        return len(self.masks)

    def copy_indices(self, i: int) -> tuple:
        return mask_to_indices(self.masks[i])

    def iter_copies(self):
        for m in self.masks:
            yield mask_to_indices(m)

    def canonical_mask(self) -> int:
        """Mask of the copy on the identity ordering."""
        return indices_to_mask(
            pair_index(a, b, self.n) for a, b in structure_position_edges(self.spec)
        )

    def edge_bitsets(self) -> list:
        """Per pair index, the bitset of copy ids containing that pair."""
        if self._edge_bitsets is None:
            rows = [0] * self.ground_m
            for cid, mask in enumerate(self.masks):
                bit = 1 << cid
                m = mask
                while m:
                    low = m & -m
                    rows[low.bit_length() - 1] |= bit
                    m ^= low
            self._edge_bitsets = rows
        return self._edge_bitsets


def count_copies_formula(spec: StructureSpec) -> int:
    """Closed-form copy count.

    (n-1)!/2 for c4e; (n-1)!(r-s) / (2 ((r-2s)!)^t (s!)^t) for krs with
    1 <= s <= r/2, t = n/(r-s).  The formula counts generic orderings and can
    overshoot at very small n when the constructed graph picks up extra
    symmetry; enumeration decides in that case.
    """
    if spec.kind == KIND_C4:
        return math.factorial(spec.n - 1) // 2
    r, s = spec.r, spec.s
    if not (1 <= s and 2 * s <= r):
        raise UnsupportedRegimeError(
            f"copy-count formula needs 1 <= s <= r/2, got r={r}, s={s}"
        )
    t = spec.num_cliques
    num = math.factorial(spec.n - 1) * (r - s)
    den = 2 * (math.factorial(r - 2 * s) ** t) * (math.factorial(s) ** t)
    if num % den:
        raise ArithmeticError("copy-count formula did not divide evenly")
    return num // den


def _vertex0_position_reps(spec: StructureSpec) -> tuple:
    """One position per orbit of the construction symmetries.

    Rotation by the clique step plus block reorderings act transitively on
    the positions lying in two cliques and on the positions lying in one, so
    scanning orderings with vertex 0 pinned to one representative of each
    class reaches every copy.  c4e positions form a single orbit.
    """
    if spec.kind == KIND_C4:
        return (0,)
    r, s = spec.r, spec.s
    if s == 0 or r - 2 * s <= 0:
        return (0,)
    return (0, s)


def projected_copy_count(spec: StructureSpec) -> int:
    """Upper estimate used for budget checks before enumerating."""
    try:
        return count_copies_formula(spec)
    except UnsupportedRegimeError:
        reps = _vertex0_position_reps(spec)
        return len(reps) * math.factorial(spec.n - 1)


def enumerate_copies(spec: StructureSpec, budget: int = DEFAULT_COPY_BUDGET) -> CopyFamily:
    """All distinct copies of the structure in K_n.

    Scans orderings with vertex 0 pinned to one representative position per
    symmetry orbit, dedupes edge sets, and returns them sorted
    lexicographically by pair-index sequence.
    """
    n = spec.n
    projected = projected_copy_count(spec)
    if projected > budget:
        raise BudgetError(
            f"enumerating {spec.label()} needs a budget of at least {projected}, "
            f"got {budget}",
            required=projected,
        )
    table = pair_table(n)
    pos_edges = structure_position_edges(spec)
    k0 = len(pos_edges)
    seen = set()
    sigma = [0] * n
    for p0 in _vertex0_position_reps(spec):
        rest_positions = [p for p in range(n) if p != p0]
        sigma[p0] = 0
        for perm in permutations(range(1, n)):
            for slot, p in zip(perm, rest_positions):
                sigma[p] = slot
            mask = 0
            for a, b in pos_edges:
                mask |= 1 << table[sigma[a]][sigma[b]]
            seen.add(mask)
    masks = sorted(seen, key=mask_to_indices)
    return CopyFamily(spec=spec, n=n, ground_m=pair_count(n), k0=k0, masks=masks)


def _as_mask(subset) -> int:
    if isinstance(subset, int):
        return subset
    return indices_to_mask(subset)


def copies_containing(family: CopyFamily, subset) -> int:
    """|F ∩ <I>|: how many copies contain every pair of the subset.

    Accepts an iterable of pair indices or a ready-made mask.  Uses a linear
    scan with early exit; switches to an inverted pair -> copies index once
    queries accumulate.
    """
    mask = _as_mask(subset)
    if mask == 0:
        return len(family)
    family._query_count += 1
    if family._edge_bitsets is None and family._query_count <= _INDEX_QUERY_THRESHOLD:
        return sum(1 for m in family.masks if m & mask == mask)
    rows = family.edge_bitsets()
    acc = -1
    m = mask
    while m:
        low = m & -m
        acc &= rows[low.bit_length() - 1]
        if acc == 0:
            return 0
        m ^= low
    # acc started as -1 (all ones); surplus high bits vanish after the first AND
    return acc.bit_count()


def dump_family(family: CopyFamily) -> str:
    """Text dump: header "n k0 count", then one copy per line as pair indices."""
    lines = [f"{family.n} {family.k0} {len(family)}"]
    for mask in family.masks:
        lines.append(" ".join(str(i) for i in mask_to_indices(mask)))
    return "\n".join(lines) + "\n"


def load_family(text: str, spec: StructureSpec = None) -> CopyFamily:
    lines = text.strip().split("\n")
    n, k0, count = (int(x) for x in lines[0].split())
    if len(lines) - 1 != count:
        raise ParameterError(f"dump announces {count} copies, has {len(lines) - 1}")
    masks = []
    for line in lines[1:]:
        indices = tuple(int(x) for x in line.split())
        if len(indices) != k0:
            raise ParameterError(f"copy with {len(indices)} != k0={k0} pairs")
        masks.append(indices_to_mask(indices))
    return CopyFamily(spec=spec, n=n, ground_m=pair_count(n), k0=k0, masks=masks)
