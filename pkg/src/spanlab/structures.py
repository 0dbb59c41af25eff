"""Spanning structures built from overlapping cliques and chained four-cycles.

Two families live on the vertex set [0, n):

* ``krs`` -- n/(r-s) copies of K_r placed cyclically on Z_n so that
  consecutive cliques overlap in exactly s vertices (clique i sits on
  positions [i*(r-s), i*(r-s)+r-1] mod n).
* ``c4e`` -- a perfect matching plus one cycle through the even positions
  and one through the odd positions; equivalently a closed chain of
  four-cycles in which consecutive four-cycles share a matching edge.

Every structure is produced canonically on the identity ordering and can be
relabelled through an arbitrary ordering of the vertices.  All values are
immutable after construction.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import permutations

KIND_C4 = "c4e"
KIND_KRS = "krs"

# Brute-force ordering scans stay exact up to this vertex count.
_BRUTE_STABILIZER_MAX_N = 8


class ParameterError(ValueError):
    """Raised when structure parameters fail a validity requirement."""


class UnsupportedRegimeError(ParameterError):
    """Raised when a closed-form quantity is requested outside its regime."""


@dataclass(frozen=True)
class StructureSpec:
    """Which spanning structure to build, with its parameters.

    For ``krs`` the parameters are (r, s, n) with r > s >= 0, (r-s) | n and
    at least two cliques.  For ``c4e`` only n is used (even, n >= 6).
    """

    kind: str
    n: int
    r: int = 0
    s: int = 0

    def __post_init__(self):
        if self.kind == KIND_C4:
            if self.n < 6 or self.n % 2 != 0:
                raise ParameterError(
                    f"c4e needs an even vertex count >= 6, got n={self.n}"
                )
            if self.r or self.s:
                raise ParameterError("c4e takes no r/s parameters")
        elif self.kind == KIND_KRS:
            r, s, n = self.r, self.s, self.n
            if r < 3:
                raise ParameterError(f"krs needs clique size r >= 3, got r={r}")
            if not (0 <= s < r):
                raise ParameterError(f"krs needs 0 <= s < r, got r={r}, s={s}")
            if n % (r - s) != 0:
                raise ParameterError(
                    f"krs needs (r-s) | n, got r-s={r - s}, n={n}"
                )
            if n < r:
                raise ParameterError(f"krs needs n >= r, got r={r}, n={n}")
            if n // (r - s) < 2:
                raise ParameterError(
                    f"krs needs at least two cliques, got n/(r-s)={n // (r - s)}"
                )
        else:
            raise ParameterError(f"unknown structure kind {self.kind!r}")

    @property
    def num_cliques(self) -> int:
        if self.kind != KIND_KRS:
            raise ParameterError("num_cliques only applies to krs")
        return self.n // (self.r - self.s)

    def label(self) -> str:
        if self.kind == KIND_C4:
            return f"c4e(n={self.n})"
        return f"krs(r={self.r},s={self.s},n={self.n})"


def c4_spec(n: int) -> StructureSpec:
    return StructureSpec(KIND_C4, n)


def krs_spec(r: int, s: int, n: int) -> StructureSpec:
    return StructureSpec(KIND_KRS, n, r, s)


@dataclass(frozen=True)
class LabeledGraph:
    """A graph on [0, n) given by an explicit set of unordered edges."""

    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        for e in self.edges:
            u, v = e
            if not (0 <= u < v < self.n):
                raise ParameterError(f"bad edge {e} for n={self.n}")

    @staticmethod
    def from_edges(n: int, edges) -> "LabeledGraph":
        norm = set()
        for u, v in edges:
            if u == v:
                raise ParameterError(f"loop at vertex {u}")
            norm.add((min(u, v), max(u, v)))
        return LabeledGraph(n, frozenset(norm))

    def edge_list(self) -> list:
        """Edges sorted by (u, v); the canonical external order."""
        return sorted(self.edges)

    def edge_count(self) -> int:
        return len(self.edges)

    def degrees(self) -> list:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def max_degree(self) -> int:
        return max(self.degrees(), default=0)

    def adjacency_masks(self) -> list:
        """Neighbour bitmask per vertex."""
        adj = [0] * self.n
        for u, v in self.edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return adj

    def is_complete(self) -> bool:
        return len(self.edges) == self.n * (self.n - 1) // 2

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges


def graph_to_json(g: LabeledGraph) -> str:
    """Serialize as {"n": ..., "edges": [[u, v], ...]} with sorted edges."""
    payload = {"n": g.n, "edges": [[u, v] for u, v in g.edge_list()]}
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def graph_from_json(text: str) -> LabeledGraph:
    payload = json.loads(text)
    return LabeledGraph.from_edges(payload["n"], [tuple(e) for e in payload["edges"]])


def validate_ordering(perm, n: int) -> tuple:
    perm = tuple(perm)
    if sorted(perm) != list(range(n)):
        raise ParameterError(f"not a permutation of [0,{n})")
    return perm


def structure_position_edges(spec: StructureSpec) -> tuple:
    """Edges of the canonical structure as position pairs (a, b), a < b.

    Position j is the slot a vertex lands in under an ordering; the canonical
    structure is this edge set read with the identity ordering.
    """
    n = spec.n
    es = set()
    if spec.kind == KIND_C4:
        for i in range(0, n, 2):
            es.add((i, i + 1))
        for par in (0, 1):
            for i in range(par, n, 2):
                a, b = i, (i + 2) % n
                es.add((min(a, b), max(a, b)))
    else:
        r, s = spec.r, spec.s
        step = r - s
        for i in range(spec.num_cliques):
            verts = [(i * step + j) % n for j in range(r)]
            for a in range(r):
                for b in range(a + 1, r):
                    u, v = verts[a], verts[b]
                    es.add((min(u, v), max(u, v)))
    return tuple(sorted(es))


def build_structure(spec: StructureSpec) -> LabeledGraph:
    """The canonical copy on the identity ordering."""
    return LabeledGraph(spec.n, frozenset(structure_position_edges(spec)))


def structure_from_ordering(spec: StructureSpec, perm) -> LabeledGraph:
    """The copy defined by an ordering: position j is occupied by perm[j]."""
    perm = validate_ordering(perm, spec.n)
    edges = set()
    for a, b in structure_position_edges(spec):
        u, v = perm[a], perm[b]
        edges.add((min(u, v), max(u, v)))
    return LabeledGraph(spec.n, frozenset(edges))


def edge_count_formula(spec: StructureSpec) -> int:
    """Closed-form edge count: 3n/2 for c4e, (C(r,2)-C(s,2)) * n/(r-s) for krs.

    Exact whenever cliques only overlap as designed; a two-clique ring with
    s >= 1 double-overlaps and falls short of this value.
    """
    if spec.kind == KIND_C4:
        return 3 * spec.n // 2
    r, s = spec.r, spec.s
    return (math.comb(r, 2) - math.comb(s, 2)) * spec.num_cliques


def degree_tally_formula(spec: StructureSpec) -> dict:
    """Closed-form degree tally {degree: vertex count}.

    c4e graphs are cubic.  For krs with s <= r/2 and at least three cliques,
    s*n/(r-s) vertices sit in two cliques (degree 2r-s-1) and the remaining
    (r-2s)*n/(r-s) in one (degree r-1).  Outside that regime the tally is not
    exposed; count on the constructed graph instead.
    """
    n = spec.n
    if spec.kind == KIND_C4:
        return {3: n}
    r, s = spec.r, spec.s
    if 2 * s > r:
        raise UnsupportedRegimeError(
            f"degree tally formula needs s <= r/2, got r={r}, s={s}"
        )
    if s >= 1 and spec.num_cliques < 3:
        raise UnsupportedRegimeError(
            "degree tally formula needs >= 3 cliques when overlaps are nonempty"
        )
    step = r - s
    heavy = s * n // step
    light = (r - 2 * s) * n // step
    tally = {}
    if heavy:
        tally[2 * r - s - 1] = heavy
    if light:
        tally[r - 1] = tally.get(r - 1, 0) + light
    return tally


def measured_degree_tally(g: LabeledGraph) -> dict:
    tally = {}
    for d in g.degrees():
        tally[d] = tally.get(d, 0) + 1
    return tally


def _stabilizer_closed_form(spec: StructureSpec) -> int:
    if spec.kind == KIND_C4:
        return 2 * spec.n
    r, s, n = spec.r, spec.s, spec.n
    t = spec.num_cliques
    if s == 0:
        # Unordered disjoint cliques: permute cliques and within cliques.
        return math.factorial(t) * math.factorial(r) ** t
    return (2 * n // (r - s)) * (math.factorial(r - 2 * s) * math.factorial(s)) ** t


def ordering_stabilizer_size(spec: StructureSpec) -> int:
    """Number of orderings that reproduce the canonical copy exactly.

    Equals n! divided by the number of distinct copies.  Counted by brute
    force for n <= 8 (which also catches small-n coincidences where the
    constructed graph has more symmetry than the construction suggests);
    outside brute-force range the generic closed form is returned.
    """
    if spec.kind == KIND_KRS and 2 * spec.s > spec.r:
        raise UnsupportedRegimeError(
            f"stabilizer count not exposed for s > r/2 (r={spec.r}, s={spec.s}); "
            "use copy enumeration instead"
        )
    n = spec.n
    canonical = frozenset(structure_position_edges(spec))
    if len(canonical) == n * (n - 1) // 2:
        # Construction collapsed onto the complete graph.
        return math.factorial(n)
    if n <= _BRUTE_STABILIZER_MAX_N:
        pos_edges = structure_position_edges(spec)
        count = 0
        for perm in permutations(range(n)):
            for a, b in pos_edges:
                u, v = perm[a], perm[b]
                if ((u, v) if u < v else (v, u)) not in canonical:
                    break
            else:
                count += 1
        return count
    if spec.kind == KIND_KRS and spec.s >= 1 and spec.num_cliques == 2:
        raise UnsupportedRegimeError(
            "two-clique rings with nonzero overlap are degenerate and beyond "
            "brute-force size; enumerate copies instead"
        )
    return _stabilizer_closed_form(spec)
