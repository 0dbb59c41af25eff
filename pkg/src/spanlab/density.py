"""Brute-force oracles for counting and density statements about the structures.

Everything here checks a finite claim exactly: segment edge-count closed
forms, densest subsets, component inequalities for edge subsets, shape-class
subgraph counts, and the density parameter max e(v)/(v-2).  All comparisons
run in integer or rational arithmetic.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .copyfamily import BudgetError, index_pair, mask_to_indices
from .structures import (
    KIND_C4,
    KIND_KRS,
    LabeledGraph,
    ParameterError,
    StructureSpec,
    build_structure,
    structure_position_edges,
)

_DEFAULT_SUBSET_BUDGET = 5_000_000


def induced_edge_count(g: LabeledGraph, vertices) -> int:
    vs = set(vertices)
    for v in vs:
        if not (0 <= v < g.n):
            raise ParameterError(f"vertex {v} outside [0,{g.n})")
    return sum(1 for u, v in g.edges if u in vs and v in vs)


def segment_edge_formula(r: int, v: int) -> int:
    """Edges induced by v consecutive vertices starting at a clique start.

    With v = (r-2)a + b, 0 <= b < r-2: (C(r,2)-1)a + C(b,2) - max(2-b,0)(r-2).
    Valid for edge-overlapping clique rings (overlap 2) away from wrap-around.
    """
    if r < 4:
        raise ParameterError(f"segment formula needs r >= 4, got r={r}")
    if v < 2:
        raise ParameterError(f"segment formula needs v >= 2, got v={v}")
    a, b = divmod(v, r - 2)
    return (math.comb(r, 2) - 1) * a + math.comb(b, 2) - max(2 - b, 0) * (r - 2)


def easy_bound(r: int, v: int) -> Fraction:
    """Linear upper bound (r+1)v/2 - (r+2)/2 for segment edge counts."""
    if r < 4:
        raise ParameterError(f"easy bound needs r >= 4, got r={r}")
    if v < 0:
        raise ParameterError(f"easy bound needs v >= 0, got v={v}")
    return Fraction((r + 1) * v - (r + 2), 2)


def segment_positions(n: int, start: int, length: int) -> tuple:
    """Cyclic run of consecutive vertices."""
    return tuple((start + j) % n for j in range(length))


def segment_cap(spec: StructureSpec) -> int:
    """Largest segment length guaranteed not to wrap: floor(n/(2r)) + 1."""
    if spec.kind != KIND_KRS:
        raise ParameterError("segment cap applies to krs structures")
    return spec.n // (2 * spec.r) + 1


def max_induced_by_size(g: LabeledGraph, max_size: int, budget: int = _DEFAULT_SUBSET_BUDGET) -> dict:
    """For each size up to max_size, the max induced edge count and a witness.

    Exhaustive over all vertex subsets; refuses when the scan would exceed
    the budget.
    """
    total = sum(math.comb(g.n, v) for v in range(1, max_size + 1))
    if total > budget:
        raise BudgetError(
            f"subset scan needs {total} subsets, budget is {budget}", required=total
        )
    adj = g.adjacency_masks()
    best = {}
    for v in range(1, max_size + 1):
        best_e, best_set = -1, ()
        for combo in combinations(range(g.n), v):
            mask = 0
            e = 0
            for x in combo:
                e += (adj[x] & mask).bit_count()
                mask |= 1 << x
            if e > best_e:
                best_e, best_set = e, combo
        best[v] = (best_e, best_set)
    return best


def densest_subset(g: LabeledGraph, v: int, budget: int = _DEFAULT_SUBSET_BUDGET) -> tuple:
    """A v-subset maximizing induced edges, with that maximum."""
    if not (1 <= v <= g.n):
        raise ParameterError(f"densest_subset needs 1 <= v <= n, got v={v}")
    total = math.comb(g.n, v)
    if total > budget:
        raise BudgetError(
            f"densest_subset needs {total} subsets, budget is {budget}", required=total
        )
    adj = g.adjacency_masks()
    best_e, best_set = -1, ()
    for combo in combinations(range(g.n), v):
        mask = 0
        e = 0
        for x in combo:
            e += (adj[x] & mask).bit_count()
            mask |= 1 << x
        if e > best_e:
            best_e, best_set = e, combo
    return best_set, best_e


def _edge_subset_shape(edges) -> tuple:
    """(vertex count, component count) of an explicit edge list."""
    parent = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        parent.setdefault(u, u)
        parent.setdefault(v, v)
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    roots = {find(x) for x in parent}
    return len(parent), len(roots)


def check_component_inequality(spec: StructureSpec, edge_indices) -> bool:
    """Do the structure's component inequalities hold for this edge subset?

    c4e: 3(|V|-c) >= 2l + c whenever l <= n/10, and 3(|V|-c) >= 2l - 3 always.
    krs: (r+1)(|V|-c) >= 2l + c whenever l <= n/(2r), and (r+1)|V| >= 2l always.
    The subset must be part of the canonical structure.
    """
    n = spec.n
    if isinstance(edge_indices, int):
        edge_indices = mask_to_indices(edge_indices)
    edges = [index_pair(i, n) for i in edge_indices]
    structure_edges = set(structure_position_edges(spec))
    for e in edges:
        if e not in structure_edges:
            raise ParameterError(f"edge {e} is not part of {spec.label()}")
    ell = len(edges)
    if ell == 0:
        return True
    nv, c = _edge_subset_shape(edges)
    if spec.kind == KIND_C4:
        if ell <= n // 10 and 3 * (nv - c) < 2 * ell + c:
            return False
        return 3 * (nv - c) >= 2 * ell - 3
    r = spec.r
    if ell <= n // (2 * r) and (r + 1) * (nv - c) < 2 * ell + c:
        return False
    return (r + 1) * nv >= 2 * ell


def connected_edge_subgraphs(g: LabeledGraph, max_edges: int):
    """Yield every connected edge subset with at most max_edges edges, once.

    Rooted expansion: grow a connected set from each seed edge by adjacent
    edges, deduplicating globally.
    """
    edge_list = g.edge_list()
    m = len(edge_list)
    incident = [[] for _ in range(g.n)]
    for i, (u, v) in enumerate(edge_list):
        incident[u].append(i)
        incident[v].append(i)
    neighbors = [set() for _ in range(m)]
    for i, (u, v) in enumerate(edge_list):
        for w in (u, v):
            for j in incident[w]:
                if j != i:
                    neighbors[i].add(j)
    seen = set()
    for root in range(m):
        start = frozenset([root])
        if start in seen:
            continue
        seen.add(start)
        stack = [start]
        while stack:
            cur = stack.pop()
            yield tuple(sorted(cur))
            if len(cur) >= max_edges:
                continue
            frontier = set()
            for i in cur:
                frontier |= neighbors[i]
            for j in frontier - cur:
                nxt = cur | {j}
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)


def count_subgraphs_by_shape(g: LabeledGraph, ell: int, c: int, budget: int = _DEFAULT_SUBSET_BUDGET) -> int:
    """Exact number of edge subsets with ell edges forming exactly c components."""
    if ell < 0 or c < 0:
        raise ParameterError("ell and c must be nonnegative")
    edge_list = g.edge_list()
    total = math.comb(len(edge_list), ell)
    if total > budget:
        raise BudgetError(
            f"shape count needs {total} subsets, budget is {budget}", required=total
        )
    count = 0
    for combo in combinations(edge_list, ell):
        if _edge_subset_shape(combo)[1] == c:
            count += 1
    return count


def shape_count_bound(f: int, max_degree: int, ell: int, c: int) -> float:
    """Counting bound (4 e d)^ell * C(f, c) on shape-class sizes."""
    return (4 * math.e * max_degree) ** ell * math.comb(f, c)


@dataclass
class DensityVerdict:
    claim_id: str
    spec_label: str
    instances_checked: int
    violations: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> str:
        payload = {
            "claim": self.claim_id,
            "spec": self.spec_label,
            "instances_checked": self.instances_checked,
            "violations": self.violations,
            "notes": self.notes,
            "verdict": "pass" if self.passed else "fail",
        }
        return json.dumps(payload, sort_keys=True)


def _require_krs_r4(spec: StructureSpec, claim: str):
    if spec.kind != KIND_KRS or spec.s != 2 or spec.r < 4:
        raise ParameterError(f"claim {claim} applies to krs structures with s=2, r>=4")


def _check_segment_edges(spec: StructureSpec, budget: int, samples: int, seed: int) -> DensityVerdict:
    """Segments starting at a clique start induce exactly the closed form."""
    _require_krs_r4(spec, "segment-edges")
    g = build_structure(spec)
    n, r = spec.n, spec.r
    cap = segment_cap(spec)
    verdict = DensityVerdict("segment-edges", spec.label(), 0)
    for v in range(2, cap + 1):
        for i in range(spec.num_cliques):
            start = i * (r - 2)
            seg = segment_positions(n, start, v)
            got = induced_edge_count(g, seg)
            want = segment_edge_formula(r, v)
            verdict.instances_checked += 1
            if got != want:
                verdict.violations.append(
                    {"segment": list(seg), "induced": got, "formula": want}
                )
    return verdict


def _check_segment_linear_bound(spec: StructureSpec, budget: int, samples: int, seed: int) -> DensityVerdict:
    """The closed form never exceeds (r+1)v/2 - (r+2)/2."""
    _require_krs_r4(spec, "segment-linear-bound")
    r = spec.r
    verdict = DensityVerdict("segment-linear-bound", spec.label(), 0)
    for v in range(2, spec.n + 1):
        lhs = segment_edge_formula(r, v)
        rhs = easy_bound(r, v)
        verdict.instances_checked += 1
        if Fraction(lhs) > rhs:
            verdict.violations.append({"v": v, "formula": lhs, "bound": str(rhs)})
    return verdict


def _check_densest_segment_alignment(spec: StructureSpec, budget: int, samples: int, seed: int) -> DensityVerdict:
    """Among segments of each admissible length, a maximizer starts at a
    clique start or ends at a clique end."""
    _require_krs_r4(spec, "densest-segment-alignment")
    g = build_structure(spec)
    n, r = spec.n, spec.r
    cap = segment_cap(spec)
    verdict = DensityVerdict("densest-segment-alignment", spec.label(), 0)
    if r > cap:
        verdict.notes.append(
            f"no segment lengths in [{r}, {cap}]: claim vacuous at n={n}"
        )
        return verdict
    step = r - 2
    for v in range(r, cap + 1):
        counts = [induced_edge_count(g, segment_positions(n, s, v)) for s in range(n)]
        best = max(counts)
        aligned = [
            s
            for s in range(n)
            if counts[s] == best
            and (s % step == 0 or (s + v - 1) % step == (r - 1) % step)
        ]
        verdict.instances_checked += n
        if not aligned:
            verdict.violations.append({"length": v, "max_edges": best})
    return verdict


def _check_densest_is_segment(spec: StructureSpec, budget: int, samples: int, seed: int) -> DensityVerdict:
    """No vertex subset beats the best segment of its size (small sizes)."""
    _require_krs_r4(spec, "densest-is-segment")
    g = build_structure(spec)
    n = spec.n
    cap = segment_cap(spec)
    verdict = DensityVerdict("densest-is-segment", spec.label(), 0)
    best = max_induced_by_size(g, cap, budget)
    for v in range(2, cap + 1):
        seg_best = max(
            induced_edge_count(g, segment_positions(n, s, v)) for s in range(n)
        )
        got, witness = best[v]
        verdict.instances_checked += math.comb(n, v)
        if got > seg_best:
            verdict.violations.append(
                {"v": v, "subset": list(witness), "edges": got, "segment_max": seg_best}
            )
    return verdict


def _check_density_linear_bound(spec: StructureSpec, budget: int, samples: int, seed: int) -> DensityVerdict:
    """Every small vertex subset obeys e <= (r+1)|V|/2 - (r+2)/2.

    Checked for |V| >= 2; a lone vertex induces no edges and the linear form
    is negative there, so size-one subsets are outside the claim.
    """
    _require_krs_r4(spec, "density-linear-bound")
    g = build_structure(spec)
    r = spec.r
    cap = segment_cap(spec)
    verdict = DensityVerdict("density-linear-bound", spec.label(), 0)
    best = max_induced_by_size(g, cap, budget)
    for v in range(2, cap + 1):
        got, witness = best[v]
        verdict.instances_checked += math.comb(spec.n, v)
        if Fraction(got) > easy_bound(r, v):
            verdict.violations.append(
                {"v": v, "subset": list(witness), "edges": got, "bound": str(easy_bound(r, v))}
            )
    return verdict


def _check_c4_connected_edge_bound(spec: StructureSpec, budget: int, samples: int, seed: int) -> DensityVerdict:
    """Connected pieces on v vertices, 2 <= v <= n/10, carry at most 3v/2 - 2 edges."""
    if spec.kind != KIND_C4:
        raise ParameterError("claim c4-connected-edge-bound applies to c4e")
    g = build_structure(spec)
    n = spec.n
    vmax = n // 10
    verdict = DensityVerdict("c4-connected-edge-bound", spec.label(), 0)
    if vmax < 2:
        verdict.notes.append(f"n/10 < 2: claim vacuous at n={n}")
        return verdict
    # A connected piece on <= vmax vertices has fewer than 3*vmax/2 edges.
    edge_cap = (3 * vmax) // 2
    edge_list = g.edge_list()
    for subset in connected_edge_subgraphs(g, edge_cap):
        edges = [edge_list[i] for i in subset]
        nv, c = _edge_subset_shape(edges)
        if nv > vmax or c != 1:
            continue
        verdict.instances_checked += 1
        if 2 * len(edges) > 3 * nv - 4:
            verdict.violations.append({"edges": edges, "v": nv})
    return verdict


def _component_claim(spec: StructureSpec, claim: str, budget: int, samples: int, seed: int, exhaustive_cap: int = 4) -> DensityVerdict:
    """Component inequalities over edge subsets of the structure: exhaustive
    up to exhaustive_cap edges, then uniform random larger subsets."""
    g = build_structure(spec)
    n = spec.n
    edge_list = g.edge_list()
    indices = list(range(len(edge_list)))
    verdict = DensityVerdict(claim, spec.label(), 0)

    def check(edge_ids):
        edges = [edge_list[i] for i in edge_ids]
        ell = len(edges)
        nv, c = _edge_subset_shape(edges)
        ok = True
        if spec.kind == KIND_C4:
            if ell <= n // 10 and 3 * (nv - c) < 2 * ell + c:
                ok = False
            if 3 * (nv - c) < 2 * ell - 3:
                ok = False
        else:
            r = spec.r
            if ell <= n // (2 * r) and (r + 1) * (nv - c) < 2 * ell + c:
                ok = False
            if (r + 1) * nv < 2 * ell:
                ok = False
        verdict.instances_checked += 1
        if not ok:
            verdict.violations.append({"edges": edges, "v": nv, "c": c})

    total = sum(math.comb(len(indices), k) for k in range(1, exhaustive_cap + 1))
    if total > budget:
        raise BudgetError(f"component scan needs {total} subsets", required=total)
    for k in range(1, exhaustive_cap + 1):
        for combo in combinations(indices, k):
            check(combo)
    rng = random.Random(seed)
    for _ in range(samples):
        k = rng.randint(exhaustive_cap + 1, len(indices))
        check(rng.sample(indices, k))
    if samples:
        verdict.notes.append(
            f"exhaustive to {exhaustive_cap} edges, {samples} sampled larger subsets"
        )
    return verdict


def _check_c4_components(spec, budget, samples, seed):
    if spec.kind != KIND_C4:
        raise ParameterError("claim c4-component-bounds applies to c4e")
    return _component_claim(spec, "c4-component-bounds", budget, samples, seed)


def _check_krs_components(spec, budget, samples, seed):
    if spec.kind != KIND_KRS:
        raise ParameterError("claim krs-component-bounds applies to krs")
    return _component_claim(spec, "krs-component-bounds", budget, samples, seed)


def _check_shape_bound(spec: StructureSpec, budget: int, samples: int, seed: int) -> DensityVerdict:
    """Shape-class counts never exceed (4 e d)^l * C(f, c) for l <= 5."""
    g = build_structure(spec)
    f = g.edge_count()
    d = g.max_degree()
    verdict = DensityVerdict("subgraph-shape-bound", spec.label(), 0)
    for ell in range(1, 6):
        for c in range(1, ell + 1):
            got = count_subgraphs_by_shape(g, ell, c, budget)
            bound = shape_count_bound(f, d, ell, c)
            verdict.instances_checked += 1
            if got > bound:
                verdict.violations.append({"l": ell, "c": c, "count": got, "bound": bound})
    return verdict


CLAIM_CHECKS = {
    "segment-edges": _check_segment_edges,
    "segment-linear-bound": _check_segment_linear_bound,
    "densest-segment-alignment": _check_densest_segment_alignment,
    "densest-is-segment": _check_densest_is_segment,
    "density-linear-bound": _check_density_linear_bound,
    "c4-connected-edge-bound": _check_c4_connected_edge_bound,
    "c4-component-bounds": _check_c4_components,
    "krs-component-bounds": _check_krs_components,
    "subgraph-shape-bound": _check_shape_bound,
}


def verify_density_lemma(
    claim_id: str,
    spec: StructureSpec,
    budget: int = _DEFAULT_SUBSET_BUDGET,
    samples: int = 0,
    seed: int = 0,
) -> DensityVerdict:
    """Run one registered density claim over its quantified domain."""
    if claim_id not in CLAIM_CHECKS:
        raise ParameterError(
            f"unknown claim {claim_id!r}; known: {sorted(CLAIM_CHECKS)}"
        )
    return CLAIM_CHECKS[claim_id](spec, budget, samples, seed)


def gamma_riordan(g: LabeledGraph, budget: int = 1 << 22) -> Fraction:
    """max over 3 <= v <= n of e(v)/(v-2), with e(v) the densest v-subset.

    Scans all 2^n vertex subsets with a subset DP, so exact for n up to
    about 22; refuses beyond the budget.
    """
    n = g.n
    if n < 3:
        raise ParameterError("gamma needs at least 3 vertices")
    if (1 << n) > budget:
        raise BudgetError(f"gamma scan needs 2^{n} subsets", required=1 << n)
    adj = g.adjacency_masks()
    edges = bytearray(1 << n)
    best = [0] * (n + 1)
    for mask in range(1, 1 << n):
        low = mask & -mask
        rest = mask ^ low
        e = edges[rest] + (adj[low.bit_length() - 1] & rest).bit_count()
        edges[mask] = e
        size = mask.bit_count()
        if e > best[size]:
            best[size] = e
    return max(Fraction(best[v], v - 2) for v in range(3, n + 1))
