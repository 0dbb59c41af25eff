"""Round-based fragmentation of a copy family under random edge exposures.

Each round exposes a random set X of pairs and replaces every member S of the
current multiset by its smallest surviving piece: among all members J fitting
inside S ∪ X, the leftovers J \\ X of size at most k are the (S, X)-fragments,
the pair (S, X) is k-good when one exists, and the lexicographically smallest
fragment is kept.  Fragments carry two provenance links: the member they were
charged to (which keeps containment counts monotone round over round) and the
original copy they reconstruct to.

The pipeline runs a fixed schedule of uniform-size exposures followed by one
binomial sprinkle and reports whether some final fragment is fully covered.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .copyfamily import (
    CopyFamily,
    enumerate_copies,
    indices_to_mask,
    mask_to_indices,
)
from .structures import StructureSpec


@dataclass(frozen=True)
class FragmentEntry:
    """One multiset member: its pairs, the copy it is charged to for
    counting, and the copy it reconstructs to."""

    mask: int
    charge_copy: int
    source_copy: int

    def size(self) -> int:
        return self.mask.bit_count()


@dataclass
class FragmentationState:
    round: int
    entries: list
    exposed_mask: int
    k_bound: int
    ground_m: int

    def sizes(self) -> list:
        return [e.mask.bit_count() for e in self.entries]

    def count_containing(self, subset_mask: int) -> int:
        return sum(1 for e in self.entries if e.mask & subset_mask == subset_mask)


@dataclass
class FragmentationConfig:
    """Reproducible description of a fragmentation experiment."""

    C: float
    K: float
    alpha: float
    q: float
    k_schedule: list
    w: int
    seed: int

    def __post_init__(self):
        ks = self.k_schedule
        if any(k <= 0 for k in ks) or any(ks[i] < ks[i + 1] for i in range(len(ks) - 1)):
            raise ValueError("k schedule must be positive and non-increasing")


def initial_state(family: CopyFamily) -> FragmentationState:
    entries = [FragmentEntry(m, i, i) for i, m in enumerate(family.masks)]
    return FragmentationState(
        round=0,
        entries=entries,
        exposed_mask=0,
        k_bound=family.k0,
        ground_m=family.ground_m,
    )


def _lex_key(mask: int) -> tuple:
    return mask_to_indices(mask)


def fragments_of(members, S_mask: int, X_mask: int, k: int) -> list:
    """All distinct leftovers J \\ X of size <= k over members J inside S ∪ X,
    in lexicographic order.

    ``members`` is an iterable of masks (or FragmentEntry values).
    """
    cover = S_mask | X_mask
    out = set()
    for j in members:
        jm = j.mask if isinstance(j, FragmentEntry) else j
        if jm & ~cover:
            continue
        frag = jm & ~X_mask
        if frag.bit_count() <= k:
            out.add(frag)
    return sorted(out, key=_lex_key)


def classify_pair(members, S_mask: int, X_mask: int, k: int) -> bool:
    """True when (S, X) is k-good, i.e. some fragment of size <= k exists."""
    cover = S_mask | X_mask
    for j in members:
        jm = j.mask if isinstance(j, FragmentEntry) else j
        if jm & ~cover:
            continue
        if (jm & ~X_mask).bit_count() <= k:
            return True
    return False


def fragment_step(state: FragmentationState, X_mask: int, k: int, pad: bool = False) -> FragmentationState:
    """One fragmentation round: keep, for every good member, its
    lexicographically smallest fragment, with multiplicity one per member.

    With ``pad`` the kept fragment is topped up to exactly k pairs using the
    smallest-index other pairs of its source copy (experiment mode only).
    """
    prev = state.entries
    # Only members with leftovers of size <= k can supply fragments.
    small = []  # (lex key, leftover mask, entry index)
    for idx, e in enumerate(prev):
        lo = e.mask & ~X_mask
        if lo.bit_count() <= k:
            small.append((_lex_key(lo), lo, idx))
    small.sort()
    new_entries = []
    for idx, e in enumerate(prev):
        s_cover = e.mask | X_mask
        chosen = None
        for key, lo, jdx in small:
            if prev[jdx].mask & ~s_cover:
                continue
            chosen = (lo, jdx)
            break
        if chosen is None:
            continue
        frag, jdx = chosen
        if pad and frag.bit_count() < k:
            spare = prev[jdx].mask & ~frag
            need = k - frag.bit_count()
            while need and spare:
                low = spare & -spare
                frag |= low
                spare ^= low
                need -= 1
        new_entries.append(
            FragmentEntry(
                mask=frag,
                charge_copy=e.charge_copy,
                source_copy=prev[jdx].source_copy,
            )
        )
    return FragmentationState(
        round=state.round + 1,
        entries=new_entries,
        exposed_mask=state.exposed_mask | X_mask,
        k_bound=k,
        ground_m=state.ground_m,
    )


def sample_pair_subset(m: int, w: int, rng: random.Random) -> int:
    """Uniform w-subset of the ground pairs, as a mask."""
    if not (0 <= w <= m):
        raise ValueError(f"need 0 <= w <= {m}, got {w}")
    return indices_to_mask(rng.sample(range(m), w))


def nested_pair_subsets(m: int, ws, rng: random.Random) -> list:
    """Masks of prefixes of one random permutation: coupled uniform subsets,
    nested across the given sizes."""
    order = list(range(m))
    rng.shuffle(order)
    out = []
    for w in ws:
        if not (0 <= w <= m):
            raise ValueError(f"need 0 <= w <= {m}, got {w}")
        out.append(indices_to_mask(order[:w]))
    return out


@dataclass
class BadPairEstimate:
    mean: float
    stderr: float
    trials: int
    w: int
    k: int
    members: int
    companion_bound: float = None
    implied_round_constant: float = None

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True)


def estimate_bad_pair_expectation(
    members,
    m: int,
    w: int,
    k: int,
    trials: int,
    seed: int,
    round_constant: float = None,
) -> BadPairEstimate:
    """Monte Carlo mean of the number of members S whose pair (S, X) is k-bad,
    over uniform w-subsets X of the ground pairs.

    Per trial, X is the w-prefix of a seeded random permutation of the pairs,
    so calls sharing a seed see nested exposures across different w: enlarging
    X never turns a good pair bad, which makes paired means comparable.  When
    ``round_constant`` C is supplied, the companion upper bound 2 C^(-k/3) |H|
    is reported alongside as ``companion_bound``.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if not (0 <= w <= m):
        raise ValueError(f"need 0 <= w <= {m}, got {w}")
    masks = [e.mask if isinstance(e, FragmentEntry) else e for e in members]
    rng = random.Random(seed)
    order = list(range(m))
    counts = []
    for _ in range(trials):
        rng.shuffle(order)
        X = indices_to_mask(order[:w])
        small = []
        bad = 0
        for jm in masks:
            lo = jm & ~X
            if lo.bit_count() <= k:
                small.append((lo, jm))
        for sm in masks:
            s_cover = sm | X
            for lo, jm in small:
                if not jm & ~s_cover:
                    break
            else:
                bad += 1
        counts.append(bad)
    mean = sum(counts) / trials
    if trials > 1:
        var = sum((c - mean) ** 2 for c in counts) / (trials - 1)
        stderr = math.sqrt(var / trials)
    else:
        stderr = float("nan")
    rhs = None
    if round_constant is not None:
        rhs = 2 * round_constant ** (-k / 3) * len(masks)
    return BadPairEstimate(
        mean=mean,
        stderr=stderr,
        trials=trials,
        w=w,
        k=k,
        members=len(masks),
        companion_bound=rhs,
        implied_round_constant=round_constant,
    )


def intersection_profile(members, S_mask: int) -> list:
    """Fractions f_j of members J with |J ∩ S| = j, for j = 0..max size.

    Exact rationals; the entries sum to 1.
    """
    masks = [e.mask if isinstance(e, FragmentEntry) else e for e in members]
    if not masks:
        raise ValueError("empty member list")
    kmax = max(m.bit_count() for m in masks)
    counts = [0] * (kmax + 1)
    for jm in masks:
        counts[(jm & S_mask).bit_count()] += 1
    total = len(masks)
    return [Fraction(c, total) for c in counts]


@dataclass
class OverlapClaimReport:
    mean: float
    stderr: float
    trials: int
    w_prime: int
    k: int
    rhs: float
    members: int
    params: dict

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True)


def check_claim_bound(
    members,
    m: int,
    S_mask: int,
    w_prime: int,
    k: int,
    round_constant: float,
    q: float,
    trials: int,
    seed: int,
) -> OverlapClaimReport:
    """Monte Carlo mean of |{J : J ⊆ S ∪ Y, |J ∩ S| >= k}| over uniform
    w'-subsets Y of the pairs outside S, reported beside the bound
    C^(-2k/3) |H| C(w'+k_i, k_i) / C(m, k_i)."""
    masks = [e.mask if isinstance(e, FragmentEntry) else e for e in members]
    outside = [i for i in range(m) if not (S_mask >> i) & 1]
    if w_prime > len(outside):
        raise ValueError(f"w'={w_prime} exceeds |M \\ S|={len(outside)}")
    rng = random.Random(seed)
    counts = []
    for _ in range(trials):
        Y = indices_to_mask(rng.sample(outside, w_prime))
        cover = S_mask | Y
        hits = 0
        for jm in masks:
            if jm & ~cover:
                continue
            if (jm & S_mask).bit_count() >= k:
                hits += 1
        counts.append(hits)
    mean = sum(counts) / trials
    if trials > 1:
        var = sum((c - mean) ** 2 for c in counts) / (trials - 1)
        stderr = math.sqrt(var / trials)
    else:
        stderr = float("nan")
    k_i = max(jm.bit_count() for jm in masks)
    rhs = (
        round_constant ** (-2 * k / 3)
        * len(masks)
        * math.comb(w_prime + k_i, k_i)
        / math.comb(m, k_i)
    )
    return OverlapClaimReport(
        mean=mean,
        stderr=stderr,
        trials=trials,
        w_prime=w_prime,
        k=k,
        rhs=rhs,
        members=len(masks),
        params={"round_constant": round_constant, "q": q, "k_i": k_i},
    )


@dataclass
class RoundRecord:
    round: int
    members: int
    k_bound: int
    exposed_count: int
    successful: bool

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True)


@dataclass
class PipelineResult:
    success: bool
    found_copy: tuple
    rounds: list
    y_count: int
    exposed_total: int
    final_p: float
    config: dict
    exposed_mask: int = 0

    def transcript(self) -> str:
        """JSON-lines transcript: one record per round, then the summary."""
        lines = [r.to_json() for r in self.rounds]
        lines.append(
            json.dumps(
                {
                    "success": self.success,
                    "found_copy": list(self.found_copy) if self.found_copy else None,
                    "y_count": self.y_count,
                    "exposed_total": self.exposed_total,
                    "final_p": self.final_p,
                    "config": self.config,
                },
                sort_keys=True,
            )
        )
        return "\n".join(lines) + "\n"


def fragment_schedule(k0: int, alpha: float) -> list:
    """Round bounds floor(k0^(1-i*alpha)) for i = 1..ceil(1/alpha)-1."""
    t = math.ceil(1 / alpha) - 1
    return [math.floor(k0 ** (1 - i * alpha)) for i in range(1, t + 1)]


def run_pipeline(
    spec: StructureSpec,
    K: float,
    alpha: float,
    q: float,
    seed: int,
    family: CopyFamily = None,
    p_override: float = None,
    rounds_override: int = None,
    pad: bool = False,
    enumeration_budget: int = None,
) -> PipelineResult:
    """Fragmentation rounds with uniform exposures of size K*q*C(n,2) each,
    then one binomial sprinkle at rate K*q; succeeds when a surviving
    fragment lies inside the final sprinkle.

    The advisory sizing condition q >= 4*k0/(K*n^2) is recorded in the config
    but not enforced.
    """
    if family is None:
        kwargs = {} if enumeration_budget is None else {"budget": enumeration_budget}
        family = enumerate_copies(spec, **kwargs)
    m = family.ground_m
    k0 = family.k0
    schedule = fragment_schedule(k0, alpha)
    if rounds_override is not None:
        schedule = schedule[:rounds_override]
    w = min(math.floor(K * q * m), m)
    p = K * q if p_override is None else p_override
    p = min(max(p, 0.0), 1.0)
    rng = random.Random(seed)
    state = initial_state(family)
    rounds = []
    for k_i in schedule:
        X = sample_pair_subset(m, w, rng)
        before = len(state.entries)
        state = fragment_step(state, X, k_i, pad=pad)
        rounds.append(
            RoundRecord(
                round=state.round,
                members=len(state.entries),
                k_bound=k_i,
                exposed_count=state.exposed_mask.bit_count(),
                successful=len(state.entries) * 2 >= before,
            )
        )
    final_mask = 0
    for i in range(m):
        if rng.random() < p:
            final_mask |= 1 << i
    y_count = 0
    found_entry = None
    for e in state.entries:
        if e.mask & ~final_mask:
            continue
        y_count += 1
        if found_entry is None:
            found_entry = e
    found_copy = None
    if found_entry is not None:
        copy_mask = family.masks[found_entry.source_copy]
        covered = state.exposed_mask | final_mask
        if copy_mask & ~covered:
            raise AssertionError("reconstructed copy escapes the exposed pairs")
        found_copy = mask_to_indices(copy_mask)
    config = {
        "spec": spec.label(),
        "K": K,
        "alpha": alpha,
        "q": q,
        "seed": seed,
        "w": w,
        "p": p,
        "k_schedule": schedule,
        "sizing_ok": q >= 4 * k0 / (K * spec.n**2),
        "pad": pad,
    }
    all_exposed = state.exposed_mask | final_mask
    return PipelineResult(
        success=found_entry is not None,
        found_copy=found_copy,
        rounds=rounds,
        y_count=y_count,
        exposed_total=all_exposed.bit_count(),
        final_p=p,
        config=config,
        exposed_mask=all_exposed,
    )
