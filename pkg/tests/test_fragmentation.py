import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from spanlab import (
    c4_spec,
    check_claim_bound,
    classify_pair,
    estimate_bad_pair_expectation,
    fragment_step,
    fragments_of,
    initial_state,
    intersection_profile,
    krs_spec,
    run_pipeline,
)
from spanlab.copyfamily import indices_to_mask, mask_to_indices
from spanlab.fragmentation import (
    FragmentationConfig,
    fragment_schedule,
    nested_pair_subsets,
    sample_pair_subset,
)


def _mask(*indices):
    return indices_to_mask(indices)


class TestFragmentsOf:
    def test_covering_exposure_yields_empty_fragment(self):
        members = [_mask(0, 1, 2), _mask(3, 4, 5)]
        frags = fragments_of(members, _mask(0, 1, 2), _mask(0, 1, 2), k=3)
        assert 0 in frags  # the empty fragment

    def test_no_exposure_keeps_member_itself(self):
        members = [_mask(0, 1, 2), _mask(3, 4, 5)]
        frags = fragments_of(members, _mask(0, 1, 2), 0, k=3)
        assert frags == [_mask(0, 1, 2)]

    def test_hand_instance(self):
        # ground {0..5}; members A={0,1,2}, B={0,1,3}, C={3,4,5}; S=A, X={2}:
        # only A fits inside S ∪ X, leaving {0,1}
        a, b, c = _mask(0, 1, 2), _mask(0, 1, 3), _mask(3, 4, 5)
        frags = fragments_of([a, b, c], a, _mask(2), k=2)
        assert frags == [_mask(0, 1)]
        # with X={1,3} both A and B fit; leftovers {0,2} and {0}
        frags = fragments_of([a, b, c], a, _mask(1, 3), k=2)
        assert frags == [_mask(0), _mask(0, 2)]

    def test_lexicographic_order(self):
        members = [_mask(2, 5), _mask(0, 7), _mask(1, 3)]
        frags = fragments_of(members, _mask(0, 1, 2, 3, 5, 7), 0, k=2)
        assert [mask_to_indices(f) for f in frags] == [(0, 7), (1, 3), (2, 5)]

    @given(st.data())
    @settings(max_examples=60, deadline=None)
    def test_matches_definition(self, data):
        ground = 10
        n_members = data.draw(st.integers(min_value=1, max_value=5))
        members = [
            _mask(*data.draw(st.lists(st.integers(0, ground - 1), min_size=1, max_size=4, unique=True)))
            for _ in range(n_members)
        ]
        s = data.draw(st.sampled_from(members))
        x = _mask(*data.draw(st.lists(st.integers(0, ground - 1), max_size=6, unique=True)))
        k = data.draw(st.integers(min_value=0, max_value=4))
        expected = sorted(
            {j & ~x for j in members if not j & ~(s | x) and (j & ~x).bit_count() <= k},
            key=mask_to_indices,
        )
        assert fragments_of(members, s, x, k) == expected
        assert classify_pair(members, s, x, k) == bool(expected)


class TestClassify:
    def test_small_leftover_is_good(self):
        members = [_mask(0, 1, 2)]
        assert classify_pair(members, members[0], _mask(0), k=2)

    def test_distinct_members_bad_without_exposure(self):
        members = [_mask(0, 1, 2), _mask(3, 4, 5)]
        assert not classify_pair(members, members[0], 0, k=2)

    def test_monotone_in_exposure(self):
        rng = random.Random(3)
        members = [_mask(*rng.sample(range(12), 4)) for _ in range(6)]
        for _ in range(50):
            xs = nested_pair_subsets(12, [4, 8], rng)
            for s in members:
                if classify_pair(members, s, xs[0], k=2):
                    assert classify_pair(members, s, xs[1], k=2)


class TestFragmentStep:
    def test_full_exposure_keeps_all_as_empty(self, fam_c4e8):
        state = initial_state(fam_c4e8)
        full = (1 << fam_c4e8.ground_m) - 1
        nxt = fragment_step(state, full, k=12)
        assert len(nxt.entries) == len(fam_c4e8)
        assert all(e.mask == 0 for e in nxt.entries)

    def test_no_exposure_identity(self, fam_c4e8):
        state = initial_state(fam_c4e8)
        nxt = fragment_step(state, 0, k=12)
        assert [e.mask for e in nxt.entries] == fam_c4e8.masks

    def test_lex_min_choice_against_definition(self, fam_c4e8):
        # expose one fixed copy's pairs; every member is good and keeps the
        # lexicographically smallest fragment
        x = fam_c4e8.masks[100]
        state = initial_state(fam_c4e8)
        nxt = fragment_step(state, x, k=12)
        assert len(nxt.entries) == len(fam_c4e8)
        by_charge = {e.charge_copy: e.mask for e in nxt.entries}
        for cid in (0, 99, 100, 500):
            s = fam_c4e8.masks[cid]
            expected = fragments_of(fam_c4e8.masks, s, x, 12)[0]
            assert by_charge[cid] == expected

    def test_k_bound_and_provenance(self, fam_c4e8):
        rng = random.Random(11)
        state = initial_state(fam_c4e8)
        x = sample_pair_subset(fam_c4e8.ground_m, 14, rng)
        nxt = fragment_step(state, x, k=5)
        good = sum(1 for m in fam_c4e8.masks if classify_pair(fam_c4e8.masks, m, x, 5))
        assert len(nxt.entries) == good
        for e in nxt.entries:
            assert e.mask.bit_count() <= 5
            assert not e.mask & ~fam_c4e8.masks[e.charge_copy]
            assert not e.mask & ~fam_c4e8.masks[e.source_copy]

    def test_containment_counts_never_grow(self, fam_c4e8):
        rng = random.Random(23)
        state = initial_state(fam_c4e8)
        for w, k in [(10, 5), (8, 2)]:
            x = sample_pair_subset(fam_c4e8.ground_m, w, rng)
            state = fragment_step(state, x, k)
        from spanlab import copies_containing

        for _ in range(300):
            copy = fam_c4e8.masks[rng.randrange(len(fam_c4e8))]
            size = rng.randint(1, 12)
            subset = indices_to_mask(rng.sample(mask_to_indices(copy), size))
            assert state.count_containing(subset) <= copies_containing(fam_c4e8, subset)

    def test_padding_mode(self, fam_c4e8):
        # padded fragments are k-uniform and stay inside their source copy
        state = initial_state(fam_c4e8)
        full = (1 << fam_c4e8.ground_m) - 1
        for x, k in [(full, 3), (fam_c4e8.masks[0], 12)]:
            padded = fragment_step(state, x, k=k, pad=True)
            assert len(padded.entries) == len(fam_c4e8)
            for e in padded.entries:
                assert e.mask.bit_count() == k
                assert not e.mask & ~fam_c4e8.masks[e.source_copy]


class TestBadPairEstimate:
    def test_full_exposure_means_zero(self, fam_c4e8):
        est = estimate_bad_pair_expectation(
            fam_c4e8.masks, fam_c4e8.ground_m, fam_c4e8.ground_m, 0, trials=5, seed=1
        )
        assert est.mean == 0.0

    def test_no_exposure_all_bad(self, fam_c4e8):
        est = estimate_bad_pair_expectation(fam_c4e8.masks, fam_c4e8.ground_m, 0, 11, trials=2, seed=1)
        assert est.mean == len(fam_c4e8)

    def test_reports_companion_bound(self, fam_c4e8):
        est = estimate_bad_pair_expectation(
            fam_c4e8.masks, fam_c4e8.ground_m, 14, 5, trials=50, seed=3, round_constant=4.0
        )
        assert est.companion_bound == pytest.approx(2 * 4.0 ** (-5 / 3) * 840)
        assert est.stderr >= 0.0

    def test_paired_means_non_increasing_in_w(self, fam_c4e8):
        means = [
            estimate_bad_pair_expectation(fam_c4e8.masks, fam_c4e8.ground_m, w, 5, trials=40, seed=9).mean
            for w in (7, 14, 21, 28)
        ]
        assert all(means[i] >= means[i + 1] for i in range(len(means) - 1))


class TestIntersectionProfile:
    def test_single_member(self):
        s = _mask(0, 1, 2)
        prof = intersection_profile([s], s)
        assert prof[3] == 1 and sum(prof) == 1

    def test_disjoint_members(self):
        # two edge-disjoint members: all weight at overlap 0 except the S term
        a, b = _mask(0, 1, 2, 3, 4, 5), _mask(6, 7, 8, 9, 10, 11)
        prof = intersection_profile([a, b], a)
        assert prof[0] == Fraction(1, 2) and prof[6] == Fraction(1, 2)

    def test_family_profile_sums_to_one(self, fam_c4e8):
        prof = intersection_profile(fam_c4e8.masks, fam_c4e8.canonical_mask())
        assert sum(prof) == 1
        assert prof[12] == Fraction(1, 840)


class TestClaimBound:
    def test_k_zero_with_max_exposure(self, fam_c4e8):
        s = fam_c4e8.canonical_mask()
        w_max = fam_c4e8.ground_m - 12
        report = check_claim_bound(
            fam_c4e8.masks, fam_c4e8.ground_m, s, w_max, 0, round_constant=4.0, q=0.5, trials=3, seed=2
        )
        assert report.mean == len(fam_c4e8)

    def test_k_above_uniformity_gives_zero(self, fam_c4e8):
        s = fam_c4e8.canonical_mask()
        report = check_claim_bound(
            fam_c4e8.masks, fam_c4e8.ground_m, s, 10, 13, round_constant=4.0, q=0.5, trials=5, seed=2
        )
        assert report.mean == 0.0

    def test_desk_instance_reports_both_sides(self, fam_c4e8):
        s = fam_c4e8.canonical_mask()
        report = check_claim_bound(
            fam_c4e8.masks, fam_c4e8.ground_m, s, 10, 5, round_constant=4.0, q=0.5, trials=100, seed=2
        )
        assert report.rhs > 0
        assert report.trials == 100


class TestSchedule:
    def test_c4e8_schedule(self):
        assert fragment_schedule(12, 1 / 3) == [5, 2]

    def test_non_increasing(self):
        for k0 in (12, 15, 20, 30):
            for alpha in (0.2, 1 / 3, 0.45):
                sched = fragment_schedule(k0, alpha)
                assert all(sched[i] >= sched[i + 1] for i in range(len(sched) - 1))
                assert all(k >= 1 for k in sched)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            FragmentationConfig(C=4, K=8, alpha=1 / 3, q=0.5, k_schedule=[2, 5], w=10, seed=0)


class TestPipeline:
    def test_trivial_success_with_full_sprinkle(self, fam_c4e8):
        result = run_pipeline(
            c4_spec(8), K=8, alpha=1 / 3, q=0.1, seed=0, family=fam_c4e8,
            p_override=1.0, rounds_override=0,
        )
        assert result.success and result.y_count == len(fam_c4e8)
        assert result.found_copy == fam_c4e8.copy_indices(0)

    def test_all_empty_exposures_fail(self, fam_c4e8):
        result = run_pipeline(
            c4_spec(8), K=8, alpha=1 / 3, q=0.0, seed=0, family=fam_c4e8, p_override=0.0
        )
        assert not result.success
        assert result.found_copy is None and result.y_count == 0
        assert result.rounds[0].members == 0

    def test_saturated_run_succeeds(self, fam_c4e8):
        result = run_pipeline(
            c4_spec(8), K=8, alpha=1 / 3, q=250 * 8 ** (-2 / 3), seed=42, family=fam_c4e8
        )
        assert result.success
        assert indices_to_mask(result.found_copy) in set(fam_c4e8.masks)
        assert not indices_to_mask(result.found_copy) & ~result.exposed_mask

    def test_deterministic_replay(self, fam_c4e8):
        kwargs = dict(K=8, alpha=1 / 3, q=0.02, seed=77, family=fam_c4e8)
        a = run_pipeline(c4_spec(8), **kwargs)
        b = run_pipeline(c4_spec(8), **kwargs)
        assert a.transcript() == b.transcript()

    def test_round_records(self, fam_c4e8):
        result = run_pipeline(
            c4_spec(8), K=8, alpha=1 / 3, q=0.05, seed=5, family=fam_c4e8
        )
        assert [r.k_bound for r in result.rounds] == [5, 2]
        assert all(r.exposed_count <= fam_c4e8.ground_m for r in result.rounds)
