import itertools
import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from techperf import idea_pool as ip


def legal_structure(pool):
    """Every non-basic idea is the union of two earlier disjoint ideas."""
    seen = set()
    for i, m in enumerate(pool.ideas):
        if m & (m - 1) == 0:
            seen.add(m)
            continue
        assert any((m ^ a) in seen and a & (m ^ a) == 0 for a in seen if a & m == a), i
        seen.add(m)
    return True


def test_combination_limit_values():
    assert ip.combination_limit(1) == 1
    assert ip.combination_limit(5) == 31
    assert ip.combination_limit(10) == 1023
    assert ip.combination_limit(64) == 2**64 - 1
    assert ip.combination_limit(100) == 2**100 - 1


@pytest.mark.parametrize("bad", [0, -3])
def test_combination_limit_rejects_nonpositive(bad):
    with pytest.raises(ValueError):
        ip.combination_limit(bad)


def test_theoretical_rate():
    assert ip.theoretical_rate(0.25) == pytest.approx(0.1178, abs=5e-5)
    assert ip.theoretical_rate(0.0) == 0.0
    assert ip.theoretical_rate(1.0) == pytest.approx(math.log(1.5))
    with pytest.raises(ValueError):
        ip.theoretical_rate(1.5)


def test_new_pool_holds_basic_ideas():
    pool = ip.new_pool(4, 0.25)
    assert pool.ideas == [1, 2, 4, 8]
    assert pool.ioi_c == 4
    assert pool.limit == 15
    assert [pool.ancestors(i) for i in range(4)] == [frozenset({i}) for i in range(4)]
    with pytest.raises(ValueError):
        ip.new_pool(0, 0.25)
    with pytest.raises(ValueError):
        ip.new_pool(3, -0.1)
    with pytest.raises(ValueError):
        ip.new_pool(3, 0.2, pairing="greedy")


def test_ancestor_indices():
    assert ip.ancestor_indices(0) == frozenset()
    assert ip.ancestor_indices(0b1011) == {0, 1, 3}
    assert ip.ancestor_indices(1 << 90) == {90}


class TestAttemptCombination:
    def test_merge_and_blocks(self):
        rng = np.random.default_rng(0)
        pool = ip.new_pool(3, 1.0)
        j = ip.attempt_combination(pool, 0, 1, rng)
        assert pool.ideas[j] == 0b011
        # union already realised
        assert ip.attempt_combination(pool, 1, 0, rng) is None
        # overlapping ancestors
        assert ip.attempt_combination(pool, j, 0, rng) is None
        k = ip.attempt_combination(pool, j, 2, rng)
        assert pool.ideas[k] == 0b111
        assert pool.ideas == [1, 2, 4, 3, 7]

    def test_failed_draw_consumes_one_number(self):
        pool = ip.new_pool(3, 0.0)
        a, b = np.random.default_rng(5), np.random.default_rng(5)
        assert ip.attempt_combination(pool, 0, 1, a) is None
        b.random()
        assert a.random() == b.random()

    def test_invalid_indices(self):
        rng = np.random.default_rng(0)
        pool = ip.new_pool(3, 1.0)
        with pytest.raises(ValueError):
            ip.attempt_combination(pool, 1, 1, rng)
        with pytest.raises(IndexError):
            ip.attempt_combination(pool, 0, 3, rng)

    def test_constraint_off_allows_repeats(self):
        rng = np.random.default_rng(0)
        pool = ip.new_pool(2, 1.0, reuse_constraint=False)
        ip.attempt_combination(pool, 0, 1, rng)
        ip.attempt_combination(pool, 0, 1, rng)
        ip.attempt_combination(pool, 0, 2, rng)
        assert pool.ioi_c == 5
        assert not pool.saturated


@pytest.mark.parametrize("pairing", ip.PAIRINGS)
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_small_pool_saturates_at_every_subset(n, pairing):
    rng = np.random.default_rng(n)
    pool = ip.new_pool(n, 0.5, pairing=pairing)
    for _ in range(400):
        ip.step(pool, rng)
    subsets = {sum(1 << i for i in c) for r in range(1, n + 1)
               for c in itertools.combinations(range(n), r)}
    assert set(pool.ideas) == subsets
    assert pool.saturated
    assert ip.step(pool, rng) == 0


def test_step_uses_only_start_of_step_ideas():
    # with p = 1 every attempt succeeds; a 4-idea pool makes 2 attempts
    pool = ip.new_pool(4, 1.0)
    created = ip.step(pool, np.random.default_rng(1))
    assert created == 2
    assert all(bin(m).count("1") == 2 for m in pool.ideas[4:])


def test_feasible_pairing_uniform_over_legal_partners():
    # idea 0 = {0}; legal partners of 0 among {1}, {2}, {3} and {1,2}
    rng = np.random.default_rng(11)
    counts = Counter()
    for _ in range(4000):
        pool = ip.new_pool(4, 1.0)
        ip._try_merge(pool, 1, 2)
        counts[ip.find_partner(pool, 0, pool.ioi_c, rng)] += 1
    assert set(counts) == {1, 2, 3, 4}
    for c in counts.values():
        assert abs(c / 4000 - 0.25) < 0.03


def test_find_partner_none_when_exhausted():
    pool = ip.new_pool(2, 1.0)
    ip._try_merge(pool, 0, 1)
    rng = np.random.default_rng(0)
    assert ip.find_partner(pool, 2, pool.ioi_c, rng) is None
    assert ip.find_partner(pool, 0, pool.ioi_c, rng) is None


def test_inject_basic_extends_limit():
    rng = np.random.default_rng(2)
    pool = ip.new_pool(3, 0.5)
    for _ in range(200):
        ip.step(pool, rng)
    assert pool.saturated
    idx = ip.inject_basic(pool)
    assert pool.ideas[idx] == 1 << 3
    assert pool.n_basic == 4 and pool.limit == 15
    assert not pool.saturated
    for _ in range(200):
        ip.step(pool, rng)
    assert pool.ioi_c == 15


def test_wide_masks_beyond_64_basic_ideas():
    rng = np.random.default_rng(3)
    pool = ip.new_pool(70, 1.0)
    for _ in range(4):
        ip.step(pool, rng)
    assert len(set(pool.ideas)) == pool.ioi_c > 70
    assert legal_structure(pool)
    idx = ip.inject_basic(pool)
    assert pool.ideas[idx] == 1 << 70


def test_compiled_and_wide_steps_stay_legal():
    rng = np.random.default_rng(4)
    a = ip.new_pool(6, 0.5)
    b = ip.new_pool(6, 0.5)
    for _ in range(30):
        ip.step(a, rng)
        n = b.ioi_c
        hits = int(np.count_nonzero(rng.random(n // 2) < 0.5))
        if hits:
            ip._feasible_step_wide(b, n, hits, rng)
    for pool in (a, b):
        assert len(set(pool.ideas)) == pool.ioi_c
        assert legal_structure(pool)
        assert pool.ioi_c == 63


def test_copy_is_independent():
    rng = np.random.default_rng(0)
    pool = ip.new_pool(5, 0.5)
    ip.step(pool, rng)
    clone = pool.copy()
    ip.step(clone, rng)
    ip.step(clone, rng)
    assert clone.ideas[:pool.ioi_c] == pool.ideas
    assert clone.ioi_c >= pool.ioi_c


def test_unconstrained_growth_matches_closed_form():
    ks = []
    for seed in range(10):
        rng = np.random.default_rng(seed)
        pool = ip.new_pool(10, 0.25, reuse_constraint=False)
        sizes = [pool.ioi_c]
        for _ in range(50):
            ip.step(pool, rng)
            sizes.append(pool.ioi_c)
        ks.append(np.polyfit(np.arange(51), np.log(sizes), 1)[0])
    assert np.mean(ks) == pytest.approx(ip.theoretical_rate(0.25), abs=0.01)


@settings(max_examples=30)
@given(n=st.integers(1, 12), p=st.floats(0.05, 1.0), seed=st.integers(0, 2**32 - 1),
       steps=st.integers(1, 40), pairing=st.sampled_from(ip.PAIRINGS))
def test_pool_never_exceeds_limit_and_stays_unique(n, p, seed, steps, pairing):
    rng = np.random.default_rng(seed)
    pool = ip.new_pool(n, p, pairing=pairing)
    prev = pool.ioi_c
    for _ in range(steps):
        created = ip.step(pool, rng)
        assert pool.ioi_c == prev + created
        assert prev <= pool.ioi_c <= pool.limit
        prev = pool.ioi_c
    assert len(set(pool.ideas)) == pool.ioi_c
    assert all(0 < m < (1 << n) for m in pool.ideas)


@settings(max_examples=15)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 9))
def test_step_is_deterministic(seed, n):
    def grow():
        rng = np.random.default_rng(seed)
        pool = ip.new_pool(n, 0.3)
        for _ in range(25):
            ip.step(pool, rng)
        return pool.ideas

    assert grow() == grow()
