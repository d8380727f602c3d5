"""Keyed-hash primitives: determinism, scalar/numpy agreement, coin behavior."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from tightpath._rng import (
    MASK64,
    chain64,
    chain64_np,
    coin_mask_np,
    coin_threshold,
    derive_key,
    mix64,
    mix64_np,
)


def test_mix64_range_and_determinism():
    for x in (0, 1, 7, MASK64, 123456789):
        h = mix64(x)
        assert 0 <= h <= MASK64
        assert h == mix64(x)


def test_mix64_distinct_on_small_inputs():
    outs = {mix64(x) for x in range(10_000)}
    assert len(outs) == 10_000


@given(st.integers(0, MASK64))
def test_mix64_scalar_matches_numpy(x):
    assert mix64(x) == int(mix64_np(np.array([x], dtype=np.uint64))[0])


@given(st.integers(0, MASK64), st.lists(st.integers(0, 10**6), min_size=1, max_size=6))
@settings(deadline=None)
def test_chain64_scalar_matches_numpy(key, values):
    cols = [np.array([v], dtype=np.uint64) for v in values]
    assert chain64(key, values) == int(chain64_np(key, cols)[0])


def test_chain64_is_order_sensitive():
    key = derive_key(0, "test")
    assert chain64(key, (1, 2, 3)) != chain64(key, (3, 2, 1))


def test_chain64_np_rejects_empty():
    try:
        chain64_np(0, [])
    except ValueError:
        return
    raise AssertionError("expected ValueError")


def test_derive_key_separates_labels_and_seeds():
    assert derive_key(0, "sigma-j") != derive_key(0, "sigma-k")
    assert derive_key(0, "sigma-j") != derive_key(1, "sigma-j")
    assert derive_key(5, "edge-coin") == derive_key(5, "edge-coin")


def test_coin_threshold_endpoints():
    assert coin_threshold(0.0) == 0
    assert coin_threshold(1.0) == 1 << 64
    assert coin_threshold(0.5) == 1 << 63
    try:
        coin_threshold(1.5)
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")


def test_coin_mask_matches_scalar_comparison():
    hs = np.array([0, 1, 2**63 - 1, 2**63, MASK64], dtype=np.uint64)
    for p in (0.0, 0.25, 0.5, 1.0):
        th = coin_threshold(p)
        expect = np.array([int(h) < th for h in hs])
        assert (coin_mask_np(hs, th) == expect).all()


def test_coin_frequency_matches_p():
    # 10^4 hashes of distinct inputs; success rate within 3 sigma of p
    key = derive_key(42, "edge-coin")
    hs = chain64_np(key, [np.arange(10_000, dtype=np.uint64)])
    for p in (0.1, 0.5, 0.9):
        hits = int(coin_mask_np(hs, coin_threshold(p)).sum())
        sigma = (10_000 * p * (1 - p)) ** 0.5
        assert abs(hits - 10_000 * p) <= 3 * sigma
