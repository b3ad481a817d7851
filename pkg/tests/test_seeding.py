"""Deterministic stream derivation."""

import numpy as np
import pytest

from lpdecode import generator_from, mix64, splitmix64


def test_splitmix64_known_values():
    # first output of the reference sequence seeded with 0, then a frozen
    # regression pin for one self-composition
    assert splitmix64(0) == 0xE220A8397B1DCDAF
    assert splitmix64(splitmix64(0)) == 0xA706DD2F4D197E6F


def test_splitmix64_stays_in_64_bits():
    x = 2**64 - 1
    for _ in range(100):
        x = splitmix64(x)
        assert 0 <= x < 2**64


def test_mix64_order_sensitive():
    assert mix64(1, 2) != mix64(2, 1)
    assert mix64(0, 1) != mix64(1, 0)


def test_mix64_distinct_over_grid():
    seen = {mix64(a, b, c) for a in range(8) for b in range(8) for c in range(8)}
    assert len(seen) == 8 * 8 * 8


def test_mix64_handles_negative_inputs():
    assert mix64(-1, 3) == mix64(2**64 - 1, 3)


def test_mix64_fits_in_63_bits():
    for args in [(0,), (1, 2, 3), (2**63, 17), (123456789,)]:
        assert 0 <= mix64(*args) < 2**63


def test_generator_streams_reproducible():
    a = generator_from(42, 0).standard_normal(8)
    b = generator_from(42, 0).standard_normal(8)
    np.testing.assert_array_equal(a, b)


def test_generator_streams_independent():
    a = generator_from(42, 0).standard_normal(8)
    b = generator_from(42, 1).standard_normal(8)
    c = generator_from(43, 0).standard_normal(8)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_generator_uses_philox():
    gen = generator_from(0, 0)
    assert type(gen.bit_generator).__name__ == "Philox"


def test_generator_rejects_negative_stream():
    with pytest.raises(Exception):
        generator_from(1, -1)
