"""Entropy coder: lossless round trips, compression of trivial streams."""

import numpy as np
import pytest

from srgc.entropy import entropy_decode, entropy_encode
from srgc.errors import DecodeDesyncError


class TestRoundtrip:
    def test_empty(self):
        payload = entropy_encode([], "gft")
        assert len(payload) >= 1
        assert entropy_decode(payload, 0, "gft").size == 0

    def test_small_known(self):
        syms = [0, 1, -1, 2, -2, 255, -255, 12345, -12345]
        payload = entropy_encode(syms, "gft")
        assert entropy_decode(payload, len(syms), "gft").tolist() == syms

    def test_random_block(self):
        rng = np.random.default_rng(21)
        syms = rng.integers(-255, 255, size=100_000, endpoint=True)
        payload = entropy_encode(syms, "gft")
        back = entropy_decode(payload, syms.size, "gft")
        assert np.array_equal(back, syms)

    def test_each_category(self):
        rng = np.random.default_rng(22)
        syms = rng.integers(-40, 40, size=500)
        for cat in ("labels", "disparities", "structure", "gft", "residual", "group"):
            back = entropy_decode(entropy_encode(syms, cat), syms.size, cat)
            assert np.array_equal(back, syms)

    def test_unknown_category(self):
        with pytest.raises(ValueError):
            entropy_encode([1], "bogus")

    def test_skewed_stream(self):
        rng = np.random.default_rng(23)
        syms = np.where(rng.random(20_000) < 0.95, 0, rng.integers(-5, 5, size=20_000))
        payload = entropy_encode(syms, "residual")
        assert np.array_equal(entropy_decode(payload, syms.size, "residual"), syms)
        assert len(payload) < 20_000  # adaptive model beats 1 byte/symbol


class TestCompression:
    def test_all_zero_run_compresses(self):
        syms = np.zeros(10_000, dtype=np.int64)
        payload = entropy_encode(syms, "residual")
        assert len(payload) < 200
        assert len(payload) < 0.02 * 4 * syms.size  # < 2% of raw int32 size


class TestDesync:
    def test_all_ones_payload_raises_with_offset(self):
        # a saturated bit pattern decodes into an impossible magnitude prefix
        garbage = bytes([0xFF]) * 512
        with pytest.raises(DecodeDesyncError) as err:
            entropy_decode(garbage, 64, "gft")
        assert err.value.bit_offset >= 0
