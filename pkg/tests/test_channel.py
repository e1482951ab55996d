import math

import numpy as np
import pytest

from apps.channel.awgn import ChannelConfig, Stream, frame_rng, llr, modulate, sigma_from_ebn0, transmit
from apps.channel.link import RateMode, link_rate, transmit_frames
from apps.core.exceptions import InvalidArgumentError
from apps.crc.codec import crc_valid
from apps.polar.code import extract, polar_encode


def test_modulate():
    assert modulate(np.zeros(4, dtype=np.uint8)).tolist() == [1.0] * 4
    assert modulate([0, 1]).tolist() == [1.0, -1.0]
    with pytest.raises(InvalidArgumentError):
        modulate([0, 2])


class TestSigma:
    def test_zero_db_half_rate(self):
        assert sigma_from_ebn0(0.0, 0.5) == pytest.approx(1.0)

    def test_three_db_half_rate(self):
        assert sigma_from_ebn0(10 * math.log10(2), 0.5) ** 2 == pytest.approx(0.5)

    @pytest.mark.parametrize("rate", [0.0, -0.5, 1.5])
    def test_rate_out_of_range(self, rate):
        with pytest.raises(InvalidArgumentError):
            sigma_from_ebn0(1.0, rate)

    def test_channel_config(self):
        assert ChannelConfig(ebn0_db=0.0, rate=0.5).sigma == pytest.approx(1.0)
        with pytest.raises(InvalidArgumentError):
            ChannelConfig(ebn0_db=0.0, rate=0.5, seed=-1)


class TestLlr:
    def test_examples(self):
        assert llr(1.0, 1.0) == pytest.approx(2.0)
        assert llr(0.0, 0.7) == 0.0
        assert llr(-0.5, math.sqrt(0.5)) == pytest.approx(-2.0)

    def test_zero_sigma_rejected(self):
        with pytest.raises(InvalidArgumentError):
            llr([1.0], 0.0)


class TestTransmit:
    def test_noise_moments(self):
        config = ChannelConfig(ebn0_db=1.0, rate=0.5)
        x = np.ones(1_000_000)
        noise = transmit(x, config, np.random.default_rng(3)) - x
        assert abs(noise.mean()) < 5e-3 * config.sigma
        assert noise.var() == pytest.approx(config.sigma**2, rel=0.01)

    def test_vanishing_noise_keeps_signal(self):
        config = ChannelConfig(ebn0_db=200.0, rate=0.5)
        x = modulate([0, 1, 1, 0])
        np.testing.assert_allclose(transmit(x, config, np.random.default_rng(0)), x, atol=1e-6)


class TestFrameRng:
    def test_same_inputs_same_draws(self):
        a = frame_rng(42, 17, Stream.EVAL, 3.0).standard_normal(8)
        b = frame_rng(42, 17, Stream.EVAL, 3.0).standard_normal(8)
        np.testing.assert_array_equal(a, b)

    @pytest.mark.parametrize(
        "other", [(43, 17, Stream.EVAL, 3.0), (42, 18, Stream.EVAL, 3.0), (42, 17, Stream.TRAIN, 3.0), (42, 17, Stream.EVAL, 3.5)]
    )
    def test_any_key_change_changes_draws(self, other):
        a = frame_rng(42, 17, Stream.EVAL, 3.0).standard_normal(8)
        b = frame_rng(*other).standard_normal(8)
        assert not np.array_equal(a, b)


class TestTransmitFrames:
    def test_split_ranges_match_one_range(self, link64):
        code, crc = link64
        whole = transmit_frames(code, crc, 2.0, 9, Stream.EVAL, 0, 30)
        left = transmit_frames(code, crc, 2.0, 9, Stream.EVAL, 0, 11)
        right = transmit_frames(code, crc, 2.0, 9, Stream.EVAL, 11, 30)
        np.testing.assert_array_equal(whole.llrs, np.concatenate([left.llrs, right.llrs]))
        np.testing.assert_array_equal(whole.messages, np.concatenate([left.messages, right.messages]))
        assert len(whole) == 30
        assert right.first_index == 11

    def test_padded_words_carry_valid_crc(self, link64):
        code, crc = link64
        batch = transmit_frames(code, crc, 2.0, 9, Stream.EVAL, 0, 20)
        assert batch.messages.any()
        assert crc_valid(extract(batch.padded, code), crc).all()
        assert not batch.padded[:, code.frozen_mask].any()

    def test_zero_codeword_mode(self, link64):
        code, crc = link64
        batch = transmit_frames(code, crc, 2.0, 9, Stream.TRAIN, 0, 10, zero_codeword=True)
        assert not batch.messages.any()
        assert not batch.padded.any()

    def test_llr_signs_follow_bits_at_high_snr(self, link64):
        code, crc = link64
        batch = transmit_frames(code, crc, 40.0, 1, Stream.EVAL, 0, 5)
        codewords = polar_encode(batch.padded, code)
        np.testing.assert_array_equal((batch.llrs < 0).astype(np.uint8), codewords)

    def test_empty_range(self, link64):
        code, crc = link64
        assert len(transmit_frames(code, crc, 2.0, 9, Stream.EVAL, 5, 5)) == 0

    def test_rate_modes(self, link64):
        code, crc = link64
        assert link_rate(code, crc) == 0.5
        assert link_rate(code, crc, RateMode.MESSAGE) == pytest.approx(21 / 64)
        assert link_rate(code, crc, "message") == link_rate(code, crc, RateMode.MESSAGE)
