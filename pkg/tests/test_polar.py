import numpy as np
import pytest

from apps.core.exceptions import InvalidArgumentError
from apps.polar.code import bhattacharyya, construct, expand, extract, polar_encode


def kronecker_generator(block_len: int) -> np.ndarray:
    kernel = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    g = np.ones((1, 1), dtype=np.uint8)
    while g.shape[0] < block_len:
        g = np.kron(g, kernel)
    return g


class TestConstruct:
    def test_four_two_bhattacharyya_values(self):
        np.testing.assert_allclose(bhattacharyya(4, 0.5), [0.9375, 0.5625, 0.4375, 0.0625])
        code = construct(4, 2)
        assert code.frozen_positions == [0, 1]
        assert code.reliable_positions == (2, 3)

    def test_eight_four_frozen_set(self):
        code = construct(8, 4)
        assert code.frozen_positions == [0, 1, 2, 4]
        assert code.reliable_positions == (3, 5, 6, 7)
        assert code.n_stages == 3
        assert code.rate == 0.5
        assert code.label == "(8,4)"

    def test_full_rate_has_no_frozen_positions(self):
        assert construct(16, 16).frozen_positions == []

    @pytest.mark.parametrize("block_len", [64, 128, 256])
    def test_frozen_count(self, block_len):
        code = construct(block_len, block_len // 2)
        assert len(code.frozen_positions) == block_len // 2
        assert len(code.reliable_positions) == block_len // 2
        assert not code.frozen_mask[list(code.reliable_positions)].any()

    def test_design_param_is_recorded(self):
        code = construct(8, 4, design_param=0.3)
        assert code.design_param == 0.3

    @pytest.mark.parametrize(
        "args", [(6, 3), (1, 1), (8, 0), (8, 9), (8, 4, 0.0), (8, 4, 1.0)]
    )
    def test_invalid_arguments(self, args):
        with pytest.raises(InvalidArgumentError):
            construct(*args)

    def test_frozen_mask_is_read_only(self):
        code = construct(8, 4)
        with pytest.raises(ValueError):
            code.frozen_mask[0] = False

    def test_equality_ignores_mask_identity(self):
        assert construct(64, 32) == construct(64, 32)
        assert construct(64, 32) != construct(64, 33)


class TestExpandExtract:
    def test_scatter_example(self):
        code = construct(8, 4)
        assert expand([1, 1, 0, 1], code).tolist() == [0, 0, 0, 1, 0, 1, 0, 1]

    def test_zero_word(self):
        code = construct(8, 4)
        assert not expand(np.zeros(4, dtype=np.uint8), code).any()

    def test_gather_example(self):
        code = construct(8, 4)
        assert extract([0, 0, 0, 1, 0, 0, 1, 1], code).tolist() == [1, 0, 1, 1]

    def test_round_trip_on_batches(self, link64, rng):
        code, _ = link64
        u = rng.integers(0, 2, (50, code.info_len), dtype=np.uint8)
        padded = expand(u, code)
        assert not padded[:, code.frozen_mask].any()
        np.testing.assert_array_equal(extract(padded, code), u)

    def test_length_mismatch(self):
        code = construct(8, 4)
        with pytest.raises(InvalidArgumentError):
            expand([1, 0, 1], code)
        with pytest.raises(InvalidArgumentError):
            extract([0] * 7, code)


class TestEncode:
    def test_zero_word_encodes_to_zero(self):
        code = construct(8, 4)
        assert not polar_encode(np.zeros(8, dtype=np.uint8), code).any()

    @pytest.mark.parametrize("block_len", [2, 4, 8, 64])
    def test_matches_kronecker_power(self, block_len, rng):
        code = construct(block_len, block_len // 2)
        words = rng.integers(0, 2, (40, block_len), dtype=np.uint8)
        expected = (words.astype(np.int64) @ kronecker_generator(block_len)) % 2
        np.testing.assert_array_equal(polar_encode(words, code), expected)

    def test_transform_is_an_involution(self, link64, rng):
        code, _ = link64
        word = rng.integers(0, 2, code.block_len, dtype=np.uint8)
        np.testing.assert_array_equal(polar_encode(polar_encode(word, code), code), word)

    def test_linearity(self, link64, rng):
        code, _ = link64
        a, b = rng.integers(0, 2, (2, code.block_len), dtype=np.uint8)
        np.testing.assert_array_equal(
            polar_encode(a ^ b, code), polar_encode(a, code) ^ polar_encode(b, code)
        )

    def test_length_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            polar_encode(np.zeros(7, dtype=np.uint8), construct(8, 4))
