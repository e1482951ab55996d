import numpy as np
import pytest
from django.core.cache import cache

from apps.bp.decoder import WbpWeights
from apps.channel.link import build_link
from apps.crc.partition import PartitionStrategy
from apps.ensemble.model import EnsembleModel


@pytest.fixture(autouse=True)
def clear_cache_between_tests():
    """Ensure throttle counters (stored in cache) don't leak between tests."""
    cache.clear()
    yield
    cache.clear()


@pytest.fixture
def link64():
    """(64,32) polar code carrying a 21-bit message plus CRC-11."""
    return build_link(64, 32)


@pytest.fixture
def link128():
    return build_link(128, 64)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def unit_model(link64):
    """alpha=4 MSB ensemble whose members are all plain BP."""
    code, crc = link64
    return EnsembleModel(
        code=code,
        crc=crc,
        iterations=5,
        strategy=PartitionStrategy("msb", 4),
        members=[WbpWeights.ones(5, code.n_stages) for _ in range(4)],
    )


@pytest.fixture
def perturbed_model(link64):
    """alpha=2 ensemble with distinct, mildly perturbed members."""
    code, crc = link64
    gen = np.random.default_rng(7)
    members = [WbpWeights(1.0 + 0.1 * gen.standard_normal((5, code.n_stages, 4))) for _ in range(2)]
    return EnsembleModel(
        code=code, crc=crc, iterations=5, strategy=PartitionStrategy("msb", 2), members=members
    )
