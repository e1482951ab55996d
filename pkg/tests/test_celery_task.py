import json

from apps.harness.chunks import simulate_range
from apps.harness.tasks import simulate_chunk


def test_simulate_chunk_direct(perturbed_model):
    tally = simulate_chunk(perturbed_model.to_dict(), "ensemble", 1.0, 7, 0, 40)
    assert tally == simulate_range(perturbed_model, "ensemble", 1.0, 7, 0, 40).to_dict()
    json.dumps(tally)


def test_simulate_chunk_eager(perturbed_model):
    # dev settings run tasks in-process
    result = simulate_chunk.delay(perturbed_model.to_dict(), "gate", 1.0, 7, 10, 30, "message")
    tally = result.get()
    assert tally["frames"] == 20
    assert tally == simulate_range(perturbed_model, "gate", 1.0, 7, 10, 30, "message").to_dict()
