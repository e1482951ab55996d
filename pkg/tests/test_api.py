import numpy as np
import pytest
from django.urls import reverse

from apps.channel.awgn import Stream
from apps.channel.link import transmit_frames


@pytest.fixture
def model_file(unit_model, tmp_path, settings):
    path = unit_model.save(tmp_path / "model.json")
    settings.ENSEMBLE_MODEL_PATH = str(path)
    return path


def post_llr(client, llr):
    return client.post(reverse("ensemble-decode"), {"llr": list(llr)}, content_type="application/json")


class TestDecodeEndpoint:
    def test_unconfigured(self, client, settings):
        settings.ENSEMBLE_MODEL_PATH = ""
        response = post_llr(client, np.ones(64))
        assert response.status_code == 503

    def test_broken_model_file(self, client, settings, tmp_path):
        broken = tmp_path / "broken.json"
        broken.write_text("[]")
        settings.ENSEMBLE_MODEL_PATH = str(broken)
        assert post_llr(client, np.ones(64)).status_code == 503

    def test_clean_frame(self, client, model_file, unit_model):
        batch = transmit_frames(unit_model.code, unit_model.crc, 12.0, 5, Stream.EVAL, 0, 1)
        response = post_llr(client, batch.llrs[0])
        assert response.status_code == 200
        body = response.json()
        assert body["padded_word"] == batch.padded[0].tolist()
        assert body["message"] == batch.messages[0].tolist()
        assert body["crc_ok"] is True
        assert body["path"] == "gate_success"
        assert body["member"] == 0
        assert body["members_invoked"] == 0

    def test_noisy_frame_reports_a_path(self, client, model_file, unit_model):
        batch = transmit_frames(unit_model.code, unit_model.crc, 0.0, 5, Stream.EVAL, 0, 40)
        bodies = [post_llr(client, row).json() for row in batch.llrs]
        assert {body["path"] for body in bodies} <= {"gate_success", "member_validated", "fallback"}
        assert any(body["path"] == "fallback" and body["members_invoked"] == 4 for body in bodies)

    @pytest.mark.parametrize("payload", [{"llr": [1.0] * 63}, {"llr": []}, {}, {"llr": ["x"] * 64}])
    def test_bad_requests(self, client, model_file, payload):
        response = client.post(reverse("ensemble-decode"), payload, content_type="application/json")
        assert response.status_code == 400


class TestLatencyEndpoint:
    def test_explicit_parameters(self, client, settings):
        settings.ENSEMBLE_MODEL_PATH = ""
        response = client.get(reverse("ensemble-latency"), {"gate_fail_prob": 0.3, "block_len": 128, "iterations": 5})
        assert response.status_code == 200
        body = response.json()
        assert body["latency"] == pytest.approx(182.0)
        assert body["single_decoder_latency"] == pytest.approx(140.0)

    def test_defaults_without_model(self, client, settings):
        settings.ENSEMBLE_MODEL_PATH = ""
        body = client.get(reverse("ensemble-latency"), {"gate_fail_prob": 0}).json()
        assert (body["block_len"], body["iterations"], body["latency"]) == (128, 5, 140.0)
        assert body["ensemble_weights"] is None

    def test_defaults_from_model(self, client, model_file):
        body = client.get(reverse("ensemble-latency"), {"gate_fail_prob": 1}).json()
        assert (body["block_len"], body["iterations"], body["latency"]) == (64, 5, 240.0)
        assert (body["alpha"], body["ensemble_weights"]) == (4, 600)

    def test_weight_count_for_alpha(self, client, settings):
        settings.ENSEMBLE_MODEL_PATH = ""
        body = client.get(reverse("ensemble-latency"), {"gate_fail_prob": 0.3, "alpha": 4}).json()
        assert body["ensemble_weights"] == 700

    @pytest.mark.parametrize("query", [{}, {"gate_fail_prob": 1.5}, {"gate_fail_prob": 0.1, "block_len": 100}])
    def test_bad_queries(self, client, settings, query):
        settings.ENSEMBLE_MODEL_PATH = ""
        assert client.get(reverse("ensemble-latency"), query).status_code == 400
