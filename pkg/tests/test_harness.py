import json
import logging

import numpy as np
import pytest

from apps.channel.link import build_link
from apps.core.exceptions import InvalidArgumentError, ResultsIOError
from apps.crc.partition import PartitionStrategy
from apps.ensemble.model import EnsembleModel
from apps.harness.analysis import crc_histogram, diversity_report, flops_curve, histogram_balance, partition_stats
from apps.harness.chunks import ChunkTally, DecoderKind, simulate_range
from apps.harness.results import (
    FLOPS_COLUMNS,
    RESULT_COLUMNS,
    format_results,
    read_results,
    sidecar_path,
    write_flops,
    write_results,
)
from apps.harness.simulation import StopRule, _shards, run_fer, run_paired
from apps.harness.statistics import (
    non_increasing_beyond_noise,
    paired_improvement_pvalue,
    rule_of_three,
    wilson_interval,
)
from apps.training.trainer import train_ensemble
from apps.training.types import TrainConfig


class TestStatistics:
    def test_wilson_known_value(self):
        low, high = wilson_interval(5, 100)
        assert low == pytest.approx(0.02154, abs=1e-4)
        assert high == pytest.approx(0.11175, abs=1e-4)

    def test_wilson_edges(self):
        assert wilson_interval(0, 50)[0] == 0.0
        assert wilson_interval(50, 50)[1] == 1.0
        low, high = wilson_interval(50, 100)
        assert 0.5 - low == pytest.approx(high - 0.5)
        with pytest.raises(InvalidArgumentError):
            wilson_interval(3, 0)
        with pytest.raises(InvalidArgumentError):
            wilson_interval(5, 4)

    def test_rule_of_three(self):
        assert rule_of_three(300) == pytest.approx(0.01)
        assert rule_of_three(2) == 1.0

    def test_paired_pvalue(self):
        assert paired_improvement_pvalue(0, 0) == 1.0
        assert paired_improvement_pvalue(20, 2) < 0.01
        assert paired_improvement_pvalue(2, 20) > 0.5

    def test_monotone_within_noise(self):
        assert non_increasing_beyond_noise([(500, 1000), (100, 1000), (10, 1000)])
        assert non_increasing_beyond_noise([(100, 1000), (104, 1000)])
        assert not non_increasing_beyond_noise([(10, 1000), (500, 1000)])


class TestChunks:
    def test_shards_cover_the_range(self):
        assert _shards(0, 10, 3) == [(0, 3), (3, 7), (7, 10)]
        assert _shards(100, 102, 4) == [(100, 101), (101, 102)]
        assert _shards(0, 10, 1) == [(0, 10)]

    def test_tallies_add_up(self, unit_model):
        whole = simulate_range(unit_model, DecoderKind.ENSEMBLE, 1.0, 4, 0, 120)
        parts = simulate_range(unit_model, "ensemble", 1.0, 4, 0, 50) + simulate_range(
            unit_model, "ensemble", 1.0, 4, 50, 120
        )
        assert whole == parts
        assert whole.frames == 120
        assert ChunkTally.from_dict(whole.to_dict()) == whole

    def test_empty_range(self, unit_model):
        assert simulate_range(unit_model, "gate", 1.0, 4, 10, 10) == ChunkTally()

    def test_gate_counts(self, unit_model):
        tally = simulate_range(unit_model, DecoderKind.GATE, 0.5, 2, 0, 200)
        assert tally.gate_failures > 0
        assert tally.gate_frame_errors >= tally.gate_failures
        assert tally.gate_frame_errors == tally.gate_failures + tally.gate_undetected
        assert tally.frame_errors("gate") == tally.gate_frame_errors
        assert tally.gate_bit_errors >= tally.gate_frame_errors


def fast_stop(min_errors=20, max_frames=600):
    return StopRule(min_frame_errors=min_errors, max_frames=max_frames)


class TestRunFer:
    def test_counts_do_not_depend_on_worker_count(self, perturbed_model):
        runs = [
            run_fer(perturbed_model, [0.5, 1.5], fast_stop(), seed=3, workers=workers, batch_frames=150)
            for workers in (1, 3, 4)
        ]
        texts = {format_results(result) for result in runs}
        assert len(texts) == 1

    def test_settings_supply_workers_and_batch(self, perturbed_model, settings):
        settings.POLAR_WORKERS = 2
        settings.POLAR_BATCH_FRAMES = 150
        implicit = run_fer(perturbed_model, [1.0], fast_stop(), seed=3)
        explicit = run_fer(perturbed_model, [1.0], fast_stop(), seed=3, workers=1, batch_frames=150)
        assert format_results(implicit) == format_results(explicit)
        assert implicit.config["batch_frames"] == 150

    def test_stop_rule_is_checked_between_batches(self, unit_model):
        result = run_fer(unit_model, [0.0], StopRule(30, 100_000), seed=1, workers=2, batch_frames=100)
        point = result.points[0]
        assert point.frame_errors >= 30
        assert point.frames % 100 == 0
        assert point.frames < 100_000
        assert not point.censored

    def test_clean_channel_is_censored(self, unit_model, tmp_path, caplog):
        with caplog.at_level(logging.WARNING, logger="apps.harness.simulation"):
            result = run_fer(unit_model, [20.0], fast_stop(5, 400), seed=1, workers=2, batch_frames=150)
        point = result.points[0]
        assert (point.frames, point.frame_errors, point.censored) == (400, 0, True)
        assert any("censored" in r.getMessage() for r in caplog.records if r.levelno == logging.WARNING)
        write_results(result, tmp_path / "clean.csv")
        side = json.loads(sidecar_path(tmp_path / "clean.csv").read_text())
        assert side["points"][0]["fer_upper_bound"] == pytest.approx(3 / 400)
        assert side["points"][0]["zero_error_censored"] is True

    def test_short_of_target_is_censored_with_errors(self, unit_model, tmp_path):
        result = run_fer(unit_model, [0.0], fast_stop(10_000, 200), seed=1, workers=1, batch_frames=200)
        point = result.points[0]
        assert point.censored and point.frame_errors > 0
        write_results(result, tmp_path / "short.csv")
        side = json.loads(sidecar_path(tmp_path / "short.csv").read_text())
        assert side["points"][0]["zero_error_censored"] is False
        assert "fer_upper_bound" not in side["points"][0]

    def test_lone_wbp_with_unit_weights_matches_the_gate(self, unit_model):
        wbp = run_fer(unit_model, [1.0], fast_stop(), seed=6, kind="wbp", batch_frames=200, workers=2)
        gate = run_fer(unit_model, [1.0], fast_stop(), seed=6, kind="gate", batch_frames=200, workers=1)
        assert wbp.decoder == "wbp"
        assert (wbp.points[0].frames, wbp.points[0].frame_errors) == (gate.points[0].frames, gate.points[0].frame_errors)
        assert wbp.points[0].avg_flops == pytest.approx(120.0)
        assert wbp.config["alpha"] == 1

    def test_lone_wbp_ignores_the_gate(self, perturbed_model):
        tally = simulate_range(perturbed_model, DecoderKind.WBP, 1.0, 4, 0, 300)
        ensemble = simulate_range(perturbed_model, DecoderKind.ENSEMBLE, 1.0, 4, 0, 300)
        assert tally.gate_frame_errors == ensemble.gate_frame_errors
        assert tally.gate_failures == ensemble.gate_failures
        assert tally.ensemble_frame_errors + tally.gate_only_errors - tally.ensemble_only_errors == tally.gate_frame_errors

    def test_lone_wbp_needs_weights(self, link64):
        code, crc = link64
        with pytest.raises(InvalidArgumentError):
            run_fer(EnsembleModel.gate_only(code, crc, 5), [1.0], fast_stop(), kind="wbp", workers=1)

    def test_gate_only_model_matches_gate_kind(self, unit_model):
        bare = EnsembleModel.gate_only(unit_model.code, unit_model.crc, unit_model.iterations)
        as_ensemble = run_fer(bare, [1.0], fast_stop(), seed=6, batch_frames=200, workers=1)
        as_gate = run_fer(unit_model, [1.0], fast_stop(), seed=6, kind="gate", batch_frames=200, workers=1)
        assert format_results(as_ensemble) == format_results(as_gate)

    def test_point_fields(self, perturbed_model):
        point = run_fer(perturbed_model, [1.0], fast_stop(), seed=2, batch_frames=200, workers=1).points[0]
        assert point.bits_per_frame == perturbed_model.crc.message_len
        assert 0.0 <= point.ber <= point.fer <= 1.0
        assert 120.0 <= point.avg_flops <= 240.0
        assert point.avg_flops == pytest.approx(120.0 * (1 + point.gate_fail_prob))

    def test_fingerprint_tracks_configuration(self, perturbed_model):
        a = run_fer(perturbed_model, [9.0], fast_stop(1, 50), seed=2, batch_frames=50, workers=1)
        b = run_fer(perturbed_model, [9.0], fast_stop(1, 50), seed=9, batch_frames=50, workers=1)
        c = run_fer(perturbed_model, [9.0], fast_stop(1, 60), seed=2, batch_frames=50, workers=1)
        assert a.fingerprint == b.fingerprint
        assert a.fingerprint != c.fingerprint
        assert len(a.fingerprint) == 16

    def test_input_validation(self, unit_model):
        with pytest.raises(InvalidArgumentError):
            run_fer(unit_model, [])
        with pytest.raises(InvalidArgumentError):
            StopRule(0, 10)
        with pytest.raises(InvalidArgumentError):
            run_fer(unit_model, [1.0], fast_stop(), batch_frames=100, workers=-1)


class TestRunPaired:
    def test_shared_frames(self, perturbed_model):
        paired = run_paired(perturbed_model, [0.5], fast_stop(), seed=4, batch_frames=200, workers=2)
        gate, ensemble = paired.gate.points[0], paired.ensemble.points[0]
        comparison = paired.comparisons[0]
        assert gate.frames == ensemble.frames == comparison.frames
        assert min(gate.frame_errors, ensemble.frame_errors) >= 20 or gate.frames == 600
        assert comparison.ensemble_only_errors == 0
        assert ensemble.frame_errors <= gate.frame_errors
        assert comparison.within_allowance
        assert 0.0 <= comparison.p_value <= 1.0
        assert paired.gate.decoder == "gate" and paired.ensemble.decoder == "ensemble"


class TestResultFiles:
    def test_header_and_round_trip(self, perturbed_model, tmp_path):
        result = run_fer(perturbed_model, [0.5, 1.0], fast_stop(), seed=5, batch_frames=200, workers=1)
        path = write_results(result, tmp_path / "out" / "fer.csv")
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(RESULT_COLUMNS)
        assert lines[0] == "snr_db,frames,frame_errors,bit_errors,fer,ber,gate_fail_prob,avg_flops,censored"
        assert len(lines) == 3
        loaded = read_results(path)
        assert loaded.points == result.points
        assert loaded.config == result.config
        assert (loaded.decoder, loaded.seed) == ("ensemble", 5)
        assert format_results(loaded) == path.read_text()

    def test_same_seed_same_bytes(self, perturbed_model, tmp_path):
        for name in ("a.csv", "b.csv"):
            result = run_fer(perturbed_model, [1.0], fast_stop(), seed=8, batch_frames=200, workers=2)
            write_results(result, tmp_path / name)
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("snr,frames\n1.0,10\n")
        with pytest.raises(ResultsIOError):
            read_results(path)

    def test_missing_sidecar(self, perturbed_model, tmp_path):
        result = run_fer(perturbed_model, [9.0], fast_stop(1, 50), seed=2, batch_frames=50, workers=1)
        path = write_results(result, tmp_path / "fer.csv")
        sidecar_path(path).unlink()
        with pytest.raises(ResultsIOError):
            read_results(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ResultsIOError):
            read_results(tmp_path / "nothing.csv")


class TestAnalysis:
    def test_flops_curve(self, unit_model, tmp_path):
        rows = flops_curve(unit_model, [0.5, 6.0], fast_stop(20, 400), seed=1, workers=1)
        assert [row.snr_db for row in rows] == [0.5, 6.0]
        for row in rows:
            assert (row.lower, row.upper) == (120.0, 240.0)
            assert row.lower <= row.avg_flops <= row.upper
            assert row.prob_low <= row.gate_fail_prob <= row.prob_high
            assert row.equivalent_wbp_iterations == pytest.approx(5 * (1 + row.gate_fail_prob))
            assert row.ensemble_weights == 600
        assert rows[0].gate_fail_prob > rows[1].gate_fail_prob
        path = write_flops(rows, tmp_path / "flops.csv")
        assert path.read_text().splitlines()[0] == ",".join(FLOPS_COLUMNS)

    def test_crc_histogram(self, link64):
        code, crc = link64
        counts = crc_histogram(code, crc, PartitionStrategy("msb", 4), 1.0, 500, seed=2)
        assert counts.shape == (4,)
        assert 0 < counts.sum() <= 500
        quiet = crc_histogram(code, crc, PartitionStrategy("uniform", 4), 15.0, 200, seed=2)
        assert not quiet.any()

    def test_histogram_balance(self):
        even = histogram_balance([100, 100, 100, 100])
        assert even == {"mean": 100.0, "max_deviation": 0.0, "max_min_ratio": 1.0}
        skewed = histogram_balance([50, 150])
        assert skewed["max_deviation"] == pytest.approx(0.5)
        assert skewed["max_min_ratio"] == pytest.approx(3.0)
        assert histogram_balance([0, 4])["max_min_ratio"] == float("inf")

    def test_partition_stats(self, link64):
        code, crc = link64
        stats = partition_stats(code, crc, PartitionStrategy("bits-sum-mod", 3), 1.0, 300, seed=1)
        assert stats["generated"] == 300
        assert sum(stats["bucket_sizes"]) + stats["discarded"] == 300

    def test_diversity_with_identical_members(self, unit_model):
        report = diversity_report(unit_model, 400, seed=3, snr_db=0.5)
        assert report.alpha == 4
        assert report.region_totals.sum() > 0
        assert not report.counts.any()
        assert not report.designated_fail.any()

    def test_diversity_invariants(self, perturbed_model):
        report = diversity_report(perturbed_model, 800, seed=3, snr_db=0.5)
        assert (report.counts <= report.region_totals[:, None]).all()
        assert (report.designated_fail <= report.counts).all()
        assert not np.diag(report.designated_fail).any()

    def test_diversity_needs_members(self, link64):
        code, crc = link64
        with pytest.raises(InvalidArgumentError):
            diversity_report(EnsembleModel.gate_only(code, crc, 5), 100)


@pytest.mark.slow
def test_gate_fer_falls_with_snr(link64):
    code, crc = link64
    model = EnsembleModel.gate_only(code, crc, 5)
    result = run_fer(model, [1.0, 2.0, 3.0, 4.0], StopRule(200, 200_000), seed=1)
    assert non_increasing_beyond_noise([(p.frame_errors, p.frames) for p in result.points])


@pytest.mark.slow
def test_uniform_partition_is_balanced(link64):
    code, crc = link64
    counts = crc_histogram(code, crc, PartitionStrategy("uniform", 4), 3.0, 100_000, seed=1)
    assert histogram_balance(counts)["max_deviation"] <= 0.1


@pytest.mark.slow
def test_bits_sum_regions_are_skewed_and_mod_regions_balanced(link64):
    code, crc = link64
    skewed = crc_histogram(code, crc, PartitionStrategy("bits-sum", 4), 3.0, 100_000, seed=1)
    balanced = crc_histogram(code, crc, PartitionStrategy("bits-sum-mod", 4), 3.0, 100_000, seed=1)
    assert histogram_balance(skewed)["max_min_ratio"] > 2
    assert histogram_balance(balanced)["max_deviation"] <= 0.1


@pytest.mark.slow
def test_latency_approaches_single_decoder_at_high_snr(unit_model):
    rows = flops_curve(unit_model, [1.0, 2.0, 3.0, 4.0, 5.0, 6.0], StopRule(100, 100_000), seed=3)
    assert all(row.lower <= row.avg_flops <= row.upper for row in rows)
    assert non_increasing_beyond_noise([(row.gate_failures, row.frames) for row in rows])
    assert rows[-1].avg_flops <= 1.05 * rows[-1].lower


@pytest.fixture(scope="module")
def reduced_scale_pair():
    """alpha=2 MSB ensemble trained on 10^4 frames per SNR for 20 epochs."""
    code, crc = build_link(64, 32)
    config = TrainConfig(alpha=2, frames_per_snr=10_000, epochs=20, batches_per_epoch=20, seed=2)
    return train_ensemble(config, code, crc, PartitionStrategy("msb", 2))


@pytest.mark.slow
def test_trained_ensemble_never_hurts(reduced_scale_pair):
    result = run_paired(reduced_scale_pair, [3.0], StopRule(100_000, 100_000), seed=8)
    comparison = result.comparisons[0]
    assert comparison.frames == 100_000
    assert comparison.ensemble_frame_errors <= comparison.gate_frame_errors + 5


@pytest.mark.slow
def test_trained_ensemble_beats_the_gate(reduced_scale_pair):
    result = run_paired(reduced_scale_pair, [2.0, 3.0, 4.0], StopRule(100_000, 100_000), seed=12)
    wins = [
        c.snr_db
        for c in result.comparisons
        if c.ensemble_frame_errors < c.gate_frame_errors and c.p_value < 0.10
    ]
    assert len(wins) >= 2, [(c.snr_db, c.gate_frame_errors, c.ensemble_frame_errors, c.p_value) for c in result.comparisons]


@pytest.mark.slow
def test_trained_members_rescue_each_others_regions(link64):
    code, crc = link64
    config = TrainConfig(alpha=4, frames_per_snr=10_000, epochs=10, batches_per_epoch=20, seed=3)
    model = train_ensemble(config, code, crc, PartitionStrategy("msb", 4))
    report = diversity_report(model, 20_000, seed=5, snr_db=3.0)
    assert not np.diag(report.designated_fail).any()
    assert report.designated_fail.sum() > 0
