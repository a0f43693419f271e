from __future__ import annotations

import random

import pytest

from meetscore.diarmetrics import (
    DerOptions,
    DerResult,
    der,
    optimal_speaker_mapping,
    speaker_count_errors,
)
from meetscore.errors import ContractError, UndefinedRateError
from meetscore.seglst import SegLst, Segment
from conftest import random_session
from oracles import best_injective_overlap, der_by_frames


def _session(streams, session_id="S1"):
    return SegLst(
        [
            Segment(session_id, spk, start, end, words)
            for spk, segs in streams.items()
            for start, end, words in segs
        ]
    )


class TestOptimalSpeakerMapping:
    def test_recovers_rename(self):
        ref = _session({"A": [(0, 10, "x")], "B": [(10, 20, "y")]})
        hyp = _session({"P": [(0, 10, "x")], "Q": [(10, 20, "y")]})
        assert optimal_speaker_mapping(ref, hyp) == {"A": "P", "B": "Q"}

    def test_non_cooccurring_speaker_unmapped(self):
        ref = _session({"A": [(0, 10, "x")]})
        hyp = _session({"P": [(0, 10, "x")], "Q": [(50, 60, "z")]})
        mapping = optimal_speaker_mapping(ref, hyp)
        assert mapping == {"A": "P"}

    def test_matches_injective_bruteforce(self, rng):
        for _ in range(100):
            ref = random_session(rng, max_speakers=3, max_segments=5)
            hyp = random_session(rng, max_speakers=2, max_segments=5)
            mapping = optimal_speaker_mapping(ref, hyp)
            ref_spk = sorted(set(s.speaker for s in ref))
            hyp_spk = sorted(set(s.speaker for s in hyp))

            def overlap(a, b):
                total = 0.0
                for s1 in ref:
                    if s1.speaker != a:
                        continue
                    for s2 in hyp:
                        if s2.speaker != b:
                            continue
                        total += max(0.0, min(s1.end_time, s2.end_time) - max(s1.start_time, s2.start_time))
                return total

            matrix = [[overlap(a, b) for b in hyp_spk] for a in ref_spk]
            achieved = sum(overlap(a, b) for a, b in mapping.items())
            assert achieved == pytest.approx(best_injective_overlap(matrix), abs=1e-9)


class TestDer:
    def test_perfect_hypothesis(self):
        ref = _session({"A": [(0, 10, "x")], "B": [(12, 20, "y")]})
        result = der(ref, ref, DerOptions(collar=0))
        assert result.der == 0
        assert (result.missed, result.false_alarm, result.confusion) == (0, 0, 0)

    def test_empty_hypothesis_all_missed(self):
        ref = _session({"A": [(0, 10, "x")], "B": [(12, 20, "y")]})
        result = der(ref, SegLst(), DerOptions(collar=0))
        assert result.missed == pytest.approx(result.scored_speech)
        assert result.der == pytest.approx(1.0)
        assert result.false_alarm == 0 and result.confusion == 0

    def test_single_mislabeled_segment(self):
        # 100 s of scored speech, one 10 s chunk attributed to the wrong speaker
        ref = _session({"A": [(0, 50, "x")], "B": [(50, 100, "y")]})
        hyp = _session({"A": [(0, 50, "x")], "B": [(50, 90, "y")], "C": [(90, 100, "z")]})
        result = der(ref, hyp, DerOptions(collar=0))
        assert result.scored_speech == pytest.approx(100.0)
        assert result.confusion == pytest.approx(10.0)
        assert result.der == pytest.approx(0.10)

    def test_zero_scored_speech_rejected(self):
        ref = _session({"A": [(0, 0.1, "x")]})
        with pytest.raises(UndefinedRateError):
            der(ref, ref, DerOptions(collar=5))

    def test_components_sum_to_der(self, rng):
        for _ in range(50):
            ref = random_session(rng, max_speakers=3, max_segments=5)
            hyp = random_session(rng, max_speakers=3, max_segments=5)
            try:
                result = der(ref, hyp, DerOptions(collar=0.25))
            except UndefinedRateError:
                continue
            total = result.missed_rate + result.false_alarm_rate + result.confusion_rate
            assert total == pytest.approx(result.der, rel=1e-9)

    def test_collar_excludes_boundary_regions(self):
        ref = _session({"A": [(0, 10, "x")]})
        hyp = _session({"A": [(0, 9, "x")]})  # 1 s missed at the tail
        no_collar = der(ref, hyp, DerOptions(collar=0))
        assert no_collar.missed == pytest.approx(1.0)
        wide = der(ref, hyp, DerOptions(collar=2.0))
        assert wide.missed == pytest.approx(0.0)

    def test_no_overlap_scoring_excludes_overlap(self):
        ref = _session({"A": [(0, 10, "x")], "B": [(5, 15, "y")]})
        result = der(ref, SegLst(), DerOptions(collar=0, score_overlap=False))
        # only the 0-5 and 10-15 single-speaker regions are scored
        assert result.scored_speech == pytest.approx(10.0)

    def test_matches_frame_oracle(self, rng):
        for _ in range(40):
            ref = random_session(rng, max_speakers=3, max_segments=4, horizon=30.0)
            hyp = random_session(rng, max_speakers=3, max_segments=4, horizon=30.0)
            opts = DerOptions(collar=0.25)
            try:
                result = der(ref, hyp, opts)
            except UndefinedRateError:
                continue
            mapping = optimal_speaker_mapping(ref, hyp)
            ms, fa, sc, scored = der_by_frames(ref, hyp, mapping, opts.collar)
            n_boundaries = 2 * (len(ref) + len(hyp)) + 4 * len(ref)
            tol = n_boundaries * 0.01
            assert abs(result.missed - ms) <= tol
            assert abs(result.false_alarm - fa) <= tol
            assert abs(result.confusion - sc) <= tol
            assert abs(result.scored_speech - scored) <= tol

    def test_invariance_renaming_and_translation(self, rng):
        for _ in range(20):
            ref = random_session(rng, max_speakers=3, max_segments=5)
            hyp = random_session(rng, max_speakers=3, max_segments=5)
            opts = DerOptions(collar=0.25)
            try:
                base = der(ref, hyp, opts)
            except UndefinedRateError:
                continue
            renamed = SegLst(
                [Segment(s.session_id, "zz" + s.speaker, s.start_time, s.end_time, s.words) for s in hyp]
            )
            assert der(ref, renamed, opts) == base
            shift = 17.25
            ref2 = SegLst(
                [Segment(s.session_id, s.speaker, s.start_time + shift, s.end_time + shift, s.words) for s in ref]
            )
            hyp2 = SegLst(
                [Segment(s.session_id, s.speaker, s.start_time + shift, s.end_time + shift, s.words) for s in hyp]
            )
            shifted = der(ref2, hyp2, opts)
            assert shifted.der == pytest.approx(base.der, rel=1e-9)

    def test_scaling_invariance(self):
        ref = _session({"A": [(0, 10, "x")], "B": [(8, 20, "y")]})
        hyp = _session({"A": [(0, 11, "x")], "B": [(9, 18, "y")]})
        base = der(ref, hyp, DerOptions(collar=0.25))
        k = 3.5
        scale = lambda s: SegLst(
            [Segment(x.session_id, x.speaker, x.start_time * k, x.end_time * k, x.words) for x in s]
        )
        scaled = der(scale(ref), scale(hyp), DerOptions(collar=0.25 * k))
        assert scaled.der == pytest.approx(base.der, rel=1e-9)
        assert scaled.missed_rate == pytest.approx(base.missed_rate, rel=1e-9)


class TestSpeakerCountErrors:
    def test_equal_counts(self):
        ref = _session({"A": [(0, 1, "x")], "B": [(1, 2, "y")]})
        hyp = _session({"P": [(0, 1, "x")], "Q": [(1, 2, "y")]})
        result = speaker_count_errors(ref, hyp)
        assert (result.missed_pct, result.false_alarm_pct) == (0.0, 0.0)

    def test_half_missed(self):
        ref = _session({f"S{i}": [(i, i + 1, "x")] for i in range(4)})
        hyp = _session({f"H{i}": [(i, i + 1, "x")] for i in range(2)})
        result = speaker_count_errors(ref, hyp)
        assert result.missed_pct == pytest.approx(50.0)
        assert result.false_alarm_pct == 0.0

    def test_multi_session_aggregation(self):
        ref = SegLst(
            [Segment("S1", "A", 0, 1, "x"), Segment("S1", "B", 1, 2, "x"),
             Segment("S2", "A", 0, 1, "x"), Segment("S2", "B", 1, 2, "x")]
        )
        hyp = SegLst(
            [Segment("S1", "P", 0, 1, "x"), Segment("S1", "Q", 1, 2, "x"),
             Segment("S1", "R", 2, 3, "x"),
             Segment("S2", "P", 0, 1, "x"), Segment("S2", "Q", 1, 2, "x")]
        )
        result = speaker_count_errors(ref, hyp)
        assert result.ref_speakers == 4
        assert result.missed_pct == 0.0
        assert result.false_alarm_pct == pytest.approx(25.0)

    def test_unknown_hyp_session_rejected(self):
        ref = _session({"A": [(0, 1, "x")]})
        hyp = _session({"A": [(0, 1, "x")]}, session_id="OTHER")
        with pytest.raises(ContractError, match="OTHER"):
            speaker_count_errors(ref, hyp)

    def test_missing_session_in_hyp_counts_all_missed(self):
        ref = SegLst([Segment("S1", "A", 0, 1, "x"), Segment("S2", "B", 0, 1, "x")])
        hyp = SegLst([Segment("S1", "A", 0, 1, "x")])
        result = speaker_count_errors(ref, hyp)
        assert result.missed_speakers == 1


def test_der_result_addition():
    a = DerResult(1.0, 2.0, 3.0, 10.0)
    b = DerResult(0.5, 0.5, 0.5, 10.0)
    assert (a + b).scored_speech == 20.0
    assert (a + b).der == pytest.approx(7.5 / 20.0)
