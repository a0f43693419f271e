"""Diarization error rate and speaker-counting diagnostics.

DER is decomposed into missed speech, false-alarm speech and speaker
confusion over scored reference speech time, computed with an exact
boundary sweep (rational arithmetic on event boundaries). A no-score
collar around every reference segment boundary and overlap scoring are
configurable; defaults are a 0.25 s collar with overlap scored.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ContractError, UndefinedRateError
from .seglst import SegLst, split_by_session

DEFAULT_DER_COLLAR = 0.25


@dataclass(frozen=True)
class DerOptions:
    collar: float = DEFAULT_DER_COLLAR
    score_overlap: bool = True

    def __post_init__(self):
        if self.collar < 0:
            raise ContractError(f"DER collar must be non-negative, got {self.collar}")


@dataclass(frozen=True)
class DerResult:
    """Missed/false-alarm/confusion durations in seconds plus the denominator."""

    missed: float
    false_alarm: float
    confusion: float
    scored_speech: float

    @property
    def der(self) -> float:
        if self.scored_speech == 0:
            raise UndefinedRateError("DER undefined: zero scored reference speech")
        return (self.missed + self.false_alarm + self.confusion) / self.scored_speech

    @property
    def missed_rate(self) -> float:
        return self.missed / self.scored_speech

    @property
    def false_alarm_rate(self) -> float:
        return self.false_alarm / self.scored_speech

    @property
    def confusion_rate(self) -> float:
        return self.confusion / self.scored_speech

    def __add__(self, other: "DerResult") -> "DerResult":
        return DerResult(
            self.missed + other.missed,
            self.false_alarm + other.false_alarm,
            self.confusion + other.confusion,
            self.scored_speech + other.scored_speech,
        )

    @classmethod
    def zero(cls) -> "DerResult":
        return cls(0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class SpkCountResult:
    """Missed / false-alarm speaker counts over total reference speakers."""

    ref_speakers: int
    missed_speakers: int
    false_alarm_speakers: int

    @property
    def missed_pct(self) -> float:
        if self.ref_speakers == 0:
            raise UndefinedRateError("speaker percentages undefined: zero reference speakers")
        return 100.0 * self.missed_speakers / self.ref_speakers

    @property
    def false_alarm_pct(self) -> float:
        if self.ref_speakers == 0:
            raise UndefinedRateError("speaker percentages undefined: zero reference speakers")
        return 100.0 * self.false_alarm_speakers / self.ref_speakers

    def __add__(self, other: "SpkCountResult") -> "SpkCountResult":
        return SpkCountResult(
            self.ref_speakers + other.ref_speakers,
            self.missed_speakers + other.missed_speakers,
            self.false_alarm_speakers + other.false_alarm_speakers,
        )

    @classmethod
    def zero(cls) -> "SpkCountResult":
        return cls(0, 0, 0)


def _speaker_intervals(s: SegLst) -> dict[str, list[tuple[Fraction, Fraction]]]:
    out: dict[str, list[tuple[Fraction, Fraction]]] = {}
    for seg in s:
        out.setdefault(seg.speaker, []).append((Fraction(seg.start_time), Fraction(seg.end_time)))
    for spk in out:
        out[spk].sort()
    return out


def _pairwise_overlap(a: list[tuple[Fraction, Fraction]], b: list[tuple[Fraction, Fraction]]) -> Fraction:
    total = Fraction(0)
    for s1, e1 in a:
        for s2, e2 in b:
            lo, hi = max(s1, s2), min(e1, e2)
            if hi > lo:
                total += hi - lo
    return total


def optimal_speaker_mapping(ref: SegLst, hyp: SegLst) -> dict[str, str]:
    """One-to-one ref->hyp speaker map maximizing co-occurring speech time.

    Pairs with zero co-occurrence are left unmapped.
    """
    ref_iv = _speaker_intervals(ref)
    hyp_iv = _speaker_intervals(hyp)
    ref_speakers = sorted(ref_iv)
    hyp_speakers = sorted(hyp_iv)
    if not ref_speakers or not hyp_speakers:
        return {}
    overlap = np.array(
        [[float(_pairwise_overlap(ref_iv[r], hyp_iv[h])) for h in hyp_speakers] for r in ref_speakers]
    )
    rows, cols = linear_sum_assignment(-overlap)
    return {
        ref_speakers[i]: hyp_speakers[j]
        for i, j in zip(rows, cols)
        if overlap[i, j] > 0
    }


def _merge_intervals(intervals: list[tuple[Fraction, Fraction]]) -> list[tuple[Fraction, Fraction]]:
    merged: list[list[Fraction]] = []
    for lo, hi in sorted(intervals):
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [(lo, hi) for lo, hi in merged]


def der(ref: SegLst, hyp: SegLst, opts: DerOptions = DerOptions()) -> DerResult:
    """Sweep-based DER for one session.

    Regions within ``opts.collar`` of any reference segment boundary are
    excluded from scoring; with ``score_overlap=False`` regions with two or
    more active reference speakers are excluded as well.
    """
    if len(set(ref.session_ids()) | set(hyp.session_ids())) > 1:
        raise ContractError("der expects a single session; split by session first")
    mapping = optimal_speaker_mapping(ref, hyp)
    ref_iv = _speaker_intervals(ref)
    hyp_iv = _speaker_intervals(hyp)
    collar = Fraction(opts.collar)

    exclusions: list[tuple[Fraction, Fraction]] = []
    if collar > 0:
        for ivs in ref_iv.values():
            for lo, hi in ivs:
                exclusions.append((lo - collar, lo + collar))
                exclusions.append((hi - collar, hi + collar))
        exclusions = _merge_intervals(exclusions)

    points: set[Fraction] = set()
    for ivs in list(ref_iv.values()) + list(hyp_iv.values()):
        for lo, hi in ivs:
            points.update((lo, hi))
    for lo, hi in exclusions:
        points.update((lo, hi))
    timeline = sorted(points)

    missed = Fraction(0)
    false_alarm = Fraction(0)
    confusion = Fraction(0)
    scored = Fraction(0)
    for lo, hi in zip(timeline, timeline[1:]):
        dt = hi - lo
        mid = (lo + hi) / 2
        if any(e_lo < mid < e_hi for e_lo, e_hi in exclusions):
            continue
        ref_active = {spk for spk, ivs in ref_iv.items() if any(s < mid < e for s, e in ivs)}
        hyp_active = {spk for spk, ivs in hyp_iv.items() if any(s < mid < e for s, e in ivs)}
        r, h = len(ref_active), len(hyp_active)
        if not opts.score_overlap and r > 1:
            continue
        n_correct = sum(1 for spk in ref_active if mapping.get(spk) in hyp_active)
        missed += max(0, r - h) * dt
        false_alarm += max(0, h - r) * dt
        confusion += (min(r, h) - n_correct) * dt
        scored += r * dt
    if scored == 0:
        raise UndefinedRateError("DER undefined: zero scored reference speech")
    return DerResult(
        missed=float(missed),
        false_alarm=float(false_alarm),
        confusion=float(confusion),
        scored_speech=float(scored),
    )


def speaker_count_errors(ref: SegLst, hyp: SegLst) -> SpkCountResult:
    """Per-session speaker count differences aggregated over sessions.

    For a session with R reference and H hypothesis speakers, missed
    speakers accrue ``max(0, R - H)`` and false-alarm speakers
    ``max(0, H - R)``; percentages are over the summed R.
    """
    ref_sessions = split_by_session(ref)
    hyp_sessions = split_by_session(hyp)
    unknown = sorted(set(hyp_sessions) - set(ref_sessions))
    if unknown:
        raise ContractError(f"hypothesis sessions not present in reference: {unknown}")
    total = SpkCountResult.zero()
    for sid, ref_s in ref_sessions.items():
        n_ref = len(set(ref_s.speakers()))
        n_hyp = len(set(hyp_sessions[sid].speakers())) if sid in hyp_sessions else 0
        total += SpkCountResult(
            ref_speakers=n_ref,
            missed_speakers=max(0, n_ref - n_hyp),
            false_alarm_speakers=max(0, n_hyp - n_ref),
        )
    return total
