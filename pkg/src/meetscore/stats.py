"""Corpus activity statistics: silence / single-speaker / overlap ratios.

Computed from segLST annotations with an exact boundary sweep. Session
duration defaults to the last segment end time; a ``durations.json``
sidecar (session_id -> seconds) can supply the true audio duration so
trailing silence is counted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import ContractError
from .seglst import LayoutManifest, SegLst, load_seglst, validate

SIDECAR_NAME = "durations.json"


@dataclass(frozen=True)
class ActivityStats:
    """Seconds of a session spent in each concurrency bucket.

    Values are exact rationals from the boundary sweep, so
    ``silence + single + overlap == total`` holds exactly; convert with
    ``float()`` for display.
    """

    total: Fraction
    silence: Fraction
    single: Fraction
    overlap: Fraction

    def __add__(self, other: "ActivityStats") -> "ActivityStats":
        return ActivityStats(
            self.total + other.total,
            self.silence + other.silence,
            self.single + other.single,
            self.overlap + other.overlap,
        )

    @classmethod
    def zero(cls) -> "ActivityStats":
        return cls(Fraction(0), Fraction(0), Fraction(0), Fraction(0))

    def ratios_pct(self) -> tuple[float, float, float]:
        """(silence, single, overlap) as percentages of the total duration."""
        if self.total == 0:
            raise ContractError("activity ratios undefined for zero total duration")
        return (
            float(100 * self.silence / self.total),
            float(100 * self.single / self.total),
            float(100 * self.overlap / self.total),
        )


@dataclass(frozen=True)
class SplitStats:
    """One row of the corpus statistics table."""

    scenario: str
    split: str
    size_hours: float
    utterances: int
    speakers: int
    sessions: int
    activity: ActivityStats


def session_activity(s: SegLst, session_end: float | None = None) -> ActivityStats:
    """Sweep speaker-activity counts over [0, session_end].

    A speaker is active inside any of their segments; a speaker's own
    overlapping segments count once. ``session_end`` defaults to the
    maximum segment end time.
    """
    max_end = max((seg.end_time for seg in s), default=0.0)
    if session_end is None:
        session_end = max_end
    if session_end < max_end:
        raise ContractError(f"session_end {session_end} < max segment end {max_end}")
    if len(set(s.session_ids())) > 1:
        raise ContractError("session_activity expects a single session")

    end = Fraction(session_end)
    points = {Fraction(0), end}
    by_speaker: dict[str, list[tuple[Fraction, Fraction]]] = {}
    for seg in s:
        lo, hi = Fraction(seg.start_time), Fraction(seg.end_time)
        by_speaker.setdefault(seg.speaker, []).append((lo, hi))
        points.update((lo, hi))
    timeline = sorted(points)

    silence = single = overlap = Fraction(0)
    for lo, hi in zip(timeline, timeline[1:]):
        mid = (lo + hi) / 2
        active = sum(
            1
            for ivs in by_speaker.values()
            if any(s0 < mid < e0 for s0, e0 in ivs)
        )
        dt = hi - lo
        if active == 0:
            silence += dt
        elif active == 1:
            single += dt
        else:
            overlap += dt
    return ActivityStats(total=end, silence=silence, single=single, overlap=overlap)


def load_durations(manifest: LayoutManifest) -> dict[str, float]:
    """Read the optional durations sidecar next to the manifest's session files."""
    for path in manifest.session_files.values():
        sidecar = path.parent / SIDECAR_NAME
        if sidecar.is_file():
            return {k: float(v) for k, v in json.loads(sidecar.read_text()).items()}
        break
    return {}


def split_stats(
    manifest: LayoutManifest,
    session_ends: Mapping[str, float] | None = None,
) -> SplitStats:
    """Aggregate per-session activity and counts for one scenario/split."""
    if session_ends is None:
        session_ends = load_durations(manifest)
    activity = ActivityStats.zero()
    utterances = 0
    speakers: set[str] = set()
    for sid, path in manifest.session_files.items():
        s = load_seglst(path)
        problems = [v for v in validate(s) if v.severity == "error"]
        if problems:
            raise ContractError(f"{path}: invalid segLST: {problems[0]}")
        utterances += len(s)
        speakers.update(s.speakers())
        activity = activity + session_activity(s, session_ends.get(sid))
    return SplitStats(
        scenario=manifest.scenario,
        split=manifest.split,
        size_hours=float(activity.total) / 3600.0,
        utterances=utterances,
        speakers=len(speakers),
        sessions=len(manifest.session_files),
        activity=activity,
    )
