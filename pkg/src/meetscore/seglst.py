"""segLST data model: parsing, serialization, validation and dataset layout.

A segLST file is a UTF-8 JSON array of objects with the mandatory keys
``session_id``, ``speaker``, ``start_time``, ``end_time`` and ``words``.
Unknown keys are carried along on round-trip but never consulted by any
metric. Segment order in a file is not semantically meaningful.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

from .errors import LayoutError, ParseError, SchemaError

MANDATORY_KEYS = ("session_id", "speaker", "start_time", "end_time", "words")

# Emitted time precision in decimal places. Annotation granularity in the
# supported corpora is centiseconds; one extra digit of headroom.
TIME_DECIMALS = 3

_EMPTY_EXTRA: Mapping[str, object] = MappingProxyType({})


@dataclass(frozen=True)
class Segment:
    """One speaker-attributed utterance with session id, time bounds and text."""

    session_id: str
    speaker: str
    start_time: float
    end_time: float
    words: str
    extra: Mapping[str, object] = field(default=_EMPTY_EXTRA, compare=False)

    @property
    def duration(self) -> float:
        return self.end_time - self.start_time


@dataclass(frozen=True)
class SegLst:
    """An ordered collection of segments; all metrics treat it as a multiset."""

    segments: tuple[Segment, ...]

    def __init__(self, segments: Iterable[Segment] = ()):
        object.__setattr__(self, "segments", tuple(segments))

    def __len__(self) -> int:
        return len(self.segments)

    def __iter__(self) -> Iterator[Segment]:
        return iter(self.segments)

    def session_ids(self) -> list[str]:
        """Distinct session ids in first-appearance order."""
        return list(dict.fromkeys(seg.session_id for seg in self.segments))

    def speakers(self) -> list[str]:
        return list(dict.fromkeys(seg.speaker for seg in self.segments))

    def sorted(self) -> "SegLst":
        return SegLst(sorted(self.segments, key=lambda s: (s.session_id, s.start_time, s.end_time, s.speaker)))


@dataclass(frozen=True)
class Violation:
    """One validation finding; ``severity`` is ``"error"`` or ``"warning"``."""

    index: int
    code: str
    message: str
    severity: str = "error"

    def __str__(self) -> str:
        return f"segment {self.index}: [{self.code}] {self.message}"


@dataclass(frozen=True)
class LayoutManifest:
    """Per-session transcription files for one scenario/split."""

    scenario: str
    split: str
    session_files: Mapping[str, Path]


def _parse_time(value, key: str, index: int, path=None) -> float:
    if isinstance(value, bool):
        raise SchemaError(f"key '{key}' must be a number, got boolean", index=index, path=path)
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            raise SchemaError(f"key '{key}' is not numeric: {value!r}", index=index, path=path) from None
    raise SchemaError(f"key '{key}' must be a number or numeric string", index=index, path=path)


def parse_seglst(raw: bytes | str, *, path=None) -> SegLst:
    """Parse segLST JSON into a :class:`SegLst`.

    Times may be JSON numbers or numeric strings. Extra keys are preserved
    on each segment's ``extra`` map. Raises :class:`ParseError` on malformed
    JSON (with byte offset) and :class:`SchemaError` on schema problems.
    """
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as e:
        raise ParseError(f"malformed JSON: {e.msg}", offset=e.pos, path=path) from None
    if not isinstance(data, list):
        raise SchemaError("top-level JSON value must be an array", path=path)
    segments = []
    for i, obj in enumerate(data):
        if not isinstance(obj, dict):
            raise SchemaError("array element is not an object", index=i, path=path)
        for key in MANDATORY_KEYS:
            if key not in obj:
                raise SchemaError(f"missing mandatory key '{key}'", index=i, path=path)
        for key in ("session_id", "speaker", "words"):
            if not isinstance(obj[key], str):
                raise SchemaError(f"key '{key}' must be a string", index=i, path=path)
        extra = {k: v for k, v in obj.items() if k not in MANDATORY_KEYS}
        segments.append(
            Segment(
                session_id=obj["session_id"],
                speaker=obj["speaker"],
                start_time=_parse_time(obj["start_time"], "start_time", i, path),
                end_time=_parse_time(obj["end_time"], "end_time", i, path),
                words=obj["words"],
                extra=MappingProxyType(extra) if extra else _EMPTY_EXTRA,
            )
        )
    return SegLst(segments)


def load_seglst(path: Path | str) -> SegLst:
    path = Path(path)
    return parse_seglst(path.read_bytes(), path=path)


def _emit_time(t: float):
    r = round(t, TIME_DECIMALS)
    return int(r) if r == int(r) else r


def write_seglst(s: SegLst) -> bytes:
    """Serialize to segLST JSON bytes; inverse of :func:`parse_seglst`.

    Times are emitted as numbers with at most ``TIME_DECIMALS`` decimals, so
    round-trip identity holds for data at millisecond granularity or coarser.
    """
    records = []
    for seg in s:
        rec = {
            "session_id": seg.session_id,
            "speaker": seg.speaker,
            "start_time": _emit_time(seg.start_time),
            "end_time": _emit_time(seg.end_time),
            "words": seg.words,
        }
        rec.update(seg.extra)
        records.append(rec)
    return (json.dumps(records, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def save_seglst(s: SegLst, path: Path | str) -> None:
    Path(path).write_bytes(write_seglst(s))


def validate(s: SegLst) -> list[Violation]:
    """Return every invariant violation; an empty list means ``s`` is valid.

    Duplicate identical segments are reported at warning level; everything
    else is error level.
    """
    violations = []
    seen: dict[tuple, int] = {}
    for i, seg in enumerate(s):
        if not seg.session_id:
            violations.append(Violation(i, "empty-session-id", "session_id is empty"))
        if not seg.speaker:
            violations.append(Violation(i, "empty-speaker", "speaker is empty"))
        if seg.start_time < 0:
            violations.append(Violation(i, "negative-start", f"start_time {seg.start_time} < 0"))
        if seg.end_time <= seg.start_time:
            violations.append(
                Violation(i, "non-positive-duration", f"end_time {seg.end_time} <= start_time {seg.start_time}")
            )
        if not seg.words.strip():
            violations.append(Violation(i, "empty-transcript", "words field is empty"))
        key = (seg.session_id, seg.speaker, seg.start_time, seg.end_time, seg.words)
        if key in seen:
            violations.append(
                Violation(i, "duplicate-segment", f"identical to segment {seen[key]}", severity="warning")
            )
        else:
            seen[key] = i
    return violations


def split_by_session(s: SegLst) -> dict[str, SegLst]:
    """Partition into per-session SegLsts, preserving segment order."""
    buckets: dict[str, list[Segment]] = {}
    for seg in s:
        buckets.setdefault(seg.session_id, []).append(seg)
    return {sid: SegLst(segs) for sid, segs in buckets.items()}


#: Reserved filenames inside a split directory that are not session files.
SIDECAR_FILES = frozenset({"durations.json"})


def scan_layout(
    root: Path | str,
    scenario: str,
    split: str,
    *,
    subdir: str = "transcriptions",
) -> LayoutManifest:
    """Enumerate per-session transcription files for one scenario/split.

    Expects ``<root>/<scenario>/<subdir>/<split>/<session_id>.json``.
    Ordering is lexicographic by session id and therefore deterministic.
    """
    root = Path(root)
    split_dir = root / scenario / subdir / split
    if not split_dir.is_dir():
        raise LayoutError(f"missing split directory: {split_dir}")
    session_files: dict[str, Path] = {}
    for f in sorted(split_dir.iterdir()):
        if not f.is_file() or f.suffix.lower() != ".json" or f.name in SIDECAR_FILES:
            continue
        sid = f.stem
        if sid in session_files:
            raise LayoutError(f"duplicate session file for '{sid}': {session_files[sid]} and {f}")
        session_files[sid] = f
    return LayoutManifest(scenario=scenario, split=split, session_files=session_files)


def list_scenarios(root: Path | str) -> list[str]:
    """Scenario directories under ``root`` (those containing transcriptions/)."""
    root = Path(root)
    if not root.is_dir():
        raise LayoutError(f"missing root directory: {root}")
    return sorted(d.name for d in root.iterdir() if (d / "transcriptions").is_dir())


def list_splits(root: Path | str, scenario: str, *, subdir: str = "transcriptions") -> list[str]:
    base = Path(root) / scenario / subdir
    if not base.is_dir():
        raise LayoutError(f"missing directory: {base}")
    return sorted(d.name for d in base.iterdir() if d.is_dir())
