"""Scoring toolkit for long-form multi-talker speech transcription."""

__version__ = "0.1.0"

from .align import (
    AlignmentCounts,
    SpeakerAssignment,
    TimedWord,
    cp_wer,
    levenshtein,
    tc_levenshtein,
    tcp_wer,
    words_with_times,
)
from .diarmetrics import DerOptions, DerResult, SpkCountResult, der, speaker_count_errors
from .seglst import SegLst, Segment, parse_seglst, split_by_session, validate, write_seglst
from .stats import ActivityStats, SplitStats, session_activity, split_stats
from .textnorm import NormConfig, expand_numbers, normalize_seglst, normalize_text

__all__ = [
    "AlignmentCounts",
    "ActivityStats",
    "DerOptions",
    "DerResult",
    "NormConfig",
    "SegLst",
    "Segment",
    "SpeakerAssignment",
    "SplitStats",
    "SpkCountResult",
    "TimedWord",
    "cp_wer",
    "der",
    "expand_numbers",
    "levenshtein",
    "normalize_seglst",
    "normalize_text",
    "parse_seglst",
    "session_activity",
    "speaker_count_errors",
    "split_by_session",
    "split_stats",
    "tc_levenshtein",
    "tcp_wer",
    "validate",
    "words_with_times",
    "write_seglst",
]
