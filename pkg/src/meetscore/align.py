"""Word alignment metrics: Levenshtein WER, cpWER and time-constrained cpWER.

cpWER concatenates each speaker's transcripts into one stream and scores the
one-to-one speaker pairing with the fewest total errors. tcpWER additionally
requires matched words to be close in time: each reference word interval is
extended by a collar and a match/substitution is only admissible when the
extended interval intersects the hypothesis word interval. segLST carries
segment-level times only, so word intervals are derived by equal partition
of the segment interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ContractError, UndefinedRateError
from .seglst import SegLst, Segment

DEFAULT_COLLAR = 5.0


@dataclass(frozen=True)
class AlignmentCounts:
    """Substitution/insertion/deletion/correct tallies for one alignment."""

    substitutions: int
    insertions: int
    deletions: int
    correct: int

    @property
    def ref_words(self) -> int:
        return self.substitutions + self.deletions + self.correct

    @property
    def errors(self) -> int:
        return self.substitutions + self.insertions + self.deletions

    @property
    def error_rate(self) -> float:
        if self.ref_words == 0:
            raise UndefinedRateError("error rate undefined: zero reference words")
        return self.errors / self.ref_words

    def __add__(self, other: "AlignmentCounts") -> "AlignmentCounts":
        return AlignmentCounts(
            self.substitutions + other.substitutions,
            self.insertions + other.insertions,
            self.deletions + other.deletions,
            self.correct + other.correct,
        )

    @classmethod
    def zero(cls) -> "AlignmentCounts":
        return cls(0, 0, 0, 0)


@dataclass(frozen=True)
class TimedWord:
    """One word with its (pseudo) time interval and speaker label."""

    token: str
    begin: float
    end: float
    speaker: str


@dataclass(frozen=True)
class SpeakerAssignment:
    """Optimal ref/hyp speaker pairing with per-pair and summed counts.

    Unmatched speakers are paired with ``None`` (the empty stream).
    """

    pairs: tuple[tuple[str | None, str | None], ...]
    pair_counts: tuple[AlignmentCounts, ...]
    total_counts: AlignmentCounts

    @property
    def error_rate(self) -> float:
        return self.total_counts.error_rate


def _edit_dp(
    ref: Sequence,
    hyp: Sequence,
    token_of: Callable,
    admissible: Callable,
) -> AlignmentCounts:
    """Minimum-error alignment counts via dynamic programming.

    Cells hold ``(errors, -correct, sub, ins, del)``; minimizing the tuple
    minimizes errors first and breaks ties toward more correct matches,
    which makes the resulting counts unique.
    """
    n, m = len(ref), len(hyp)
    # prev[j] = best cell for ref[:i], hyp[:j]
    prev = [(j, 0, 0, j, 0) for j in range(m + 1)]
    for i in range(1, n + 1):
        cur = [(prev[0][0] + 1, prev[0][1], prev[0][2], prev[0][3], prev[0][4] + 1)]
        r = ref[i - 1]
        for j in range(1, m + 1):
            up = prev[j]
            left = cur[j - 1]
            best = (up[0] + 1, up[1], up[2], up[3], up[4] + 1)  # deletion
            cand = (left[0] + 1, left[1], left[2], left[3] + 1, left[4])  # insertion
            if cand < best:
                best = cand
            if admissible(r, hyp[j - 1]):
                diag = prev[j - 1]
                if token_of(r) == token_of(hyp[j - 1]):
                    cand = (diag[0], diag[1] - 1, diag[2], diag[3], diag[4])
                else:
                    cand = (diag[0] + 1, diag[1], diag[2] + 1, diag[3], diag[4])
                if cand < best:
                    best = cand
            cur.append(best)
        prev = cur
    errors, neg_correct, sub, ins, dele = prev[m]
    return AlignmentCounts(substitutions=sub, insertions=ins, deletions=dele, correct=-neg_correct)


def levenshtein(ref: Sequence[str], hyp: Sequence[str]) -> AlignmentCounts:
    """Minimum-edit-distance counts between two token lists (unit costs)."""
    return _edit_dp(ref, hyp, token_of=lambda t: t, admissible=lambda r, h: True)


def words_with_times(seg: Segment) -> list[TimedWord]:
    """Split a segment into words with equal-partition pseudo intervals."""
    tokens = seg.words.split()
    n = len(tokens)
    if n == 0:
        return []
    d = (seg.end_time - seg.start_time) / n
    return [
        TimedWord(
            token=tok,
            begin=seg.start_time + i * d,
            end=seg.start_time + (i + 1) * d,
            speaker=seg.speaker,
        )
        for i, tok in enumerate(tokens)
    ]


def tc_levenshtein(
    ref: Sequence[TimedWord],
    hyp: Sequence[TimedWord],
    collar: float,
) -> AlignmentCounts:
    """Levenshtein counts under a temporal admissibility constraint.

    A match/substitution between reference word ``r`` and hypothesis word
    ``h`` is admissible only when ``[r.begin - collar, r.end + collar]``
    intersects ``[h.begin, h.end]``; otherwise that pairing costs one
    deletion plus one insertion. ``collar=inf`` reduces to plain
    Levenshtein on the token sequences.
    """
    if collar < 0:
        raise ContractError(f"collar must be non-negative, got {collar}")
    for name, seq in (("ref", ref), ("hyp", hyp)):
        if any(seq[i].begin > seq[i + 1].begin for i in range(len(seq) - 1)):
            raise ContractError(f"{name} words are not sorted by begin time")
    return _tc_counts(ref, hyp, collar)


def _tc_counts(ref, hyp, collar):
    # tcp_wer streams keep segment-concatenation order, which is only
    # piecewise sorted; the DP itself is order-agnostic.
    if math.isinf(collar):
        admissible = lambda r, h: True
    else:
        admissible = lambda r, h: r.begin - collar <= h.end and h.begin <= r.end + collar
    return _edit_dp(ref, hyp, token_of=lambda w: w.token, admissible=admissible)


def assign_streams(cost: Sequence[Sequence[int]]) -> list[tuple[int, int]]:
    """Exact minimum-cost one-to-one assignment on a square cost matrix.

    Ties between equal-cost assignments are broken toward the
    lexicographically smallest (row, column) pair list.
    """
    n = len(cost)
    matrix = np.asarray(cost, dtype=float)
    if matrix.shape != (n, n):
        raise ContractError(f"cost matrix must be square, got shape {matrix.shape}")
    if n == 0:
        return []
    if (matrix < 0).any():
        raise ContractError("cost matrix entries must be non-negative")

    def optimum(m: np.ndarray) -> float:
        rows, cols = linear_sum_assignment(m)
        return float(m[rows, cols].sum())

    best_total = optimum(matrix)
    available = list(range(n))
    pairs: list[tuple[int, int]] = []
    fixed = 0.0
    sub = matrix
    for row in range(n):
        for k, col in enumerate(available):
            rest = np.delete(sub[1:], k, axis=1)
            rest_cost = optimum(rest) if rest.size else 0.0
            if fixed + sub[0, k] + rest_cost == best_total:
                pairs.append((row, col))
                fixed += sub[0, k]
                available.pop(k)
                sub = np.delete(sub[1:], k, axis=1)
                break
        else:
            raise AssertionError("no consistent column found; non-finite costs?")
    return pairs


def _check_single_session(ref: SegLst, hyp: SegLst) -> None:
    ref_sessions = set(ref.session_ids())
    hyp_sessions = set(hyp.session_ids())
    if len(ref_sessions) > 1 or len(hyp_sessions) > 1:
        raise ContractError(
            f"multi-session input (ref {sorted(ref_sessions)}, hyp {sorted(hyp_sessions)}); "
            "split by session first"
        )
    if ref_sessions and hyp_sessions and ref_sessions != hyp_sessions:
        raise ContractError(f"session id mismatch: ref {sorted(ref_sessions)} vs hyp {sorted(hyp_sessions)}")
    if len(ref) == 0:
        raise UndefinedRateError("empty reference: error rate undefined")


def _token_streams(s: SegLst) -> dict[str, list[str]]:
    streams: dict[str, list[str]] = {}
    for seg in sorted(s, key=lambda seg: (seg.start_time, seg.end_time)):
        streams.setdefault(seg.speaker, []).extend(seg.words.split())
    return streams


def _timed_streams(s: SegLst) -> dict[str, list[TimedWord]]:
    # Words stay in segment-concatenation order (segments by start time), the
    # same order cp_wer uses; re-sorting words individually would change the
    # token sequence when a speaker's own segments overlap and break the
    # collar=inf reduction to cp_wer.
    streams: dict[str, list[TimedWord]] = {}
    for seg in sorted(s, key=lambda seg: (seg.start_time, seg.end_time)):
        streams.setdefault(seg.speaker, []).extend(words_with_times(seg))
    return streams


def _optimal_assignment(
    ref_streams: dict[str, list],
    hyp_streams: dict[str, list],
    pair_counter: Callable[[list, list], AlignmentCounts],
) -> SpeakerAssignment:
    ref_speakers: list[str | None] = sorted(ref_streams)
    hyp_speakers: list[str | None] = sorted(hyp_streams)
    n = max(len(ref_speakers), len(hyp_speakers))
    ref_speakers += [None] * (n - len(ref_speakers))
    hyp_speakers += [None] * (n - len(hyp_speakers))
    counts = [
        [
            pair_counter(
                ref_streams.get(r, []) if r is not None else [],
                hyp_streams.get(h, []) if h is not None else [],
            )
            for h in hyp_speakers
        ]
        for r in ref_speakers
    ]
    cost = [[c.errors for c in row] for row in counts]
    assignment = assign_streams(cost)
    pairs = tuple((ref_speakers[i], hyp_speakers[j]) for i, j in assignment)
    pair_counts = tuple(counts[i][j] for i, j in assignment)
    total = sum(pair_counts, AlignmentCounts.zero())
    return SpeakerAssignment(pairs=pairs, pair_counts=pair_counts, total_counts=total)


def cp_wer(ref: SegLst, hyp: SegLst) -> SpeakerAssignment:
    """Concatenated minimum-permutation WER for one session."""
    _check_single_session(ref, hyp)
    return _optimal_assignment(_token_streams(ref), _token_streams(hyp), levenshtein)


def tcp_wer(ref: SegLst, hyp: SegLst, collar: float = DEFAULT_COLLAR) -> SpeakerAssignment:
    """Time-constrained cpWER for one session (default collar 5 s)."""
    _check_single_session(ref, hyp)
    if collar < 0:
        raise ContractError(f"collar must be non-negative, got {collar}")
    return _optimal_assignment(
        _timed_streams(ref),
        _timed_streams(hyp),
        lambda r, h: _tc_counts(r, h, collar),
    )
