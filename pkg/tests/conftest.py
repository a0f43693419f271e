from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest

from meetscore.seglst import SegLst, Segment

sys.path.insert(0, str(Path(__file__).parent))

DATA_DIR = Path(__file__).parent / "data"

VOCAB = "alpha bravo charlie delta echo foxtrot golf hotel".split()


def random_session(rng: random.Random, *, session_id="S1", max_speakers=3,
                   max_segments=6, max_words=4, horizon=60.0) -> SegLst:
    """A random valid single-session SegLst."""
    n_speakers = rng.randint(1, max_speakers)
    speakers = [f"spk{i}" for i in range(n_speakers)]
    segments = []
    for _ in range(rng.randint(1, max_segments)):
        start = round(rng.uniform(0, horizon * 0.8), 3)
        duration = round(rng.uniform(0.5, horizon * 0.2), 3)
        words = " ".join(rng.choice(VOCAB) for _ in range(rng.randint(1, max_words)))
        segments.append(
            Segment(
                session_id=session_id,
                speaker=rng.choice(speakers),
                start_time=start,
                end_time=round(start + duration, 3),
                words=words,
            )
        )
    return SegLst(segments)


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture
def mini_corpus_ref():
    return DATA_DIR / "mini_corpus" / "ref"


@pytest.fixture
def mini_corpus_hyp():
    return DATA_DIR / "mini_corpus" / "hyp"


@pytest.fixture
def golden_dir():
    return DATA_DIR / "golden"
