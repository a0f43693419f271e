from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meetscore.errors import LayoutError, ParseError, SchemaError
from meetscore.seglst import (
    SegLst,
    Segment,
    parse_seglst,
    scan_layout,
    split_by_session,
    validate,
    write_seglst,
)


def test_parse_single_segment():
    raw = b'[{"session_id":"S1","speaker":"A","start_time":"0.0","end_time":"2.0","words":"hello"}]'
    s = parse_seglst(raw)
    assert len(s) == 1
    seg = s.segments[0]
    assert seg.duration == pytest.approx(2.0)
    assert seg.speaker == "A"


def test_parse_empty_array():
    assert len(parse_seglst(b"[]")) == 0


def test_parse_counts_distinct_sessions():
    records = [
        {"session_id": "S1", "speaker": "A", "start_time": 0, "end_time": 1, "words": "a"},
        {"session_id": "S2", "speaker": "A", "start_time": 0, "end_time": 1, "words": "b"},
        {"session_id": "S1", "speaker": "B", "start_time": 1, "end_time": 2, "words": "c"},
    ]
    s = parse_seglst(json.dumps(records))
    assert sorted(s.session_ids()) == ["S1", "S2"]


def test_parse_accepts_numeric_strings_and_numbers():
    records = [
        {"session_id": "S1", "speaker": "A", "start_time": "1.5", "end_time": 3, "words": "a"},
    ]
    seg = parse_seglst(json.dumps(records)).segments[0]
    assert seg.start_time == 1.5 and seg.end_time == 3.0


def test_parse_preserves_extra_keys():
    records = [
        {"session_id": "S1", "speaker": "A", "start_time": 0, "end_time": 1,
         "words": "a", "channel": 3},
    ]
    s = parse_seglst(json.dumps(records))
    assert s.segments[0].extra["channel"] == 3
    roundtrip = parse_seglst(write_seglst(s))
    assert roundtrip.segments[0].extra["channel"] == 3


def test_parse_malformed_json_reports_offset():
    with pytest.raises(ParseError) as e:
        parse_seglst(b'[{"session_id": }]')
    assert e.value.offset is not None


def test_parse_missing_key_names_key_and_index():
    records = [
        {"session_id": "S1", "speaker": "A", "start_time": 0, "end_time": 1, "words": "a"},
        {"session_id": "S1", "speaker": "A", "start_time": 0, "end_time": 1},
    ]
    with pytest.raises(SchemaError, match="words"):
        parse_seglst(json.dumps(records))


def test_parse_non_numeric_time():
    records = [
        {"session_id": "S1", "speaker": "A", "start_time": "abc", "end_time": 1, "words": "a"},
    ]
    with pytest.raises(SchemaError, match="start_time"):
        parse_seglst(json.dumps(records))


def _random_seglst(rng: random.Random, n: int) -> SegLst:
    segments = []
    for i in range(n):
        start = round(rng.uniform(0, 1000), 3)
        segments.append(
            Segment(
                session_id=f"S{rng.randint(1, 3)}",
                speaker=f"spk{rng.randint(0, 4)}",
                start_time=start,
                end_time=round(start + rng.uniform(0.1, 20), 3),
                words=" ".join(rng.choice("a b c d e".split()) for _ in range(rng.randint(1, 5))),
            )
        )
    return SegLst(segments)


def test_roundtrip_random_100_segments():
    rng = random.Random(7)
    s = _random_seglst(rng, 100)
    back = parse_seglst(write_seglst(s))
    assert len(back) == len(s)
    for a, b in zip(s, back):
        assert (a.session_id, a.speaker, a.words) == (b.session_id, b.speaker, b.words)
        assert abs(a.start_time - b.start_time) < 1e-6
        assert abs(a.end_time - b.end_time) < 1e-6


def test_write_empty():
    assert json.loads(write_seglst(SegLst())) == []


def test_validate_clean():
    s = _random_seglst(random.Random(1), 2)
    assert validate(s) == []


@pytest.mark.parametrize(
    "segment, code",
    [
        (Segment("S1", "A", 1.0, 1.0, "x"), "non-positive-duration"),
        (Segment("S1", "A", -0.5, 1.0, "x"), "negative-start"),
        (Segment("S1", "", 0.0, 1.0, "x"), "empty-speaker"),
        (Segment("", "A", 0.0, 1.0, "x"), "empty-session-id"),
        (Segment("S1", "A", 0.0, 1.0, ""), "empty-transcript"),
    ],
)
def test_validate_flags_each_rule(segment, code):
    violations = validate(SegLst([segment]))
    assert code in [v.code for v in violations]


def test_validate_duplicate_is_warning():
    seg = Segment("S1", "A", 0.0, 1.0, "x")
    violations = validate(SegLst([seg, seg]))
    assert [v.severity for v in violations] == ["warning"]
    assert violations[0].code == "duplicate-segment"


def test_split_by_session_partitions():
    s = _random_seglst(random.Random(3), 40)
    parts = split_by_session(s)
    assert sum(len(p) for p in parts.values()) == len(s)
    for sid, part in parts.items():
        assert part.session_ids() == [sid]


def test_split_by_session_empty():
    assert split_by_session(SegLst()) == {}


@settings(max_examples=50)
@given(st.integers(min_value=0, max_value=30), st.integers(min_value=0, max_value=2**32 - 1))
def test_roundtrip_property(n, seed):
    s = _random_seglst(random.Random(seed), n)
    back = parse_seglst(write_seglst(s))
    for a, b in zip(s, back):
        assert abs(a.start_time - b.start_time) < 1e-6
        assert abs(a.end_time - b.end_time) < 1e-6
        assert (a.session_id, a.speaker, a.words) == (b.session_id, b.speaker, b.words)


def _mk_layout(tmp_path, scenario="dinner", split="dev", sessions=("S1", "S2")):
    d = tmp_path / scenario / "transcriptions" / split
    d.mkdir(parents=True)
    for sid in sessions:
        (d / f"{sid}.json").write_text("[]")
    return tmp_path


def test_scan_layout_enumerates_sessions(tmp_path):
    root = _mk_layout(tmp_path)
    manifest = scan_layout(root, "dinner", "dev")
    assert sorted(manifest.session_files) == ["S1", "S2"]


def test_scan_layout_missing_split(tmp_path):
    root = _mk_layout(tmp_path)
    with pytest.raises(LayoutError, match="eval"):
        scan_layout(root, "dinner", "eval")


def test_scan_layout_duplicate_session(tmp_path):
    root = _mk_layout(tmp_path, sessions=("S1",))
    (root / "dinner" / "transcriptions" / "dev" / "S1.JSON").write_text("[]")
    with pytest.raises(LayoutError, match="duplicate"):
        scan_layout(root, "dinner", "dev")


def test_scan_layout_mini_corpus(mini_corpus_ref):
    expected = {"dinner": 2, "lecture": 1, "office": 2, "phonecall": 1}
    for scenario, count in expected.items():
        manifest = scan_layout(mini_corpus_ref, scenario, "dev")
        assert len(manifest.session_files) == count
