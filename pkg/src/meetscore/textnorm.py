"""Scoring text normalization.

Whisper-style rules with the digit direction reversed: digits are spelled
out as words instead of words being collapsed to digits. Non-verbal sounds
and bracketed tags are removed, everything is lowercased, and common
abbreviations/contractions are expanded. The rule tables are configuration
data shipped with the toolkit (see ``data/norm_rules.txt``) and can be
overridden with a custom file.

The fixed rule order is:

1. bracketed non-verbal tag removal
2. lowercasing
3. punctuation stripped to whitespace (intra-word apostrophes and hyphens kept)
4. abbreviation/contraction expansion
5. non-verbal token deletion
6. digit-sequence expansion to words
7. whitespace collapse and trim
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Mapping

from . import numwords
from .seglst import Segment, SegLst

_CURRENCY_SYMBOLS = "$£€%"

# Characters that survive the punctuation-stripping step. Digits and
# currency symbols are consumed later by the number expansion.
_STRIP_RE = re.compile(r"[^a-z0-9'\-$£€%\s]")
_EDGE_RE = re.compile(r"^['\-]+|['\-]+$")
_WS_RE = re.compile(r"\s+")


@dataclass(frozen=True)
class NormConfig:
    """Rule tables driving the normalization; immutable after load."""

    abbreviations: Mapping[str, str]
    nonverbal_tokens: frozenset[str]
    nonverbal_tags: frozenset[str]
    currency_words: Mapping[str, str]


def load_config(path: Path | str) -> NormConfig:
    """Load a rule table file: tab-separated ``kind<TAB>token[<TAB>expansion]`` lines."""
    abbreviations: dict[str, str] = {}
    nonverbal: set[str] = set()
    tags: set[str] = set()
    currency: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        kind = parts[0]
        if kind == "abbrev" and len(parts) == 3:
            abbreviations[parts[1]] = parts[2]
        elif kind == "nonverbal" and len(parts) == 2:
            nonverbal.add(parts[1])
        elif kind == "tag" and len(parts) == 2:
            tags.add(parts[1])
        elif kind == "currency" and len(parts) == 3:
            currency[parts[1]] = parts[2]
        else:
            raise ValueError(f"{path}:{lineno}: unrecognized rule line: {line!r}")
    return NormConfig(
        abbreviations=abbreviations,
        nonverbal_tokens=frozenset(nonverbal),
        nonverbal_tags=frozenset(tags),
        currency_words=currency,
    )


@lru_cache(maxsize=1)
def default_config() -> NormConfig:
    with resources.as_file(resources.files("meetscore.data") / "norm_rules.txt") as p:
        return load_config(p)


def _spell_integer(digits: str) -> str:
    # Leading zeros read naturally digit-by-digit ("007" -> "zero zero seven").
    if len(digits) > 1 and digits.startswith("0"):
        return numwords.digit_by_digit(digits)
    n = int(digits)
    if n > numwords.CARDINAL_MAX:
        return numwords.digit_by_digit(digits)
    return numwords.cardinal(n)


def _spell_ordinal(digits: str) -> str:
    n = int(digits)
    if 1 <= n <= numwords.ORDINAL_MAX and not (len(digits) > 1 and digits.startswith("0")):
        return numwords.ordinal(n)
    return _spell_integer(digits)


def expand_numbers(text: str, cfg: NormConfig | None = None) -> str:
    """Replace digit sequences (and adjacent currency/percent symbols) with words.

    ``20$`` and ``$20`` both become ``twenty dollars``; ``3rd`` becomes
    ``third``; digit runs longer than six digits fall back to digit-by-digit
    spelling. Stray currency symbols become their spoken word.
    """
    if cfg is None:
        cfg = default_config()
    sym = re.escape(_CURRENCY_SYMBOLS)

    def currency_number(m: re.Match) -> str:
        symbol = m.group("pre") or m.group("post")
        digits = m.group("num") if m.group("pre") else m.group("num2")
        return f" {_spell_integer(digits)} {cfg.currency_words.get(symbol, '')} "

    text = re.sub(
        rf"(?:(?P<pre>[{sym}])\s?(?P<num>\d+)|(?P<num2>\d+)\s?(?P<post>[{sym}]))",
        currency_number,
        text,
    )
    text = re.sub(
        r"(\d+)(st|nd|rd|th)\b",
        lambda m: f" {_spell_ordinal(m.group(1))} ",
        text,
        flags=re.IGNORECASE,
    )
    text = re.sub(r"\d+", lambda m: f" {_spell_integer(m.group(0))} ", text)
    text = re.sub(rf"[{sym}]", lambda m: f" {cfg.currency_words.get(m.group(0), '')} ", text)
    # substitutions can leave dangling edge punctuation ("3rd-party" -> "third -party")
    tokens = (_EDGE_RE.sub("", t) for t in text.split())
    return " ".join(t for t in tokens if t)


def normalize_text(text: str, cfg: NormConfig | None = None) -> str:
    """Apply the full normalization pipeline; output is lowercase words only."""
    if cfg is None:
        cfg = default_config()
    for tag in cfg.nonverbal_tags:
        text = re.sub(re.escape(tag), " ", text, flags=re.IGNORECASE)
    text = text.lower()
    text = _STRIP_RE.sub(" ", text)
    tokens: list[str] = []
    for token in text.split():
        token = _EDGE_RE.sub("", token)
        if not token:
            continue
        expansion = cfg.abbreviations.get(token)
        if expansion is not None:
            tokens.extend(expansion.split())
        else:
            tokens.append(token)
    tokens = [t for t in tokens if t not in cfg.nonverbal_tokens]
    expanded = expand_numbers(" ".join(tokens), cfg)
    # number expansion can split a token ("8jr" -> "eight jr") and expose an
    # abbreviation or non-verbal token late; re-apply both token rules so the
    # pipeline is idempotent
    out: list[str] = []
    for token in expanded.split():
        for word in cfg.abbreviations.get(token, token).split():
            if word not in cfg.nonverbal_tokens:
                out.append(word)
    return " ".join(out)


def normalize_seglst(s: SegLst, cfg: NormConfig | None = None) -> SegLst:
    """Normalize every segment's transcript; drop segments that become empty.

    Times, labels and segment order are untouched.
    """
    if cfg is None:
        cfg = default_config()
    out: list[Segment] = []
    for seg in s:
        words = normalize_text(seg.words, cfg)
        if not words:
            continue
        out.append(
            Segment(
                session_id=seg.session_id,
                speaker=seg.speaker,
                start_time=seg.start_time,
                end_time=seg.end_time,
                words=words,
                extra=seg.extra,
            )
        )
    return SegLst(out)
