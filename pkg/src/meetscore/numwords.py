"""English number-to-words spelling for scoring normalization.

Cardinals cover 0..999999; ordinals cover 1..100. Output is lowercase,
space-separated, without hyphens or "and" (keeps spoken tokens atomic for
word error rate scoring).
"""

from __future__ import annotations

_ONES = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight",
    "nine", "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen",
    "sixteen", "seventeen", "eighteen", "nineteen",
]
_TENS = [
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy",
    "eighty", "ninety",
]
_ORDINAL_ONES = [
    "zeroth", "first", "second", "third", "fourth", "fifth", "sixth",
    "seventh", "eighth", "ninth", "tenth", "eleventh", "twelfth",
    "thirteenth", "fourteenth", "fifteenth", "sixteenth", "seventeenth",
    "eighteenth", "nineteenth",
]
_ORDINAL_TENS = [
    "", "", "twentieth", "thirtieth", "fortieth", "fiftieth", "sixtieth",
    "seventieth", "eightieth", "ninetieth",
]

CARDINAL_MAX = 999_999
ORDINAL_MAX = 100


def _under_hundred(n: int) -> str:
    if n < 20:
        return _ONES[n]
    tens, ones = divmod(n, 10)
    return _TENS[tens] if ones == 0 else f"{_TENS[tens]} {_ONES[ones]}"


def _under_thousand(n: int) -> str:
    hundreds, rest = divmod(n, 100)
    if hundreds == 0:
        return _under_hundred(rest)
    head = f"{_ONES[hundreds]} hundred"
    return head if rest == 0 else f"{head} {_under_hundred(rest)}"


def cardinal(n: int) -> str:
    """Spell ``n`` as an English cardinal; requires 0 <= n <= CARDINAL_MAX."""
    if not 0 <= n <= CARDINAL_MAX:
        raise ValueError(f"cardinal out of range: {n}")
    thousands, rest = divmod(n, 1000)
    if thousands == 0:
        return _under_thousand(rest)
    head = f"{_under_thousand(thousands)} thousand"
    return head if rest == 0 else f"{head} {_under_thousand(rest)}"


def ordinal(n: int) -> str:
    """Spell ``n`` as an English ordinal; requires 1 <= n <= ORDINAL_MAX."""
    if not 1 <= n <= ORDINAL_MAX:
        raise ValueError(f"ordinal out of range: {n}")
    if n == 100:
        return "one hundredth"
    if n < 20:
        return _ORDINAL_ONES[n]
    tens, ones = divmod(n, 10)
    if ones == 0:
        return _ORDINAL_TENS[tens]
    return f"{_TENS[tens]} {_ORDINAL_ONES[ones]}"


def digit_by_digit(digits: str) -> str:
    """Spell a digit string one digit at a time ("2048" -> "two zero four eight")."""
    return " ".join(_ONES[int(d)] for d in digits)
