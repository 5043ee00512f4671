"""Extract a numeric prediction from free-form model output."""
import re
from typing import Optional

_NUMBER = r"(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?"
# a leading "-" counts as a sign unless it joins two words or numbers
NUMBER_RE = re.compile(r"(?:(?<![\w.])-)?(?:" + _NUMBER + r")")
# "a-b", "a – b", "a to b" directly following a number
RANGE_TAIL_RE = re.compile(r"\s*(?:-|–|—|to)\s*(" + _NUMBER + r")")


def _to_float(text: str) -> float:
    return float(text.replace(",", ""))


def _first_number(text: str) -> Optional[float]:
    match = NUMBER_RE.search(text)
    if match is None:
        return None
    value = _to_float(match.group(0))
    tail = RANGE_TAIL_RE.match(text, match.end())
    if tail is not None:
        return (value + _to_float(tail.group(1))) / 2.0
    return value


def parse_response(raw: str, marker: str) -> Optional[float]:
    """Parse the prediction from a model reply.

    The first number after the last occurrence of marker wins; without one, the
    first number anywhere in the reply. Thousands separators are stripped and a
    range such as "20 to 30" yields its midpoint.

    Returns:
        The parsed value, or None when the reply holds no number
    """
    if marker:
        position = raw.rfind(marker)
        if position >= 0:
            value = _first_number(raw[position + len(marker):])
            if value is not None:
                return value
    return _first_number(raw)
