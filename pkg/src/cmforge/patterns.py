"""Slot syntax for message text patterns.

A pattern is plain text with named slots written ``{name}``. Literal braces
are escaped by doubling: ``{{`` and ``}}``. Slot names follow the identifier
grammar ``[a-z][a-z0-9_]*``.
"""

from __future__ import annotations

import re
from typing import Mapping

SLOT_NAME_RE = re.compile(r"[a-z][a-z0-9_]*\Z")

# Control characters a pattern may contain; everything else below U+0020 is
# rejected because the template format has no escape for it.
_ALLOWED_CONTROLS = {"\n", "\t", "\r"}


class PatternError(ValueError):
    """Invalid slot syntax. ``offset`` is the code-point index of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(message)
        self.message = message
        self.offset = offset


def validate_pattern(pattern: str) -> None:
    """Raise PatternError if the pattern has invalid slot syntax or
    control characters the template format cannot carry."""
    for i, ch in enumerate(pattern):
        if ch < " " and ch not in _ALLOWED_CONTROLS:
            raise PatternError(f"unsupported control character {ch!r}", i)
    iter_slots(pattern)


def iter_slots(pattern: str) -> list[tuple[str, int]]:
    """Return ``(name, offset)`` for every slot occurrence, in text order.

    Raises PatternError on an unclosed ``{``, an unescaped ``}`` or a slot
    name outside the identifier grammar.
    """
    out: list[tuple[str, int]] = []
    i = 0
    n = len(pattern)
    while True:
        j_open = pattern.find("{", i)
        j_close = pattern.find("}", i)
        if j_open < 0 and j_close < 0:
            return out
        if j_close >= 0 and (j_open < 0 or j_close < j_open):
            if j_close + 1 < n and pattern[j_close + 1] == "}":
                i = j_close + 2
                continue
            raise PatternError("unescaped '}' (write '}}' for a literal brace)", j_close)
        if j_open + 1 < n and pattern[j_open + 1] == "{":
            i = j_open + 2
            continue
        end = pattern.find("}", j_open + 1)
        if end < 0:
            raise PatternError("unclosed slot brace", j_open)
        name = pattern[j_open + 1 : end]
        if not SLOT_NAME_RE.fullmatch(name):
            raise PatternError(f"invalid slot name {name!r}", j_open)
        out.append((name, j_open))
        i = end + 1


def render(pattern: str, bindings: Mapping[str, str]) -> str:
    """Substitute every slot and unescape literal braces.

    The pattern must already be valid and ``bindings`` must cover every slot;
    use :func:`iter_slots` to collect names first.
    """
    parts: list[str] = []
    i = 0
    n = len(pattern)
    while True:
        j_open = pattern.find("{", i)
        j_close = pattern.find("}", i)
        if j_open < 0 and j_close < 0:
            parts.append(pattern[i:])
            return "".join(parts)
        if j_close >= 0 and (j_open < 0 or j_close < j_open):
            parts.append(pattern[i : j_close + 1])
            i = j_close + 2
            continue
        if j_open + 1 < n and pattern[j_open + 1] == "{":
            parts.append(pattern[i : j_open + 1])
            i = j_open + 2
            continue
        end = pattern.find("}", j_open + 1)
        parts.append(pattern[i:j_open])
        parts.append(bindings[pattern[j_open + 1 : end]])
        i = end + 1


def offset_to_linecol(text: str, offset: int) -> tuple[int, int]:
    """Map a code-point offset to a 1-based (line, column) pair."""
    line = text.count("\n", 0, offset) + 1
    last_nl = text.rfind("\n", 0, offset)
    return line, offset - last_nl
