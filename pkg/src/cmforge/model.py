"""Core value types for communication-message templates.

A template couples four parameters: per-part meaning tags, a stylistic
format, a character budget and an ordered structure. This module holds those
types plus the primitive checks (symbol counting, budget verdicts, structure
completeness) everything else builds on.

Symbol counting is defined as Unicode code points, not bytes and not grapheme
clusters. Code points are deterministic and cheap and match how the major ad
platforms meter plain text, but note that multi-code-point emoji and combining
sequences count higher than what a user perceives as one character.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Union

from .patterns import PatternError, validate_pattern

IDENTIFIER_RE = re.compile(r"[a-z][a-z0-9_]*\Z")

MetadataValue = Union[str, int, bool]


def is_identifier(name: str) -> bool:
    return bool(IDENTIFIER_RE.fullmatch(name))


def _require_identifier(name: str, what: str) -> None:
    if not is_identifier(name):
        raise ValueError(f"{what} must match [a-z][a-z0-9_]*, got {name!r}")


@dataclass(frozen=True)
class SemanticTag:
    """A meaning role carried by a message part (e.g. ``usp_focus``)."""

    name: str

    def __post_init__(self) -> None:
        _require_identifier(self.name, "semantic tag")


@dataclass(frozen=True)
class Format:
    """A stylistic device shaping a part (question, argument, ...)."""

    name: str

    def __post_init__(self) -> None:
        _require_identifier(self.name, "format name")


#: Tags the demo catalog relies on; the vocabulary itself is open.
DEFAULT_SEMANTIC_TAGS: frozenset[SemanticTag] = frozenset(
    SemanticTag(n)
    for n in ("usp_focus", "audience_address", "attention_draw", "trust_building", "action_prompt")
)

#: Formats every catalog understands without declaring them. Catalogs may
#: extend this set with ``format <name>`` declarations in template files.
DEFAULT_FORMATS: frozenset[Format] = frozenset(
    Format(n) for n in ("question", "argument", "invitation_to_action", "problem_appeal")
)


@dataclass(frozen=True)
class CharacterBudget:
    """A symbol allowance: a base limit plus an optional extension.

    The extension models platforms that grant extra characters beyond the
    headline allowance (e.g. a 35-character title with 30 more available).
    """

    base: int
    extension: int = 0

    def __post_init__(self) -> None:
        if self.base < 0 or self.extension < 0:
            raise ValueError("budget base and extension must be non-negative")

    @property
    def limit(self) -> int:
        """Effective maximum: base plus extension."""
        return self.base + self.extension


class StructuralPartKind(Enum):
    """The five structural parts of a message, in canonical order."""

    TAGLINE = "tagline"
    TITLE = "title"
    MAIN_TEXT = "main_text"
    REFERENCE_INFO = "reference_info"
    ECHO_PHRASE = "echo_phrase"


#: Canonical structure order; index in this tuple orders parts everywhere.
CANONICAL_STRUCTURE: tuple[StructuralPartKind, ...] = tuple(StructuralPartKind)

_KIND_INDEX = {kind: i for i, kind in enumerate(CANONICAL_STRUCTURE)}
_KIND_BY_NAME = {kind.value: kind for kind in CANONICAL_STRUCTURE}


def canonical_index(kind: StructuralPartKind) -> int:
    return _KIND_INDEX[kind]


def part_kind_from_name(name: str) -> StructuralPartKind:
    """Look up a part kind by its lowercase name; raises KeyError."""
    return _KIND_BY_NAME[name]


class BudgetStatus(Enum):
    WITHIN_BASE = "within_base"
    WITHIN_EXTENSION = "within_extension"
    EXCEEDED = "exceeded"

    @property
    def rank(self) -> int:
        """Severity order: within_base < within_extension < exceeded."""
        return _STATUS_RANK[self]


_STATUS_RANK = {
    BudgetStatus.WITHIN_BASE: 0,
    BudgetStatus.WITHIN_EXTENSION: 1,
    BudgetStatus.EXCEEDED: 2,
}


@dataclass(frozen=True)
class BudgetVerdict:
    status: BudgetStatus
    count: int


@dataclass(frozen=True)
class StructureVerdict:
    missing: frozenset[StructuralPartKind]

    @property
    def complete(self) -> bool:
        return not self.missing


def count_symbols(text: str) -> int:
    """Number of Unicode code points in ``text``.

    Whitespace and punctuation count. This is the single counting rule used
    by every budget check in the package.
    """
    return len(text)


def check_budget(text: str, budget: CharacterBudget) -> BudgetVerdict:
    """Classify ``text`` against a budget by code-point count."""
    count = count_symbols(text)
    if count <= budget.base:
        status = BudgetStatus.WITHIN_BASE
    elif count <= budget.limit:
        status = BudgetStatus.WITHIN_EXTENSION
    else:
        status = BudgetStatus.EXCEEDED
    return BudgetVerdict(status, count)


def check_structure(
    parts_present: Iterable[StructuralPartKind],
    required: Iterable[StructuralPartKind],
) -> StructureVerdict:
    """Report which required parts are absent. Complete iff none are."""
    return StructureVerdict(missing=frozenset(required) - frozenset(parts_present))


def _validate_metadata_value(key: str, value: MetadataValue) -> None:
    if isinstance(value, bool) or isinstance(value, int):
        return
    if isinstance(value, str):
        for ch in value:
            if ch < " " and ch not in ("\n", "\t", "\r"):
                raise ValueError(f"metadata value for {key!r} contains unsupported control character")
        return
    raise ValueError(f"metadata value for {key!r} must be a string, integer or boolean")


@dataclass(frozen=True)
class PartSpec:
    """One structural part of a template: its meaning tags, format, budget
    and slot-bearing text pattern."""

    kind: StructuralPartKind
    semantics: frozenset[SemanticTag]
    format: Format
    budget: CharacterBudget
    pattern: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "semantics", frozenset(self.semantics))
        # Contact data carries no persuasive meaning; every other part must
        # declare at least one tag.
        if not self.semantics and self.kind is not StructuralPartKind.REFERENCE_INFO:
            raise ValueError(f"part {self.kind.value} must declare at least one semantic tag")
        try:
            validate_pattern(self.pattern)
        except PatternError as exc:
            raise ValueError(f"invalid pattern for part {self.kind.value}: {exc.message}") from exc


@dataclass(frozen=True)
class TemplateSpec:
    """A complete message template plus the metadata recommendation runs
    match against (audience, stage, product traits and similar attributes)."""

    id: str
    channel: str
    parts: tuple[PartSpec, ...]
    metadata: Mapping[str, MetadataValue] = field(default_factory=dict)

    def __post_init__(self) -> None:
        _require_identifier(self.id, "template id")
        _require_identifier(self.channel, "channel id")
        object.__setattr__(self, "parts", tuple(self.parts))
        if not self.parts:
            raise ValueError(f"template {self.id!r} declares no parts")
        kinds = [p.kind for p in self.parts]
        if len(set(kinds)) != len(kinds):
            raise ValueError(f"template {self.id!r} repeats a part kind")
        if kinds != sorted(kinds, key=canonical_index):
            raise ValueError(f"template {self.id!r} parts are not in canonical structure order")
        object.__setattr__(self, "metadata", dict(self.metadata))
        for key, value in self.metadata.items():
            _require_identifier(key, "metadata key")
            _validate_metadata_value(key, value)

    def part(self, kind: StructuralPartKind) -> PartSpec | None:
        for p in self.parts:
            if p.kind is kind:
                return p
        return None

    @property
    def part_kinds(self) -> frozenset[StructuralPartKind]:
        return frozenset(p.kind for p in self.parts)

    def formats(self) -> frozenset[Format]:
        return frozenset(p.format for p in self.parts)
