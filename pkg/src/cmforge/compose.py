"""Fill template slots into a concrete message and validate it against a
channel profile.

Over-budget text is reported, never truncated: trimming would silently change
the message's meaning. Landing in a channel's extension allowance is legal
but surfaced as a warning so the writer sees it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

from .model import (
    BudgetStatus,
    CharacterBudget,
    StructuralPartKind,
    TemplateSpec,
    canonical_index,
    check_budget,
    check_structure,
    is_identifier,
    part_kind_from_name,
)
from .patterns import iter_slots, render


class MissingSlotsError(Exception):
    """Bindings left slots unbound; carries every missing name at once."""

    def __init__(self, template_id: str, missing: Iterable[str]):
        self.template_id = template_id
        self.missing = tuple(sorted(set(missing)))
        names = ", ".join(self.missing)
        super().__init__(f"template {template_id!r} is missing bindings for: {names}")


class ProfileConfigError(Exception):
    """A channel profile cannot validate a part it has no budget for."""


@dataclass(frozen=True)
class ChannelProfile:
    """Per-channel budgets and required structure for one ad platform."""

    id: str
    display_name: str
    budgets: Mapping[StructuralPartKind, CharacterBudget]
    required_parts: frozenset[StructuralPartKind]

    def __post_init__(self) -> None:
        if not is_identifier(self.id):
            raise ValueError(f"channel id must match [a-z][a-z0-9_]*, got {self.id!r}")
        object.__setattr__(self, "budgets", dict(self.budgets))
        object.__setattr__(self, "required_parts", frozenset(self.required_parts))
        for kind in self.required_parts:
            if kind not in self.budgets:
                raise ValueError(
                    f"channel {self.id!r} requires part {kind.value!r} but gives it no budget"
                )


@dataclass(frozen=True)
class Message:
    """A rendered message: slot-filled text per part, plus the bindings that
    were actually consumed (unused input bindings are not recorded)."""

    template_id: str
    parts: Mapping[StructuralPartKind, str]
    bindings: Mapping[str, str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "parts", dict(self.parts))
        object.__setattr__(self, "bindings", dict(self.bindings))


class ViolationSeverity(Enum):
    ERROR = "error"
    WARNING = "warning"


class Verdict(Enum):
    PASS = "pass"
    FAIL = "fail"


#: Violation rule identifiers, the closed set reports may carry.
RULE_BUDGET_EXCEEDED = "budget_exceeded"
RULE_MISSING_PART = "missing_part"
RULE_WITHIN_EXTENSION = "within_extension"


@dataclass(frozen=True)
class Violation:
    part: StructuralPartKind
    rule: str
    severity: ViolationSeverity
    detail: str
    count: int | None = None
    limit: int | None = None
    missing: frozenset[StructuralPartKind] = field(default=frozenset())


@dataclass(frozen=True)
class ValidationReport:
    """Validation outcome. The verdict ignores warning-severity entries:
    a message inside a channel's extension allowance still passes."""

    verdict: Verdict
    violations: tuple[Violation, ...]

    def __post_init__(self) -> None:
        expected = Verdict.FAIL if self.errors else Verdict.PASS
        if self.verdict is not expected:
            raise ValueError("verdict does not match the violation list")

    @classmethod
    def from_violations(cls, violations: Iterable[Violation]) -> "ValidationReport":
        vs = tuple(violations)
        has_error = any(v.severity is ViolationSeverity.ERROR for v in vs)
        return cls(verdict=Verdict.FAIL if has_error else Verdict.PASS, violations=vs)

    @property
    def errors(self) -> tuple[Violation, ...]:
        return tuple(v for v in self.violations if v.severity is ViolationSeverity.ERROR)

    @property
    def warnings(self) -> tuple[Violation, ...]:
        return tuple(v for v in self.violations if v.severity is ViolationSeverity.WARNING)


def fill_slots(spec: TemplateSpec, bindings: Mapping[str, str]) -> Message:
    """Render every part of ``spec`` with ``bindings``.

    Substitution is a single pass: binding values are inserted verbatim and
    never rescanned for slot syntax. Escaped braces render as literals.
    Raises MissingSlotsError listing every unbound slot name; bindings for
    names the template never mentions are ignored (the returned message's
    ``bindings`` holds only the consumed subset).
    """
    for name, value in bindings.items():
        if not isinstance(value, str):
            raise TypeError(f"binding {name!r} must be a string, got {type(value).__name__}")
    needed: set[str] = set()
    for part in spec.parts:
        needed.update(name for name, _ in iter_slots(part.pattern))
    missing = needed - set(bindings)
    if missing:
        raise MissingSlotsError(spec.id, missing)
    rendered = {part.kind: render(part.pattern, bindings) for part in spec.parts}
    used = {name: bindings[name] for name in sorted(needed)}
    return Message(template_id=spec.id, parts=rendered, bindings=used)


def unused_bindings(provided: Mapping[str, str], message: Message) -> tuple[str, ...]:
    """Names the caller supplied that the template never consumed."""
    return tuple(sorted(set(provided) - set(message.bindings)))


def validate_message(
    message: Message, spec: TemplateSpec, profile: ChannelProfile
) -> ValidationReport:
    """Check a rendered message against a channel profile.

    Violations cover parts over the profile's base+extension limit and
    required parts that are absent; text inside the extension range yields a
    warning entry that does not fail the report.
    """
    violations: list[Violation] = []
    for kind in sorted(message.parts, key=canonical_index):
        budget = profile.budgets.get(kind)
        if budget is None:
            raise ProfileConfigError(
                f"channel {profile.id!r} has no budget configured for part {kind.value!r}"
            )
        verdict = check_budget(message.parts[kind], budget)
        if verdict.status is BudgetStatus.EXCEEDED:
            violations.append(
                Violation(
                    part=kind,
                    rule=RULE_BUDGET_EXCEEDED,
                    severity=ViolationSeverity.ERROR,
                    detail=f"{kind.value} is {verdict.count} symbols, limit {budget.limit}",
                    count=verdict.count,
                    limit=budget.limit,
                )
            )
        elif verdict.status is BudgetStatus.WITHIN_EXTENSION:
            violations.append(
                Violation(
                    part=kind,
                    rule=RULE_WITHIN_EXTENSION,
                    severity=ViolationSeverity.WARNING,
                    detail=(
                        f"{kind.value} is {verdict.count} symbols, over the base {budget.base} "
                        f"but within the extension limit {budget.limit}"
                    ),
                    count=verdict.count,
                    limit=budget.base,
                )
            )
    structure = check_structure(message.parts.keys(), profile.required_parts)
    for kind in sorted(structure.missing, key=canonical_index):
        violations.append(
            Violation(
                part=kind,
                rule=RULE_MISSING_PART,
                severity=ViolationSeverity.ERROR,
                detail=f"required part {kind.value} is missing",
                missing=frozenset({kind}),
            )
        )
    return ValidationReport.from_violations(violations)


# ---------------------------------------------------------------------------
# Channel profile JSON format

class ProfileSchemaError(ValueError):
    """Channel profile file violates the schema. ``path`` is a JSON path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def _budget_from_dict(obj: object, path: str) -> CharacterBudget:
    if not isinstance(obj, dict):
        raise ProfileSchemaError(path, "budget must be an object")
    unknown = set(obj) - {"base", "extension"}
    if unknown:
        raise ProfileSchemaError(path, f"unknown key {sorted(unknown)[0]!r}")
    if "base" not in obj:
        raise ProfileSchemaError(path, "missing key 'base'")
    base = obj["base"]
    extension = obj.get("extension", 0)
    for key, value in (("base", base), ("extension", extension)):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ProfileSchemaError(f"{path}.{key}", "must be an integer")
        if value < 0:
            raise ProfileSchemaError(f"{path}.{key}", "must be non-negative")
    return CharacterBudget(base=base, extension=extension)


def _profile_from_dict(obj: object, path: str) -> ChannelProfile:
    if not isinstance(obj, dict):
        raise ProfileSchemaError(path, "channel must be an object")
    unknown = set(obj) - {"id", "display_name", "budgets", "required"}
    if unknown:
        raise ProfileSchemaError(path, f"unknown key {sorted(unknown)[0]!r}")
    for key in ("id", "budgets", "required"):
        if key not in obj:
            raise ProfileSchemaError(path, f"missing key {key!r}")
    if not isinstance(obj["id"], str):
        raise ProfileSchemaError(f"{path}.id", "must be a string")
    display = obj.get("display_name", obj["id"])
    if not isinstance(display, str):
        raise ProfileSchemaError(f"{path}.display_name", "must be a string")
    if not isinstance(obj["budgets"], dict):
        raise ProfileSchemaError(f"{path}.budgets", "must be an object")
    budgets: dict[StructuralPartKind, CharacterBudget] = {}
    for name, raw in obj["budgets"].items():
        try:
            kind = part_kind_from_name(name)
        except KeyError:
            raise ProfileSchemaError(f"{path}.budgets.{name}", "unknown part kind") from None
        budgets[kind] = _budget_from_dict(raw, f"{path}.budgets.{name}")
    if not isinstance(obj["required"], list):
        raise ProfileSchemaError(f"{path}.required", "must be an array")
    required: set[StructuralPartKind] = set()
    for i, name in enumerate(obj["required"]):
        if not isinstance(name, str):
            raise ProfileSchemaError(f"{path}.required[{i}]", "must be a string")
        try:
            required.add(part_kind_from_name(name))
        except KeyError:
            raise ProfileSchemaError(f"{path}.required[{i}]", f"unknown part kind {name!r}") from None
    try:
        return ChannelProfile(
            id=obj["id"], display_name=display, budgets=budgets, required_parts=frozenset(required)
        )
    except ValueError as exc:
        raise ProfileSchemaError(path, str(exc)) from None


def channel_profiles_from_dict(data: object) -> list[ChannelProfile]:
    if not isinstance(data, dict):
        raise ProfileSchemaError("$", "top level must be an object")
    unknown = set(data) - {"channels"}
    if unknown:
        raise ProfileSchemaError("$", f"unknown key {sorted(unknown)[0]!r}")
    if "channels" not in data or not isinstance(data["channels"], list):
        raise ProfileSchemaError("$.channels", "must be an array")
    profiles: list[ChannelProfile] = []
    seen: set[str] = set()
    for i, raw in enumerate(data["channels"]):
        profile = _profile_from_dict(raw, f"$.channels[{i}]")
        if profile.id in seen:
            raise ProfileSchemaError(f"$.channels[{i}].id", f"duplicate channel id {profile.id!r}")
        seen.add(profile.id)
        profiles.append(profile)
    return profiles


def parse_channel_profiles_json(text: str) -> list[ChannelProfile]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProfileSchemaError("$", f"invalid JSON: {exc}") from None
    return channel_profiles_from_dict(data)
