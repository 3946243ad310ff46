"""Load, save and index template catalogs, rule sets and channel profiles.

Templates live in `.cmt` files (human-authored, line diagnostics); rule sets
and channel profiles live in JSON. Loading aggregates every problem it finds
instead of stopping at the first, and a catalog is only returned when the
whole tree is clean. Catalogs are immutable snapshots; a running service
swaps a freshly loaded snapshot in atomically rather than mutating one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .compose import ChannelProfile, ProfileSchemaError, parse_channel_profiles_json
from .dsl import (
    FILE_EXTENSION,
    ParseDiagnostic,
    Severity,
    TemplateSource,
    parse_source,
    serialize_templates,
)
from .model import DEFAULT_FORMATS, Format, TemplateSpec
from .rules import RuleSchemaError, RuleSet, parse_rules_json

RULES_SUFFIX = ".rules.json"

#: Name of the vocabulary carrier written by save_catalog. Template ids must
#: match [a-z][a-z0-9_]*, so the leading underscore can never collide.
FORMATS_FILE = "_formats" + FILE_EXTENSION


@dataclass(frozen=True)
class LoadIssue:
    """One problem found while loading, with enough position to act on."""

    path: str
    message: str
    severity: Severity = Severity.ERROR
    line: int | None = None
    column: int | None = None

    def __str__(self) -> str:
        pos = f":{self.line}:{self.column}" if self.line is not None else ""
        return f"{self.path}{pos}: {self.severity.value}: {self.message}"


class CatalogError(Exception):
    """Loading failed; ``issues`` holds every aggregated problem."""

    def __init__(self, issues: list[LoadIssue]):
        self.issues = tuple(issues)
        summary = "; ".join(str(i) for i in issues[:3])
        more = f" (+{len(issues) - 3} more)" if len(issues) > 3 else ""
        super().__init__(f"catalog load failed: {summary}{more}")


@dataclass(frozen=True)
class Catalog:
    """Immutable snapshot of all loaded templates plus the format vocabulary
    they were validated against. Provenance paths do not take part in
    equality; two catalogs are equal when their templates and formats are."""

    templates: dict[str, TemplateSpec]
    formats: frozenset[Format] = DEFAULT_FORMATS
    source_paths: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "templates", dict(self.templates))
        for template_id, spec in self.templates.items():
            if template_id != spec.id:
                raise ValueError(f"catalog key {template_id!r} does not match template id {spec.id!r}")
            undeclared = spec.formats() - self.formats
            if undeclared:
                name = sorted(f.name for f in undeclared)[0]
                raise ValueError(f"template {spec.id!r} uses undeclared format {name!r}")

    def __len__(self) -> int:
        return len(self.templates)

    def get(self, template_id: str) -> TemplateSpec | None:
        return self.templates.get(template_id)

    def ordered(self) -> list[TemplateSpec]:
        """Templates sorted by id; the order every listing surface uses."""
        return [self.templates[i] for i in sorted(self.templates)]


def _issues_from_diagnostics(path: Path, diags: tuple[ParseDiagnostic, ...]) -> list[LoadIssue]:
    return [
        LoadIssue(path=str(path), message=d.message, severity=d.severity, line=d.line, column=d.column)
        for d in diags
    ]


def _read_text(path: Path, issues: list[LoadIssue]) -> str | None:
    try:
        data = path.read_bytes()
    except OSError as exc:
        issues.append(LoadIssue(path=str(path), message=f"cannot read file: {exc.strerror}"))
        return None
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        issues.append(LoadIssue(path=str(path), message=f"invalid UTF-8 at byte {exc.start}"))
        return None


def load_catalog(root_path: str | Path) -> Catalog:
    """Parse every ``*.cmt`` file under ``root_path`` (recursively) into one
    catalog.

    Format declarations from all files are collected first so a template may
    use a format declared in a sibling file. Raises CatalogError carrying
    every diagnostic when anything is wrong; never returns a partial catalog.
    """
    root = Path(root_path)
    if not root.is_dir():
        raise CatalogError([LoadIssue(path=str(root), message="catalog directory does not exist")])
    paths = sorted(root.rglob(f"*{FILE_EXTENSION}"))
    issues: list[LoadIssue] = []
    texts: dict[Path, str] = {}
    for path in paths:
        text = _read_text(path, issues)
        if text is not None:
            texts[path] = text
    # Pass 1: the catalog-wide format vocabulary.
    declared: set[Format] = set()
    for path, text in texts.items():
        declared.update(parse_source(TemplateSource(text, origin=str(path))).declared_formats)
    vocabulary = DEFAULT_FORMATS | frozenset(declared)
    # Pass 2: full parse against the merged vocabulary.
    templates: dict[str, TemplateSpec] = {}
    owner: dict[str, Path] = {}
    for path, text in texts.items():
        parsed = parse_source(TemplateSource(text, origin=str(path)), extra_formats=vocabulary)
        issues.extend(_issues_from_diagnostics(path, parsed.diagnostics))
        if not parsed.ok:
            continue
        for spec in parsed.templates:
            if spec.id in owner:
                issues.append(
                    LoadIssue(
                        path=str(path),
                        message=f"duplicate template id {spec.id!r}, first declared in {owner[spec.id]}",
                    )
                )
                continue
            owner[spec.id] = path
            templates[spec.id] = spec
    if any(i.severity is Severity.ERROR for i in issues):
        raise CatalogError([i for i in issues if i.severity is Severity.ERROR])
    return Catalog(
        templates=templates,
        formats=vocabulary,
        source_paths=tuple(str(p) for p in paths),
    )


def save_catalog(catalog: Catalog, root_path: str | Path) -> list[Path]:
    """Write one canonical ``<id>.cmt`` per template under ``root_path``.

    Non-default formats are written to a separate vocabulary file so that
    ``load_catalog(save_catalog(c))`` restores an equal catalog even when a
    declared format is not used by any template yet.
    """
    root = Path(root_path)
    root.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    extra = catalog.formats - DEFAULT_FORMATS
    if extra:
        path = root / FORMATS_FILE
        lines = "".join(f"format {name}\n" for name in sorted(f.name for f in extra))
        path.write_text(lines, encoding="utf-8")
        written.append(path)
    for spec in catalog.ordered():
        path = root / f"{spec.id}{FILE_EXTENSION}"
        path.write_text(serialize_templates([spec]), encoding="utf-8")
        written.append(path)
    return written


def load_channel_profiles(path: str | Path) -> list[ChannelProfile]:
    """Parse a channel profile JSON file; errors carry the JSON path."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise CatalogError([LoadIssue(path=str(p), message=f"cannot read file: {exc.strerror}")]) from None
    except UnicodeDecodeError as exc:
        raise CatalogError([LoadIssue(path=str(p), message=f"invalid UTF-8 at byte {exc.start}")]) from None
    try:
        return parse_channel_profiles_json(text)
    except ProfileSchemaError as exc:
        raise CatalogError([LoadIssue(path=str(p), message=str(exc))]) from exc


def load_rule_sets(rules_dir: str | Path) -> dict[str, RuleSet]:
    """Load every ``<name>.rules.json`` under a directory, keyed by name."""
    root = Path(rules_dir)
    if not root.is_dir():
        raise CatalogError([LoadIssue(path=str(root), message="rules directory does not exist")])
    out: dict[str, RuleSet] = {}
    issues: list[LoadIssue] = []
    for path in sorted(root.glob(f"*{RULES_SUFFIX}")):
        name = path.name[: -len(RULES_SUFFIX)]
        text = _read_text(path, issues)
        if text is None:
            continue
        try:
            out[name] = parse_rules_json(text)
        except RuleSchemaError as exc:
            issues.append(LoadIssue(path=str(path), message=str(exc)))
    if issues:
        raise CatalogError(issues)
    return out
