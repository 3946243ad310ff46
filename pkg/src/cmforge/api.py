"""Request validation and response payloads shared by the HTTP service and
the CLI.

Both surfaces build the same dict payloads and serialize them with
``canonical_json``, so a CLI ``--json`` run and the matching HTTP response
are byte-identical for the same workspace snapshot. Payloads never carry
timestamps or other run-varying data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib.resources import files
from pathlib import Path
from typing import Mapping

from .catalog import Catalog, CatalogError, LoadIssue, load_catalog, load_channel_profiles, load_rule_sets
from .compose import (
    ChannelProfile,
    Message,
    MissingSlotsError,
    ValidationReport,
    fill_slots,
    unused_bindings,
    validate_message,
)
from .dsl import list_slots
from .model import TemplateSpec, canonical_index, check_budget, is_identifier
from .recommend import derived_facts, rank_templates
from .rules import Fact, FactBase, FactConflictError, FiringTrace, RuleSet, run_forward_chain

DEFAULT_RULESET = "demo"
DEFAULT_K = 5
VALIDATE_DEBOUNCE_MS = 300

#: The closed set of machine error codes any surface may emit.
ERROR_CODES = frozenset(
    {
        "validation_schema",
        "unknown_ruleset",
        "unknown_template",
        "unknown_channel",
        "fact_conflict",
        "missing_slots",
    }
)

_HTTP_STATUS = {
    "validation_schema": 400,
    "unknown_ruleset": 404,
    "unknown_template": 404,
    "unknown_channel": 404,
    "fact_conflict": 409,
    "missing_slots": 422,
}


class ApiError(Exception):
    """A domain failure with a machine code from the documented closed set."""

    def __init__(self, code: str, message: str, details: dict | None = None):
        assert code in ERROR_CODES, code
        self.code = code
        self.status = _HTTP_STATUS[code]
        self.details = details or {}
        super().__init__(message)

    @property
    def message(self) -> str:
        return str(self)

    def payload(self) -> dict:
        return {"code": self.code, "message": self.message, "details": self.details}


def canonical_json(payload: object) -> str:
    """The one JSON form both surfaces emit: sorted keys, 2-space indent,
    raw UTF-8."""
    return json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2)


# ---------------------------------------------------------------------------
# Workspace: one immutable snapshot of everything the surfaces serve

@dataclass(frozen=True)
class Workspace:
    catalog: Catalog
    profiles: dict[str, ChannelProfile]
    rulesets: dict[str, RuleSet]

    def __post_init__(self) -> None:
        object.__setattr__(self, "profiles", dict(self.profiles))
        object.__setattr__(self, "rulesets", dict(self.rulesets))


def default_data_root() -> Path:
    """The demo data shipped inside the package."""
    return Path(str(files("cmforge").joinpath("data")))


@dataclass(frozen=True)
class DataPaths:
    """Filesystem layout of a workspace: ``catalog/`` with `.cmt` files,
    ``rules/`` with `*.rules.json`, and a ``channels.json``."""

    catalog_dir: Path
    rules_dir: Path
    channels_file: Path

    @classmethod
    def under(cls, root: str | Path) -> "DataPaths":
        root = Path(root)
        return cls(
            catalog_dir=root / "catalog",
            rules_dir=root / "rules",
            channels_file=root / "channels.json",
        )


def load_workspace(paths: DataPaths) -> Workspace:
    """Load and cross-check a workspace; raises CatalogError with every
    aggregated issue. A template whose channel has no profile is an error."""
    catalog = load_catalog(paths.catalog_dir)
    profiles = {p.id: p for p in load_channel_profiles(paths.channels_file)}
    rulesets = load_rule_sets(paths.rules_dir)
    issues = [
        LoadIssue(
            path=str(paths.catalog_dir),
            message=f"template {spec.id!r} targets unknown channel {spec.channel!r}",
        )
        for spec in catalog.ordered()
        if spec.channel not in profiles
    ]
    if issues:
        raise CatalogError(issues)
    return Workspace(catalog=catalog, profiles=profiles, rulesets=rulesets)


# ---------------------------------------------------------------------------
# Request validation

@dataclass(frozen=True)
class SessionRequest:
    """A recommendation request: session facts plus ranking controls."""

    facts: dict[str, object]
    ruleset_id: str = DEFAULT_RULESET
    k: int = DEFAULT_K

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be a positive integer")
        for attr in self.facts:
            if not is_identifier(attr):
                raise ValueError(f"fact attribute {attr!r} must match [a-z][a-z0-9_]*")


def _schema_error(message: str) -> ApiError:
    return ApiError("validation_schema", message)


def parse_session_request(body: object) -> SessionRequest:
    if not isinstance(body, dict):
        raise _schema_error("request body must be a JSON object")
    unknown = set(body) - {"facts", "ruleset_id", "k"}
    if unknown:
        raise _schema_error(f"unknown request key {sorted(unknown)[0]!r}")
    facts = body.get("facts", {})
    if not isinstance(facts, dict):
        raise _schema_error("'facts' must be an object")
    for attr, value in facts.items():
        if not is_identifier(attr):
            raise _schema_error(f"fact attribute {attr!r} must match [a-z][a-z0-9_]*")
        if not isinstance(value, (str, int, bool)) or isinstance(value, float):
            raise _schema_error(f"fact {attr!r} must be a string, integer or boolean")
    ruleset_id = body.get("ruleset_id", DEFAULT_RULESET)
    if not isinstance(ruleset_id, str):
        raise _schema_error("'ruleset_id' must be a string")
    k = body.get("k", DEFAULT_K)
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise _schema_error("'k' must be a positive integer")
    return SessionRequest(facts=dict(facts), ruleset_id=ruleset_id, k=k)


def parse_compose_request(body: object) -> tuple[str, dict[str, str], str]:
    if not isinstance(body, dict):
        raise _schema_error("request body must be a JSON object")
    unknown = set(body) - {"template_id", "bindings", "channel_id"}
    if unknown:
        raise _schema_error(f"unknown request key {sorted(unknown)[0]!r}")
    for key in ("template_id", "channel_id"):
        if key not in body or not isinstance(body[key], str):
            raise _schema_error(f"'{key}' must be a string")
    bindings = body.get("bindings", {})
    if not isinstance(bindings, dict):
        raise _schema_error("'bindings' must be an object")
    for name, value in bindings.items():
        if not isinstance(value, str):
            raise _schema_error(f"binding {name!r} must be a string")
    return body["template_id"], dict(bindings), body["channel_id"]


# ---------------------------------------------------------------------------
# Payload builders

def _fact_obj(fact: Fact) -> dict:
    return {"attr": fact.attribute, "value": fact.value}


def _pair_objs(pairs: tuple[tuple[str, object], ...]) -> list[dict]:
    return [{"attr": a, "value": v} for a, v in pairs]


def _trace_objs(trace: FiringTrace) -> list[dict]:
    return [
        {"rule_id": firing.rule_id, "asserted": [_fact_obj(f) for f in firing.asserted]}
        for firing in trace
    ]


def _budget_obj(base: int, extension: int) -> dict:
    return {"base": base, "extension": extension}


def _template_obj(spec: TemplateSpec) -> dict:
    return {
        "id": spec.id,
        "channel": spec.channel,
        "metadata": dict(spec.metadata),
        "parts": [
            {
                "kind": part.kind.value,
                "semantics": sorted(t.name for t in part.semantics),
                "format": part.format.name,
                "budget": _budget_obj(part.budget.base, part.budget.extension),
                "text": part.pattern,
            }
            for part in spec.parts
        ],
        "slots": [
            {"name": slot.name, "part": slot.part.value, "line": slot.line, "column": slot.column}
            for slot in list_slots(spec)
        ],
    }


def _violation_obj(violation) -> dict:
    obj = {
        "part": violation.part.value,
        "rule": violation.rule,
        "severity": violation.severity.value,
        "detail": violation.detail,
    }
    if violation.count is not None:
        obj["count"] = violation.count
    if violation.limit is not None:
        obj["limit"] = violation.limit
    return obj


def _report_obj(report: ValidationReport) -> dict:
    return {
        "verdict": report.verdict.value,
        "violations": [_violation_obj(v) for v in report.violations],
    }


def config_payload() -> dict:
    return {"api_base": "/api", "validate_debounce_ms": VALIDATE_DEBOUNCE_MS}


def channels_payload(ws: Workspace) -> dict:
    channels = []
    for channel_id in sorted(ws.profiles):
        profile = ws.profiles[channel_id]
        channels.append(
            {
                "id": profile.id,
                "display_name": profile.display_name,
                "budgets": {
                    kind.value: _budget_obj(b.base, b.extension)
                    for kind, b in profile.budgets.items()
                },
                "required": [
                    kind.value for kind in sorted(profile.required_parts, key=canonical_index)
                ],
            }
        )
    return {"channels": channels}


def templates_payload(ws: Workspace) -> dict:
    return {"templates": [_template_obj(spec) for spec in ws.catalog.ordered()]}


def rulesets_payload(ws: Workspace) -> dict:
    out = []
    for name in sorted(ws.rulesets):
        ruleset = ws.rulesets[name]
        attributes = sorted({c.attribute for rule in ruleset for c in rule.conditions})
        out.append({"id": name, "rules": len(ruleset), "condition_attributes": attributes})
    return {"rulesets": out}


def recommend_payload(ws: Workspace, request: SessionRequest) -> dict:
    """Run the chain and rank the catalog; the shape every surface returns.

    Raises ApiError: unknown_ruleset, validation_schema (bad facts) or
    fact_conflict with the offending rule id in the details.
    """
    ruleset = ws.rulesets.get(request.ruleset_id)
    if ruleset is None:
        raise ApiError(
            "unknown_ruleset",
            f"no ruleset named {request.ruleset_id!r}",
            {"ruleset_id": request.ruleset_id, "known": sorted(ws.rulesets)},
        )
    try:
        base = FactBase(request.facts)
    except (FactConflictError, ValueError) as exc:
        raise _schema_error(f"invalid facts: {exc}") from exc
    try:
        final, trace = run_forward_chain(base, ruleset)
    except FactConflictError as exc:
        raise ApiError(
            "fact_conflict",
            str(exc),
            {"rule_id": exc.rule_id, "attribute": exc.attribute},
        ) from exc
    derived = derived_facts(final)
    recommendations = rank_templates(derived, ws.catalog.ordered(), trace, k=request.k)
    return {
        "facts": dict(request.facts),
        "ruleset_id": request.ruleset_id,
        "k": request.k,
        "derived": [_fact_obj(f) for f in derived],
        "trace": _trace_objs(trace),
        "recommendations": [
            {
                "template_id": r.template_id,
                "score": r.score,
                "matched": _pair_objs(r.matched),
                "unmatched": _pair_objs(r.unmatched),
            }
            for r in recommendations
        ],
    }


def _resolve(ws: Workspace, template_id: str, channel_id: str) -> tuple[TemplateSpec, ChannelProfile]:
    spec = ws.catalog.get(template_id)
    if spec is None:
        raise ApiError(
            "unknown_template", f"no template named {template_id!r}", {"template_id": template_id}
        )
    profile = ws.profiles.get(channel_id)
    if profile is None:
        raise ApiError(
            "unknown_channel",
            f"no channel named {channel_id!r}",
            {"channel_id": channel_id, "known": sorted(ws.profiles)},
        )
    return spec, profile


def _compose(
    ws: Workspace, template_id: str, bindings: Mapping[str, str], channel_id: str
) -> tuple[TemplateSpec, ChannelProfile, Message, ValidationReport, tuple[str, ...]]:
    spec, profile = _resolve(ws, template_id, channel_id)
    try:
        message = fill_slots(spec, bindings)
    except MissingSlotsError as exc:
        raise ApiError(
            "missing_slots",
            str(exc),
            {"template_id": template_id, "missing": list(exc.missing)},
        ) from exc
    report = validate_message(message, spec, profile)
    return spec, profile, message, report, unused_bindings(bindings, message)


def validate_payload(
    ws: Workspace, template_id: str, bindings: Mapping[str, str], channel_id: str
) -> dict:
    """Rendered parts with per-part counts against the channel's limits."""
    spec, profile, message, report, unused = _compose(ws, template_id, bindings, channel_id)
    parts = []
    for kind in sorted(message.parts, key=canonical_index):
        text = message.parts[kind]
        budget = profile.budgets[kind]
        verdict = check_budget(text, budget)
        parts.append(
            {
                "kind": kind.value,
                "text": text,
                "count": verdict.count,
                "base": budget.base,
                "extension": budget.extension,
                "limit": budget.limit,
                "status": verdict.status.value,
            }
        )
    return {
        "template_id": spec.id,
        "channel_id": profile.id,
        "verdict": report.verdict.value,
        "parts": parts,
        "violations": [_violation_obj(v) for v in report.violations],
        "unused_bindings": list(unused),
    }


def render_payload(
    ws: Workspace, template_id: str, bindings: Mapping[str, str], channel_id: str
) -> dict:
    """The message artifact: part texts in canonical order, the plain-text
    concatenation, consumed bindings and the embedded validation report."""
    spec, profile, message, report, unused = _compose(ws, template_id, bindings, channel_id)
    ordered_kinds = sorted(message.parts, key=canonical_index)
    return {
        "template_id": spec.id,
        "channel_id": profile.id,
        "bindings": dict(message.bindings),
        "unused_bindings": list(unused),
        "parts": [{"kind": k.value, "text": message.parts[k]} for k in ordered_kinds],
        "plain_text": "\n".join(message.parts[k] for k in ordered_kinds),
        "report": _report_obj(report),
    }


def lint_payload(results: list[tuple[str, list]], ok: bool) -> dict:
    """Shape of CLI lint output; ``results`` pairs a path with diagnostics."""
    return {
        "ok": ok,
        "files": [
            {
                "path": path,
                "diagnostics": [
                    {
                        "severity": d.severity.value,
                        "message": d.message,
                        "line": d.line,
                        "column": d.column,
                    }
                    for d in diags
                ],
            }
            for path, diags in results
        ],
    }
