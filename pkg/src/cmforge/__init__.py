"""cmforge: design, recommend and validate promotional message templates.

A template couples meaning tags, a stylistic format, a per-part character
budget and an ordered structure. The package provides the `.cmt` template
format, a forward-chaining rule engine that turns product/audience facts
into template recommendations, slot filling with per-channel budget
validation, and HTTP/CLI surfaces over a file-based catalog.
"""

from .catalog import Catalog, CatalogError, LoadIssue, load_catalog, load_channel_profiles, load_rule_sets, save_catalog
from .compose import (
    ChannelProfile,
    Message,
    MissingSlotsError,
    ProfileConfigError,
    ValidationReport,
    Verdict,
    Violation,
    ViolationSeverity,
    fill_slots,
    unused_bindings,
    validate_message,
)
from .dsl import (
    ParseDiagnostic,
    ParseResult,
    Severity,
    Slot,
    SourceParse,
    TemplateSource,
    list_slots,
    parse_source,
    parse_template,
    serialize_template,
    serialize_templates,
)
from .model import (
    DEFAULT_FORMATS,
    DEFAULT_SEMANTIC_TAGS,
    BudgetStatus,
    BudgetVerdict,
    CharacterBudget,
    Format,
    PartSpec,
    SemanticTag,
    StructuralPartKind,
    StructureVerdict,
    TemplateSpec,
    check_budget,
    check_structure,
    count_symbols,
)
from .recommend import Recommendation, recommend, score_template
from .rules import (
    Condition,
    ConditionOp,
    Fact,
    FactBase,
    FactConflictError,
    FiringTrace,
    ProductionRule,
    RuleFiring,
    RuleSchemaError,
    RuleSet,
    assert_fact,
    match_rule,
    parse_rules_json,
    run_forward_chain,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetStatus",
    "BudgetVerdict",
    "Catalog",
    "CatalogError",
    "ChannelProfile",
    "CharacterBudget",
    "Condition",
    "ConditionOp",
    "DEFAULT_FORMATS",
    "DEFAULT_SEMANTIC_TAGS",
    "Fact",
    "FactBase",
    "FactConflictError",
    "FiringTrace",
    "Format",
    "LoadIssue",
    "Message",
    "MissingSlotsError",
    "ParseDiagnostic",
    "ParseResult",
    "PartSpec",
    "ProductionRule",
    "ProfileConfigError",
    "Recommendation",
    "RuleFiring",
    "RuleSchemaError",
    "RuleSet",
    "SemanticTag",
    "Severity",
    "Slot",
    "SourceParse",
    "StructuralPartKind",
    "StructureVerdict",
    "TemplateSource",
    "TemplateSpec",
    "ValidationReport",
    "Verdict",
    "Violation",
    "ViolationSeverity",
    "assert_fact",
    "check_budget",
    "check_structure",
    "count_symbols",
    "fill_slots",
    "list_slots",
    "load_catalog",
    "load_channel_profiles",
    "load_rule_sets",
    "match_rule",
    "parse_rules_json",
    "parse_source",
    "parse_template",
    "recommend",
    "run_forward_chain",
    "save_catalog",
    "score_template",
    "serialize_template",
    "serialize_templates",
    "unused_bindings",
    "validate_message",
]
