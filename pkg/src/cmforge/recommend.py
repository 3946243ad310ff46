"""Rank catalog templates against the facts a rule run derived.

Derived facts live in the ``rec_*`` attribute namespace. A fact
``(rec_X, v)`` matches a template when its metadata attribute ``X`` equals
``v``; ``rec_format`` instead matches when any part of the template declares
format ``v``, since format advice applies template-wide. The score is the
plain matched fraction, chosen for auditability over cleverness.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .model import TemplateSpec
from .rules import Fact, FactBase, FactValue, FiringTrace, RuleSet, _same_value, run_forward_chain

REC_PREFIX = "rec_"
REC_FORMAT = "rec_format"

MatchPair = tuple[str, FactValue]


@dataclass(frozen=True)
class Recommendation:
    """One ranked template with the evidence behind its score."""

    template_id: str
    score: float
    matched: tuple[MatchPair, ...]
    unmatched: tuple[MatchPair, ...]
    trace: FiringTrace


def derived_facts(base: FactBase) -> tuple[Fact, ...]:
    """The ``rec_*`` facts of a base, sorted by attribute."""
    return tuple(Fact(a, v) for a, v in base.items() if a.startswith(REC_PREFIX))


def _fact_matches(spec: TemplateSpec, fact: Fact) -> bool:
    if fact.attribute == REC_FORMAT:
        return isinstance(fact.value, str) and any(
            part.format.name == fact.value for part in spec.parts
        )
    key = fact.attribute[len(REC_PREFIX):]
    if key not in spec.metadata:
        return False
    return _same_value(spec.metadata[key], fact.value)


def score_template(
    spec: TemplateSpec, derived: Iterable[Fact]
) -> tuple[float, tuple[MatchPair, ...], tuple[MatchPair, ...]]:
    """Score one template against derived ``rec_*`` facts.

    Returns (score, matched, unmatched) where score is the matched fraction,
    or 0.0 with two empty tuples when nothing was derived.
    """
    matched: list[MatchPair] = []
    unmatched: list[MatchPair] = []
    for fact in sorted(derived, key=lambda f: f.attribute):
        if not fact.attribute.startswith(REC_PREFIX):
            raise ValueError(f"derived fact {fact.attribute!r} is outside the rec_* namespace")
        if _fact_matches(spec, fact):
            matched.append((fact.attribute, fact.value))
        else:
            unmatched.append((fact.attribute, fact.value))
    total = len(matched) + len(unmatched)
    score = len(matched) / total if total else 0.0
    return score, tuple(matched), tuple(unmatched)


def rank_templates(
    derived: tuple[Fact, ...],
    catalog: Sequence[TemplateSpec],
    trace: FiringTrace,
    k: int,
) -> list[Recommendation]:
    """Score every template against already-derived facts and return the top
    ``k`` by (score descending, template id ascending). Output order is
    total; equal inputs always rank identically."""
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    ranked = []
    for spec in catalog:
        score, matched, unmatched = score_template(spec, derived)
        ranked.append(
            Recommendation(
                template_id=spec.id,
                score=score,
                matched=matched,
                unmatched=unmatched,
                trace=trace,
            )
        )
    ranked.sort(key=lambda r: (-r.score, r.template_id))
    return ranked[:k]


def recommend(
    base: FactBase,
    rules: RuleSet,
    catalog: Sequence[TemplateSpec],
    k: int = 5,
) -> list[Recommendation]:
    """Run the forward chain once, then rank the catalog against the derived
    ``rec_*`` facts. Propagates FactConflictError from the rule run."""
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    final, trace = run_forward_chain(base, rules)
    return rank_templates(derived_facts(final), catalog, trace, k)
