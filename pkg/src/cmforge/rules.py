"""Propositional forward-chaining production system.

Facts are (attribute, value) pairs with one value per attribute. Rules are
IF-conjunction THEN-assertions. Chaining fires each rule at most once,
selecting among matching rules by priority (descending), then condition count
(descending), then rule id (ascending). That order is total, so runs are
deterministic and independent of the textual order of the rules. Facts are
never retracted; a conflicting assertion aborts the run with the offending
rule named.

Booleans and integers are distinct fact values here even though Python treats
``True == 1``; all comparisons in this module are type-aware.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Mapping, Union

from .model import is_identifier

FactValue = Union[str, int, bool]


def _same_value(a: FactValue, b: FactValue) -> bool:
    return isinstance(a, bool) == isinstance(b, bool) and a == b


def _check_value(value: object, what: str) -> None:
    if not isinstance(value, (str, int, bool)):
        raise ValueError(f"{what} must be a string, integer or boolean, got {type(value).__name__}")


class FactConflictError(Exception):
    """An attribute was asserted with two different values."""

    def __init__(
        self,
        attribute: str,
        existing: FactValue,
        incoming: FactValue,
        rule_id: str | None = None,
    ):
        self.attribute = attribute
        self.existing = existing
        self.incoming = incoming
        self.rule_id = rule_id
        where = f" (while firing rule {rule_id!r})" if rule_id else ""
        super().__init__(
            f"fact conflict on {attribute!r}: already {existing!r}, asserted {incoming!r}{where}"
        )


@dataclass(frozen=True)
class Fact:
    attribute: str
    value: FactValue

    def __post_init__(self) -> None:
        if not is_identifier(self.attribute):
            raise ValueError(f"fact attribute must match [a-z][a-z0-9_]*, got {self.attribute!r}")
        _check_value(self.value, f"value of fact {self.attribute!r}")


class FactBase:
    """Immutable snapshot of asserted facts; assertion returns a new base."""

    __slots__ = ("_facts",)

    def __init__(self, facts: Mapping[str, FactValue] | Iterable[Fact] = ()):
        store: dict[str, FactValue] = {}
        pairs: Iterable[tuple[str, FactValue]]
        if isinstance(facts, Mapping):
            pairs = facts.items()
        else:
            pairs = ((f.attribute, f.value) for f in facts)
        for attribute, value in pairs:
            Fact(attribute, value)  # validates
            if attribute in store and not _same_value(store[attribute], value):
                raise FactConflictError(attribute, store[attribute], value)
            store[attribute] = value
        self._facts = store

    def __len__(self) -> int:
        return len(self._facts)

    def __contains__(self, attribute: str) -> bool:
        return attribute in self._facts

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(self._facts))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FactBase):
            return NotImplemented
        if self._facts.keys() != other._facts.keys():
            return False
        return all(_same_value(v, other._facts[k]) for k, v in self._facts.items())

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={self._facts[k]!r}" for k in sorted(self._facts))
        return f"FactBase({inner})"

    def get(self, attribute: str) -> FactValue | None:
        return self._facts.get(attribute)

    def items(self) -> list[tuple[str, FactValue]]:
        """Facts as (attribute, value) pairs, sorted by attribute."""
        return sorted(self._facts.items())

    def assert_fact(self, fact: Fact) -> "FactBase":
        """Base extended with ``fact``. Re-asserting the identical pair is an
        idempotent no-op; a different value for a held attribute raises."""
        existing = self._facts.get(fact.attribute)
        if fact.attribute in self._facts:
            if _same_value(existing, fact.value):
                return self
            raise FactConflictError(fact.attribute, existing, fact.value)
        new = FactBase.__new__(FactBase)
        store = dict(self._facts)
        store[fact.attribute] = fact.value
        new._facts = store
        return new

    def issuperset(self, other: "FactBase") -> bool:
        return all(
            k in self._facts and _same_value(self._facts[k], v)
            for k, v in other._facts.items()
        )


def assert_fact(base: FactBase, fact: Fact) -> FactBase:
    return base.assert_fact(fact)


class ConditionOp(Enum):
    EQ = "eq"
    NEQ = "neq"
    IN_SET = "in"
    LT = "lt"
    GT = "gt"


@dataclass(frozen=True)
class Condition:
    attribute: str
    op: ConditionOp
    operand: FactValue | frozenset[FactValue]

    def __post_init__(self) -> None:
        if not is_identifier(self.attribute):
            raise ValueError(f"condition attribute must match [a-z][a-z0-9_]*, got {self.attribute!r}")
        if self.op is ConditionOp.IN_SET:
            if not isinstance(self.operand, (frozenset, set, list, tuple)):
                raise ValueError(f"'in' condition on {self.attribute!r} needs a set of values")
            object.__setattr__(self, "operand", frozenset(self.operand))
            if not self.operand:
                raise ValueError(f"'in' condition on {self.attribute!r} needs a nonempty value set")
            for v in self.operand:
                _check_value(v, f"'in' operand for {self.attribute!r}")
        elif self.op in (ConditionOp.LT, ConditionOp.GT):
            if isinstance(self.operand, bool) or not isinstance(self.operand, int):
                raise ValueError(f"{self.op.value!r} condition on {self.attribute!r} needs an integer operand")
        else:
            _check_value(self.operand, f"operand for {self.attribute!r}")

    def satisfied_by(self, base: FactBase) -> bool:
        """Closed-world evaluation: an absent attribute satisfies nothing,
        including ``neq``."""
        if self.attribute not in base:
            return False
        value = base.get(self.attribute)
        if self.op is ConditionOp.EQ:
            return _same_value(value, self.operand)
        if self.op is ConditionOp.NEQ:
            return not _same_value(value, self.operand)
        if self.op is ConditionOp.IN_SET:
            return any(_same_value(value, v) for v in self.operand)
        if not isinstance(value, int) or isinstance(value, bool):
            return False
        if self.op is ConditionOp.LT:
            return value < self.operand
        return value > self.operand


@dataclass(frozen=True)
class ProductionRule:
    id: str
    priority: int
    conditions: tuple[Condition, ...]
    actions: tuple[Fact, ...]

    def __post_init__(self) -> None:
        if not is_identifier(self.id):
            raise ValueError(f"rule id must match [a-z][a-z0-9_]*, got {self.id!r}")
        if isinstance(self.priority, bool) or not isinstance(self.priority, int):
            raise ValueError(f"rule {self.id!r} priority must be an integer")
        object.__setattr__(self, "conditions", tuple(self.conditions))
        object.__setattr__(self, "actions", tuple(self.actions))
        if not self.conditions:
            raise ValueError(f"rule {self.id!r} has no conditions")
        if not self.actions:
            raise ValueError(f"rule {self.id!r} has no actions")
        # Guard against rules that deny their own assertion.
        for action in self.actions:
            for cond in self.conditions:
                if (
                    cond.op is ConditionOp.NEQ
                    and cond.attribute == action.attribute
                    and _same_value(cond.operand, action.value)
                ):
                    raise ValueError(
                        f"rule {self.id!r} asserts {action.attribute!r}="
                        f"{action.value!r} while requiring it to differ"
                    )


@dataclass(frozen=True)
class RuleFiring:
    rule_id: str
    asserted: tuple[Fact, ...]


FiringTrace = tuple[RuleFiring, ...]


class RuleSet:
    """An id-unique collection of rules; iteration order is load order but
    never affects chaining results."""

    __slots__ = ("_rules", "_by_id")

    def __init__(self, rules: Iterable[ProductionRule]):
        self._rules = tuple(rules)
        self._by_id: dict[str, ProductionRule] = {}
        for rule in self._rules:
            if rule.id in self._by_id:
                raise ValueError(f"duplicate rule id {rule.id!r}")
            self._by_id[rule.id] = rule

    def __iter__(self) -> Iterator[ProductionRule]:
        return iter(self._rules)

    def __len__(self) -> int:
        return len(self._rules)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RuleSet):
            return NotImplemented
        return self._rules == other._rules

    def get(self, rule_id: str) -> ProductionRule | None:
        return self._by_id.get(rule_id)


def _firing_order(rule: ProductionRule) -> tuple[int, int, str]:
    return (-rule.priority, -len(rule.conditions), rule.id)


def match_rule(rule: ProductionRule, base: FactBase) -> bool:
    """True iff every condition of the rule holds in the base."""
    return all(cond.satisfied_by(base) for cond in rule.conditions)


def run_forward_chain(base: FactBase, rules: RuleSet) -> tuple[FactBase, FiringTrace]:
    """Fire matching rules until quiescence and return the final base plus
    the firing trace.

    Each rule fires at most once, so the loop terminates after at most
    ``len(rules)`` firings. A conflicting action assertion raises
    FactConflictError naming the rule.
    """
    order = sorted(rules, key=_firing_order)
    current = base
    firings: list[RuleFiring] = []
    fired: set[str] = set()
    while True:
        chosen = None
        for rule in order:
            if rule.id not in fired and match_rule(rule, current):
                chosen = rule
                break
        if chosen is None:
            return current, tuple(firings)
        for fact in chosen.actions:
            try:
                current = current.assert_fact(fact)
            except FactConflictError as exc:
                raise FactConflictError(
                    exc.attribute, exc.existing, exc.incoming, rule_id=chosen.id
                ) from None
        fired.add(chosen.id)
        firings.append(RuleFiring(chosen.id, chosen.actions))


# ---------------------------------------------------------------------------
# JSON rule-set format

class RuleSchemaError(ValueError):
    """Rule file violates the documented schema. ``path`` is a JSON path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def _require_keys(obj: dict, allowed: set[str], required: set[str], path: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise RuleSchemaError(path, f"unknown key {sorted(unknown)[0]!r}")
    missing = required - set(obj)
    if missing:
        raise RuleSchemaError(path, f"missing key {sorted(missing)[0]!r}")


def _scalar(value: object, path: str) -> FactValue:
    if isinstance(value, bool) or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value
    raise RuleSchemaError(path, "value must be a string, integer or boolean")


def _condition_from_dict(obj: object, path: str) -> Condition:
    if not isinstance(obj, dict):
        raise RuleSchemaError(path, "condition must be an object")
    _require_keys(obj, {"attr", "op", "value"}, {"attr", "op", "value"}, path)
    if not isinstance(obj["attr"], str):
        raise RuleSchemaError(f"{path}.attr", "must be a string")
    try:
        op = ConditionOp(obj["op"])
    except ValueError:
        raise RuleSchemaError(f"{path}.op", f"unknown op {obj['op']!r}") from None
    if op is ConditionOp.IN_SET:
        raw = obj["value"]
        if not isinstance(raw, list) or not raw:
            raise RuleSchemaError(f"{path}.value", "'in' needs a nonempty array")
        operand: FactValue | frozenset[FactValue] = frozenset(
            _scalar(v, f"{path}.value[{i}]") for i, v in enumerate(raw)
        )
    else:
        operand = _scalar(obj["value"], f"{path}.value")
    try:
        return Condition(obj["attr"], op, operand)
    except ValueError as exc:
        raise RuleSchemaError(path, str(exc)) from None


def _action_from_dict(obj: object, path: str) -> Fact:
    if not isinstance(obj, dict):
        raise RuleSchemaError(path, "action must be an object")
    _require_keys(obj, {"attr", "value"}, {"attr", "value"}, path)
    if not isinstance(obj["attr"], str):
        raise RuleSchemaError(f"{path}.attr", "must be a string")
    try:
        return Fact(obj["attr"], _scalar(obj["value"], f"{path}.value"))
    except ValueError as exc:
        raise RuleSchemaError(path, str(exc)) from None


def rule_set_from_dict(data: object) -> RuleSet:
    """Build a RuleSet from the documented JSON shape; unknown keys are
    rejected so typos fail loudly."""
    if not isinstance(data, dict):
        raise RuleSchemaError("$", "top level must be an object")
    _require_keys(data, {"rules"}, {"rules"}, "$")
    if not isinstance(data["rules"], list):
        raise RuleSchemaError("$.rules", "must be an array")
    rules: list[ProductionRule] = []
    for i, raw in enumerate(data["rules"]):
        path = f"$.rules[{i}]"
        if not isinstance(raw, dict):
            raise RuleSchemaError(path, "rule must be an object")
        _require_keys(raw, {"id", "priority", "if", "then"}, {"id", "priority", "if", "then"}, path)
        if not isinstance(raw["id"], str):
            raise RuleSchemaError(f"{path}.id", "must be a string")
        if isinstance(raw["priority"], bool) or not isinstance(raw["priority"], int):
            raise RuleSchemaError(f"{path}.priority", "must be an integer")
        if not isinstance(raw["if"], list):
            raise RuleSchemaError(f"{path}.if", "must be an array")
        if not isinstance(raw["then"], list):
            raise RuleSchemaError(f"{path}.then", "must be an array")
        conditions = tuple(
            _condition_from_dict(c, f"{path}.if[{j}]") for j, c in enumerate(raw["if"])
        )
        actions = tuple(
            _action_from_dict(a, f"{path}.then[{j}]") for j, a in enumerate(raw["then"])
        )
        try:
            rules.append(ProductionRule(raw["id"], raw["priority"], conditions, actions))
        except ValueError as exc:
            raise RuleSchemaError(path, str(exc)) from None
    try:
        return RuleSet(rules)
    except ValueError as exc:
        raise RuleSchemaError("$.rules", str(exc)) from None


def parse_rules_json(text: str) -> RuleSet:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RuleSchemaError("$", f"invalid JSON: {exc}") from None
    return rule_set_from_dict(data)
