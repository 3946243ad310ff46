"""Shared test utilities: spec/pattern generators and deliberately
independent reference implementations used as oracles.

The oracles work on plain dicts and tuples, never on the package's own
evaluation code, so they stay meaningful as cross-checks.
"""

from __future__ import annotations

import random
from fractions import Fraction

from cmforge.model import (
    DEFAULT_FORMATS,
    CharacterBudget,
    Format,
    PartSpec,
    SemanticTag,
    StructuralPartKind,
    TemplateSpec,
)

KINDS = list(StructuralPartKind)

IDENT_ALPHA = "abcdefghijklmnopqrstuvwxyz"
IDENT_REST = IDENT_ALPHA + "0123456789_"

# Literal fragments for generated patterns; no braces, no raw controls
# outside the supported escapes.
LITERAL_CHARS = (
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
    " .,:;!?()-+*/#$%&'\"\\\n\t\r"
    "абвгдежзиклмнопрстуфхцчшщэюяЁёЙй"
    "中文字日本語한국어"
    "👍🚀🔥💯❤"
    "́̆‍"
)


def rand_ident(rng: random.Random, max_len: int = 10) -> str:
    length = rng.randint(1, max_len)
    return rng.choice(IDENT_ALPHA) + "".join(
        rng.choice(IDENT_REST) for _ in range(length - 1)
    )


def rand_literal(rng: random.Random, max_len: int = 12) -> str:
    return "".join(rng.choice(LITERAL_CHARS) for _ in range(rng.randint(0, max_len)))


def rand_pattern(rng: random.Random, slot_pool: list[str]) -> tuple[str, list[str], int]:
    """Build a pattern from typed pieces.

    Returns (pattern, slot occurrences in order, fixed_length) where
    fixed_length is the rendered length contributed by everything except the
    bindings (literals plus one char per escape pair).
    """
    chunks: list[str] = []
    occurrences: list[str] = []
    fixed = 0
    for _ in range(rng.randint(0, 8)):
        roll = rng.random()
        if roll < 0.5:
            lit = rand_literal(rng)
            chunks.append(lit)
            fixed += len(lit)
        elif roll < 0.65:
            chunks.append(rng.choice(["{{", "}}"]))
            fixed += 1
        elif slot_pool:
            name = rng.choice(slot_pool)
            chunks.append("{" + name + "}")
            occurrences.append(name)
    return "".join(chunks), occurrences, fixed


def rand_template_spec(rng: random.Random, ident: str | None = None) -> TemplateSpec:
    """A random valid TemplateSpec, occasionally using non-default formats."""
    formats = sorted(f.name for f in DEFAULT_FORMATS) + ["custom_" + rand_ident(rng, 6)]
    kinds = sorted(rng.sample(KINDS, rng.randint(1, 5)), key=KINDS.index)
    slot_pool = [rand_ident(rng, 8) for _ in range(rng.randint(0, 4))]
    parts = []
    for kind in kinds:
        if kind is StructuralPartKind.REFERENCE_INFO and rng.random() < 0.5:
            semantics = frozenset()
        else:
            semantics = frozenset(
                SemanticTag(rand_ident(rng, 8)) for _ in range(rng.randint(1, 3))
            )
        pattern, _, _ = rand_pattern(rng, slot_pool)
        parts.append(
            PartSpec(
                kind=kind,
                semantics=semantics,
                format=Format(rng.choice(formats)),
                budget=CharacterBudget(rng.randint(0, 120), rng.choice([0, 0, 0, 15, 30])),
                pattern=pattern,
            )
        )
    metadata: dict[str, object] = {}
    for _ in range(rng.randint(0, 4)):
        value = rng.choice(
            [
                rand_literal(rng),
                rng.randint(-100, 100),
                rng.random() < 0.5,
            ]
        )
        metadata[rand_ident(rng, 8)] = value
    return TemplateSpec(
        id=ident or rand_ident(rng, 12),
        channel=rand_ident(rng, 10),
        parts=tuple(parts),
        metadata=metadata,
    )


# ---------------------------------------------------------------------------
# Rule engine oracle: a naive re-scan loop over plain dicts.

class OracleConflict(Exception):
    def __init__(self, rule_id: str, attribute: str):
        self.rule_id = rule_id
        self.attribute = attribute
        super().__init__(f"{rule_id}/{attribute}")


def _same(a, b) -> bool:
    return isinstance(a, bool) == isinstance(b, bool) and a == b


def norm_facts(d: dict) -> dict:
    """Type-tagged copy so dict equality cannot confuse True with 1."""
    return {k: (isinstance(v, bool), v) for k, v in d.items()}


def _holds(base: dict, attr: str, op: str, operand) -> bool:
    if attr not in base:
        return False
    v = base[attr]
    if op == "eq":
        return _same(v, operand)
    if op == "neq":
        return not _same(v, operand)
    if op == "in":
        return any(_same(v, o) for o in operand)
    if isinstance(v, bool) or not isinstance(v, int):
        return False
    return v < operand if op == "lt" else v > operand


def oracle_forward_chain(facts: dict, rules: list[dict]) -> tuple[dict, list[tuple[str, list]]]:
    """Reference chain over rule dicts ``{"id","priority","if":[(a,op,v)],
    "then":[(a,v)]}``. Re-derives eligibility from scratch every cycle and
    picks the next rule by explicit pairwise comparison."""
    base = dict(facts)
    fired: list[tuple[str, list]] = []
    done: set[str] = set()
    while True:
        eligible = [
            r
            for r in rules
            if r["id"] not in done
            and all(_holds(base, a, op, v) for a, op, v in r["if"])
        ]
        if not eligible:
            return base, fired
        best = eligible[0]
        for r in eligible[1:]:
            if (-r["priority"], -len(r["if"]), r["id"]) < (
                -best["priority"],
                -len(best["if"]),
                best["id"],
            ):
                best = r
        for attr, value in best["then"]:
            if attr in base and not _same(base[attr], value):
                raise OracleConflict(best["id"], attr)
            base[attr] = value
        done.add(best["id"])
        fired.append((best["id"], list(best["then"])))


def rand_rule_system(rng: random.Random, max_rules: int = 20, max_attrs: int = 10):
    """A random propositional system as plain dicts plus a starting fact
    dict. Values are booleans or small enumerated strings.

    Attributes split into inputs (may hold initial facts) and deriveds
    (mostly written by rules, often read by later rules) so that generated
    systems actually chain; a minority of actions still hit input attributes
    to exercise idempotent re-assertion and genuine conflicts.
    """
    n_attrs = rng.randint(2, max_attrs)
    n_inputs = max(1, rng.randint(1, n_attrs - 1)) if n_attrs > 1 else 1
    inputs = [f"a{i}" for i in range(n_inputs)]
    deriveds = [f"d{i}" for i in range(n_attrs - n_inputs)]
    attrs = inputs + deriveds
    values_of = {
        a: ([True, False] if rng.random() < 0.4 else [f"v{j}" for j in range(rng.randint(2, 4))])
        for a in attrs
    }

    def rand_value(attr):
        return rng.choice(values_of[attr])

    # Initial facts first, so condition operands can be biased towards
    # values that actually hold; otherwise almost nothing ever fires.
    n_facts = rng.randint((len(inputs) + 1) // 2, len(inputs))
    facts = {a: rand_value(a) for a in rng.sample(inputs, n_facts)}

    canonical = {a: (facts[a] if a in facts else rand_value(a)) for a in attrs}

    def biased_value(attr):
        if rng.random() < 0.65:
            return canonical[attr]
        return rand_value(attr)

    rules = []
    n_rules = rng.randint(0, max_rules)
    for i in range(n_rules):
        conds = []
        for _ in range(rng.randint(1, 2)):
            pool = inputs if (rng.random() < 0.55 or not deriveds) else deriveds
            attr = rng.choice(pool)
            op = rng.choice(["eq", "eq", "eq", "neq", "in"])
            if op == "in":
                values = values_of[attr]
                chosen = set(rng.sample(values, rng.randint(1, len(values))))
                if attr in facts and rng.random() < 0.5:
                    chosen.add(facts[attr])
                operand = tuple(sorted(chosen, key=repr))
            else:
                operand = biased_value(attr)
            conds.append((attr, op, operand))
        actions = []
        for _ in range(rng.randint(1, 2)):
            pool = deriveds if (deriveds and rng.random() < 0.8) else attrs
            attr = rng.choice(pool)
            # Writers mostly agree on one value per attribute, like real
            # systems; the minority dissent exercises the conflict path.
            value = canonical[attr] if rng.random() < 0.85 else rand_value(attr)
            # Respect the self-contradiction guard the engine enforces.
            if any(c[0] == attr and c[1] == "neq" and _same(c[2], value) for c in conds):
                continue
            actions.append((attr, value))
        if not actions:
            continue
        rules.append(
            {"id": f"r{i:02d}", "priority": rng.randint(-3, 5), "if": conds, "then": actions}
        )
    return facts, rules


# ---------------------------------------------------------------------------
# Random recommendation inputs shared by the unit and acceptance suites.

def make_flat_template(tpl_id, metadata=None, formats=("argument",), channel="c"):
    """A template with one part per format, canonical order, trivial copy."""
    parts = []
    for i, fmt in enumerate(formats):
        parts.append(
            PartSpec(
                kind=KINDS[i],
                semantics=frozenset({SemanticTag("usp_focus")}),
                format=Format(fmt),
                budget=CharacterBudget(60),
                pattern="x",
            )
        )
    return TemplateSpec(id=tpl_id, channel=channel, parts=tuple(parts), metadata=metadata or {})


def rand_catalog(rng: random.Random, size: int) -> list[TemplateSpec]:
    catalog = []
    used = set()
    meta_keys = ["audience", "stage", "tone"]
    format_pool = ["question", "argument", "invitation_to_action", "problem_appeal"]
    for _ in range(size):
        while True:
            tpl_id = rand_ident(rng, 8)
            if tpl_id not in used:
                used.add(tpl_id)
                break
        metadata = {
            key: rng.choice(["b2b", "b2c", "warm", "cold"])
            for key in rng.sample(meta_keys, rng.randint(0, 3))
        }
        formats = tuple(rng.sample(format_pool, rng.randint(1, 2)))
        catalog.append(make_flat_template(tpl_id, metadata=metadata, formats=formats))
    return catalog


def rand_derived(rng: random.Random) -> list[tuple[str, object]]:
    pool = {
        "rec_audience": ["b2b", "b2c"],
        "rec_stage": ["warm", "cold"],
        "rec_tone": ["warm", "cold"],
        "rec_format": ["question", "argument", "problem_appeal"],
    }
    chosen = rng.sample(sorted(pool), rng.randint(0, 4))
    return [(attr, rng.choice(pool[attr])) for attr in chosen]


# ---------------------------------------------------------------------------
# Recommender oracle: exact-fraction scoring and a stable sort.

def oracle_rank(
    templates: list[dict], derived: list[tuple[str, object]], k: int
) -> list[tuple[str, Fraction]]:
    """Reference ranking over template dicts ``{"id", "metadata", "formats"}``."""
    rows = []
    for tpl in templates:
        matched = 0
        total = 0
        for attr, value in derived:
            total += 1
            if attr == "rec_format":
                ok = value in tpl["formats"]
            else:
                key = attr[len("rec_"):]
                ok = key in tpl["metadata"] and _same(tpl["metadata"][key], value)
            if ok:
                matched += 1
        score = Fraction(matched, total) if total else Fraction(0)
        rows.append((tpl["id"], score))
    rows.sort(key=lambda row: (-row[1], row[0]))
    return rows[:k]
