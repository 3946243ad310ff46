"""The `.cmt` template text format: parser, canonical serializer, slots.

The format is block-structured and line-oriented so diagnostics can point at
the line a copywriter actually sees:

    format teaser                       # extends the format vocabulary

    template "ad_b2b_pain" {
      channel: "google_adwords"
      meta audience: "b2b"
      part title {
        semantics: [attention_draw, usp_focus]
        format: question
        budget: 60
        text: "Is {pain_point} slowing your team down?"
      }
    }

Comments run from ``#`` to end of line. ``budget`` accepts ``N`` or ``N+M``
(base plus extension). Strings are double-quoted with ``\\"``, ``\\\\``,
``\\n``, ``\\t`` and ``\\r`` escapes. Slots use ``{name}``; ``{{`` and ``}}``
are literal braces. Parsing is recursive descent with one-token lookahead.
"""

from __future__ import annotations

import re
from bisect import bisect_right
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

from .model import (
    DEFAULT_FORMATS,
    CharacterBudget,
    Format,
    PartSpec,
    SemanticTag,
    StructuralPartKind,
    TemplateSpec,
    canonical_index,
    is_identifier,
    part_kind_from_name,
)
from .patterns import PatternError, iter_slots, offset_to_linecol

FILE_EXTENSION = ".cmt"


@dataclass(frozen=True)
class TemplateSource:
    """Template text plus where it came from, for diagnostics."""

    text: str
    origin: str = "<memory>"


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: Severity
    message: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity.value}: {self.message}"


@dataclass(frozen=True)
class Slot:
    """One slot occurrence. ``line``/``column`` are 1-based positions inside
    the owning part's pattern text, not the source file."""

    name: str
    part: StructuralPartKind
    line: int
    column: int


@dataclass(frozen=True)
class SourceParse:
    """Everything a single source yields: built templates, any ``format``
    declarations, and all diagnostics."""

    templates: tuple[TemplateSpec, ...]
    declared_formats: frozenset[Format]
    diagnostics: tuple[ParseDiagnostic, ...]

    @property
    def ok(self) -> bool:
        return not any(d.severity is Severity.ERROR for d in self.diagnostics)


@dataclass(frozen=True)
class ParseResult:
    """Outcome of parsing a source expected to hold exactly one template."""

    spec: TemplateSpec | None
    diagnostics: tuple[ParseDiagnostic, ...]

    @property
    def ok(self) -> bool:
        return self.spec is not None


# ---------------------------------------------------------------------------
# Lexer

class _Tok(Enum):
    IDENT = "identifier"
    STRING = "string"
    INT = "integer"
    LBRACE = "'{'"
    RBRACE = "'}'"
    LBRACKET = "'['"
    RBRACKET = "']'"
    COLON = "':'"
    COMMA = "','"
    PLUS = "'+'"
    EOF = "end of input"


_PUNCT_KINDS = {
    "{": _Tok.LBRACE,
    "}": _Tok.RBRACE,
    "[": _Tok.LBRACKET,
    "]": _Tok.RBRACKET,
    ":": _Tok.COLON,
    ",": _Tok.COMMA,
    "+": _Tok.PLUS,
}

_TOKEN_RE = re.compile(
    r"""[ \t\r\n]+
      | \#[^\n]*
      | (?P<ident>[a-z][a-z0-9_]*)
      | (?P<string>"(?:[^"\\\n]|\\.)*")
      | (?P<int>-?[0-9]+)
      | (?P<punct>[{}\[\]:,+])
    """,
    re.VERBOSE,
)

_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t", "r": "\r"}
_ESCAPE_OUT = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t", "\r": "\\r"}


class _Token(NamedTuple):
    # Line/column are derived from the offset only when a diagnostic needs
    # them; tokens stay cheap because floods of tiny tokens are a normal
    # fuzz input.
    kind: _Tok
    text: str
    value: object
    offset: int


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.line_starts = [0] + [m.end() for m in re.finditer("\n", text)]
        self.diagnostics: list[ParseDiagnostic] = []

    def linecol(self, offset: int) -> tuple[int, int]:
        i = bisect_right(self.line_starts, offset) - 1
        return i + 1, offset - self.line_starts[i] + 1

    def error(self, message: str, offset: int) -> None:
        line, col = self.linecol(offset)
        self.diagnostics.append(ParseDiagnostic(Severity.ERROR, message, line, col))

    def _decode_string(self, raw: str, offset: int) -> str:
        # raw includes the surrounding quotes.
        body = raw[1:-1]
        if "\\" not in body:
            self._check_controls(body, offset + 1)
            return body
        out: list[str] = []
        i = 0
        while i < len(body):
            ch = body[i]
            if ch == "\\":
                esc = body[i + 1]  # regex guarantees a char follows
                if esc in _ESCAPES:
                    out.append(_ESCAPES[esc])
                else:
                    self.error(f"unknown escape '\\{esc}' in string", offset + 1 + i)
                    out.append(esc)
                i += 2
            else:
                if ch < " " and ch not in ("\t", "\r"):
                    self.error("control character in string", offset + 1 + i)
                out.append(ch)
                i += 1
        return "".join(out)

    def _check_controls(self, body: str, offset: int) -> None:
        for i, ch in enumerate(body):
            if ch < " " and ch not in ("\t", "\r"):
                self.error("control character in string", offset + i)

    def tokens(self) -> list[_Token]:
        text = self.text
        n = len(text)
        out: list[_Token] = []
        append = out.append
        pos = 0
        while pos < n:
            m = _TOKEN_RE.match(text, pos)
            if m is None:
                if text[pos] == '"':
                    eol = text.find("\n", pos)
                    end = n if eol < 0 else eol
                    self.error("unterminated string", pos)
                    pos = end
                else:
                    self.error(f"unexpected character {text[pos]!r}", pos)
                    pos += 1
                continue
            group = m.lastgroup
            if group == "ident":
                word = m.group()
                append(_Token(_Tok.IDENT, word, word, pos))
            elif group == "string":
                raw = m.group()
                append(_Token(_Tok.STRING, raw, self._decode_string(raw, pos), pos))
            elif group == "int":
                raw = m.group()
                append(_Token(_Tok.INT, raw, int(raw), pos))
            elif group == "punct":
                ch = m.group()
                append(_Token(_PUNCT_KINDS[ch], ch, ch, pos))
            pos = m.end()
        append(_Token(_Tok.EOF, "", None, n))
        return out


def _string_body_offset(raw: str, decoded_index: int) -> int:
    """Offset inside a raw quoted token of the char that decodes to
    position ``decoded_index``. Used to map pattern faults to the file."""
    i = 1  # skip opening quote
    decoded = 0
    while decoded < decoded_index and i < len(raw) - 1:
        i += 2 if raw[i] == "\\" else 1
        decoded += 1
    return i


# ---------------------------------------------------------------------------
# Parser

_KNOWN_PART_FIELDS = ("semantics", "format", "budget", "text")


@dataclass
class _RawPart:
    kind_tok: _Token
    kind: StructuralPartKind | None
    semantics: list[_Token] = field(default_factory=list)
    has_semantics: bool = False
    format_tok: _Token | None = None
    base_tok: _Token | None = None
    ext_tok: _Token | None = None
    text_tok: _Token | None = None


@dataclass
class _RawTemplate:
    id_tok: _Token
    channel_tok: _Token | None = None
    metas: list[tuple[_Token, object]] = field(default_factory=list)
    parts: list[_RawPart] = field(default_factory=list)


class _Parser:
    """Single-token-lookahead parser over the lexed stream. Errors are
    recorded as diagnostics; panic recovery resynchronizes on the next
    top-level declaration so one bad block does not hide the rest."""

    def __init__(self, lexer: _Lexer):
        self.lx = lexer
        self.toks = lexer.tokens()
        self.i = 0
        self.diags = lexer.diagnostics
        self.depth = 0

    # -- token plumbing

    @property
    def cur(self) -> _Token:
        return self.toks[self.i]

    def advance(self) -> _Token:
        tok = self.toks[self.i]
        if tok.kind is not _Tok.EOF:
            self.i += 1
            if tok.kind is _Tok.LBRACE:
                self.depth += 1
            elif tok.kind is _Tok.RBRACE:
                self.depth -= 1
        return tok

    def error_at(self, tok: _Token, message: str) -> None:
        line, col = self.lx.linecol(tok.offset)
        self.diags.append(ParseDiagnostic(Severity.ERROR, message, line, col))

    def warn_at(self, tok: _Token, message: str) -> None:
        line, col = self.lx.linecol(tok.offset)
        self.diags.append(ParseDiagnostic(Severity.WARNING, message, line, col))

    def _describe(self, tok: _Token) -> str:
        if tok.kind is _Tok.EOF:
            return "end of input"
        return f"{tok.kind.value} {tok.text!r}"

    def expect(self, kind: _Tok, what: str) -> _Token | None:
        if self.cur.kind is kind:
            return self.advance()
        self.error_at(self.cur, f"expected {what}, found {self._describe(self.cur)}")
        return None

    def expect_keyword(self, word: str) -> bool:
        if self.cur.kind is _Tok.IDENT and self.cur.text == word:
            self.advance()
            return True
        self.error_at(self.cur, f"expected '{word}', found {self._describe(self.cur)}")
        return False

    def at_keyword(self, word: str) -> bool:
        return self.cur.kind is _Tok.IDENT and self.cur.text == word

    def panic_to_top_level(self) -> None:
        """Skip tokens until a top-level 'template'/'format' or EOF."""
        while self.cur.kind is not _Tok.EOF:
            if self.depth <= 0 and (self.at_keyword("template") or self.at_keyword("format")):
                return
            self.advance()
        self.depth = 0

    # -- grammar

    def parse_file(self) -> tuple[list[_RawTemplate], list[_Token]]:
        templates: list[_RawTemplate] = []
        format_decls: list[_Token] = []
        while self.cur.kind is not _Tok.EOF:
            if self.at_keyword("template"):
                raw = self.parse_template_decl()
                if raw is not None:
                    templates.append(raw)
            elif self.at_keyword("format"):
                self.advance()
                name = self.expect(_Tok.IDENT, "format name")
                if name is None:
                    self.panic_to_top_level()
                else:
                    format_decls.append(name)
            else:
                self.error_at(
                    self.cur,
                    f"expected 'template' or 'format' declaration, found {self._describe(self.cur)}",
                )
                self.advance()
                self.panic_to_top_level()
        return templates, format_decls

    def parse_template_decl(self) -> _RawTemplate | None:
        self.advance()  # 'template'
        id_tok = self.expect(_Tok.STRING, "template id string")
        if id_tok is None or self.expect(_Tok.LBRACE, "'{'") is None:
            self.panic_to_top_level()
            return None
        raw = _RawTemplate(id_tok=id_tok)
        start_depth = self.depth
        while True:
            if self.cur.kind is _Tok.RBRACE and self.depth == start_depth:
                self.advance()
                return raw
            if self.cur.kind is _Tok.EOF:
                self.error_at(self.cur, "unexpected end of input inside template block")
                return raw
            if self.at_keyword("channel"):
                tok = self.advance()
                if self.expect(_Tok.COLON, "':'") is None:
                    self.panic_to_top_level()
                    return raw
                value = self.expect(_Tok.STRING, "channel id string")
                if value is None:
                    self.panic_to_top_level()
                    return raw
                if raw.channel_tok is not None:
                    self.error_at(tok, "duplicate channel field")
                else:
                    raw.channel_tok = value
            elif self.at_keyword("meta"):
                self.advance()
                key = self.expect(_Tok.IDENT, "metadata key")
                if key is None or self.expect(_Tok.COLON, "':'") is None:
                    self.panic_to_top_level()
                    return raw
                value = self.parse_meta_value()
                if value is _MISSING:
                    self.panic_to_top_level()
                    return raw
                raw.metas.append((key, value))
            elif self.at_keyword("part"):
                part = self.parse_part()
                if part is None:
                    self.panic_to_top_level()
                    return raw
                if part.kind is not None:
                    raw.parts.append(part)
            else:
                self.error_at(
                    self.cur,
                    f"expected 'channel', 'meta', 'part' or '}}', found {self._describe(self.cur)}",
                )
                self.panic_to_top_level()
                return raw

    def parse_meta_value(self) -> object:
        tok = self.cur
        if tok.kind is _Tok.STRING or tok.kind is _Tok.INT:
            self.advance()
            return tok.value
        if tok.kind is _Tok.IDENT and tok.text in ("true", "false"):
            self.advance()
            return tok.text == "true"
        self.error_at(tok, f"expected string, integer or boolean, found {self._describe(tok)}")
        return _MISSING

    def parse_part(self) -> _RawPart | None:
        self.advance()  # 'part'
        kind_tok = self.expect(_Tok.IDENT, "part kind")
        if kind_tok is None:
            return None
        try:
            kind = part_kind_from_name(kind_tok.text)
        except KeyError:
            self.error_at(kind_tok, f"unknown part kind {kind_tok.text!r}")
            kind = None
        if self.expect(_Tok.LBRACE, "'{'") is None:
            return None
        part = _RawPart(kind_tok=kind_tok, kind=kind)
        start_depth = self.depth
        while True:
            if self.cur.kind is _Tok.RBRACE and self.depth == start_depth:
                self.advance()
                return part
            if self.cur.kind is _Tok.EOF:
                self.error_at(self.cur, "unexpected end of input inside part block")
                return part
            if not self.parse_part_field(part):
                return None

    def parse_part_field(self, part: _RawPart) -> bool:
        tok = self.cur
        if tok.kind is not _Tok.IDENT or tok.text not in _KNOWN_PART_FIELDS:
            self.error_at(
                tok,
                f"expected one of {', '.join(_KNOWN_PART_FIELDS)} or '}}', found {self._describe(tok)}",
            )
            return False
        self.advance()
        if self.expect(_Tok.COLON, "':'") is None:
            return False
        if tok.text == "semantics":
            if part.has_semantics:
                self.error_at(tok, "duplicate semantics field")
            part.has_semantics = True
            return self.parse_tag_list(part)
        if tok.text == "format":
            name = self.expect(_Tok.IDENT, "format name")
            if name is None:
                return False
            if part.format_tok is not None:
                self.error_at(tok, "duplicate format field")
            else:
                part.format_tok = name
            return True
        if tok.text == "budget":
            base = self.expect(_Tok.INT, "budget integer")
            if base is None:
                return False
            ext = None
            if self.cur.kind is _Tok.PLUS:
                self.advance()
                ext = self.expect(_Tok.INT, "extension integer")
                if ext is None:
                    return False
            if part.base_tok is not None:
                self.error_at(tok, "duplicate budget field")
            else:
                part.base_tok, part.ext_tok = base, ext
            return True
        # text
        value = self.expect(_Tok.STRING, "text string")
        if value is None:
            return False
        if part.text_tok is not None:
            self.error_at(tok, "duplicate text field")
        else:
            part.text_tok = value
        return True

    def parse_tag_list(self, part: _RawPart) -> bool:
        if self.expect(_Tok.LBRACKET, "'['") is None:
            return False
        if self.cur.kind is _Tok.RBRACKET:
            self.advance()
            return True
        while True:
            tag = self.expect(_Tok.IDENT, "semantic tag")
            if tag is None:
                return False
            part.semantics.append(tag)
            if self.cur.kind is _Tok.COMMA:
                self.advance()
                continue
            return self.expect(_Tok.RBRACKET, "']' or ','") is not None


_MISSING = object()


# ---------------------------------------------------------------------------
# Semantic validation and spec construction

class _Builder:
    def __init__(self, parser: _Parser, vocabulary: frozenset[Format]):
        self.p = parser
        self.vocabulary = vocabulary

    def build(self, raws: list[_RawTemplate]) -> list[TemplateSpec]:
        specs: list[TemplateSpec] = []
        seen_ids: dict[str, _Token] = {}
        for raw in raws:
            spec = self.build_template(raw)
            if spec is None:
                continue
            if spec.id in seen_ids:
                self.p.error_at(raw.id_tok, f"duplicate template id {spec.id!r} in source")
                continue
            seen_ids[spec.id] = raw.id_tok
            specs.append(spec)
        return specs

    def build_template(self, raw: _RawTemplate) -> TemplateSpec | None:
        ok = True
        template_id = raw.id_tok.value
        if not is_identifier(template_id):
            self.p.error_at(raw.id_tok, f"template id {template_id!r} must match [a-z][a-z0-9_]*")
            ok = False
        if raw.channel_tok is None:
            self.p.error_at(raw.id_tok, f"template {template_id!r} is missing a channel field")
            ok = False
            channel = ""
        else:
            channel = raw.channel_tok.value
            if not is_identifier(channel):
                self.p.error_at(raw.channel_tok, f"channel id {channel!r} must match [a-z][a-z0-9_]*")
                ok = False
        metadata: dict[str, object] = {}
        for key_tok, value in raw.metas:
            if key_tok.text in metadata:
                self.p.error_at(key_tok, f"duplicate metadata key {key_tok.text!r}")
                ok = False
            else:
                metadata[key_tok.text] = value
        seen_kinds: dict[StructuralPartKind, _Token] = {}
        parts: list[PartSpec] = []
        for raw_part in raw.parts:
            if raw_part.kind in seen_kinds:
                self.p.error_at(raw_part.kind_tok, f"duplicate part kind {raw_part.kind.value!r}")
                ok = False
                continue
            seen_kinds[raw_part.kind] = raw_part.kind_tok
            built = self.build_part(raw_part)
            if built is None:
                ok = False
            else:
                parts.append(built)
        if not raw.parts:
            self.p.error_at(raw.id_tok, f"template {template_id!r} declares no parts")
            ok = False
        source_order = [p.kind for p in parts]
        parts.sort(key=lambda p: canonical_index(p.kind))
        if source_order != [p.kind for p in parts]:
            self.p.warn_at(
                raw.id_tok,
                f"parts of template {template_id!r} reordered to canonical structure order",
            )
        if not ok:
            return None
        return TemplateSpec(id=template_id, channel=channel, parts=tuple(parts), metadata=metadata)

    def build_part(self, raw: _RawPart) -> PartSpec | None:
        ok = True
        kind = raw.kind
        tags: list[SemanticTag] = []
        seen_tags: set[str] = set()
        for tok in raw.semantics:
            if tok.text in seen_tags:
                self.p.warn_at(tok, f"semantic tag {tok.text!r} listed twice")
                continue
            seen_tags.add(tok.text)
            tags.append(SemanticTag(tok.text))
        if not tags and kind is not StructuralPartKind.REFERENCE_INFO:
            self.p.error_at(
                raw.kind_tok, f"part {kind.value!r} must declare at least one semantic tag"
            )
            ok = False
        if raw.format_tok is None:
            self.p.error_at(raw.kind_tok, f"part {kind.value!r} is missing a format field")
            ok = False
            fmt = None
        else:
            fmt = Format(raw.format_tok.text)
            if fmt not in self.vocabulary:
                self.p.error_at(
                    raw.format_tok,
                    f"unknown format name {fmt.name!r} (declare it with 'format {fmt.name}')",
                )
                ok = False
        if raw.base_tok is None:
            self.p.error_at(raw.kind_tok, f"part {kind.value!r} is missing a budget field")
            ok = False
            budget = None
        else:
            base = raw.base_tok.value
            ext = raw.ext_tok.value if raw.ext_tok is not None else 0
            if base < 0:
                self.p.error_at(raw.base_tok, "negative budget")
                ok = False
            if ext < 0:
                self.p.error_at(raw.ext_tok, "negative budget extension")
                ok = False
            budget = CharacterBudget(max(base, 0), max(ext, 0))
        if raw.text_tok is None:
            self.p.error_at(raw.kind_tok, f"part {kind.value!r} is missing a text field")
            ok = False
            pattern = ""
        else:
            pattern = raw.text_tok.value
            try:
                iter_slots(pattern)
            except PatternError as exc:
                body_off = _string_body_offset(raw.text_tok.text, exc.offset)
                line, col = self.p.lx.linecol(raw.text_tok.offset + body_off)
                self.p.diags.append(ParseDiagnostic(Severity.ERROR, exc.message, line, col))
                ok = False
        if not ok:
            return None
        return PartSpec(kind=kind, semantics=frozenset(tags), format=fmt, budget=budget, pattern=pattern)


# ---------------------------------------------------------------------------
# Public API

def _as_source(source: TemplateSource | str) -> TemplateSource:
    if isinstance(source, TemplateSource):
        return source
    return TemplateSource(text=source)


def parse_source(
    source: TemplateSource | str, extra_formats: frozenset[Format] | None = None
) -> SourceParse:
    """Parse a source that may hold any number of template blocks and
    ``format`` declarations. All diagnostics are aggregated; templates that
    validated cleanly are returned even when sibling blocks failed."""
    src = _as_source(source)
    lexer = _Lexer(src.text)
    parser = _Parser(lexer)
    raws, format_decls = parser.parse_file()
    declared = frozenset(Format(tok.text) for tok in format_decls)
    vocabulary = DEFAULT_FORMATS | declared
    if extra_formats:
        vocabulary = vocabulary | extra_formats
    specs = _Builder(parser, vocabulary).build(raws)
    diags = sorted(parser.diags, key=lambda d: (d.line, d.column))
    return SourceParse(
        templates=tuple(specs), declared_formats=declared, diagnostics=tuple(diags)
    )


def parse_template(
    source: TemplateSource | str, extra_formats: frozenset[Format] | None = None
) -> ParseResult:
    """Parse a source expected to declare exactly one template.

    On success the returned spec satisfies every TemplateSpec invariant; on
    failure at least one error diagnostic carries a position.
    """
    parsed = parse_source(source, extra_formats)
    diags = list(parsed.diagnostics)
    spec: TemplateSpec | None = None
    if parsed.ok:
        if len(parsed.templates) == 1:
            spec = parsed.templates[0]
        else:
            diags.append(
                ParseDiagnostic(
                    Severity.ERROR,
                    f"expected exactly one template declaration, found {len(parsed.templates)}",
                    1,
                    1,
                )
            )
    return ParseResult(spec=spec, diagnostics=tuple(diags))


def _quote(value: str) -> str:
    return '"' + "".join(_ESCAPE_OUT.get(ch, ch) for ch in value) + '"'


def _meta_literal(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return _quote(value)


def _budget_literal(budget: CharacterBudget) -> str:
    if budget.extension:
        return f"{budget.base}+{budget.extension}"
    return str(budget.base)


def serialize_spec(spec: TemplateSpec) -> str:
    """Canonical text of one template block, without format declarations."""
    lines = [f'template {_quote(spec.id)} {{']
    lines.append(f"  channel: {_quote(spec.channel)}")
    for key in sorted(spec.metadata):
        lines.append(f"  meta {key}: {_meta_literal(spec.metadata[key])}")
    for part in spec.parts:
        lines.append(f"  part {part.kind.value} {{")
        if part.semantics:
            tags = ", ".join(sorted(t.name for t in part.semantics))
            lines.append(f"    semantics: [{tags}]")
        lines.append(f"    format: {part.format.name}")
        lines.append(f"    budget: {_budget_literal(part.budget)}")
        lines.append(f"    text: {_quote(part.pattern)}")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


def serialize_templates(
    specs: list[TemplateSpec] | tuple[TemplateSpec, ...],
    declared_formats: frozenset[Format] = frozenset(),
) -> str:
    """Canonical source for a sequence of templates. Formats outside the
    default vocabulary are declared up front so the output is self-contained."""
    needed = set(declared_formats)
    for spec in specs:
        needed.update(spec.formats())
    extra = sorted(f.name for f in needed - DEFAULT_FORMATS)
    chunks = []
    if extra:
        chunks.append("\n".join(f"format {name}" for name in extra) + "\n")
    chunks.extend(serialize_spec(spec) for spec in specs)
    return "\n".join(chunks)


def serialize_template(spec: TemplateSpec) -> TemplateSource:
    """Canonical source for one template; ``parse_template`` restores an
    equal spec. Byte-identical for structurally equal specs."""
    return TemplateSource(text=serialize_templates([spec]), origin="<memory>")


def list_slots(spec: TemplateSpec) -> list[Slot]:
    """Every slot occurrence in document order (parts in canonical order,
    occurrences in pattern order). Repeated names list once per occurrence."""
    out: list[Slot] = []
    for part in spec.parts:
        for name, offset in iter_slots(part.pattern):
            line, col = offset_to_linecol(part.pattern, offset)
            out.append(Slot(name=name, part=part.kind, line=line, column=col))
    return out
