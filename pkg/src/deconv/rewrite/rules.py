"""Compiler for the tree-rewriting rule language.

A rule file holds one or more grammars::

    GRAMMAR choice
    MAXITER 1000
    RULE arg-nominal PRIORITY 85 :
      ?x{PREDIC=ACTION, FS=OBJ1, !DERIV} ==> ?x{DERIV=NOM}
    RULE swap PRIORITY 50 :
      ?p(...a ?x ?y ...b) ==> ?p(...a ?y ?x ...b) WHERE ?x.POS > ?y.POS

Pattern nodes are written ``?var{conditions}(child sequence)``;  ``...`` is
a gap matching any run of children (name it to reuse the run in the
template).  Conditions: ``VAR=value`` (for non-exclusive variables:
membership), ``VAR!=value``, ``VAR=*`` (assigned), ``!VAR`` (unassigned).
Templates reuse matched nodes (``?x``, with optional decoration updates),
clone them (``%x``), or create nodes (``#{...}``, ``#FORMAT{...}``).
Updates read ``VAR=value``, ``VAR=?y.VAR`` (copy), ``VAR+=value`` and
``VAR-=value`` (set-valued variables only).  Guards compare decoration
values; ``<`` and ``>`` use the declared value order.  ``**`` starts a
comment.  Full grammar in docs/rule-language.ebnf.

Everything is type-checked against the variable schema at compile time:
unknown variables, out-of-set values and unbound template variables are
compile errors with positions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import RuleSyntaxError, RuleTypeError
from .schema import VariableSchema

DEFAULT_MAX_ITERATIONS = 1000

_RULE_HEAD_RE = re.compile(
    r"^RULE\s+([A-Za-z0-9_-]+)\s+PRIORITY\s+(-?\d+)\s*:\s*(.*)$", re.DOTALL
)

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<arrow>==>)
      | (?P<gap>\.\.\.)
      | (?P<addeq>\+=)
      | (?P<subeq>-=)
      | (?P<ne>!=)
      | (?P<pvar>\?[a-z][A-Za-z0-9_]*)
      | (?P<clone>%[a-z][A-Za-z0-9_]*)
      | (?P<hash>\#[A-Z][A-Z0-9_-]*|\#)
      | (?P<word>[\w']+)
      | (?P<lbrace>\{) | (?P<rbrace>\})
      | (?P<lparen>\() | (?P<rparen>\))
      | (?P<comma>,) | (?P<dot>\.)
      | (?P<eq>=) | (?P<gt>>) | (?P<lt><)
      | (?P<amp>&) | (?P<pipe>\|) | (?P<bang>!)
      | (?P<star>\*)
    """,
    re.VERBOSE | re.UNICODE,
)


# --- AST -------------------------------------------------------------------


@dataclass(frozen=True)
class Cond:
    kind: str  # eq | ne | set | unset
    var: str
    value: str | None = None


@dataclass(frozen=True)
class Gap:
    name: str
    anonymous: bool = False


@dataclass
class PatternNode:
    var: str
    conds: tuple[Cond, ...] = ()
    children: tuple | None = None  # items: PatternNode | Gap; None = unconstrained


@dataclass(frozen=True)
class Lit:
    value: str


@dataclass(frozen=True)
class Ref:
    var: str
    attr: str


@dataclass(frozen=True)
class Assign:
    var: str
    op: str  # set | add | remove
    value: Lit | Ref


@dataclass(frozen=True)
class GapRef:
    name: str


@dataclass
class TemplateNode:
    kind: str  # ref | clone | new
    var: str | None = None
    fmt: str | None = None
    assigns: tuple[Assign, ...] = ()
    children: tuple | None = None  # items: TemplateNode | GapRef; None = keep/empty


@dataclass(frozen=True)
class GuardCmp:
    left: Lit | Ref
    op: str  # = | != | > | <
    right: Lit | Ref


@dataclass(frozen=True)
class GuardNot:
    inner: object


@dataclass(frozen=True)
class GuardAnd:
    parts: tuple


@dataclass(frozen=True)
class GuardOr:
    parts: tuple


@dataclass
class RewriteRule:
    name: str
    priority: int
    pattern: PatternNode
    template: TemplateNode
    guard: object | None
    line: int


@dataclass
class Grammar:
    name: str
    rules: tuple[RewriteRule, ...]  # already in application order
    schema: VariableSchema
    max_iterations: int = DEFAULT_MAX_ITERATIONS


# --- tokenizer -------------------------------------------------------------


class _Tokens:
    def __init__(self, text: str, line: int):
        self.line = line
        self.toks: list[tuple[str, str]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None:
                raise RuleSyntaxError(f"bad character {text[pos]!r}", line)
            pos = m.end()
            kind = m.lastgroup
            if kind != "ws":
                self.toks.append((kind, m.group(0)))
        self.i = 0

    def peek(self) -> tuple[str, str] | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self) -> tuple[str, str]:
        tok = self.peek()
        if tok is None:
            raise RuleSyntaxError("unexpected end of rule", self.line)
        self.i += 1
        return tok

    def expect(self, kind: str) -> str:
        tok = self.next()
        if tok[0] != kind:
            raise RuleSyntaxError(f"expected {kind}, got {tok[1]!r}", self.line)
        return tok[1]

    def accept(self, kind: str) -> str | None:
        tok = self.peek()
        if tok is not None and tok[0] == kind:
            self.i += 1
            return tok[1]
        return None

    def done(self) -> bool:
        return self.i >= len(self.toks)


# --- parser ----------------------------------------------------------------


class _RuleParser:
    def __init__(self, toks: _Tokens):
        self.toks = toks
        self.gap_count = 0

    def parse_pattern(self) -> PatternNode:
        tok = self.toks.next()
        if tok[0] != "pvar":
            raise RuleSyntaxError(f"pattern must start with ?var, got {tok[1]!r}", self.toks.line)
        var = tok[1][1:]
        conds: tuple[Cond, ...] = ()
        if self.toks.accept("lbrace"):
            conds = self.parse_conds()
        children = None
        if self.toks.accept("lparen"):
            children = self.parse_child_patterns()
        return PatternNode(var, conds, children)

    def parse_conds(self) -> tuple[Cond, ...]:
        conds: list[Cond] = []
        if self.toks.accept("rbrace"):
            return ()
        while True:
            if self.toks.accept("bang"):
                var = self.toks.expect("word")
                conds.append(Cond("unset", var))
            else:
                var = self.toks.expect("word")
                tok = self.toks.next()
                if tok[0] == "eq":
                    if self.toks.accept("star"):
                        conds.append(Cond("set", var))
                    else:
                        conds.append(Cond("eq", var, self.toks.expect("word")))
                elif tok[0] == "ne":
                    conds.append(Cond("ne", var, self.toks.expect("word")))
                else:
                    raise RuleSyntaxError(f"bad condition near {tok[1]!r}", self.toks.line)
            if self.toks.accept("rbrace"):
                return tuple(conds)
            self.toks.expect("comma")

    def parse_child_patterns(self) -> tuple:
        items: list = []
        while True:
            tok = self.toks.peek()
            if tok is None:
                raise RuleSyntaxError("unclosed child pattern", self.toks.line)
            if tok[0] == "rparen":
                self.toks.next()
                return tuple(items)
            if tok[0] == "gap":
                self.toks.next()
                name = self.toks.accept("word")
                if name is None:
                    name = f"_gap{self.gap_count}"
                    self.gap_count += 1
                    items.append(Gap(name, anonymous=True))
                else:
                    items.append(Gap(name))
            else:
                items.append(self.parse_pattern())

    def parse_template(self) -> TemplateNode:
        tok = self.toks.next()
        if tok[0] == "pvar":
            node = TemplateNode("ref", var=tok[1][1:])
        elif tok[0] == "clone":
            node = TemplateNode("clone", var=tok[1][1:])
        elif tok[0] == "hash":
            fmt = tok[1][1:] or None
            node = TemplateNode("new", fmt=fmt)
        else:
            raise RuleSyntaxError(f"bad template item {tok[1]!r}", self.toks.line)
        if self.toks.accept("lbrace"):
            node.assigns = self.parse_assigns()
        elif node.kind == "new":
            raise RuleSyntaxError("new node needs a {...} decoration", self.toks.line)
        if self.toks.accept("lparen"):
            node.children = self.parse_template_children()
        return node

    def parse_assigns(self) -> tuple[Assign, ...]:
        assigns: list[Assign] = []
        if self.toks.accept("rbrace"):
            return ()
        while True:
            var = self.toks.expect("word")
            tok = self.toks.next()
            if tok[0] == "eq":
                op = "set"
            elif tok[0] == "addeq":
                op = "add"
            elif tok[0] == "subeq":
                op = "remove"
            else:
                raise RuleSyntaxError(f"bad assignment near {tok[1]!r}", self.toks.line)
            nxt = self.toks.peek()
            if nxt is not None and nxt[0] == "pvar":
                self.toks.next()
                self.toks.expect("dot")
                attr = self.toks.expect("word")
                value: Lit | Ref = Ref(nxt[1][1:], attr)
            else:
                value = Lit(self.toks.expect("word"))
            assigns.append(Assign(var, op, value))
            if self.toks.accept("rbrace"):
                return tuple(assigns)
            self.toks.expect("comma")

    def parse_template_children(self) -> tuple:
        items: list = []
        while True:
            tok = self.toks.peek()
            if tok is None:
                raise RuleSyntaxError("unclosed template children", self.toks.line)
            if tok[0] == "rparen":
                self.toks.next()
                return tuple(items)
            if tok[0] == "gap":
                self.toks.next()
                name = self.toks.accept("word")
                if name is None:
                    raise RuleSyntaxError("template gaps must be named", self.toks.line)
                items.append(GapRef(name))
            else:
                items.append(self.parse_template())

    # guards: | weakest, then &, then !, then atoms

    def parse_guard(self):
        parts = [self.parse_guard_and()]
        while self.toks.accept("pipe"):
            parts.append(self.parse_guard_and())
        return parts[0] if len(parts) == 1 else GuardOr(tuple(parts))

    def parse_guard_and(self):
        parts = [self.parse_guard_atom()]
        while self.toks.accept("amp"):
            parts.append(self.parse_guard_atom())
        return parts[0] if len(parts) == 1 else GuardAnd(tuple(parts))

    def parse_guard_atom(self):
        if self.toks.accept("bang"):
            return GuardNot(self.parse_guard_atom())
        if self.toks.accept("lparen"):
            inner = self.parse_guard()
            self.toks.expect("rparen")
            return inner
        left = self.parse_operand()
        tok = self.toks.next()
        ops = {"eq": "=", "ne": "!=", "gt": ">", "lt": "<"}
        if tok[0] not in ops:
            raise RuleSyntaxError(f"bad guard operator {tok[1]!r}", self.toks.line)
        right = self.parse_operand()
        return GuardCmp(left, ops[tok[0]], right)

    def parse_operand(self):
        tok = self.toks.next()
        if tok[0] == "pvar":
            self.toks.expect("dot")
            return Ref(tok[1][1:], self.toks.expect("word"))
        if tok[0] == "word":
            return Lit(tok[1])
        raise RuleSyntaxError(f"bad guard operand {tok[1]!r}", self.toks.line)


# --- compile-time checks ---------------------------------------------------


def _pattern_vars(pattern: PatternNode, line: int) -> tuple[set[str], set[str]]:
    node_vars: set[str] = set()
    gap_names: set[str] = set()

    def walk(p: PatternNode):
        if p.var in node_vars:
            raise RuleTypeError(f"pattern variable ?{p.var} bound twice", line)
        node_vars.add(p.var)
        for item in p.children or ():
            if isinstance(item, Gap):
                if not item.anonymous and item.name in gap_names:
                    raise RuleTypeError(f"gap ...{item.name} bound twice", line)
                gap_names.add(item.name)
            else:
                walk(item)

    walk(pattern)
    return node_vars, gap_names


def _check_var_value(schema: VariableSchema, var: str, value: str | None, line: int):
    if schema.kind(var) is None:
        raise RuleTypeError(f"undeclared variable {var}", line)
    if value is not None and not schema.check_value(var, value):
        raise RuleTypeError(f"value {value!r} not declared for {var}", line)


def _check_rule(rule: RewriteRule, schema: VariableSchema):
    line = rule.line
    node_vars, gap_names = _pattern_vars(rule.pattern, line)

    def check_pattern(p: PatternNode):
        for cond in p.conds:
            _check_var_value(schema, cond.var, cond.value, line)
        for item in p.children or ():
            if isinstance(item, PatternNode):
                check_pattern(item)

    check_pattern(rule.pattern)

    def check_value(value: Lit | Ref, var: str):
        if isinstance(value, Lit):
            _check_var_value(schema, var, value.value, line)
        else:
            if value.var not in node_vars:
                raise RuleTypeError(f"unbound variable ?{value.var} in template", line)
            _check_var_value(schema, value.attr, None, line)

    def check_template(t: TemplateNode):
        if t.kind in ("ref", "clone"):
            if t.var not in node_vars:
                raise RuleTypeError(f"unbound template variable ?{t.var}", line)
        if t.kind == "new" and t.fmt is not None and t.fmt not in schema.formats:
            raise RuleTypeError(f"unknown format {t.fmt}", line)
        for a in t.assigns:
            kind = schema.kind(a.var)
            if kind is None:
                raise RuleTypeError(f"undeclared variable {a.var}", line)
            if a.op in ("add", "remove") and kind != "nex":
                raise RuleTypeError(f"{a.var} is exclusive; += and -= need a set variable", line)
            if isinstance(a.value, Lit):
                _check_var_value(schema, a.var, a.value.value, line)
            else:
                check_value(a.value, a.var)
        for item in t.children or ():
            if isinstance(item, GapRef):
                if item.name not in gap_names:
                    raise RuleTypeError(f"unbound gap ...{item.name} in template", line)
            else:
                check_template(item)

    check_template(rule.template)

    def check_guard(g):
        if g is None:
            return
        if isinstance(g, GuardCmp):
            for side in (g.left, g.right):
                if isinstance(side, Ref):
                    if side.var not in node_vars:
                        raise RuleTypeError(f"unbound variable ?{side.var} in guard", line)
                    _check_var_value(schema, side.attr, None, line)
        elif isinstance(g, GuardNot):
            check_guard(g.inner)
        elif isinstance(g, (GuardAnd, GuardOr)):
            for part in g.parts:
                check_guard(part)

    check_guard(rule.guard)


# --- file-level compilation -------------------------------------------------


def _parse_rule(name: str, priority: int, body: str, line: int) -> RewriteRule:
    toks = _Tokens(body, line)
    parser = _RuleParser(toks)
    pattern = parser.parse_pattern()
    tok = toks.next()
    if tok[0] != "arrow":
        raise RuleSyntaxError(f"expected ==> after pattern, got {tok[1]!r}", line)
    template = parser.parse_template()
    guard = None
    nxt = toks.peek()
    if nxt is not None:
        if nxt[0] == "word" and nxt[1] == "WHERE":
            toks.next()
            guard = parser.parse_guard()
        else:
            raise RuleSyntaxError(f"unexpected {nxt[1]!r} after template", line)
    if not toks.done():
        raise RuleSyntaxError("trailing tokens after guard", line)
    return RewriteRule(name, priority, pattern, template, guard, line)


def _compile_segment(name: str, lines: list[tuple[int, str]], schema) -> Grammar:
    rules: list[RewriteRule] = []
    max_iter = DEFAULT_MAX_ITERATIONS
    chunk: list[str] | None = None
    chunk_start = 0

    def flush_rule():
        nonlocal chunk
        if chunk is None:
            return
        body = " ".join(chunk)
        m = _RULE_HEAD_RE.match(body)
        if m is None:
            raise RuleSyntaxError("bad RULE header", chunk_start)
        rule = _parse_rule(m.group(1), int(m.group(2)), m.group(3), chunk_start)
        _check_rule(rule, schema)
        rules.append(rule)
        chunk = None

    for lineno, stripped in lines:
        if stripped.startswith("MAXITER "):
            flush_rule()
            try:
                max_iter = int(stripped.split(None, 1)[1])
            except ValueError:
                raise RuleSyntaxError("bad MAXITER value", lineno) from None
            continue
        if stripped.startswith("RULE "):
            flush_rule()
            chunk = [stripped]
            chunk_start = lineno
            continue
        if stripped:
            if chunk is None:
                raise RuleSyntaxError(f"unexpected line {stripped!r}", lineno)
            chunk.append(stripped)
    flush_rule()
    ordered = sorted(enumerate(rules), key=lambda p: (-p[1].priority, p[0]))
    return Grammar(name, tuple(r for _, r in ordered), schema, max_iter)


def compile_rule_file(text: str, schema: VariableSchema) -> list[Grammar]:
    """Compile a rule file into its grammars, in file order."""
    segments: list[tuple[str, list[tuple[int, str]]]] = []
    cur_name: str | None = None
    cur_lines: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        idx = raw.find("**")
        stripped = (raw[:idx] if idx >= 0 else raw).strip()
        if stripped.startswith("GRAMMAR "):
            if cur_name is not None or any(s for _, s in cur_lines):
                segments.append((cur_name or "main", cur_lines))
            cur_name = stripped.split(None, 1)[1].strip()
            cur_lines = []
        elif stripped:
            cur_lines.append((lineno, stripped))
    segments.append((cur_name or "main", cur_lines))
    return [_compile_segment(name, lines, schema) for name, lines in segments]


def compile_grammar(text: str, schema: VariableSchema) -> Grammar:
    """Compile a rule file expected to hold exactly one grammar."""
    grammars = compile_rule_file(text, schema)
    if len(grammars) != 1:
        raise RuleSyntaxError(f"expected one grammar, found {len(grammars)}")
    return grammars[0]


def compile_grammar_file(path: str | Path, schema: VariableSchema) -> list[Grammar]:
    return compile_rule_file(Path(path).read_text(encoding="utf-8"), schema)
