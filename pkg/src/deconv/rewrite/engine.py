"""Fixpoint application of a grammar over a decorated tree.

Strategy: repeatedly take the highest-priority rule that matches anywhere,
at its shallowest-then-leftmost match, apply its action, and rescan from
the root.  The loop stops when no rule matches; a grammar that keeps
matching past its iteration cap raises IterationLimit, which signals a
non-terminating rule pack rather than a bad input.

Matched nodes keep their identity (and therefore their engine-managed
``meta`` trace indices) across an application.  Cloned nodes copy the
source decoration as it was *before* the rule's own updates; created and
cloned nodes inherit the graph index ``n`` of their template parent, which
is what makes inserted function words traceable to their governor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from ..errors import IterationLimit, RuleTypeError
from .rules import (
    Assign,
    Cond,
    Gap,
    GapRef,
    Grammar,
    GuardAnd,
    GuardCmp,
    GuardNot,
    GuardOr,
    Lit,
    PatternNode,
    Ref,
    RewriteRule,
    TemplateNode,
)
from .schema import VariableSchema
from .tree import TreeNode


@dataclass
class Match:
    rule: RewriteRule
    node: TreeNode
    parent: TreeNode | None
    bindings: dict  # var -> TreeNode, gap name -> list[TreeNode]


def _cond_ok(cond: Cond, dec: dict) -> bool:
    value = dec.get(cond.var)
    if cond.kind == "unset":
        return value is None
    if cond.kind == "set":
        return value is not None
    if cond.kind == "eq":
        if value is None:
            return False
        if isinstance(value, frozenset):
            return cond.value in value
        return value == cond.value
    # ne: satisfied by unset as well as by a different value
    if value is None:
        return True
    if isinstance(value, frozenset):
        return cond.value not in value
    return value != cond.value


def _match_node(pat: PatternNode, node: TreeNode, binding: dict) -> Iterator[dict]:
    if not all(_cond_ok(c, node.dec) for c in pat.conds):
        return
    base = dict(binding)
    base[pat.var] = node
    if pat.children is None:
        yield base
    else:
        yield from _match_seq(pat.children, node.children, 0, 0, base)


def _match_seq(items, children, i_item, i_child, binding) -> Iterator[dict]:
    if i_item == len(items):
        if i_child == len(children):
            yield binding
        return
    item = items[i_item]
    if isinstance(item, Gap):
        # shortest gap first keeps matching deterministic
        for length in range(len(children) - i_child + 1):
            nxt = dict(binding)
            nxt[item.name] = children[i_child : i_child + length]
            yield from _match_seq(items, children, i_item + 1, i_child + length, nxt)
    else:
        if i_child >= len(children):
            return
        for bound in _match_node(item, children[i_child], binding):
            yield from _match_seq(items, children, i_item + 1, i_child + 1, bound)


def _resolve(value: Lit | Ref, pre: dict):
    if isinstance(value, Lit):
        return value.value
    dec = pre.get(value.var)
    return None if dec is None else dec.get(value.attr)


def _guard_ok(guard, pre: dict, schema: VariableSchema) -> bool:
    if guard is None:
        return True
    if isinstance(guard, GuardAnd):
        return all(_guard_ok(p, pre, schema) for p in guard.parts)
    if isinstance(guard, GuardOr):
        return any(_guard_ok(p, pre, schema) for p in guard.parts)
    if isinstance(guard, GuardNot):
        return not _guard_ok(guard.inner, pre, schema)
    left = _resolve(guard.left, pre)
    right = _resolve(guard.right, pre)
    if guard.op == "=":
        if isinstance(left, frozenset) and isinstance(right, str):
            return right in left
        if isinstance(right, frozenset) and isinstance(left, str):
            return left in right
        return left is not None and left == right
    if guard.op == "!=":
        if isinstance(left, frozenset) and isinstance(right, str):
            return right not in left
        if isinstance(right, frozenset) and isinstance(left, str):
            return left not in right
        return left != right
    if left is None or right is None:
        return False
    if isinstance(left, frozenset) or isinstance(right, frozenset):
        raise RuleTypeError(f"ordered comparison on set values: {left!r} {guard.op} {right!r}")
    # < and > compare positions in the declared value order; both sides must
    # belong to the same variable for that to make sense, so we locate the
    # order by probing the refs involved.
    var = None
    for side in (guard.left, guard.right):
        if isinstance(side, Ref):
            var = side.attr
            break
    if var is None:
        raise RuleTypeError("ordered comparison needs a variable reference")
    li = schema.value_index(var, left)
    ri = schema.value_index(var, right)
    return li > ri if guard.op == ">" else li < ri


def _apply_assign(node: TreeNode, assign: Assign, pre: dict, schema: VariableSchema):
    value = _resolve(assign.value, pre)
    if value is None:
        return  # copying an unset variable is a no-op
    kind = schema.kind(assign.var)
    if kind == "exc":
        if isinstance(value, frozenset):
            raise RuleTypeError(f"cannot assign a set to exclusive {assign.var}")
        if not schema.check_value(assign.var, value):
            raise RuleTypeError(f"bad value {value!r} for {assign.var}")
        node.dec[assign.var] = value
        return
    values = frozenset({value}) if isinstance(value, str) else frozenset(value)
    for v in values:
        if not schema.check_value(assign.var, v):
            raise RuleTypeError(f"bad value {v!r} for {assign.var}")
    current = node.dec.get(assign.var, frozenset())
    if assign.op == "set":
        node.dec[assign.var] = values
    elif assign.op == "add":
        node.dec[assign.var] = current | values
    else:
        node.dec[assign.var] = current - values


class _UidAlloc:
    def __init__(self, root: TreeNode):
        self.next = 1 + max(
            (n.meta.get("t", 0) for n in root.walk()), default=0
        )

    def __call__(self) -> int:
        uid = self.next
        self.next += 1
        return uid


def _instantiate(
    template: TemplateNode,
    bindings: dict,
    pre: dict,
    schema: VariableSchema,
    alloc,
    parent_n,
) -> TreeNode:
    if template.kind == "ref":
        node = bindings[template.var]
    elif template.kind == "clone":
        src = bindings[template.var]
        node = TreeNode(
            dec=dict(pre[template.var]),
            meta={"n": src.meta.get("n"), "t": alloc(), "from_t": src.meta.get("t")},
        )
    else:
        dec = dict(schema.formats[template.fmt]) if template.fmt else {}
        node = TreeNode(dec=dec, meta={"n": parent_n, "t": alloc()})
    for assign in template.assigns:
        _apply_assign(node, assign, pre, schema)
    own_n = node.meta.get("n", parent_n)
    if template.children is not None:
        children: list[TreeNode] = []
        for item in template.children:
            if isinstance(item, GapRef):
                children.extend(bindings[item.name])
            else:
                children.append(
                    _instantiate(item, bindings, pre, schema, alloc, own_n)
                )
        node.children = children
    elif template.kind in ("clone", "new"):
        node.children = []
    if template.kind == "new" and node.meta.get("n") is None:
        node.meta["n"] = parent_n
    return node


def _find_match(grammar: Grammar, root: TreeNode) -> Match | None:
    parents: dict[int, TreeNode | None] = {id(root): None}
    order: list[TreeNode] = []
    queue = [root]
    while queue:
        node = queue.pop(0)
        order.append(node)
        for child in node.children:
            parents[id(child)] = node
            queue.append(child)
    for rule in grammar.rules:
        for node in order:
            for binding in _match_node(rule.pattern, node, {}):
                pre = {
                    var: dict(val.dec)
                    for var, val in binding.items()
                    if isinstance(val, TreeNode)
                }
                if _guard_ok(rule.guard, pre, grammar.schema):
                    return Match(rule, node, parents[id(node)], binding)
    return None


def apply(grammar: Grammar, tree: TreeNode, uid_alloc=None) -> TreeNode:
    """Rewrite to fixpoint; the input tree is mutated and must be owned.

    Returns the (possibly new) root.  Raises IterationLimit when the number
    of rule applications exceeds the grammar's cap.
    """
    root = tree
    alloc = uid_alloc or _UidAlloc(root)
    count = 0
    while True:
        match = _find_match(grammar, root)
        if match is None:
            return root
        count += 1
        if count > grammar.max_iterations:
            raise IterationLimit(
                f"grammar {grammar.name!r}: no fixpoint after "
                f"{grammar.max_iterations} applications (rule {match.rule.name!r} still firing)"
            )
        pre = {
            var: dict(node.dec)
            for var, node in match.bindings.items()
            if isinstance(node, TreeNode)
        }
        root_n = match.node.meta.get("n")
        replacement = _instantiate(
            match.rule.template, match.bindings, pre, grammar.schema, alloc, root_n
        )
        if match.parent is None:
            root = replacement
        elif replacement is not match.node:
            idx = next(
                i for i, c in enumerate(match.parent.children) if c is match.node
            )
            match.parent.children[idx] = replacement
