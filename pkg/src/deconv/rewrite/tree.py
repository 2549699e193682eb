"""Ordered decorated trees.

A tree node carries a decoration (variable assignments: one value for
exclusive variables, a value set for non-exclusive ones) plus an engine
managed ``meta`` dict holding the tactical trace indices.  Rules can read
and write decorations; meta is invisible to the rule language, which is how
trace links survive every rewrite.
"""

from __future__ import annotations

from typing import Iterator


class TreeNode:
    __slots__ = ("dec", "children", "meta")

    def __init__(self, dec=None, children=None, meta=None):
        self.dec: dict = dict(dec) if dec else {}
        self.children: list[TreeNode] = list(children) if children else []
        self.meta: dict = dict(meta) if meta else {}

    # -- traversal ---------------------------------------------------------

    def walk(self) -> Iterator["TreeNode"]:
        """Pre-order."""
        yield self
        for child in self.children:
            yield from child.walk()

    def bfs(self) -> Iterator["TreeNode"]:
        """Level order: shallowest first, then left to right."""
        queue = [self]
        while queue:
            node = queue.pop(0)
            yield node
            queue.extend(node.children)

    def leaves(self) -> Iterator["TreeNode"]:
        if not self.children:
            yield self
        else:
            for child in self.children:
                yield from child.leaves()

    def clone(self) -> "TreeNode":
        return TreeNode(
            dec={k: (frozenset(v) if isinstance(v, frozenset) else v) for k, v in self.dec.items()},
            children=[c.clone() for c in self.children],
            meta=dict(self.meta),
        )

    def get(self, var: str):
        return self.dec.get(var)

    def size(self) -> int:
        return sum(1 for _ in self.walk())

    # -- rendering ---------------------------------------------------------

    def _dec_text(self) -> str:
        parts = []
        for var in sorted(self.dec):
            val = self.dec[var]
            if isinstance(val, frozenset):
                parts.append(f"{var}={{{','.join(sorted(val))}}}")
            else:
                parts.append(f"{var}={val}")
        return ", ".join(parts)

    def bracket(self) -> str:
        """Compact single-line form, documented in docs/tree-dump.ebnf."""
        label = self.dec.get("RL", "?")
        if self.dec.get("INV") == "Y":
            label += "~"
        payload = self.dec.get("LEMMA") or self.dec.get("LU") or self.dec.get("CAT") or "-"
        head = f"{label}:{payload}"
        if not self.children:
            return head
        return head + "(" + " ".join(c.bracket() for c in self.children) + ")"

    def indented(self, depth: int = 0) -> str:
        lines = ["  " * depth + f"[{self._dec_text()}]"]
        for child in self.children:
            lines.append(child.indented(depth + 1))
        return "\n".join(lines)

    def __repr__(self) -> str:  # debugging aid
        return f"TreeNode({self.bracket()})"

    # -- structural equality (decorations + shape, ignoring meta) ----------

    def equals(self, other: "TreeNode", with_meta: bool = False) -> bool:
        if self.dec != other.dec:
            return False
        if with_meta and self.meta != other.meta:
            return False
        if len(self.children) != len(other.children):
            return False
        return all(
            a.equals(b, with_meta) for a, b in zip(self.children, other.children)
        )

    # -- persistence --------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "dec": {
                k: (sorted(v) if isinstance(v, frozenset) else v)
                for k, v in self.dec.items()
            },
            "nex": sorted(k for k, v in self.dec.items() if isinstance(v, frozenset)),
            "meta": self.meta,
            "children": [c.to_json() for c in self.children],
        }

    @classmethod
    def from_json(cls, data: dict) -> "TreeNode":
        nex = set(data.get("nex", ()))
        dec = {
            k: (frozenset(v) if k in nex else v) for k, v in data["dec"].items()
        }
        return cls(
            dec=dec,
            children=[cls.from_json(c) for c in data["children"]],
            meta=data.get("meta", {}),
        )


def check_projective(root: TreeNode) -> list[TreeNode]:
    """Verify tree integrity and leaf-span contiguity; return the leaves.

    Every node must occur exactly once (no sharing) and the leaves under
    each node must occupy a contiguous span of the global left-to-right
    leaf order.  Returns the global leaf list on success.
    """
    seen: set[int] = set()
    for node in root.walk():
        if id(node) in seen:
            raise ValueError("tree is not a tree: node appears twice")
        seen.add(id(node))
    order = {id(leaf): idx for idx, leaf in enumerate(root.leaves())}

    def span(node: TreeNode) -> tuple[int, int, int]:
        if not node.children:
            i = order[id(node)]
            return i, i, 1
        lo, hi, count = None, None, 0
        for child in node.children:
            c_lo, c_hi, c_n = span(child)
            lo = c_lo if lo is None else min(lo, c_lo)
            hi = c_hi if hi is None else max(hi, c_hi)
            count += c_n
        if hi - lo + 1 != count:
            raise ValueError("leaf span not contiguous: tree is not projective")
        return lo, hi, count

    span(root)
    return list(root.leaves())
