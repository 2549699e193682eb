from .tree import TreeNode, check_projective
from .schema import VariableSchema, load_schema, parse_schema
from .rules import (
    Grammar,
    RewriteRule,
    compile_grammar,
    compile_grammar_file,
    compile_rule_file,
)
from .engine import apply

__all__ = [
    "TreeNode",
    "check_projective",
    "VariableSchema",
    "load_schema",
    "parse_schema",
    "Grammar",
    "RewriteRule",
    "compile_grammar",
    "compile_grammar_file",
    "compile_rule_file",
    "apply",
]
