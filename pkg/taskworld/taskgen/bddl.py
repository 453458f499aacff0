"""
BDDL emission and parsing.

Documents follow the BEHAVIOR task-file layout:

  (define (problem <name>)
      (:domain taskworld)
      (:objects <id>... - object)
      (:init <literal>...)
      (:goal (and <literal>...)))

The parser also accepts bare `(:init ...)(:goal ...)` sections and ignores
headers it does not need. Atoms are case-insensitive.
"""

from __future__ import annotations
import re
from dataclasses import dataclass
from typing import Union

from ..core.errors import BddlParseError, InvalidParamError
from ..models.predicates import Conjunction, Predicate, PredicateName
from ..models.tasks import SimpleTask

DOMAIN = "taskworld"
INDENT = "    "

_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")


# ─── Emit ─────────────────────────────────────────────────────────────────────

def emit_bddl(subtask: SimpleTask) -> str:
    objects = " ".join(sorted(subtask.object_ids()))
    init = "\n".join(f"{INDENT * 2}{p.to_bddl()}" for p in subtask.init)
    goal = "\n".join(f"{INDENT * 3}{p.to_bddl()}" for p in subtask.goal)
    return (
        f"(define (problem {subtask.name})\n"
        f"{INDENT}(:domain {DOMAIN})\n\n"
        f"{INDENT}(:objects\n{INDENT * 2}{objects} - object\n{INDENT})\n\n"
        f"{INDENT}(:init\n{init}\n{INDENT})\n\n"
        f"{INDENT}(:goal\n{INDENT * 2}(and\n{goal}\n{INDENT * 2})\n{INDENT})\n"
        f")\n"
    )


# ─── Read ─────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Atom:
    text: str
    line: int
    column: int


@dataclass(frozen=True)
class Expr:
    items: tuple["Node", ...]
    line: int
    column: int

    @property
    def head(self) -> str | None:
        if self.items and isinstance(self.items[0], Atom):
            return self.items[0].text
        return None


Node = Union[Atom, Expr]


def read_sexprs(text: str) -> list[Node]:
    """Tokenise and nest. Unbalanced parentheses raise with the offending position."""
    line, col = 1, 1
    stack: list[tuple[int, int, list[Node]]] = []
    top: list[Node] = []
    for m in _TOKEN.finditer(text):
        tok = m.group()
        if tok == "(":
            stack.append((line, col, []))
        elif tok == ")":
            if not stack:
                raise BddlParseError("unexpected ')'", line, col)
            l0, c0, items = stack.pop()
            expr = Expr(tuple(items), l0, c0)
            (stack[-1][2] if stack else top).append(expr)
        elif not tok.isspace() and not tok.startswith(";"):
            (stack[-1][2] if stack else top).append(Atom(tok.lower(), line, col))
        newlines = tok.count("\n")
        if newlines:
            line += newlines
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
    if stack:
        l0, c0, _ = stack[-1]
        raise BddlParseError("unclosed '('", l0, c0)
    return top


def _literal(node: Node) -> Predicate:
    if not isinstance(node, Expr) or node.head is None:
        line, col = node.line, node.column
        raise BddlParseError("expected a predicate literal", line, col)
    if node.head == "not":
        if len(node.items) != 2:
            raise BddlParseError("'not' takes exactly one literal", node.line, node.column)
        return _literal(node.items[1]).negate()
    try:
        name = PredicateName(node.head)
    except ValueError:
        raise BddlParseError(f"unknown predicate {node.head!r}", node.line, node.column) from None
    args = []
    for arg in node.items[1:]:
        if not isinstance(arg, Atom):
            raise BddlParseError("predicate arguments must be atoms", arg.line, arg.column)
        args.append(arg.text)
    try:
        return Predicate(name, tuple(args))
    except InvalidParamError as e:
        raise BddlParseError(e.message, node.line, node.column) from e


def parse_conjunction(nodes: tuple[Node, ...]) -> Conjunction:
    """Literals of a section body, flattening any `(and ...)` wrappers."""
    out: list[Predicate] = []
    for node in nodes:
        if isinstance(node, Expr) and node.head == "and":
            out.extend(parse_conjunction(node.items[1:]))
        else:
            out.append(_literal(node))
    return tuple(out)


def _sections(nodes: list[Node]) -> dict[str, Expr]:
    found: dict[str, Expr] = {}
    for node in nodes:
        if not isinstance(node, Expr):
            continue
        if node.head == "define":
            found.update(_sections(list(node.items[1:])))
        elif node.head and node.head.startswith(":"):
            if node.head in found:
                raise BddlParseError(f"duplicate {node.head} section", node.line, node.column)
            found[node.head] = node
    return found


def parse_bddl(text: str) -> tuple[Conjunction, Conjunction]:
    sections = _sections(read_sexprs(text))
    result = []
    for key in (":init", ":goal"):
        if key not in sections:
            raise BddlParseError(f"missing ({key} ...) section", 1, 1)
        section = sections[key]
        literals = parse_conjunction(section.items[1:])
        if not literals:
            raise BddlParseError(f"({key} ...) is empty", section.line, section.column)
        result.append(literals)
    return result[0], result[1]
