import logging
import re
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

from ._syntax import (
    BOTTOM, TOP, UNIVERSAL_ROLE, AtLeast, AtMost, AtomicConcept, AtomicRole,
    ClassAssertion, ConceptExpr, Conjunction, Disjunction, Existential, Functional,
    KnowledgeBase, NameKind, Negation, Nominal, PropertyAssertion, RoleExpr,
    SubClassOf, SubPropertyOf, Transitive, Universal, inverse,
)
from .exceptions import DLSyntaxError, NameKindConflictError


logger = logging.getLogger(__name__)

KEYWORDS = frozenset({
    "not", "and", "or", "some", "only", "min", "max", "inverse", "Top", "Bottom", "U",
})
RESTRICTION_OPERATORS = frozenset({"some", "only", "min", "max"})

_TOKEN = re.compile(
    r"(?P<ws>\s+)|(?P<int>-?\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[(){}])"
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    column: int


_EOF = "eof"


def _tokenize(text: str, line: Optional[int]) -> List[_Token]:
    tokens = []
    position = 0
    while position < len(text):
        match = _TOKEN.match(text, position)
        if match is None:
            raise DLSyntaxError(f"Unexpected character {text[position]!r}", line, position + 1)
        if match.lastgroup != "ws":
            tokens.append(_Token(match.lastgroup, match.group(), position + 1))
        position = match.end()
    tokens.append(_Token(_EOF, "", len(text) + 1))
    return tokens


class _Parser:
    """
    Parses one line (or one standalone expression) of tokens. Every name is
    reported to on_name together with the kind implied by its position.
    """

    def __init__(self, tokens: List[_Token], line: Optional[int],
                 on_name: Optional[Callable[[str, NameKind, _Token], None]] = None):
        self.tokens = tokens
        self.line = line
        self.position = 0
        self.on_name = on_name

    # Token plumbing

    @property
    def current(self) -> _Token:
        return self.tokens[self.position]

    def peek(self, offset=1) -> _Token:
        index = min(self.position + offset, len(self.tokens) - 1)
        return self.tokens[index]

    def advance(self) -> _Token:
        token = self.current
        if token.kind != _EOF:
            self.position += 1
        return token

    def error(self, message, token=None):
        token = token or self.current
        found = "end of input" if token.kind == _EOF else repr(token.text)
        return DLSyntaxError(f"{message}, found {found}", self.line, token.column)

    def expect(self, text) -> _Token:
        if self.current.text != text or self.current.kind == _EOF:
            raise self.error(f"Expected {text!r}")
        return self.advance()

    def expect_end(self):
        if self.current.kind != _EOF:
            raise self.error("Expected end of input")

    def name(self, kind: NameKind) -> str:
        token = self.current
        if token.kind != "name" or token.text in KEYWORDS:
            raise self.error(f"Expected {kind} name")
        self.advance()
        if self.on_name is not None:
            self.on_name(token.text, kind, token)
        return token.text

    # Grammar

    def or_expr(self) -> ConceptExpr:
        expr = self.and_expr()
        while self.current.kind == "name" and self.current.text == "or":
            self.advance()
            expr = Disjunction(expr, self.and_expr())
        return expr

    def and_expr(self) -> ConceptExpr:
        expr = self.unary()
        while self.current.kind == "name" and self.current.text == "and":
            self.advance()
            expr = Conjunction(expr, self.unary())
        return expr

    def unary(self) -> ConceptExpr:
        token = self.current
        if token.kind == "name" and token.text == "not":
            self.advance()
            return Negation(self.unary())
        if token.kind == "name" and token.text in ("inverse", "U"):
            return self.restriction()
        if (token.kind == "name" and token.text not in KEYWORDS
                and self.peek().text in RESTRICTION_OPERATORS):
            return self.restriction()
        return self.primary()

    def restriction(self) -> ConceptExpr:
        role = self.role()
        operator = self.current
        if operator.kind != "name" or operator.text not in RESTRICTION_OPERATORS:
            raise self.error("Expected 'some', 'only', 'min' or 'max'")
        self.advance()
        if operator.text == "some":
            return Existential(role, self.unary())
        if operator.text == "only":
            return Universal(role, self.unary())

        count = self.current
        if count.kind != "int":
            raise self.error("Expected cardinality")
        n = int(count.text)
        if n < 0:
            raise DLSyntaxError(f"Negative cardinality {n}", self.line, count.column)
        self.advance()
        filler = self.unary()
        if operator.text == "min":
            return AtLeast(n, role, filler)
        return AtMost(n, role, filler)

    def role(self) -> RoleExpr:
        token = self.current
        if token.kind == "name" and token.text == "U":
            self.advance()
            return UNIVERSAL_ROLE
        if token.kind == "name" and token.text == "inverse":
            self.advance()
            self.expect("(")
            inner = self.role()
            self.expect(")")
            return inverse(inner)
        return AtomicRole(self.name(NameKind.ROLE))

    def primary(self) -> ConceptExpr:
        token = self.current
        if token.kind == "name" and token.text == "Top":
            self.advance()
            return TOP
        if token.kind == "name" and token.text == "Bottom":
            self.advance()
            return BOTTOM
        if token.text == "{":
            self.advance()
            individual = self.name(NameKind.INDIVIDUAL)
            self.expect("}")
            return Nominal(individual)
        if token.text == "(":
            self.advance()
            expr = self.or_expr()
            self.expect(")")
            return expr
        if token.kind == "name" and token.text not in KEYWORDS:
            return AtomicConcept(self.name(NameKind.CONCEPT))
        raise self.error("Expected concept")


def parse_concept(text: str) -> ConceptExpr:
    """
    Parse a concept expression. Restrictions and negation bind tighter than
    "and", which binds tighter than "or"; both binary operators associate to
    the left.
    """
    parser = _Parser(_tokenize(text, None), None)
    expr = parser.or_expr()
    parser.expect_end()
    return expr


def parse_role(text: str) -> RoleExpr:
    parser = _Parser(_tokenize(text, None), None)
    role = parser.role()
    parser.expect_end()
    return role


def _parse_axiom(parser: _Parser):
    head = parser.current
    if head.kind != "name":
        raise parser.error("Expected axiom keyword")
    parser.advance()
    parser.expect("(")

    keyword = head.text
    if keyword == "SubClassOf":
        axiom = SubClassOf(parser.primary(), parser.primary())
    elif keyword == "SubObjectPropertyOf":
        axiom = SubPropertyOf(parser.name(NameKind.ROLE), parser.name(NameKind.ROLE))
    elif keyword == "TransitiveObjectProperty":
        axiom = Transitive(parser.name(NameKind.ROLE))
    elif keyword == "FunctionalObjectProperty":
        axiom = Functional(parser.name(NameKind.ROLE))
    elif keyword == "ClassAssertion":
        axiom = ClassAssertion(parser.primary(), parser.name(NameKind.INDIVIDUAL))
    elif keyword == "ObjectPropertyAssertion":
        axiom = PropertyAssertion(
            parser.name(NameKind.ROLE),
            parser.name(NameKind.INDIVIDUAL),
            parser.name(NameKind.INDIVIDUAL),
        )
    else:
        raise DLSyntaxError(f"Unknown axiom keyword {keyword!r}", parser.line, head.column)

    parser.expect(")")
    parser.expect_end()
    return axiom


def parse_kb(text: str) -> KnowledgeBase:
    """
    Parse a `.dl` document: one axiom per line, `#` starts a comment. Name
    kinds are inferred from position and must agree across the document.
    """
    kinds: Dict[str, Tuple[NameKind, int, int]] = {}
    axioms = []

    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue

        def on_name(name, kind, token, line_number=line_number):
            seen = kinds.setdefault(name, (kind, line_number, token.column))
            if seen[0] is not kind:
                raise NameKindConflictError(name, str(seen[0]), str(kind), line_number, token.column)

        parser = _Parser(_tokenize(line, line_number), line_number, on_name)
        axioms.append(_parse_axiom(parser))

    kb = KnowledgeBase.from_axioms(axioms)
    logger.debug(
        f"Parsed KB: {len(kb.tbox)} TBox, {len(kb.rbox)} RBox, {len(kb.abox)} ABox axioms."
    )
    return kb
