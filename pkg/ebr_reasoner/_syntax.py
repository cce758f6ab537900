from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, Iterator, Optional, Set, Tuple, Union

from .constructors import ConstructorClass
from .exceptions import NameKindConflictError, UnknownNameError


class NameKind(str, Enum):
    CONCEPT = "concept"
    ROLE = "role"
    INDIVIDUAL = "individual"

    def __str__(self) -> str:
        return self.value


# Roles

@dataclass(frozen=True)
class AtomicRole:
    name: str


@dataclass(frozen=True)
class InverseRole:
    name: str


@dataclass(frozen=True)
class UniversalRole:
    pass


RoleExpr = Union[AtomicRole, InverseRole, UniversalRole]
UNIVERSAL_ROLE = UniversalRole()


def inverse(role: RoleExpr) -> RoleExpr:
    """Invert a role; inverse(inverse(r)) is r and U is its own inverse."""
    if isinstance(role, AtomicRole):
        return InverseRole(role.name)
    if isinstance(role, InverseRole):
        return AtomicRole(role.name)
    return role


# Concepts

@dataclass(frozen=True)
class AtomicConcept:
    name: str


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class Negation:
    operand: "ConceptExpr"


@dataclass(frozen=True)
class Conjunction:
    left: "ConceptExpr"
    right: "ConceptExpr"


@dataclass(frozen=True)
class Disjunction:
    left: "ConceptExpr"
    right: "ConceptExpr"


@dataclass(frozen=True)
class Existential:
    role: RoleExpr
    filler: "ConceptExpr"


@dataclass(frozen=True)
class Universal:
    role: RoleExpr
    filler: "ConceptExpr"


@dataclass(frozen=True)
class AtLeast:
    n: int
    role: RoleExpr
    filler: "ConceptExpr"

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"Cardinality must be non-negative, got {self.n}")


@dataclass(frozen=True)
class AtMost:
    n: int
    role: RoleExpr
    filler: "ConceptExpr"

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"Cardinality must be non-negative, got {self.n}")


@dataclass(frozen=True)
class Nominal:
    individual: str


ConceptExpr = Union[
    AtomicConcept, Top, Bottom, Negation, Conjunction, Disjunction,
    Existential, Universal, AtLeast, AtMost, Nominal,
]
TOP = Top()
BOTTOM = Bottom()

_PRIMARIES = (AtomicConcept, Top, Bottom, Nominal)


# Axioms

@dataclass(frozen=True)
class SubClassOf:
    sub: ConceptExpr
    sup: ConceptExpr


@dataclass(frozen=True)
class SubPropertyOf:
    sub: str
    sup: str


@dataclass(frozen=True)
class Transitive:
    role: str


@dataclass(frozen=True)
class Functional:
    role: str


@dataclass(frozen=True)
class ClassAssertion:
    concept: ConceptExpr
    individual: str


@dataclass(frozen=True)
class PropertyAssertion:
    role: str
    subject: str
    object: str


Axiom = Union[SubClassOf, SubPropertyOf, Transitive, Functional, ClassAssertion, PropertyAssertion]
RBOX_AXIOMS = (SubPropertyOf, Transitive, Functional)
ABOX_AXIOMS = (ClassAssertion, PropertyAssertion)


@dataclass(frozen=True)
class Signature:
    concepts: Tuple[str, ...] = field(default=())
    roles: Tuple[str, ...] = field(default=())
    individuals: Tuple[str, ...] = field(default=())

    def kind_of(self, name: str) -> Optional[NameKind]:
        if name in self.concepts:
            return NameKind.CONCEPT
        if name in self.roles:
            return NameKind.ROLE
        if name in self.individuals:
            return NameKind.INDIVIDUAL
        return None

    def require(self, name: str, kind: NameKind):
        """Raise UnknownNameError unless name is declared with this kind."""
        if self.kind_of(name) is not kind:
            raise UnknownNameError(name, str(kind))

    def merge(self, other: "Signature") -> "Signature":
        return Signature(
            concepts=tuple(sorted(set(self.concepts) | set(other.concepts))),
            roles=tuple(sorted(set(self.roles) | set(other.roles))),
            individuals=tuple(sorted(set(self.individuals) | set(other.individuals))),
        )


def role_names(role: RoleExpr) -> Iterator[str]:
    if isinstance(role, (AtomicRole, InverseRole)):
        yield role.name


def concept_names(concept: ConceptExpr) -> Iterator[Tuple[str, NameKind]]:
    """Yield every (name, kind) referenced by a concept, depth first."""
    stack = [concept]
    while stack:
        c = stack.pop()
        if isinstance(c, AtomicConcept):
            yield c.name, NameKind.CONCEPT
        elif isinstance(c, Nominal):
            yield c.individual, NameKind.INDIVIDUAL
        elif isinstance(c, Negation):
            stack.append(c.operand)
        elif isinstance(c, (Conjunction, Disjunction)):
            stack.extend((c.right, c.left))
        elif isinstance(c, (Existential, Universal, AtLeast, AtMost)):
            for name in role_names(c.role):
                yield name, NameKind.ROLE
            stack.append(c.filler)


def axiom_names(axiom: Axiom) -> Iterator[Tuple[str, NameKind]]:
    if isinstance(axiom, SubClassOf):
        yield from concept_names(axiom.sub)
        yield from concept_names(axiom.sup)
    elif isinstance(axiom, SubPropertyOf):
        yield axiom.sub, NameKind.ROLE
        yield axiom.sup, NameKind.ROLE
    elif isinstance(axiom, (Transitive, Functional)):
        yield axiom.role, NameKind.ROLE
    elif isinstance(axiom, ClassAssertion):
        yield from concept_names(axiom.concept)
        yield axiom.individual, NameKind.INDIVIDUAL
    elif isinstance(axiom, PropertyAssertion):
        yield axiom.role, NameKind.ROLE
        yield axiom.subject, NameKind.INDIVIDUAL
        yield axiom.object, NameKind.INDIVIDUAL


def collect_signature(axioms: Iterable[Axiom], base: Optional[Signature] = None) -> Signature:
    """
    Collect the signature of a set of axioms, checking that no name is used as
    two different kinds.
    """
    kinds: Dict[str, NameKind] = {}
    if base is not None:
        for kind, names in ((NameKind.CONCEPT, base.concepts), (NameKind.ROLE, base.roles),
                            (NameKind.INDIVIDUAL, base.individuals)):
            for name in names:
                kinds[name] = kind
    for axiom in axioms:
        for name, kind in axiom_names(axiom):
            seen = kinds.setdefault(name, kind)
            if seen is not kind:
                raise NameKindConflictError(name, str(seen), str(kind))
    grouped = defaultdict(set)
    for name, kind in kinds.items():
        grouped[kind].add(name)
    return Signature(
        concepts=tuple(sorted(grouped[NameKind.CONCEPT])),
        roles=tuple(sorted(grouped[NameKind.ROLE])),
        individuals=tuple(sorted(grouped[NameKind.INDIVIDUAL])),
    )


@dataclass(frozen=True)
class KnowledgeBase:
    tbox: Tuple[SubClassOf, ...] = field(default=())
    rbox: Tuple[Union[SubPropertyOf, Transitive, Functional], ...] = field(default=())
    abox: Tuple[Union[ClassAssertion, PropertyAssertion], ...] = field(default=())
    signature: Signature = field(default_factory=Signature)

    @classmethod
    def from_axioms(cls, axioms: Iterable[Axiom], signature: Optional[Signature] = None):
        """
        Sort axioms into their boxes, preserving order, and collect the
        signature. A given signature is extended, never shrunk.
        """
        axioms = list(axioms)
        tbox = tuple(a for a in axioms if isinstance(a, SubClassOf))
        rbox = tuple(a for a in axioms if isinstance(a, RBOX_AXIOMS))
        abox = tuple(a for a in axioms if isinstance(a, ABOX_AXIOMS))
        return cls(tbox, rbox, abox, collect_signature(axioms, base=signature))

    @property
    def axioms(self) -> Tuple[Axiom, ...]:
        return self.tbox + self.rbox + self.abox

    def with_abox(self, abox: Iterable[Axiom]) -> "KnowledgeBase":
        return KnowledgeBase.from_axioms(self.tbox + self.rbox + tuple(abox), signature=self.signature)


# Role hierarchy

def super_roles(rbox: Iterable[Axiom], roles: Iterable[str]) -> Dict[str, Set[str]]:
    """
    Reflexive-transitive closure of the role inclusions: role -> every role
    subsuming it (itself included).
    """
    direct = defaultdict(set)
    for axiom in rbox:
        if isinstance(axiom, SubPropertyOf):
            direct[axiom.sub].add(axiom.sup)
    closure = {}
    for role in set(roles) | set(direct):
        seen = {role}
        frontier = [role]
        while frontier:
            current = frontier.pop()
            for parent in direct.get(current, ()):
                if parent not in seen:
                    seen.add(parent)
                    frontier.append(parent)
        closure[role] = seen
    return closure


def is_simple_role(s: str, kb: KnowledgeBase) -> bool:
    """
    A role is simple iff no transitive role is subsumed by it.
    """
    kb.signature.require(s, NameKind.ROLE)
    transitive = {a.role for a in kb.rbox if isinstance(a, Transitive)}
    closure = super_roles(kb.rbox, kb.signature.roles)
    return not any(s in closure.get(r, {r}) for r in transitive)


def non_simple_roles(kb: KnowledgeBase) -> Set[str]:
    return {r for r in kb.signature.roles if not is_simple_role(r, kb)}


# Rendering

_OR, _AND, _UNARY = 0, 1, 2


def render_role(role: RoleExpr) -> str:
    if isinstance(role, AtomicRole):
        return role.name
    if isinstance(role, InverseRole):
        return f"inverse({role.name})"
    return "U"


def _render(c: ConceptExpr, level: int) -> str:
    if isinstance(c, AtomicConcept):
        return c.name
    if isinstance(c, Top):
        return "Top"
    if isinstance(c, Bottom):
        return "Bottom"
    if isinstance(c, Nominal):
        return "{" + c.individual + "}"

    if isinstance(c, Negation):
        text, precedence = "not " + _render(c.operand, _UNARY), _UNARY
    elif isinstance(c, Existential):
        text, precedence = f"{render_role(c.role)} some {_render(c.filler, _UNARY)}", _UNARY
    elif isinstance(c, Universal):
        text, precedence = f"{render_role(c.role)} only {_render(c.filler, _UNARY)}", _UNARY
    elif isinstance(c, AtLeast):
        text, precedence = f"{render_role(c.role)} min {c.n} {_render(c.filler, _UNARY)}", _UNARY
    elif isinstance(c, AtMost):
        text, precedence = f"{render_role(c.role)} max {c.n} {_render(c.filler, _UNARY)}", _UNARY
    elif isinstance(c, Conjunction):
        text, precedence = f"{_render(c.left, _AND)} and {_render(c.right, _UNARY)}", _AND
    elif isinstance(c, Disjunction):
        text, precedence = f"{_render(c.left, _OR)} or {_render(c.right, _AND)}", _OR
    else:
        raise TypeError(f"Not a concept expression: {c!r}")

    return f"({text})" if precedence < level else text


def render_concept(c: ConceptExpr) -> str:
    """
    Render a concept in the infix grammar with minimal parentheses, so that
    parse_concept(render_concept(c)) == c.
    """
    return _render(c, _OR)


def _render_argument(c: ConceptExpr) -> str:
    text = render_concept(c)
    return text if isinstance(c, _PRIMARIES) else f"({text})"


def render_axiom(axiom: Axiom) -> str:
    if isinstance(axiom, SubClassOf):
        return f"SubClassOf({_render_argument(axiom.sub)} {_render_argument(axiom.sup)})"
    if isinstance(axiom, SubPropertyOf):
        return f"SubObjectPropertyOf({axiom.sub} {axiom.sup})"
    if isinstance(axiom, Transitive):
        return f"TransitiveObjectProperty({axiom.role})"
    if isinstance(axiom, Functional):
        return f"FunctionalObjectProperty({axiom.role})"
    if isinstance(axiom, ClassAssertion):
        return f"ClassAssertion({_render_argument(axiom.concept)} {axiom.individual})"
    if isinstance(axiom, PropertyAssertion):
        return f"ObjectPropertyAssertion({axiom.role} {axiom.subject} {axiom.object})"
    raise TypeError(f"Not an axiom: {axiom!r}")


def render_kb(kb: KnowledgeBase) -> str:
    """Serialize a KB as a `.dl` document, TBox first, then RBox, then ABox."""
    return "".join(render_axiom(a) + "\n" for a in kb.axioms)


_CONSTRUCTOR_TAGS = {
    AtomicConcept: ConstructorClass.ATOMIC,
    Negation: ConstructorClass.NEGATION,
    Conjunction: ConstructorClass.CONJUNCTION,
    Disjunction: ConstructorClass.DISJUNCTION,
    Existential: ConstructorClass.EXISTENTIAL,
    Universal: ConstructorClass.UNIVERSAL,
    AtLeast: ConstructorClass.MIN_RESTRICTION,
    AtMost: ConstructorClass.MAX_RESTRICTION,
    Nominal: ConstructorClass.NOMINAL,
    Top: ConstructorClass.TOP,
    Bottom: ConstructorClass.BOTTOM,
}


def constructor_class(c: ConceptExpr) -> ConstructorClass:
    return _CONSTRUCTOR_TAGS[type(c)]
