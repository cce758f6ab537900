import logging
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, FrozenSet, List, Set, Tuple

from ._syntax import (
    AtLeast, AtMost, AtomicConcept, AtomicRole, Axiom, Bottom, ClassAssertion, ConceptExpr,
    Conjunction, Disjunction, Existential, Functional, InverseRole, KnowledgeBase, NameKind,
    Negation, Nominal, PropertyAssertion, RoleExpr, Top, Transitive, Universal,
    render_axiom, super_roles,
)
from .exceptions import InconsistentKBError


logger = logging.getLogger(__name__)

Pair = Tuple[str, str]


class ClashKind(str, Enum):
    DISJOINTNESS = "disjointness"
    FUNCTIONALITY = "functionality"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Clash:
    kind: ClashKind
    axiom: Axiom
    individuals: Tuple[str, ...]

    def describe(self) -> str:
        return f"{self.kind}: {render_axiom(self.axiom)} violated by {', '.join(self.individuals)}"


@dataclass(frozen=True, eq=False)
class MaterializedKB:
    """
    Closure of the ABox under atomic subsumption, role inclusions and
    transitivity. Immutable once built.
    """
    memberships: Dict[str, FrozenSet[str]]
    role_extensions: Dict[str, FrozenSet[Pair]]
    subclass_closure: Dict[str, FrozenSet[str]]
    subrole_closure: Dict[str, FrozenSet[str]]
    individuals: Tuple[str, ...]
    kb: KnowledgeBase = field(repr=False)

    @cached_property
    def successors(self) -> Dict[str, Dict[str, FrozenSet[str]]]:
        index = {}
        for role, pairs in self.role_extensions.items():
            by_subject = defaultdict(set)
            for subject, obj in pairs:
                by_subject[subject].add(obj)
            index[role] = {s: frozenset(objs) for s, objs in by_subject.items()}
        return index

    def has_type(self, individual: str, concept: str) -> bool:
        return individual in self.memberships.get(concept, ())

    def has_role(self, role: str, subject: str, obj: str) -> bool:
        return (subject, obj) in self.role_extensions.get(role, ())

    def fact_count(self) -> int:
        return sum(map(len, self.memberships.values())) + sum(map(len, self.role_extensions.values()))


def _subclass_closure(kb: KnowledgeBase) -> Dict[str, FrozenSet[str]]:
    direct = defaultdict(set)
    for axiom in kb.tbox:
        if isinstance(axiom.sub, AtomicConcept) and isinstance(axiom.sup, AtomicConcept):
            direct[axiom.sub.name].add(axiom.sup.name)
    closure = {}
    for concept in kb.signature.concepts:
        seen = {concept}
        frontier = [concept]
        while frontier:
            for parent in direct.get(frontier.pop(), ()):
                if parent not in seen:
                    seen.add(parent)
                    frontier.append(parent)
        closure[concept] = frozenset(seen)
    return closure


def _atomic_conjuncts(concept: ConceptExpr):
    if isinstance(concept, AtomicConcept):
        yield concept.name
    elif isinstance(concept, Conjunction):
        yield from _atomic_conjuncts(concept.left)
        yield from _atomic_conjuncts(concept.right)
    elif not isinstance(concept, Top):
        logger.debug(f"Ignoring complex assertion part {concept!r} during materialization.")


def _transitive_closure(pairs: Set[Pair]) -> Set[Pair]:
    successors = defaultdict(set)
    for subject, obj in pairs:
        successors[subject].add(obj)
    closed = set()
    for start in list(successors):
        seen = set()
        frontier = list(successors[start])
        while frontier:
            node = frontier.pop()
            if node in seen:
                continue
            seen.add(node)
            frontier.extend(successors.get(node, ()))
        closed.update((start, node) for node in seen)
    return closed


def materialize(kb: KnowledgeBase) -> MaterializedKB:
    """
    Least fixpoint of atomic subsumption propagation, role inclusion
    propagation and transitive closure. Complex GCIs take no part.
    """
    subclass = _subclass_closure(kb)
    subrole = {r: frozenset(s) for r, s in super_roles(kb.rbox, kb.signature.roles).items()}

    members = defaultdict(set)
    pairs = defaultdict(set)
    for axiom in kb.abox:
        if isinstance(axiom, ClassAssertion):
            for concept in _atomic_conjuncts(axiom.concept):
                for sup in subclass.get(concept, (concept,)):
                    members[sup].add(axiom.individual)
        elif isinstance(axiom, PropertyAssertion):
            pairs[axiom.role].add((axiom.subject, axiom.object))

    transitive = sorted({a.role for a in kb.rbox if isinstance(a, Transitive)})
    changed = True
    while changed:
        changed = False
        for role in sorted(pairs):
            for sup in subrole.get(role, (role,)):
                if sup != role and not pairs[role] <= pairs[sup]:
                    pairs[sup] |= pairs[role]
                    changed = True
        for role in transitive:
            closed = _transitive_closure(pairs[role])
            if not closed <= pairs[role]:
                pairs[role] |= closed
                changed = True

    mkb = MaterializedKB(
        memberships={c: frozenset(members.get(c, ())) for c in kb.signature.concepts},
        role_extensions={r: frozenset(pairs.get(r, ())) for r in kb.signature.roles},
        subclass_closure=subclass,
        subrole_closure=subrole,
        individuals=kb.signature.individuals,
        kb=kb,
    )
    logger.debug(f"Materialized {mkb.fact_count()} facts over {len(mkb.individuals)} individuals.")
    return mkb


def detect_clashes(mkb: MaterializedKB, kb: KnowledgeBase) -> List[Clash]:
    """
    Report atomic disjointness axioms X ⊓ Y ⊑ ⊥ with a common member and
    functional roles with an individual having two distinct successors.
    """
    clashes = []
    for axiom in kb.tbox:
        sub = axiom.sub
        if (isinstance(axiom.sup, Bottom) and isinstance(sub, Conjunction)
                and isinstance(sub.left, AtomicConcept) and isinstance(sub.right, AtomicConcept)):
            both = mkb.memberships.get(sub.left.name, frozenset()) & mkb.memberships.get(sub.right.name, frozenset())
            if both:
                clashes.append(Clash(ClashKind.DISJOINTNESS, axiom, tuple(sorted(both))))
    for axiom in kb.rbox:
        if isinstance(axiom, Functional):
            successors = mkb.successors.get(axiom.role, {})
            offenders = sorted(s for s, objs in successors.items() if len(objs) > 1)
            if offenders:
                clashes.append(Clash(ClashKind.FUNCTIONALITY, axiom, tuple(offenders)))
    return clashes


class _OracleEvaluator:
    def __init__(self, mkb: MaterializedKB):
        self.mkb = mkb
        self.signature = mkb.kb.signature
        self.domain = frozenset(mkb.individuals)

    def successors(self, role: RoleExpr) -> Dict[str, FrozenSet[str]]:
        if isinstance(role, AtomicRole):
            self.signature.require(role.name, NameKind.ROLE)
            return self.mkb.successors.get(role.name, {})
        if isinstance(role, InverseRole):
            self.signature.require(role.name, NameKind.ROLE)
            swapped = defaultdict(set)
            for subject, obj in self.mkb.role_extensions.get(role.name, ()):
                swapped[obj].add(subject)
            return {k: frozenset(v) for k, v in swapped.items()}
        return {x: self.domain for x in self.domain}

    def evaluate(self, c: ConceptExpr) -> FrozenSet[str]:
        if isinstance(c, AtomicConcept):
            self.signature.require(c.name, NameKind.CONCEPT)
            return self.mkb.memberships.get(c.name, frozenset()) & self.domain
        if isinstance(c, Top):
            return self.domain
        if isinstance(c, Bottom):
            return frozenset()
        if isinstance(c, Nominal):
            return frozenset({c.individual}) & self.domain
        if isinstance(c, Negation):
            return self.domain - self.evaluate(c.operand)
        if isinstance(c, Conjunction):
            return self.evaluate(c.left) & self.evaluate(c.right)
        if isinstance(c, Disjunction):
            return self.evaluate(c.left) | self.evaluate(c.right)

        filler = self.evaluate(c.filler)
        successors = self.successors(c.role)
        empty = frozenset()
        if isinstance(c, Existential):
            return frozenset(x for x in self.domain if successors.get(x, empty) & filler)
        if isinstance(c, Universal):
            return frozenset(x for x in self.domain if successors.get(x, empty) <= filler)
        if isinstance(c, AtLeast):
            return frozenset(x for x in self.domain if len(successors.get(x, empty) & filler) >= c.n)
        if isinstance(c, AtMost):
            return frozenset(x for x in self.domain if len(successors.get(x, empty) & filler) <= c.n)
        raise TypeError(f"Not a concept expression: {c!r}")


def oracle_retrieve(c: ConceptExpr, mkb: MaterializedKB, strict: bool = False) -> FrozenSet[str]:
    """
    Closed-world extension of c over the materialized individuals. In strict
    mode an inconsistent KB is refused, as a classical reasoner would.
    """
    if strict:
        clashes = detect_clashes(mkb, mkb.kb)
        if clashes:
            raise InconsistentKBError(clashes)
    return _OracleEvaluator(mkb).evaluate(c)


def kb_from_materialization(mkb: MaterializedKB) -> KnowledgeBase:
    """Recast the closure as a KB whose ABox lists every derived fact."""
    abox = [
        ClassAssertion(AtomicConcept(concept), individual)
        for concept in sorted(mkb.memberships)
        for individual in sorted(mkb.memberships[concept])
    ]
    abox += [
        PropertyAssertion(role, subject, obj)
        for role in sorted(mkb.role_extensions)
        for subject, obj in sorted(mkb.role_extensions[role])
    ]
    return KnowledgeBase.from_axioms(mkb.kb.tbox + mkb.kb.rbox + tuple(abox), signature=mkb.kb.signature)
