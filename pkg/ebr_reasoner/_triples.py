import logging
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, Tuple

import numpy as np
from rdflib import BNode, Graph, Literal, URIRef
from rdflib.namespace import RDF, RDFS

from ._helpers import vocab_fingerprint
from ._syntax import (
    AtomicConcept, ClassAssertion, KnowledgeBase, PropertyAssertion, SubPropertyOf,
)
from .exceptions import NTriplesFormatError
from .vocab import Builtin


logger = logging.getLogger(__name__)

BUILTIN_RELATIONS = tuple(str(b) for b in Builtin)

_BUILTIN_IRIS = {
    str(Builtin.TYPE): RDF.type,
    str(Builtin.SUBCLASS_OF): RDFS.subClassOf,
    str(Builtin.SUBPROPERTY_OF): RDFS.subPropertyOf,
}
_IRI_BUILTINS = {str(iri): name for name, iri in _BUILTIN_IRIS.items()}


@dataclass(frozen=True)
class Triple:
    head: int
    relation: int
    tail: int


@dataclass(frozen=True)
class TripleGraph:
    """
    De-duplicated triples over lexicographically ordered vocabularies, so ids
    are reproducible. Equality compares vocabularies and triples only.
    """
    entities: Tuple[str, ...] = field(default=())
    relations: Tuple[str, ...] = field(default=BUILTIN_RELATIONS)
    triples: Tuple[Triple, ...] = field(default=())

    @classmethod
    def from_named(cls, named: Iterable[Tuple[str, str, str]]) -> "TripleGraph":
        named = set(named)
        entities = tuple(sorted({h for h, _, _ in named} | {t for _, _, t in named}))
        relations = tuple(sorted(set(BUILTIN_RELATIONS) | {r for _, r, _ in named}))
        entity_ids = {name: i for i, name in enumerate(entities)}
        relation_ids = {name: i for i, name in enumerate(relations)}
        triples = sorted(
            (Triple(entity_ids[h], relation_ids[r], entity_ids[t]) for h, r, t in named),
            key=_triple_key,
        )
        return cls(entities, relations, tuple(triples))

    @property
    def fingerprint(self) -> str:
        return vocab_fingerprint(self.entities, self.relations)

    @cached_property
    def entity_index(self) -> Dict[str, int]:
        return {name: i for i, name in enumerate(self.entities)}

    @cached_property
    def relation_index(self) -> Dict[str, int]:
        return {name: i for i, name in enumerate(self.relations)}

    @cached_property
    def by_head_relation(self) -> Dict[Tuple[int, int], Tuple[int, ...]]:
        index = defaultdict(list)
        for t in self.triples:
            index[(t.head, t.relation)].append(t.tail)
        return {key: tuple(tails) for key, tails in index.items()}

    @cached_property
    def by_relation_tail(self) -> Dict[Tuple[int, int], Tuple[int, ...]]:
        index = defaultdict(list)
        for t in self.triples:
            index[(t.relation, t.tail)].append(t.head)
        return {key: tuple(heads) for key, heads in index.items()}

    @cached_property
    def triple_set(self) -> frozenset:
        return frozenset((t.head, t.relation, t.tail) for t in self.triples)

    def as_array(self) -> np.ndarray:
        """Triples as an (n, 3) int64 array of (head, relation, tail) ids."""
        if not self.triples:
            return np.zeros((0, 3), dtype=np.int64)
        return np.array([(t.head, t.relation, t.tail) for t in self.triples], dtype=np.int64)

    def named_triples(self) -> Iterable[Tuple[str, str, str]]:
        for t in self.triples:
            yield self.entities[t.head], self.relations[t.relation], self.entities[t.tail]

    def __len__(self):
        return len(self.triples)

    def __eq__(self, other):
        if not isinstance(other, TripleGraph):
            return NotImplemented
        return (self.entities, self.relations, self.triples) == (
            other.entities, other.relations, other.triples)

    def __hash__(self):
        return hash((self.entities, self.relations, self.triples))


def _triple_key(t: Triple):
    return t.head, t.relation, t.tail


def extract_triples(kb: KnowledgeBase) -> TripleGraph:
    """
    Map the atomic axioms of a KB to triples: C(a) -> (a, rdf:type, C),
    r(a, b) -> (a, r, b), C ⊑ D -> (C, rdfs:subClassOf, D) and
    r ⊑ s -> (r, rdfs:subPropertyOf, s). Everything else is left to the oracle.
    """
    named = []
    for axiom in kb.abox:
        if isinstance(axiom, ClassAssertion) and isinstance(axiom.concept, AtomicConcept):
            named.append((axiom.individual, str(Builtin.TYPE), axiom.concept.name))
        elif isinstance(axiom, PropertyAssertion):
            named.append((axiom.subject, axiom.role, axiom.object))
    for axiom in kb.tbox:
        if isinstance(axiom.sub, AtomicConcept) and isinstance(axiom.sup, AtomicConcept):
            named.append((axiom.sub.name, str(Builtin.SUBCLASS_OF), axiom.sup.name))
    for axiom in kb.rbox:
        if isinstance(axiom, SubPropertyOf):
            named.append((axiom.sub, str(Builtin.SUBPROPERTY_OF), axiom.sup))

    graph = TripleGraph.from_named(named)
    logger.debug(
        f"Extracted {len(graph)} triples over {len(graph.entities)} entities "
        f"and {len(graph.relations)} relations."
    )
    return graph


def _local_iri(base_iri: str, name: str) -> URIRef:
    separator = "" if base_iri.endswith(("#", "/")) else "#"
    return URIRef(f"{base_iri}{separator}{name}")


def _local_name(iri: str) -> str:
    for separator in ("#", "/", ":"):
        if separator in iri:
            return iri.rsplit(separator, 1)[1]
    return iri


def export_ntriples(g: TripleGraph, base_iri: str) -> str:
    """
    Serialize a graph as N-Triples, one sorted line per triple. Builtin
    relations expand to the standard RDF/RDFS namespaces.
    """
    rdf = Graph()
    for head, relation, tail in g.named_triples():
        predicate = _BUILTIN_IRIS.get(relation) or _local_iri(base_iri, relation)
        rdf.add((_local_iri(base_iri, head), predicate, _local_iri(base_iri, tail)))
    lines = sorted(line.strip() for line in rdf.serialize(format="nt").splitlines() if line.strip())
    return "".join(line + "\n" for line in lines)


def import_ntriples(text: str) -> TripleGraph:
    """
    Read an IRI-only N-Triples document. Local names are the IRI fragment,
    else the last path segment, else the text after the last colon; standard
    RDF/RDFS predicates map back to the builtins.
    """
    named = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        single = Graph()
        try:
            single.parse(data=stripped, format="nt")
        except Exception as e:
            raise NTriplesFormatError(f"Malformed N-Triples line: {e}", line_number) from e
        if len(single) != 1:
            raise NTriplesFormatError("Expected exactly one triple", line_number)
        for subject, predicate, obj in single:
            for term in (subject, predicate, obj):
                if isinstance(term, Literal):
                    raise NTriplesFormatError("Literal terms are not supported", line_number)
                if isinstance(term, BNode):
                    raise NTriplesFormatError("Blank nodes are not supported", line_number)
            relation = _IRI_BUILTINS.get(str(predicate)) or _local_name(str(predicate))
            head, tail = _local_name(str(subject)), _local_name(str(obj))
            if not (head and relation and tail):
                raise NTriplesFormatError("IRI without a local name", line_number)
            named.append((head, relation, tail))
    return TripleGraph.from_named(named)
