from enum import Enum


class Builtin(str, Enum):
    """Relation names reserved for the taxonomy triples."""
    TYPE = "rdf:type"
    SUBCLASS_OF = "rdfs:subClassOf"
    SUBPROPERTY_OF = "rdfs:subPropertyOf"

    def __str__(self) -> str:
        return self.value

