from enum import Enum


class ConstructorClass(str, Enum):
    ATOMIC = "atomic"
    NEGATION = "negation"
    CONJUNCTION = "conjunction"
    DISJUNCTION = "disjunction"
    EXISTENTIAL = "existential"
    UNIVERSAL = "universal"
    MIN_RESTRICTION = "min-restriction"
    MAX_RESTRICTION = "max-restriction"
    NOMINAL = "nominal"
    TOP = "top"
    BOTTOM = "bottom"

    def __str__(self) -> str:
        return self.value


# Benchmark buckets; Top and Bottom are tagged but never sampled at the root.
BENCH_CLASSES = (
    ConstructorClass.ATOMIC,
    ConstructorClass.NEGATION,
    ConstructorClass.CONJUNCTION,
    ConstructorClass.DISJUNCTION,
    ConstructorClass.EXISTENTIAL,
    ConstructorClass.UNIVERSAL,
    ConstructorClass.MIN_RESTRICTION,
    ConstructorClass.MAX_RESTRICTION,
    ConstructorClass.NOMINAL,
)
