from enum import Enum


class Scorer(str, Enum):
    COMPLEX = "complex"
    DISTMULT = "distmult"
    TRANSE = "transe"

    def __str__(self) -> str:
        return self.value


class Optimizer(str, Enum):
    ADAM = "adam"
    SGD = "sgd"

    def __str__(self) -> str:
        return self.value
