from dataclasses import dataclass

from ._reasoner_bench import BenchReasoner
from ._reasoner_neural import NeuralReasoner
from ._reasoner_symbolic import SymbolicReasoner


@dataclass
class Reasoner(
    NeuralReasoner,
    SymbolicReasoner,
    BenchReasoner,
):
    def __init__(self, **args):
        super().__init__(**args)
