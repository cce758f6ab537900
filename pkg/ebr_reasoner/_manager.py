from dataclasses import dataclass, field
import logging
from functools import cached_property
from typing import FrozenSet, Optional, Union

from ._helpers import elapsed_millis, generate_timestamp
from ._kge import EmbeddingModel, check_vocabulary
from ._neural import DEFAULT_GAMMA, EmbeddingPredictor, NeuralDomain, PerfectPredictor, Predictor, retrieve
from ._oracle import MaterializedKB, materialize
from ._parser import parse_concept
from ._syntax import ConceptExpr, KnowledgeBase, render_concept
from ._triples import TripleGraph, extract_triples
from .exceptions import InvalidConfigError


@dataclass
class _ReasonerManager:
    kb: KnowledgeBase = field(default_factory=KnowledgeBase)
    model: Optional[EmbeddingModel] = field(default=None)
    gamma: float = field(default=DEFAULT_GAMMA)
    strict: bool = field(default=False)
    max_workers: int = field(default=1)
    logging_level: int = field(default=logging.INFO)
    log_retrievals: bool = field(default=False)

    def __post_init__(self):
        if self.max_workers < 1:
            raise InvalidConfigError(f"max_workers must be >= 1, got {self.max_workers}")
        self.logger = logging.getLogger(__name__)
        if len(logging.root.handlers) == 0:
            # no handler on root logger set -> we add handler just for this logger to not mess with custom logic from
            # outside
            handler = logging.StreamHandler()
            handler.setFormatter(
                logging.Formatter(
                    fmt="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
                    datefmt="%Y-%m-%d %H:%M:%S",
                )
            )
            handler.setLevel(self.logging_level)
            self.logger.addHandler(handler)

        self.domain = NeuralDomain.from_kb(self.kb, self.gamma)
        self.logger.debug(
            f"Initializing reasoner over {len(self.domain.individuals)} individuals, "
            f"gamma={self.gamma}, strict={self.strict}."
        )
        self._install_model(self.model)

    def _install_model(self, model: Optional[EmbeddingModel]):
        self.model = model
        if model is None:
            self.predictor: Predictor = PerfectPredictor(self.materialization)
            return
        check_vocabulary(model, self.graph.fingerprint)
        self.predictor = EmbeddingPredictor(model)

    @cached_property
    def materialization(self) -> MaterializedKB:
        return materialize(self.kb)

    @cached_property
    def graph(self) -> TripleGraph:
        return extract_triples(self.kb)

    @staticmethod
    def _as_concept(concept: Union[str, ConceptExpr]) -> ConceptExpr:
        if isinstance(concept, str):
            return parse_concept(concept)
        return concept

    def _submit_retrieval(self, concept: Union[str, ConceptExpr]) -> FrozenSet[str]:
        """
        Evaluates a concept under the neural semantics of the installed
        predictor, logging it when log_retrievals is set.
        """
        concept = self._as_concept(concept)
        started = generate_timestamp()
        result = retrieve(concept, self.predictor, self.domain)
        if self.log_retrievals:
            self.logger.debug(
                f"Retrieved {render_concept(concept)}: {len(result)} individuals "
                f"in {elapsed_millis(started):.1f} ms."
            )
        return result
