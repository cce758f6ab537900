"""Neural semantics: concept retrieval over thresholded link predictions."""
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Optional, Sequence, Set, Tuple

import numpy as np

from ._kge import EmbeddingModel, score_all_heads, score_all_tails, sigmoid
from ._oracle import MaterializedKB
from ._syntax import (
    AtLeast, AtMost, AtomicConcept, AtomicRole, Bottom, ConceptExpr, Conjunction, Disjunction,
    Existential, InverseRole, KnowledgeBase, NameKind, Negation, Nominal, RoleExpr, Signature,
    Top, Universal, non_simple_roles, render_role,
)
from .exceptions import InvalidConfigError
from .vocab import Builtin


logger = logging.getLogger(__name__)

DEFAULT_GAMMA = 0.5
TYPE = str(Builtin.TYPE)


class Predictor(ABC):
    """A link predictor addressed by names, returning probabilities in [0, 1]."""

    @abstractmethod
    def predict(self, h: str, r: str, t: str) -> float:
        ...

    @abstractmethod
    def predict_all_tails(self, h: str, r: str, candidates: Sequence[str]) -> np.ndarray:
        """Probabilities of (h, r, c) for every candidate c, in candidate order."""

    @abstractmethod
    def predict_all_heads(self, r: str, t: str, candidates: Sequence[str]) -> np.ndarray:
        """Probabilities of (c, r, t) for every candidate c, in candidate order."""


class EmbeddingPredictor(Predictor):
    """
    Sigmoid of a trained model's scores. Names outside the model's vocabulary
    predict 0.
    """

    def __init__(self, model: EmbeddingModel):
        self.model = model
        self._candidate_ids: Dict[Tuple[str, ...], np.ndarray] = {}

    def _ids(self, candidates: Sequence[str]) -> np.ndarray:
        key = tuple(candidates)
        if key not in self._candidate_ids:
            index = self.model.entity_index
            self._candidate_ids[key] = np.array([index.get(c, -1) for c in key], dtype=np.int64)
        return self._candidate_ids[key]

    def _gather(self, scores: np.ndarray, candidates: Sequence[str]) -> np.ndarray:
        ids = self._ids(candidates)
        probabilities = np.zeros(len(ids))
        known = ids >= 0
        probabilities[known] = sigmoid(scores[ids[known]])
        return probabilities

    def predict(self, h, r, t):
        entities, relations = self.model.entity_index, self.model.relation_index
        if h not in entities or t not in entities or r not in relations:
            return 0.0
        return float(self.predict_all_tails(h, r, (t,))[0])

    def predict_all_tails(self, h, r, candidates):
        h_id = self.model.entity_index.get(h)
        r_id = self.model.relation_index.get(r)
        if h_id is None or r_id is None:
            return np.zeros(len(candidates))
        return self._gather(score_all_tails(self.model, h_id, r_id), candidates)

    def predict_all_heads(self, r, t, candidates):
        r_id = self.model.relation_index.get(r)
        t_id = self.model.entity_index.get(t)
        if r_id is None or t_id is None:
            return np.zeros(len(candidates))
        return self._gather(score_all_heads(self.model, r_id, t_id), candidates)


class PerfectPredictor(Predictor):
    """Predicts 1.0 exactly for the facts of a materialized KB, 0.0 otherwise."""

    def __init__(self, mkb: MaterializedKB):
        self.mkb = mkb

    def predict(self, h, r, t):
        if r == TYPE:
            return 1.0 if self.mkb.has_type(h, t) else 0.0
        return 1.0 if self.mkb.has_role(r, h, t) else 0.0

    def predict_all_tails(self, h, r, candidates):
        if r == TYPE:
            return np.array([1.0 if self.mkb.has_type(h, c) else 0.0 for c in candidates])
        successors = self.mkb.successors.get(r, {}).get(h, frozenset())
        return np.array([1.0 if c in successors else 0.0 for c in candidates])

    def predict_all_heads(self, r, t, candidates):
        if r == TYPE:
            members = self.mkb.memberships.get(t, frozenset())
            return np.array([1.0 if c in members else 0.0 for c in candidates])
        return np.array([1.0 if self.mkb.has_role(r, c, t) else 0.0 for c in candidates])


def make_perfect_predictor(mkb: MaterializedKB) -> PerfectPredictor:
    return PerfectPredictor(mkb)


@dataclass(frozen=True)
class NeuralDomain:
    """
    Candidate individuals and the threshold γ. When a signature is given,
    concept and role names are checked against it.
    """
    individuals: Tuple[str, ...]
    gamma: float = field(default=DEFAULT_GAMMA)
    signature: Optional[Signature] = field(default=None)
    non_simple_roles: FrozenSet[str] = field(default=frozenset())

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise InvalidConfigError(f"gamma must lie strictly between 0 and 1, got {self.gamma}")

    @classmethod
    def from_kb(cls, kb: KnowledgeBase, gamma: float = DEFAULT_GAMMA) -> "NeuralDomain":
        return cls(
            individuals=kb.signature.individuals,
            gamma=gamma,
            signature=kb.signature,
            non_simple_roles=frozenset(non_simple_roles(kb)),
        )


class _NeuralEvaluator:
    """
    Evaluates concepts to boolean masks over the candidate individuals. Role
    matrices are memoized for the duration of one retrieval.
    """

    def __init__(self, p: Predictor, dom: NeuralDomain):
        self.p = p
        self.dom = dom
        self.names = dom.individuals
        self.position = {name: i for i, name in enumerate(self.names)}
        self.size = len(self.names)
        self._roles: Dict[str, np.ndarray] = {}

    def _require(self, name, kind):
        if self.dom.signature is not None:
            self.dom.signature.require(name, kind)

    def _atomic_role(self, name: str) -> np.ndarray:
        if name not in self._roles:
            self._require(name, NameKind.ROLE)
            matrix = np.zeros((self.size, self.size), dtype=bool)
            for i, head in enumerate(self.names):
                matrix[i] = self.p.predict_all_tails(head, name, self.names) >= self.dom.gamma
            self._roles[name] = matrix
        return self._roles[name]

    def role_matrix(self, role: RoleExpr) -> np.ndarray:
        if isinstance(role, AtomicRole):
            return self._atomic_role(role.name)
        if isinstance(role, InverseRole):
            return self._atomic_role(role.name).T
        return np.ones((self.size, self.size), dtype=bool)

    def _check_simple(self, role: RoleExpr):
        if isinstance(role, (AtomicRole, InverseRole)) and role.name in self.dom.non_simple_roles:
            logger.warning(
                f"Role '{render_role(role)}' is not simple but appears in a cardinality "
                f"restriction; evaluating it anyway."
            )

    def evaluate(self, c: ConceptExpr) -> np.ndarray:
        if isinstance(c, AtomicConcept):
            self._require(c.name, NameKind.CONCEPT)
            return self.p.predict_all_heads(TYPE, c.name, self.names) >= self.dom.gamma
        if isinstance(c, Top):
            return np.ones(self.size, dtype=bool)
        if isinstance(c, Bottom):
            return np.zeros(self.size, dtype=bool)
        if isinstance(c, Nominal):
            mask = np.zeros(self.size, dtype=bool)
            if c.individual in self.position:
                mask[self.position[c.individual]] = True
            return mask
        if isinstance(c, Negation):
            return ~self.evaluate(c.operand)
        if isinstance(c, Conjunction):
            return self.evaluate(c.left) & self.evaluate(c.right)
        if isinstance(c, Disjunction):
            return self.evaluate(c.left) | self.evaluate(c.right)
        if isinstance(c, Universal):
            return self.evaluate(Negation(Existential(c.role, Negation(c.filler))))

        filler = self.evaluate(c.filler)
        if isinstance(c, (AtLeast, AtMost)):
            self._check_simple(c.role)
        matrix = self.role_matrix(c.role)
        if isinstance(c, Existential):
            return (matrix & filler[None, :]).any(axis=1)
        counts = (matrix & filler[None, :]).sum(axis=1)
        if isinstance(c, AtLeast):
            return counts >= c.n
        if isinstance(c, AtMost):
            return counts <= c.n
        raise TypeError(f"Not a concept expression: {c!r}")

    def to_names(self, mask: np.ndarray) -> FrozenSet[str]:
        return frozenset(self.names[i] for i in np.flatnonzero(mask))


def retrieve(c: ConceptExpr, p: Predictor, dom: NeuralDomain) -> FrozenSet[str]:
    """Instances of c under the neural semantics of predictor p at threshold γ."""
    evaluator = _NeuralEvaluator(p, dom)
    return evaluator.to_names(evaluator.evaluate(c))


def role_pairs(r: RoleExpr, p: Predictor, dom: NeuralDomain) -> Set[Tuple[str, str]]:
    evaluator = _NeuralEvaluator(p, dom)
    matrix = evaluator.role_matrix(r)
    names = evaluator.names
    return {(names[i], names[j]) for i, j in zip(*np.nonzero(matrix))}
