from typing import List, Optional, Tuple, Union

from ._kge import EmbeddingModel, top_k_tails
from ._manager import _ReasonerManager
from ._neural import role_pairs
from ._parser import parse_role
from ._syntax import ConceptExpr, RoleExpr
from ._trainer import TrainConfig, train
from .exceptions import InvalidConfigError


class NeuralReasoner(_ReasonerManager):
    def retrieve(self, concept: Union[str, ConceptExpr]) -> List[str]:
        """
        Sorted instances of a concept under the neural semantics. Without a
        trained model the reasoner answers from the perfect predictor.
        """
        return sorted(self._submit_retrieval(concept))

    def role_pairs(self, role: Union[str, RoleExpr]) -> List[Tuple[str, str]]:
        if isinstance(role, str):
            role = parse_role(role)
        return sorted(role_pairs(role, self.predictor, self.domain))

    def train(self, cfg: Optional[TrainConfig] = None, on_epoch=None) -> EmbeddingModel:
        """Fit a model to the KB's triple graph and answer from it from now on."""
        model = train(self.graph, cfg, on_epoch=on_epoch)
        self._install_model(model)
        return model

    def top_k(self, head: str, relation: str, k: int = 10) -> List[Tuple[str, float]]:
        if self.model is None:
            raise InvalidConfigError("top_k needs a trained model")
        return top_k_tails(self.model, head, relation, k)
