import json
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Tuple

import numpy as np

from ._helpers import vocab_fingerprint
from .exceptions import InvalidConfigError, ModelFormatError, OutOfVocabularyError
from .scorers import Scorer


logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
LOG_CLAMP = 1e-12


@dataclass(eq=False)
class EmbeddingModel:
    """
    Entity and relation parameter matrices. ComplEx rows hold the real half
    followed by the imaginary half (2d reals); the other scorers use d reals.
    """
    scorer: Scorer
    dim: int
    entities: Tuple[str, ...]
    relations: Tuple[str, ...]
    entity_params: np.ndarray
    relation_params: np.ndarray

    def __post_init__(self):
        self.scorer = Scorer(self.scorer)
        if self.dim < 1:
            raise InvalidConfigError(f"Embedding dimension must be positive, got {self.dim}")
        self.entities = tuple(self.entities)
        self.relations = tuple(self.relations)
        width = row_width(self.scorer, self.dim)
        for label, params, vocab in (("entity", self.entity_params, self.entities),
                                     ("relation", self.relation_params, self.relations)):
            if params.shape != (len(vocab), width):
                raise ModelFormatError(
                    f"{label} parameters have shape {params.shape}, expected {(len(vocab), width)}"
                )

    @property
    def fingerprint(self) -> str:
        return vocab_fingerprint(self.entities, self.relations)

    @cached_property
    def entity_index(self) -> Dict[str, int]:
        return {name: i for i, name in enumerate(self.entities)}

    @cached_property
    def relation_index(self) -> Dict[str, int]:
        return {name: i for i, name in enumerate(self.relations)}

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.entity_params).all() and np.isfinite(self.relation_params).all())


@dataclass
class Gradient:
    entity: np.ndarray
    relation: np.ndarray


def row_width(scorer: Scorer, dim: int) -> int:
    return 2 * dim if Scorer(scorer) is Scorer.COMPLEX else dim


def init_model(entities, relations, scorer: Scorer, dim: int, rng: np.random.Generator,
               init_scale: float = 0.1) -> EmbeddingModel:
    width = row_width(scorer, dim)
    entity_params = rng.uniform(-init_scale, init_scale, size=(len(entities), width))
    relation_params = rng.uniform(-init_scale, init_scale, size=(len(relations), width))
    return EmbeddingModel(Scorer(scorer), dim, tuple(entities), tuple(relations),
                          entity_params, relation_params)


def sigmoid(x):
    """Numerically stable logistic function."""
    return np.exp(-np.logaddexp(0.0, -np.asarray(x, dtype=np.float64)))


def _check_entity(m: EmbeddingModel, index):
    if not 0 <= index < len(m.entities):
        raise OutOfVocabularyError("entity", index)


def _check_relation(m: EmbeddingModel, index):
    if not 0 <= index < len(m.relations):
        raise OutOfVocabularyError("relation", index)


def _tail_weights(m: EmbeddingModel, h: int, r: int) -> np.ndarray:
    """The (h, r) combination that every tail row is contracted with."""
    x, rel = m.entity_params[h], m.relation_params[r]
    if m.scorer is Scorer.COMPLEX:
        a, b = x[:m.dim], x[m.dim:]
        c, d = rel[:m.dim], rel[m.dim:]
        return np.concatenate((a * c - b * d, a * d + b * c))
    if m.scorer is Scorer.DISTMULT:
        return x * rel
    return x + rel


def _head_weights(m: EmbeddingModel, r: int, t: int) -> np.ndarray:
    rel, y = m.relation_params[r], m.entity_params[t]
    if m.scorer is Scorer.COMPLEX:
        c, d = rel[:m.dim], rel[m.dim:]
        e, f = y[:m.dim], y[m.dim:]
        return np.concatenate((c * e + d * f, c * f - d * e))
    if m.scorer is Scorer.DISTMULT:
        return rel * y
    return y - rel


def _contract(m: EmbeddingModel, rows: np.ndarray, weights: np.ndarray, tails: bool) -> np.ndarray:
    if m.scorer is Scorer.TRANSE:
        diff = weights - rows if tails else rows - weights
        return -np.sqrt((diff * diff).sum(axis=1))
    return (rows * weights).sum(axis=1)


def score(m: EmbeddingModel, h: int, r: int, t: int) -> float:
    """
    complex: Re(<x, r, conj(y)>); distmult: sum(x * r * y); transe: -||x + r - y||.
    """
    _check_entity(m, h)
    _check_relation(m, r)
    _check_entity(m, t)
    rows = m.entity_params[t:t + 1]
    return float(_contract(m, rows, _tail_weights(m, h, r), tails=True)[0])


def score_all_tails(m: EmbeddingModel, h: int, r: int) -> np.ndarray:
    """Scores of (h, r, t) for every entity t in one pass over the entity matrix."""
    _check_entity(m, h)
    _check_relation(m, r)
    return _contract(m, m.entity_params, _tail_weights(m, h, r), tails=True)


def score_all_heads(m: EmbeddingModel, r: int, t: int) -> np.ndarray:
    _check_relation(m, r)
    _check_entity(m, t)
    return _contract(m, m.entity_params, _head_weights(m, r, t), tails=False)


def predict(m: EmbeddingModel, h: int, r: int, t: int) -> float:
    return float(sigmoid(score(m, h, r, t)))


def top_k_tails(m: EmbeddingModel, head: str, relation: str, k: int = 10) -> List[Tuple[str, float]]:
    """Rank tail entities for (head, relation, ?) by predicted probability."""
    probabilities = sigmoid(score_all_tails(m, m.entity_index[head], m.relation_index[relation]))
    order = np.argsort(-probabilities, kind="stable")[:k]
    return [(m.entities[i], float(probabilities[i])) for i in order]


def _batch_scores(m: EmbeddingModel, heads, rels, tails):
    """Scores and partial derivatives for a batch of triples."""
    x, rel, y = m.entity_params[heads], m.relation_params[rels], m.entity_params[tails]
    if m.scorer is Scorer.COMPLEX:
        d = m.dim
        a, b = x[:, :d], x[:, d:]
        c, dd = rel[:, :d], rel[:, d:]
        e, f = y[:, :d], y[:, d:]
        s = (a * c * e + a * dd * f + b * c * f - b * dd * e).sum(axis=1)
        dx = np.concatenate((c * e + dd * f, c * f - dd * e), axis=1)
        dr = np.concatenate((a * e + b * f, a * f - b * e), axis=1)
        dy = np.concatenate((a * c - b * dd, a * dd + b * c), axis=1)
    elif m.scorer is Scorer.DISTMULT:
        s = (x * rel * y).sum(axis=1)
        dx, dr, dy = rel * y, x * y, x * rel
    else:
        v = x + rel - y
        norm = np.sqrt((v * v).sum(axis=1))
        s = -norm
        safe = np.where(norm > 0.0, norm, 1.0)[:, None]
        unit = np.where(norm[:, None] > 0.0, v / safe, 0.0)
        dx, dr, dy = -unit, -unit, unit
    return s, dx, dr, dy


def loss_and_grad(m: EmbeddingModel, triples: np.ndarray, labels: np.ndarray) -> Tuple[float, Gradient]:
    """
    Mean binary cross-entropy of sigmoid(score) against labels in {0, 1}, and
    its analytic gradient with respect to every parameter of the model.
    """
    triples = np.asarray(triples, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.float64)
    heads, rels, tails = triples[:, 0], triples[:, 1], triples[:, 2]
    s, dx, dr, dy = _batch_scores(m, heads, rels, tails)

    positive = np.log(np.maximum(sigmoid(s), LOG_CLAMP))
    negative = np.log(np.maximum(sigmoid(-s), LOG_CLAMP))
    loss = float(np.mean(-(labels * positive + (1.0 - labels) * negative)))

    coefficient = ((sigmoid(s) - labels) / len(labels))[:, None]
    entity_grad = np.zeros_like(m.entity_params)
    relation_grad = np.zeros_like(m.relation_params)
    np.add.at(entity_grad, heads, coefficient * dx)
    np.add.at(entity_grad, tails, coefficient * dy)
    np.add.at(relation_grad, rels, coefficient * dr)
    return loss, Gradient(entity_grad, relation_grad)


# Persistence

def model_to_document(m: EmbeddingModel) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "scorer": str(m.scorer),
        "dim": m.dim,
        "entities": list(m.entities),
        "relations": list(m.relations),
        "entity_params": m.entity_params.tolist(),
        "relation_params": m.relation_params.tolist(),
        "vocab_fingerprint": m.fingerprint,
    }


def save_model(m: EmbeddingModel, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps(model_to_document(m)))
        f.write("\n")
    logger.debug(f"Saved {m.scorer} model (d={m.dim}) to {path}.")


def _params(values, width) -> np.ndarray:
    params = np.array(values, dtype=np.float64)
    return params.reshape(0, width) if params.size == 0 else params


def model_from_document(document: dict, path=None) -> EmbeddingModel:
    if not isinstance(document, dict):
        raise ModelFormatError("Model document must be a JSON object", path)
    version = document.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelFormatError(
            f"Unsupported model format version {version!r}, expected {FORMAT_VERSION}", path
        )
    try:
        scorer = Scorer(document["scorer"])
        dim = int(document["dim"])
        width = row_width(scorer, dim)
        model = EmbeddingModel(
            scorer=scorer,
            dim=dim,
            entities=tuple(document["entities"]),
            relations=tuple(document["relations"]),
            entity_params=_params(document["entity_params"], width),
            relation_params=_params(document["relation_params"], width),
        )
    except ModelFormatError as e:
        raise ModelFormatError(e.message, path) from e
    except (KeyError, TypeError, ValueError) as e:
        raise ModelFormatError(f"Invalid model document: {e}", path) from e

    if not model.is_finite():
        raise ModelFormatError("Model parameters contain NaN or infinite values", path)
    stored = document.get("vocab_fingerprint")
    if stored != model.fingerprint:
        logger.warning(
            f"Stored vocabulary fingerprint {stored} does not match the model's "
            f"vocabulary ({model.fingerprint})."
        )
    return model


def load_model(path) -> EmbeddingModel:
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except UnicodeDecodeError as e:
        raise ModelFormatError(f"Model file is not UTF-8: {e.reason}", path) from e
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"Could not decode model JSON: {e.msg}", path) from e
    return model_from_document(document, path)


def check_vocabulary(m: EmbeddingModel, expected_fingerprint: str) -> bool:
    """
    Compare the model's vocabulary with the graph it is about to score.
    Mismatches are logged, not raised: names outside the model predict 0.
    """
    if m.fingerprint == expected_fingerprint:
        return True
    logger.warning(
        f"Model vocabulary fingerprint {m.fingerprint} does not match the knowledge "
        f"base ({expected_fingerprint}). The model was trained on a different KB."
    )
    return False
