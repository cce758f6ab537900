import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from ._kge import EmbeddingModel, Gradient, init_model, loss_and_grad
from ._triples import TripleGraph
from .exceptions import EmptyGraphError, InvalidConfigError, NonFiniteLossError
from .scorers import Optimizer, Scorer


logger = logging.getLogger(__name__)

DEFAULT_FIXTURE_DIM = 32
DEFAULT_CLI_DIM = 128
MAX_RESAMPLE_ATTEMPTS = 100


@dataclass
class TrainConfig:
    scorer: Scorer = field(default=Scorer.COMPLEX)
    dim: int = field(default=DEFAULT_FIXTURE_DIM)
    epochs: int = field(default=256)
    lr: float = field(default=0.01)
    negatives: int = field(default=8)
    batch_size: int = field(default=512)
    seed: int = field(default=42)
    optimizer: Optimizer = field(default=Optimizer.ADAM)
    init_scale: float = field(default=0.1)

    def __post_init__(self):
        try:
            self.scorer = Scorer(self.scorer)
            self.optimizer = Optimizer(self.optimizer)
        except ValueError as e:
            raise InvalidConfigError(str(e)) from e
        checks = (
            (self.dim >= 1, f"dim must be >= 1, got {self.dim}"),
            (self.epochs >= 1, f"epochs must be >= 1, got {self.epochs}"),
            (self.lr > 0, f"lr must be > 0, got {self.lr}"),
            (self.negatives >= 1, f"negatives must be >= 1, got {self.negatives}"),
            (self.batch_size >= 1, f"batch_size must be >= 1, got {self.batch_size}"),
            (self.init_scale > 0, f"init_scale must be > 0, got {self.init_scale}"),
            (0 <= self.seed < 2**64, f"seed must fit in 64 bits, got {self.seed}"),
        )
        for ok, message in checks:
            if not ok:
                raise InvalidConfigError(message)

    @property
    def positives_per_batch(self) -> int:
        """Batch size counts labeled triples: each positive brings its negatives."""
        return max(1, self.batch_size // (1 + self.negatives))


class _SGD:
    def __init__(self, lr):
        self.lr = lr

    def step(self, m: EmbeddingModel, grad: Gradient):
        m.entity_params -= self.lr * grad.entity
        m.relation_params -= self.lr * grad.relation


class _Adam:
    def __init__(self, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.moments = None

    def step(self, m: EmbeddingModel, grad: Gradient):
        if self.moments is None:
            self.moments = [
                (np.zeros_like(m.entity_params), np.zeros_like(m.entity_params)),
                (np.zeros_like(m.relation_params), np.zeros_like(m.relation_params)),
            ]
        self.t += 1
        correction1 = 1.0 - self.beta1 ** self.t
        correction2 = 1.0 - self.beta2 ** self.t
        for params, g, (first, second) in zip(
            (m.entity_params, m.relation_params), (grad.entity, grad.relation), self.moments
        ):
            first *= self.beta1
            first += (1.0 - self.beta1) * g
            second *= self.beta2
            second += (1.0 - self.beta2) * g * g
            params -= self.lr * (first / correction1) / (np.sqrt(second / correction2) + self.eps)


def _make_optimizer(cfg: TrainConfig):
    if cfg.optimizer is Optimizer.SGD:
        return _SGD(cfg.lr)
    return _Adam(cfg.lr)


def triple_keys(triples: np.ndarray, n_entities: int, n_relations: int) -> np.ndarray:
    """Encode (head, relation, tail) rows as single integers for set membership."""
    return (triples[:, 0] * n_relations + triples[:, 1]) * n_entities + triples[:, 2]


def corrupt(positives: np.ndarray, k: int, n_entities: int, n_relations: int,
            known_keys: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """
    k negatives per positive by uniform head-or-tail corruption. A corruption
    that is itself a known triple is redrawn, at most MAX_RESAMPLE_ATTEMPTS
    times; after that it is kept even though it may be true.
    """
    originals = np.repeat(positives, k, axis=0)
    negatives = originals.copy()
    pending = np.arange(len(negatives))
    for _ in range(MAX_RESAMPLE_ATTEMPTS):
        if len(pending) == 0:
            break
        replacement = rng.integers(n_entities, size=len(pending))
        corrupt_head = rng.random(len(pending)) < 0.5
        rows = originals[pending].copy()
        rows[corrupt_head, 0] = replacement[corrupt_head]
        rows[~corrupt_head, 2] = replacement[~corrupt_head]
        negatives[pending] = rows
        collides = np.isin(triple_keys(rows, n_entities, n_relations), known_keys)
        pending = pending[collides]
    return negatives


def train(g: TripleGraph, cfg: Optional[TrainConfig] = None,
          on_epoch: Optional[Callable[[int, float], None]] = None) -> EmbeddingModel:
    """
    Fit an embedding model to a triple graph with binary cross-entropy over
    positives and uniformly corrupted negatives. Deterministic given (g, cfg).

    on_epoch, when given, receives (epoch, mean loss) after every epoch.
    """
    cfg = cfg or TrainConfig()
    if len(g) == 0:
        raise EmptyGraphError("Cannot train on an empty triple graph")

    rng = np.random.default_rng(cfg.seed)
    model = init_model(g.entities, g.relations, cfg.scorer, cfg.dim, rng, cfg.init_scale)
    optimizer = _make_optimizer(cfg)
    positives = g.as_array()
    known_keys = np.unique(triple_keys(positives, len(g.entities), len(g.relations)))
    per_batch = cfg.positives_per_batch

    logger.info(
        f"Training {cfg.scorer} d={cfg.dim} on {len(positives)} triples, "
        f"{len(g.entities)} entities, {len(g.relations)} relations."
    )
    history: List[float] = []
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(len(positives))
        total, count = 0.0, 0
        for batch_index, start in enumerate(range(0, len(order), per_batch)):
            pos = positives[order[start:start + per_batch]]
            neg = corrupt(pos, cfg.negatives, len(g.entities), len(g.relations), known_keys, rng)
            batch = np.concatenate((pos, neg))
            labels = np.concatenate((np.ones(len(pos)), np.zeros(len(neg))))

            loss, grad = loss_and_grad(model, batch, labels)
            if not math.isfinite(loss):
                raise NonFiniteLossError(epoch, batch_index, loss)
            optimizer.step(model, grad)
            if not model.is_finite():
                raise NonFiniteLossError(epoch, batch_index, float("nan"))
            total += loss * len(batch)
            count += len(batch)

        epoch_loss = total / count
        history.append(epoch_loss)
        logger.debug(f"epoch {epoch}: loss {epoch_loss:.6f}")
        if on_epoch is not None:
            on_epoch(epoch, epoch_loss)

    logger.info(f"Training finished, final loss {history[-1]:.6f}.")
    return model
