import math

import numpy as np
import pytest

from ebr_reasoner._kge import score
from ebr_reasoner._trainer import TrainConfig, corrupt, train, triple_keys
from ebr_reasoner._triples import TripleGraph, extract_triples
from ebr_reasoner.exceptions import EmptyGraphError, InvalidConfigError
from ebr_reasoner.scorers import Optimizer, Scorer


@pytest.fixture
def father_graph(father_kb):
    return extract_triples(father_kb)


@pytest.mark.parametrize("kwargs", [
    {"dim": 0},
    {"epochs": 0},
    {"lr": 0.0},
    {"negatives": 0},
    {"batch_size": 0},
    {"init_scale": -0.1},
    {"seed": -1},
    {"scorer": "rotate"},
    {"optimizer": "rmsprop"},
])
def test_invalid_config(kwargs):
    with pytest.raises(InvalidConfigError):
        TrainConfig(**kwargs)


def test_config_coerces_names():
    cfg = TrainConfig(scorer="transe", optimizer="sgd")
    assert cfg.scorer is Scorer.TRANSE
    assert cfg.optimizer is Optimizer.SGD


@pytest.mark.parametrize("batch,negatives,expected", [
    (512, 8, 56),
    (9, 8, 1),
    (3, 8, 1),
    (100, 1, 50),
])
def test_positives_per_batch(batch, negatives, expected):
    assert TrainConfig(batch_size=batch, negatives=negatives).positives_per_batch == expected


def test_corrupt_avoids_known_triples(father_graph):
    positives = father_graph.as_array()
    n_e, n_r = len(father_graph.entities), len(father_graph.relations)
    known = np.unique(triple_keys(positives, n_e, n_r))
    negatives = corrupt(positives, 4, n_e, n_r, known, np.random.default_rng(0))
    assert negatives.shape == (4 * len(positives), 3)
    assert not np.isin(triple_keys(negatives, n_e, n_r), known).any()
    originals = np.repeat(positives, 4, axis=0)
    assert np.array_equal(negatives[:, 1], originals[:, 1])
    changed_head = negatives[:, 0] != originals[:, 0]
    changed_tail = negatives[:, 2] != originals[:, 2]
    assert not (changed_head & changed_tail).any()


def test_train_is_deterministic(father_graph):
    cfg = TrainConfig(dim=4, epochs=5)
    first, second = train(father_graph, cfg), train(father_graph, cfg)
    assert np.array_equal(first.entity_params, second.entity_params)
    assert np.array_equal(first.relation_params, second.relation_params)


def test_different_seeds_differ(father_graph):
    first = train(father_graph, TrainConfig(dim=4, epochs=2, seed=1))
    second = train(father_graph, TrainConfig(dim=4, epochs=2, seed=2))
    assert not np.array_equal(first.entity_params, second.entity_params)


@pytest.mark.parametrize("scorer", list(Scorer))
def test_loss_decreases(father_graph, scorer):
    losses = []
    cfg = TrainConfig(scorer=scorer, dim=8, epochs=40, lr=0.05)
    model = train(father_graph, cfg, on_epoch=lambda epoch, loss: losses.append((epoch, loss)))
    assert [epoch for epoch, _ in losses] == list(range(1, 41))
    assert all(math.isfinite(loss) for _, loss in losses)
    assert losses[-1][1] < losses[0][1]
    assert model.entities == father_graph.entities
    assert model.is_finite()


def test_empty_graph():
    with pytest.raises(EmptyGraphError):
        train(TripleGraph())


def test_sgd_updates_parameters(father_graph):
    start = train(father_graph, TrainConfig(dim=4, epochs=1, lr=1e-12, optimizer="sgd"))
    model = train(father_graph, TrainConfig(dim=4, epochs=10, lr=0.5, optimizer="sgd"))
    assert model.is_finite()
    assert not np.array_equal(start.entity_params, model.entity_params)


def _auc(model, positives, negatives):
    pos = np.array([score(model, *row) for row in positives])
    neg = np.array([score(model, *row) for row in negatives])
    wins = (pos[:, None] > neg[None, :]).sum() + 0.5 * (pos[:, None] == neg[None, :]).sum()
    return wins / (len(pos) * len(neg))


@pytest.mark.slow
def test_default_training_separates_family_triples(family_kb):
    g = extract_triples(family_kb)
    model = train(g, TrainConfig())
    positives = g.as_array()
    n_e, n_r = len(g.entities), len(g.relations)
    known = np.unique(triple_keys(positives, n_e, n_r))
    negatives = corrupt(positives, 1, n_e, n_r, known, np.random.default_rng(7))
    assert _auc(model, positives, negatives) > 0.95


@pytest.mark.parametrize("negatives", [1, 8])
def test_negative_ratio_converges(father_graph, negatives):
    losses = []
    cfg = TrainConfig(dim=8, epochs=60, lr=0.05, negatives=negatives)
    model = train(father_graph, cfg, on_epoch=lambda epoch, loss: losses.append(loss))
    assert all(math.isfinite(loss) for loss in losses)
    assert losses[-1] < losses[0]
    assert model.is_finite()
