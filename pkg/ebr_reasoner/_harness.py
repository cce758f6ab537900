import csv
import dataclasses
import logging
import random
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, TextIO

from ._helpers import elapsed_millis, generate_timestamp, round_half_away
from ._neural import DEFAULT_GAMMA, EmbeddingPredictor, NeuralDomain, Predictor, retrieve
from ._oracle import MaterializedKB, detect_clashes, materialize, oracle_retrieve
from ._syntax import (
    AtLeast, AtMost, AtomicConcept, AtomicRole, ClassAssertion, ConceptExpr, Conjunction,
    Disjunction, Existential, InverseRole, KnowledgeBase, Negation, Nominal, PropertyAssertion,
    Signature, UNIVERSAL_ROLE, Universal, constructor_class, non_simple_roles, render_concept,
)
from ._trainer import TrainConfig, train
from ._triples import extract_triples
from .constructors import BENCH_CLASSES, ConstructorClass
from .exceptions import CandidateSpaceExhaustedError, DegenerateSignatureError, InvalidConfigError
from .scorers import Scorer


logger = logging.getLogger(__name__)

MAX_EMPTY_RESAMPLES = 20
CARDINALITIES = (1, 2, 3)
INVERSE_ROLE_PROBABILITY = 0.25
REPORT_HEADER = ("concept", "class", "oracle_size", "neural_size", "jaccard", "millis")
SWEEP_HEADER = ("scorer", "dim", "gamma", "class", "mean_jaccard")
AGGREGATE_PREFIX = "#agg"
REFUSED = "refused"
OVERALL = "overall"


class CorruptionMode(str, Enum):
    NOISE = "noise"
    REMOVE = "remove"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class CorruptionSpec:
    mode: CorruptionMode
    ratio: float
    seed: int = field(default=0)

    def __post_init__(self):
        try:
            object.__setattr__(self, "mode", CorruptionMode(self.mode))
        except ValueError as e:
            raise InvalidConfigError(str(e)) from e
        if not 0.0 <= self.ratio <= 1.0:
            raise InvalidConfigError(f"ratio must lie in [0, 1], got {self.ratio}")


@dataclass(frozen=True)
class SampleSpec:
    n: int = field(default=100)
    max_depth: int = field(default=3)
    seed: int = field(default=7)

    def __post_init__(self):
        if self.n < 0:
            raise InvalidConfigError(f"sample size must be >= 0, got {self.n}")
        if self.max_depth < 1:
            raise InvalidConfigError(f"max depth must be >= 1, got {self.max_depth}")


def jaccard(a, b) -> float:
    a, b = set(a), set(b)
    union = a | b
    if not union:
        return 1.0
    return len(a & b) / len(union)


# Corruption

def _corruption_count(kb: KnowledgeBase, spec: CorruptionSpec) -> int:
    return round_half_away(spec.ratio * len(kb.abox))


def inject_noise(kb: KnowledgeBase, spec: CorruptionSpec) -> KnowledgeBase:
    """
    Add round(ν·|ABox|) random assertions that the clean KB does not entail.
    Candidates are drawn by choosing an assertion kind uniformly, then its
    names uniformly from the signature.
    """
    count = _corruption_count(kb, spec)
    if count == 0:
        return kb
    sig = kb.signature
    mkb = materialize(kb)
    space = {
        ClassAssertion: len(sig.concepts) * len(sig.individuals) - sum(map(len, mkb.memberships.values())),
        PropertyAssertion: len(sig.roles) * len(sig.individuals) ** 2
        - sum(map(len, mkb.role_extensions.values())),
    }
    available = sum(space.values())
    if count > available:
        raise CandidateSpaceExhaustedError(count, available)

    rng = random.Random(spec.seed)
    added = []
    seen = set()
    while len(added) < count:
        kinds = [kind for kind in (ClassAssertion, PropertyAssertion) if space[kind] > 0]
        kind = rng.choice(kinds)
        if kind is ClassAssertion:
            concept, individual = rng.choice(sig.concepts), rng.choice(sig.individuals)
            if mkb.has_type(individual, concept):
                continue
            candidate = ClassAssertion(AtomicConcept(concept), individual)
        else:
            role = rng.choice(sig.roles)
            subject, obj = rng.choice(sig.individuals), rng.choice(sig.individuals)
            if mkb.has_role(role, subject, obj):
                continue
            candidate = PropertyAssertion(role, subject, obj)
        if candidate in seen:
            continue
        seen.add(candidate)
        space[kind] -= 1
        added.append(candidate)

    logger.info(f"Injected {len(added)} false assertions (ratio {spec.ratio}, seed {spec.seed}).")
    return kb.with_abox(kb.abox + tuple(added))


def remove_axioms(kb: KnowledgeBase, spec: CorruptionSpec) -> KnowledgeBase:
    """Drop round(ν·|ABox|) assertions uniformly without replacement."""
    count = _corruption_count(kb, spec)
    if count > len(kb.abox):
        logger.warning(f"Cannot remove {count} of {len(kb.abox)} assertions; removing all.")
        count = len(kb.abox)
    removed = set(random.Random(spec.seed).sample(range(len(kb.abox)), count))
    logger.info(f"Removed {count} assertions (ratio {spec.ratio}, seed {spec.seed}).")
    return kb.with_abox(a for i, a in enumerate(kb.abox) if i not in removed)


def corrupt_kb(kb: KnowledgeBase, spec: CorruptionSpec) -> KnowledgeBase:
    if spec.mode is CorruptionMode.NOISE:
        return inject_noise(kb, spec)
    return remove_axioms(kb, spec)


def corruption_delta(clean: KnowledgeBase, corrupted: KnowledgeBase) -> int:
    """Number of assertions added (positive) or removed (negative)."""
    return len(corrupted.abox) - len(clean.abox)


# Sampling

class _ConceptSampler:
    def __init__(self, sig: Signature, rng: random.Random, simple_roles: Sequence[str]):
        self.sig = sig
        self.rng = rng
        self.simple_roles = tuple(simple_roles) or sig.roles

    def _role(self, names):
        if not names:
            return UNIVERSAL_ROLE
        name = self.rng.choice(names)
        if self.rng.random() < INVERSE_ROLE_PROBABILITY:
            return InverseRole(name)
        return AtomicRole(name)

    def _any(self, depth: int) -> ConceptExpr:
        if depth <= 0:
            return AtomicConcept(self.rng.choice(self.sig.concepts))
        return self.build(self.rng.choice(BENCH_CLASSES), depth)

    def build(self, cls: ConstructorClass, depth: int) -> ConceptExpr:
        """A concept rooted at the given constructor, at most `depth` deep."""
        below = depth - 1
        if cls is ConstructorClass.ATOMIC:
            return AtomicConcept(self.rng.choice(self.sig.concepts))
        if cls is ConstructorClass.NOMINAL:
            return Nominal(self.rng.choice(self.sig.individuals))
        if cls is ConstructorClass.NEGATION:
            return Negation(self._any(below))
        if cls is ConstructorClass.CONJUNCTION:
            return Conjunction(self._any(below), self._any(below))
        if cls is ConstructorClass.DISJUNCTION:
            return Disjunction(self._any(below), self._any(below))
        if cls is ConstructorClass.EXISTENTIAL:
            return Existential(self._role(self.sig.roles), self._any(below))
        if cls is ConstructorClass.UNIVERSAL:
            return Universal(self._role(self.sig.roles), self._any(below))
        n = self.rng.choice(CARDINALITIES)
        if cls is ConstructorClass.MIN_RESTRICTION:
            return AtLeast(n, self._role(self.simple_roles), self._any(below))
        return AtMost(n, self._role(self.simple_roles), self._any(below))


def sample_concepts(sig: Signature, n: int, max_depth: int, seed: int,
                    mkb: Optional[MaterializedKB] = None) -> List[ConceptExpr]:
    """
    Draw n concepts. Root constructors cycle through shuffled blocks of the
    nine benchmark classes, so any n covers the classes as evenly as possible.

    With a materialized KB, concepts whose extension is empty are redrawn
    (same root class) up to MAX_EMPTY_RESAMPLES times, then kept. Cardinality
    restrictions use simple roles whenever the KB has any. Without role names
    every restriction ranges over the universal role.
    """
    if not sig.concepts or not sig.individuals:
        raise DegenerateSignatureError(
            f"Sampling needs at least one concept and one individual name; got "
            f"{len(sig.concepts)} concepts, {len(sig.individuals)} individuals"
        )
    SampleSpec(n, max_depth, seed)  # validates

    rng = random.Random(seed)
    non_simple = non_simple_roles(mkb.kb) if mkb is not None else set()
    sampler = _ConceptSampler(sig, rng, [r for r in sig.roles if r not in non_simple])

    concepts = []
    block: List[ConstructorClass] = []
    for _ in range(n):
        if not block:
            block = list(BENCH_CLASSES)
            rng.shuffle(block)
        cls = block.pop()
        concept = sampler.build(cls, max_depth)
        attempts = 0
        while mkb is not None and attempts < MAX_EMPTY_RESAMPLES and not oracle_retrieve(concept, mkb):
            concept = sampler.build(cls, max_depth)
            attempts += 1
        concepts.append(concept)
    return concepts


# Benchmarking

@dataclass(frozen=True)
class BenchRow:
    concept: str
    constructor: ConstructorClass
    oracle_size: Optional[int]
    neural_size: int
    jaccard: Optional[float]
    millis: float

    @property
    def refused(self) -> bool:
        return self.oracle_size is None


@dataclass
class BenchReport:
    rows: List[BenchRow] = field(default_factory=list)

    def class_means(self) -> Dict[ConstructorClass, float]:
        """Mean Jaccard per constructor class, in benchmark order; refused rows excluded."""
        grouped: Dict[ConstructorClass, List[float]] = OrderedDict((c, []) for c in BENCH_CLASSES)
        for row in self.rows:
            if not row.refused:
                grouped.setdefault(row.constructor, []).append(row.jaccard)
        return OrderedDict((c, sum(v) / len(v)) for c, v in grouped.items() if v)

    @property
    def overall_mean(self) -> Optional[float]:
        scores = [row.jaccard for row in self.rows if not row.refused]
        return sum(scores) / len(scores) if scores else None

    @property
    def refused_count(self) -> int:
        return sum(row.refused for row in self.rows)


def run_benchmark(kb: KnowledgeBase, predictor: Predictor, gamma: float = DEFAULT_GAMMA,
                  sample: Optional[SampleSpec] = None, strict: bool = False,
                  clean_kb: Optional[KnowledgeBase] = None, workers: int = 1,
                  timing: bool = True) -> BenchReport:
    """
    Compare neural retrieval against the oracle on sampled concepts.

    Ground truth comes from clean_kb when given, else from kb itself. Concepts
    are sampled over the ground-truth signature and evaluated over its
    individuals. In strict mode a clashing ground-truth KB refuses every row.
    """
    sample = sample or SampleSpec()
    if workers < 1:
        raise InvalidConfigError(f"workers must be >= 1, got {workers}")
    truth_kb = clean_kb if clean_kb is not None else kb
    truth = materialize(truth_kb)
    signature = truth_kb.signature.merge(kb.signature)
    dom = NeuralDomain(
        individuals=truth_kb.signature.individuals,
        gamma=gamma,
        signature=signature,
        non_simple_roles=frozenset(non_simple_roles(kb)),
    )
    refusing = strict and bool(detect_clashes(truth, truth_kb))
    if refusing:
        logger.warning("Ground-truth KB has clashes; the strict oracle refuses every row.")

    concepts = sample_concepts(truth_kb.signature, sample.n, sample.max_depth, sample.seed, mkb=truth)

    def evaluate(concept: ConceptExpr) -> BenchRow:
        started = generate_timestamp()
        neural = retrieve(concept, predictor, dom)
        oracle = None if refusing else oracle_retrieve(concept, truth)
        millis = elapsed_millis(started) if timing else 0.0
        return BenchRow(
            concept=render_concept(concept),
            constructor=constructor_class(concept),
            oracle_size=None if oracle is None else len(oracle),
            neural_size=len(neural),
            jaccard=None if oracle is None else jaccard(oracle, neural),
            millis=millis,
        )

    if workers == 1:
        rows = [evaluate(c) for c in concepts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            rows = list(executor.map(evaluate, concepts))

    report = BenchReport(rows)
    logger.info(
        f"Benchmarked {len(rows)} concepts at gamma={gamma}: "
        f"overall mean {report.overall_mean}, {report.refused_count} refused."
    )
    return report


def _format_score(value: Optional[float]) -> str:
    return REFUSED if value is None else f"{value:.6f}"


def write_report_csv(report: BenchReport, out: TextIO) -> None:
    """
    Rows in sample order, then `#agg,` lines with the per-class means, the
    overall mean and the refused count.
    """
    writer = csv.writer(out)
    writer.writerow(REPORT_HEADER)
    for row in report.rows:
        writer.writerow((
            row.concept,
            str(row.constructor),
            REFUSED if row.oracle_size is None else row.oracle_size,
            row.neural_size,
            _format_score(row.jaccard),
            f"{row.millis:.3f}",
        ))
    for cls, mean in report.class_means().items():
        writer.writerow((AGGREGATE_PREFIX, str(cls), _format_score(mean)))
    writer.writerow((AGGREGATE_PREFIX, OVERALL, _format_score(report.overall_mean)))
    writer.writerow((AGGREGATE_PREFIX, REFUSED, report.refused_count))


def read_report_csv(lines: Iterable[str]) -> List[Dict[str, str]]:
    """Parse the data rows of a report, skipping aggregate lines."""
    return [
        row for row in csv.DictReader(lines)
        if not row["concept"].startswith(AGGREGATE_PREFIX)
    ]


# Dimension and threshold sweeps

@dataclass(frozen=True)
class SweepRow:
    scorer: Scorer
    dim: int
    gamma: float
    constructor: str
    mean_jaccard: float


def run_dimension_sweep(kb: KnowledgeBase, dims: Sequence[int], scorers: Sequence[Scorer],
                        train_cfg: Optional[TrainConfig] = None,
                        sample: Optional[SampleSpec] = None,
                        gammas: Sequence[float] = (DEFAULT_GAMMA,),
                        clean_kb: Optional[KnowledgeBase] = None) -> List[SweepRow]:
    """
    Train every scorer at every dimension and benchmark each model at every
    threshold. Yields one row per (scorer, dim, gamma, class) plus an overall row.
    """
    train_cfg = train_cfg or TrainConfig()
    graph = extract_triples(kb)
    rows = []
    for scorer in scorers:
        for dim in dims:
            cfg = dataclasses.replace(train_cfg, scorer=Scorer(scorer), dim=dim)
            predictor = EmbeddingPredictor(train(graph, cfg))
            for gamma in gammas:
                report = run_benchmark(kb, predictor, gamma, sample, clean_kb=clean_kb)
                for cls, mean in report.class_means().items():
                    rows.append(SweepRow(cfg.scorer, dim, gamma, str(cls), mean))
                if report.overall_mean is not None:
                    rows.append(SweepRow(cfg.scorer, dim, gamma, OVERALL, report.overall_mean))
    return rows


def write_sweep_csv(rows: Iterable[SweepRow], out: TextIO) -> None:
    writer = csv.writer(out)
    writer.writerow(SWEEP_HEADER)
    for row in rows:
        writer.writerow((str(row.scorer), row.dim, f"{row.gamma:g}", row.constructor,
                         f"{row.mean_jaccard:.6f}"))
