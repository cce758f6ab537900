import argparse
import logging
import sys
from enum import IntEnum
from typing import List, Optional

from . import VERSION
from ._harness import (
    CorruptionMode, CorruptionSpec, SampleSpec, corrupt_kb, corruption_delta, run_dimension_sweep,
    write_report_csv, write_sweep_csv,
)
from ._kge import load_model, save_model
from ._neural import DEFAULT_GAMMA
from ._parser import parse_concept, parse_kb
from ._syntax import KnowledgeBase, render_kb
from ._trainer import DEFAULT_CLI_DIM, TrainConfig
from ._triples import export_ntriples, extract_triples
from .exceptions import (
    CandidateSpaceExhaustedError, DegenerateSignatureError, DLSyntaxError, EmptyGraphError,
    InconsistentKBError, InvalidConfigError, ModelFormatError, NonFiniteLossError,
    NTriplesFormatError, UnknownFixtureError, UnknownNameError,
)
from .reasoner import Reasoner
from .scorers import Optimizer, Scorer


logger = logging.getLogger(__name__)

DEFAULT_BASE_IRI = "http://example.org/ebr"
PERFECT = "perfect"

USAGE_ERRORS = (
    DLSyntaxError, UnknownNameError, InvalidConfigError, CandidateSpaceExhaustedError,
    DegenerateSignatureError, EmptyGraphError, NonFiniteLossError, UnknownFixtureError,
)
IO_ERRORS = (OSError, UnicodeDecodeError, ModelFormatError, NTriplesFormatError)


class ExitStatus(IntEnum):
    SUCCESS = 0
    USAGE = 1
    INCONSISTENT = 2
    IO = 3


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read_kb(path: str) -> KnowledgeBase:
    with open(path, encoding="utf-8") as f:
        return parse_kb(f.read())


def _write_text(path: str, text: str):
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)


def _reasoner(args, kb: KnowledgeBase, strict: bool = False) -> Reasoner:
    model = load_model(args.model) if getattr(args, "model", None) else None
    return Reasoner(
        kb=kb,
        model=model,
        gamma=getattr(args, "gamma", DEFAULT_GAMMA),
        strict=strict,
        max_workers=getattr(args, "workers", 1),
        logging_level=args.log_level,
    )


def _print_lines(lines):
    for line in lines:
        print(line)


# Commands

def cmd_extract(args) -> ExitStatus:
    kb = _read_kb(args.kb)
    _write_text(args.out, export_ntriples(extract_triples(kb), args.base))
    return ExitStatus.SUCCESS


def cmd_train(args) -> ExitStatus:
    kb = _read_kb(args.kb)
    cfg = TrainConfig(
        scorer=args.model,
        dim=args.dim,
        epochs=args.epochs,
        lr=args.lr,
        negatives=args.neg,
        batch_size=args.batch,
        seed=args.seed,
        optimizer=args.optimizer,
    )
    print("epoch,loss")
    model = Reasoner(kb=kb, logging_level=args.log_level).train(
        cfg, on_epoch=lambda epoch, loss: print(f"{epoch},{loss:.6f}"),
    )
    save_model(model, args.out)
    return ExitStatus.SUCCESS


def cmd_retrieve(args) -> ExitStatus:
    kb = _read_kb(args.kb)
    concept = parse_concept(args.concept)
    _print_lines(_reasoner(args, kb).retrieve(concept))
    return ExitStatus.SUCCESS


def cmd_oracle(args) -> ExitStatus:
    kb = _read_kb(args.kb)
    concept = parse_concept(args.concept)
    _print_lines(_reasoner(args, kb, strict=args.strict).oracle(concept))
    return ExitStatus.SUCCESS


def cmd_corrupt(args) -> ExitStatus:
    kb = _read_kb(args.kb)
    corrupted = corrupt_kb(kb, CorruptionSpec(args.mode, args.ratio, args.seed))
    _write_text(args.out, render_kb(corrupted))
    delta = corruption_delta(kb, corrupted)
    print(f"{'added' if args.mode == str(CorruptionMode.NOISE) else 'removed'},{abs(delta)}")
    return ExitStatus.SUCCESS


def cmd_bench(args) -> ExitStatus:
    kb = _read_kb(args.kb)
    clean_kb = _read_kb(args.clean_kb) if args.clean_kb else None
    report = _reasoner(args, kb, strict=args.strict).benchmark(
        samples=args.samples,
        depth=args.depth,
        seed=args.seed,
        clean_kb=clean_kb,
        timing=not args.no_timing,
    )
    with open(args.report, "w", encoding="utf-8", newline="") as f:
        write_report_csv(report, f)

    print("class,mean_jaccard")
    for cls, mean in report.class_means().items():
        print(f"{cls},{mean:.6f}")
    if report.overall_mean is not None:
        print(f"overall,{report.overall_mean:.6f}")
    if report.refused_count:
        logger.warning(f"{report.refused_count} of {len(report.rows)} rows refused by the strict oracle.")
    return ExitStatus.SUCCESS


def cmd_sweep(args) -> ExitStatus:
    kb = _read_kb(args.kb)
    clean_kb = _read_kb(args.clean_kb) if args.clean_kb else None
    rows = run_dimension_sweep(
        kb,
        dims=args.dims,
        scorers=args.models,
        train_cfg=TrainConfig(epochs=args.epochs),
        sample=SampleSpec(args.samples, args.depth, args.seed),
        gammas=args.gammas,
        clean_kb=clean_kb,
    )
    with open(args.report, "w", encoding="utf-8", newline="") as f:
        write_sweep_csv(rows, f)
    return ExitStatus.SUCCESS


def cmd_clashes(args) -> ExitStatus:
    kb = _read_kb(args.kb)
    clashes = Reasoner(kb=kb, logging_level=args.log_level).clashes()
    _print_lines(clash.describe() for clash in clashes)
    return ExitStatus.INCONSISTENT if clashes else ExitStatus.SUCCESS


# Argument parsing

def _add_predictor_source(parser):
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--model", help="Trained model file")
    source.add_argument("--oracle", choices=[PERFECT], help="Answer from the materialized KB")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="ebr", description="Embedding-based reasoning over description logic KBs")
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="Increase diagnostic output on standard error")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("extract", help="Write the KB's triple graph as N-Triples")
    p.add_argument("--kb", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--base", default=DEFAULT_BASE_IRI, help=f"Base IRI (default: {DEFAULT_BASE_IRI})")
    p.set_defaults(handler=cmd_extract)

    p = commands.add_parser("train", help="Train an embedding model on the KB")
    p.add_argument("--kb", required=True)
    p.add_argument("--model", choices=[str(s) for s in Scorer], default=str(Scorer.COMPLEX))
    p.add_argument("--dim", type=int, default=DEFAULT_CLI_DIM)
    p.add_argument("--epochs", type=int, default=256)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--neg", type=int, default=8, help="Negatives per positive (default: 8)")
    p.add_argument("--batch", type=int, default=512, help="Labeled triples per batch (default: 512)")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--optimizer", choices=[str(o) for o in Optimizer], default=str(Optimizer.ADAM))
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_train)

    p = commands.add_parser("retrieve", help="Instances of a concept under the neural semantics")
    p.add_argument("--kb", required=True)
    p.add_argument("--concept", required=True)
    _add_predictor_source(p)
    p.add_argument("--gamma", type=float, default=DEFAULT_GAMMA)
    p.set_defaults(handler=cmd_retrieve)

    p = commands.add_parser("oracle", help="Instances of a concept from the symbolic oracle")
    p.add_argument("--kb", required=True)
    p.add_argument("--concept", required=True)
    p.add_argument("--strict", action="store_true", help="Refuse to answer over a clashing KB")
    p.set_defaults(handler=cmd_oracle)

    p = commands.add_parser("corrupt", help="Inject false assertions or remove assertions")
    p.add_argument("--kb", required=True)
    p.add_argument("--mode", choices=[str(m) for m in CorruptionMode], required=True)
    p.add_argument("--ratio", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_corrupt)

    p = commands.add_parser("bench", help="Compare neural retrieval with the oracle on sampled concepts")
    p.add_argument("--kb", required=True)
    _add_predictor_source(p)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--gamma", type=float, default=DEFAULT_GAMMA)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--report", required=True)
    p.add_argument("--clean-kb", help="Uncorrupted KB supplying the ground truth")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-timing", action="store_true",
                   help="Write 0 in the millis column so reports are byte-identical across runs")
    p.set_defaults(handler=cmd_bench)

    p = commands.add_parser("sweep", help="Benchmark several scorers, dimensions and thresholds")
    p.add_argument("--kb", required=True)
    p.add_argument("--models", nargs="+", choices=[str(s) for s in Scorer], default=[str(Scorer.COMPLEX)])
    p.add_argument("--dims", nargs="+", type=int, default=[2, 32])
    p.add_argument("--gammas", nargs="+", type=float, default=[DEFAULT_GAMMA])
    p.add_argument("--epochs", type=int, default=256)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--clean-kb")
    p.add_argument("--report", required=True)
    p.set_defaults(handler=cmd_sweep)

    p = commands.add_parser("clashes", help="List disjointness and functionality clashes")
    p.add_argument("--kb", required=True)
    p.set_defaults(handler=cmd_clashes)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"ebr: error: {e}", file=sys.stderr)
        return ExitStatus.USAGE

    args.log_level = logging.DEBUG if args.verbose > 1 else logging.INFO if args.verbose else logging.WARNING
    logging.basicConfig(
        stream=sys.stderr,
        level=args.log_level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )

    try:
        return int(args.handler(args))
    except InconsistentKBError as e:
        for clash in e.clashes:
            print(clash.describe(), file=sys.stderr)
        logger.error(str(e))
        return ExitStatus.INCONSISTENT
    except USAGE_ERRORS as e:
        logger.error(str(e))
        return ExitStatus.USAGE
    except IO_ERRORS as e:
        logger.error(str(e))
        return ExitStatus.IO


if __name__ == "__main__":
    sys.exit(main())
