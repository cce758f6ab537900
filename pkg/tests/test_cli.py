import csv

import pytest

from ebr_reasoner._fixtures import fixture_path
from ebr_reasoner._harness import read_report_csv
from ebr_reasoner._parser import parse_kb
from ebr_reasoner.cli import ExitStatus, main

FATHER = fixture_path("father")
FAMILY = fixture_path("family-small")
ABC = fixture_path("inconsistent-abc")
KNOWS = fixture_path("incomplete-knows")


def _run(capsys, *argv):
    status = main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


@pytest.fixture
def empty_kb(tmp_path):
    path = tmp_path / "empty.dl"
    path.write_text("# no axioms\n")
    return str(path)


@pytest.fixture
def knows_model(tmp_path, capsys):
    path = tmp_path / "knows.json"
    assert main(["train", "--kb", KNOWS, "--dim", "4", "--epochs", "5", "--out", str(path)]) == 0
    capsys.readouterr()
    return str(path)


# extract

def test_extract_father(tmp_path, capsys):
    out = tmp_path / "father.nt"
    status, stdout, _ = _run(capsys, "extract", "--kb", FATHER, "--out", str(out), "--base", "http://ex.org/f#")
    assert status == ExitStatus.SUCCESS
    assert stdout == ""
    lines = out.read_text().splitlines()
    assert len(lines) == 7
    assert sum("rdf-syntax-ns#type" in line for line in lines) == 1
    assert sum("hasChild" in line for line in lines) == 3
    assert sum("rdf-schema#subClassOf" in line for line in lines) == 3


def test_extract_empty_kb(tmp_path, capsys, empty_kb):
    out = tmp_path / "empty.nt"
    status, _, _ = _run(capsys, "extract", "--kb", empty_kb, "--out", str(out))
    assert status == ExitStatus.SUCCESS
    assert out.read_text() == ""


def test_missing_kb_file(tmp_path, capsys):
    status, _, _ = _run(capsys, "extract", "--kb", str(tmp_path / "nope.dl"), "--out", str(tmp_path / "x.nt"))
    assert status == ExitStatus.IO


def test_syntax_error_in_kb(tmp_path, capsys):
    path = tmp_path / "bad.dl"
    path.write_text("SubClassOf(A\n")
    status, _, _ = _run(capsys, "extract", "--kb", str(path), "--out", str(tmp_path / "x.nt"))
    assert status == ExitStatus.USAGE


def test_non_utf8_kb_file(tmp_path, capsys):
    path = tmp_path / "latin1.dl"
    path.write_bytes(b"ClassAssertion(Person b\xffob)\n")
    status, _, _ = _run(capsys, "oracle", "--kb", str(path), "--concept", "Person")
    assert status == ExitStatus.IO


def test_non_utf8_model_file(tmp_path, capsys):
    path = tmp_path / "model.json"
    path.write_bytes(b'{"format_version": 1, "scorer": "\xff"}')
    status, _, _ = _run(capsys, "retrieve", "--kb", KNOWS, "--concept", "Person", "--model", str(path))
    assert status == ExitStatus.IO


# train

def test_train_is_byte_identical(tmp_path, capsys):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    args = ["train", "--kb", FATHER, "--dim", "8", "--epochs", "20"]
    status, stdout, _ = _run(capsys, *args, "--out", str(first))
    assert status == ExitStatus.SUCCESS
    assert _run(capsys, *args, "--out", str(second))[0] == ExitStatus.SUCCESS
    assert first.read_bytes() == second.read_bytes()

    rows = list(csv.reader(stdout.splitlines()))
    assert rows[0] == ["epoch", "loss"]
    assert [int(epoch) for epoch, _ in rows[1:]] == list(range(1, 21))
    assert all(float(loss) > 0 for _, loss in rows[1:])


@pytest.mark.parametrize("flag,value", [("--dim", "0"), ("--epochs", "0"), ("--lr", "-1"), ("--model", "rotate")])
def test_train_rejects_bad_flags(tmp_path, capsys, flag, value):
    status, _, _ = _run(capsys, "train", "--kb", FATHER, flag, value, "--out", str(tmp_path / "m.json"))
    assert status == ExitStatus.USAGE


def test_train_empty_kb(tmp_path, capsys, empty_kb):
    status, _, _ = _run(capsys, "train", "--kb", empty_kb, "--out", str(tmp_path / "m.json"))
    assert status == ExitStatus.USAGE


# retrieve

@pytest.mark.parametrize("concept,expected", [
    ("Person", "Ani\nBob\nPaul\n"),
    ("Bottom", ""),
    ("Top", "Ani\nBob\nJoe\nPaul\n"),
    ("knows some Person", "Bob\n"),
])
def test_retrieve_perfect(capsys, concept, expected):
    status, stdout, _ = _run(capsys, "retrieve", "--kb", KNOWS, "--concept", concept, "--oracle", "perfect")
    assert status == ExitStatus.SUCCESS
    assert stdout == expected


def test_retrieve_with_model(capsys, knows_model):
    status, stdout, _ = _run(capsys, "retrieve", "--kb", KNOWS, "--concept", "Top", "--model", knows_model)
    assert status == ExitStatus.SUCCESS
    assert stdout.splitlines() == ["Ani", "Bob", "Joe", "Paul"]


@pytest.mark.parametrize("argv", [
    ["--concept", "Animal", "--oracle", "perfect"],
    ["--concept", "Person and", "--oracle", "perfect"],
    ["--concept", "Person", "--oracle", "perfect", "--gamma", "1.5"],
    ["--concept", "Person"],
])
def test_retrieve_usage_errors(capsys, argv):
    assert _run(capsys, "retrieve", "--kb", KNOWS, *argv)[0] == ExitStatus.USAGE


def test_retrieve_bad_model_file(tmp_path, capsys):
    path = tmp_path / "model.json"
    path.write_text('{"format_version": 99}')
    status, _, _ = _run(capsys, "retrieve", "--kb", KNOWS, "--concept", "Person", "--model", str(path))
    assert status == ExitStatus.IO


# oracle

def test_strict_oracle_refuses(capsys):
    status, stdout, err = _run(capsys, "oracle", "--kb", ABC, "--concept", "A", "--strict")
    assert status == ExitStatus.INCONSISTENT
    assert stdout == ""
    assert err.count("disjointness: SubClassOf((A and B) Bottom) violated by a") == 1


def test_non_strict_oracle_answers(capsys):
    status, stdout, _ = _run(capsys, "oracle", "--kb", ABC, "--concept", "A")
    assert status == ExitStatus.SUCCESS
    assert stdout == "a\n"


def test_strict_oracle_on_consistent_kb(capsys):
    status, stdout, _ = _run(capsys, "oracle", "--kb", FATHER, "--concept", "Male", "--strict")
    assert status == ExitStatus.SUCCESS
    assert stdout == "markus\n"


# corrupt

def test_corrupt_remove_all(tmp_path, capsys):
    out = tmp_path / "reduced.dl"
    status, stdout, _ = _run(capsys, "corrupt", "--kb", FATHER, "--mode", "remove", "--ratio", "1", "--out", str(out))
    assert status == ExitStatus.SUCCESS
    assert stdout == "removed,4\n"
    reduced = parse_kb(out.read_text())
    assert reduced.abox == ()
    assert len(reduced.tbox) == 3


def test_corrupt_zero_ratio(tmp_path, capsys):
    out = tmp_path / "same.dl"
    status, stdout, _ = _run(capsys, "corrupt", "--kb", FAMILY, "--mode", "noise", "--ratio", "0", "--out", str(out))
    assert status == ExitStatus.SUCCESS
    assert stdout == "added,0\n"
    original = parse_kb(open(FAMILY, encoding="utf-8").read())
    assert sorted(map(repr, parse_kb(out.read_text()).axioms)) == sorted(map(repr, original.axioms))


def test_corrupt_noise_on_family(tmp_path, capsys):
    out = tmp_path / "noisy.dl"
    status, stdout, _ = _run(capsys, "corrupt", "--kb", FAMILY, "--mode", "noise", "--ratio", "0.2",
                             "--seed", "3", "--out", str(out))
    original = parse_kb(open(FAMILY, encoding="utf-8").read())
    expected = int(0.2 * len(original.abox) + 0.5)
    assert status == ExitStatus.SUCCESS
    assert stdout == f"added,{expected}\n"
    assert len(parse_kb(out.read_text()).abox) == len(original.abox) + expected


@pytest.mark.parametrize("ratio", ["1.5", "-0.2"])
def test_corrupt_bad_ratio(tmp_path, capsys, ratio):
    status, _, _ = _run(capsys, "corrupt", "--kb", FATHER, "--mode", "remove", "--ratio", ratio,
                        "--out", str(tmp_path / "x.dl"))
    assert status == ExitStatus.USAGE


# bench

def test_bench_perfect(tmp_path, capsys):
    report = tmp_path / "report.csv"
    status, stdout, _ = _run(capsys, "bench", "--kb", FAMILY, "--oracle", "perfect", "--samples", "18",
                             "--report", str(report))
    assert status == ExitStatus.SUCCESS
    with open(report, encoding="utf-8", newline="") as f:
        rows = read_report_csv(f)
    assert len(rows) == 18
    assert all(row["jaccard"] == "1.000000" for row in rows)
    assert stdout.splitlines()[0] == "class,mean_jaccard"
    assert stdout.splitlines()[-1] == "overall,1.000000"


def test_bench_is_byte_stable_with_no_timing(tmp_path, capsys):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["bench", "--kb", FAMILY, "--oracle", "perfect", "--samples", "12", "--no-timing"]
    assert _run(capsys, *args, "--report", str(first))[0] == ExitStatus.SUCCESS
    assert _run(capsys, *args, "--workers", "3", "--report", str(second))[0] == ExitStatus.SUCCESS
    assert first.read_bytes() == second.read_bytes()


def test_bench_with_clean_kb(tmp_path, capsys):
    reduced, report = tmp_path / "reduced.dl", tmp_path / "report.csv"
    _run(capsys, "corrupt", "--kb", FAMILY, "--mode", "remove", "--ratio", "0.5", "--out", str(reduced))
    status, _, _ = _run(capsys, "bench", "--kb", str(reduced), "--oracle", "perfect", "--samples", "18",
                        "--clean-kb", FAMILY, "--report", str(report))
    assert status == ExitStatus.SUCCESS
    with open(report, encoding="utf-8", newline="") as f:
        rows = read_report_csv(f)
    assert len(rows) == 18
    assert any(row["jaccard"] != "1.000000" for row in rows)


def test_bench_strict_records_refusals(tmp_path, capsys):
    report = tmp_path / "report.csv"
    status, _, _ = _run(capsys, "bench", "--kb", ABC, "--oracle", "perfect", "--samples", "9", "--strict",
                        "--report", str(report))
    assert status == ExitStatus.SUCCESS
    with open(report, encoding="utf-8", newline="") as f:
        rows = read_report_csv(f)
    assert {row["jaccard"] for row in rows} == {"refused"}


def test_bench_with_model(tmp_path, capsys, knows_model):
    report = tmp_path / "report.csv"
    status, _, _ = _run(capsys, "bench", "--kb", KNOWS, "--model", knows_model, "--samples", "9",
                        "--report", str(report))
    assert status == ExitStatus.SUCCESS


# sweep and clashes

def test_sweep(tmp_path, capsys):
    report = tmp_path / "sweep.csv"
    status, _, _ = _run(capsys, "sweep", "--kb", FATHER, "--models", "distmult", "transe", "--dims", "2",
                        "--gammas", "0.5", "--epochs", "2", "--samples", "9", "--report", str(report))
    assert status == ExitStatus.SUCCESS
    with open(report, encoding="utf-8", newline="") as f:
        rows = list(csv.DictReader(f))
    assert {row["scorer"] for row in rows} == {"distmult", "transe"}
    assert {row["class"] for row in rows} >= {"atomic", "overall"}


def test_clashes(capsys):
    status, stdout, _ = _run(capsys, "clashes", "--kb", ABC)
    assert status == ExitStatus.INCONSISTENT
    assert stdout.splitlines() == ["disjointness: SubClassOf((A and B) Bottom) violated by a"]

    status, stdout, _ = _run(capsys, "clashes", "--kb", FAMILY)
    assert status == ExitStatus.SUCCESS
    assert stdout == ""


@pytest.mark.parametrize("argv", [[], ["bench"], ["retrieve", "--kb", KNOWS, "--concept", "A", "--bogus"]])
def test_usage_errors(capsys, argv):
    assert main(argv) == ExitStatus.USAGE
