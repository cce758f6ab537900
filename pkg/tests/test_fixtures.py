import os

import pytest

from ebr_reasoner._fixtures import FIXTURE_NAMES, fixture_path, get_fixture, load_fixture
from ebr_reasoner._harness import SampleSpec, run_benchmark
from ebr_reasoner._neural import make_perfect_predictor
from ebr_reasoner._oracle import detect_clashes, materialize, oracle_retrieve
from ebr_reasoner._parser import parse_concept, parse_kb
from ebr_reasoner._syntax import AtomicConcept, Nominal
from ebr_reasoner._triples import extract_triples
from ebr_reasoner.exceptions import UnknownFixtureError


def test_father_statistics(father_kb):
    sig = father_kb.signature
    assert len(sig.individuals) == 6
    assert len(sig.concepts) == 4
    assert sig.roles == ("hasChild",)
    assert len(father_kb.tbox) == 3
    assert len(father_kb.abox) == 4


def test_family_small_statistics(family_kb, family_mkb):
    sig = family_kb.signature
    assert 35 <= len(sig.individuals) <= 45
    assert len(sig.concepts) == 10
    assert sig.roles == ("hasChild", "hasGrandchild", "hasGrandparent", "hasParent")
    assert detect_clashes(family_mkb, family_kb) == []
    for concept in sig.concepts:
        assert family_mkb.memberships[concept], concept


def test_family_small_lean_taxonomy(family_kb, family_mkb):
    assert len(family_kb.tbox) == 5
    assert family_mkb.memberships["Person"] == frozenset(family_kb.signature.individuals)
    assert not family_kb.rbox


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_fixture_names_are_usable_in_concepts(name):
    kb = load_fixture(name)
    for individual in kb.signature.individuals:
        assert parse_concept(f"{{{individual}}}") == Nominal(individual)
    for concept in kb.signature.concepts:
        assert parse_concept(concept) == AtomicConcept(concept)


def test_family_small_asserts_entailed_types(family_kb, family_mkb):
    asserted = {(a.concept.name, a.individual) for a in family_kb.abox if hasattr(a, "concept")}
    entailed = {(c, x) for c, members in family_mkb.memberships.items() for x in members}
    assert asserted == entailed


def test_inconsistent_abc_is_exact(abc_kb):
    assert abc_kb.axioms == parse_kb(
        "SubClassOf(C A)\nSubClassOf(C B)\nSubClassOf((A and B) Bottom)\nClassAssertion(C a)"
    ).axioms
    assert len(detect_clashes(materialize(abc_kb), abc_kb)) == 1


def test_incomplete_knows_person(knows_kb):
    assert oracle_retrieve(parse_concept("Person"), materialize(knows_kb)) == {"Bob", "Paul", "Ani"}
    assert "Joe" in knows_kb.signature.individuals


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_every_fixture_runs_end_to_end(name):
    kb = load_fixture(name)
    graph = extract_triples(kb)
    assert len(graph) > 0
    mkb = materialize(kb)
    report = run_benchmark(kb, make_perfect_predictor(mkb), sample=SampleSpec(9, 2, 0))
    assert len(report.rows) == 9
    assert all(row.jaccard == 1.0 for row in report.rows)


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_fixture_files_ship_with_the_package(name):
    assert os.path.isfile(fixture_path(name))
    fixture = get_fixture(name)
    assert fixture.name == name
    assert fixture.provenance
    assert fixture.kb().axioms == load_fixture(name).axioms


def test_unknown_fixture():
    with pytest.raises(UnknownFixtureError) as e:
        load_fixture("carcinogenesis")
    assert "father" in e.value.available
