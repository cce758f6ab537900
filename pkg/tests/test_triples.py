import pytest

from ebr_reasoner._helpers import vocab_fingerprint
from ebr_reasoner._parser import parse_kb
from ebr_reasoner._triples import TripleGraph, export_ntriples, extract_triples, import_ntriples
from ebr_reasoner.exceptions import NTriplesFormatError

BASE = "http://example.org/family"
RDF_TYPE = "<http://www.w3.org/1999/02/22-rdf-syntax-ns#type>"
SUBCLASS = "<http://www.w3.org/2000/01/rdf-schema#subClassOf>"


@pytest.fixture
def father_graph(father_kb):
    return extract_triples(father_kb)


def test_extract_father(father_graph):
    named = set(father_graph.named_triples())
    assert len(father_graph) == 7
    assert ("markus", "rdf:type", "Father") in named
    assert ("markus", "hasChild", "stefan") in named
    assert ("Father", "rdfs:subClassOf", "Male") in named
    assert father_graph.relations == ("hasChild", "rdf:type", "rdfs:subClassOf", "rdfs:subPropertyOf")
    assert len(father_graph.entities) == 10
    assert list(father_graph.entities) == sorted(father_graph.entities)


def test_extract_skips_complex_axioms():
    kb = parse_kb(
        "SubClassOf((A and B) C)\n"
        "SubClassOf(A (r some B))\n"
        "SubObjectPropertyOf(r s)\n"
        "TransitiveObjectProperty(s)\n"
        "ClassAssertion((A or B) a)\n"
        "ClassAssertion(A b)\n"
    )
    assert set(extract_triples(kb).named_triples()) == {
        ("r", "rdfs:subPropertyOf", "s"),
        ("b", "rdf:type", "A"),
    }


def test_extract_deduplicates():
    kb = parse_kb("ClassAssertion(A a)\nClassAssertion(A a)\n")
    assert len(extract_triples(kb)) == 1


def test_extract_empty_kb():
    g = extract_triples(parse_kb(""))
    assert len(g) == 0
    assert export_ntriples(g, BASE) == ""
    assert g.as_array().shape == (0, 3)


def test_indexes(father_graph):
    e, r = father_graph.entity_index, father_graph.relation_index
    assert father_graph.by_head_relation[(e["markus"], r["hasChild"])] == (e["stefan"],)
    assert e["markus"] in father_graph.by_relation_tail[(r["rdf:type"], e["Father"])]
    assert (e["anna"], r["hasChild"], e["michelle"]) in father_graph.triple_set


def test_fingerprint(father_graph):
    assert father_graph.fingerprint == vocab_fingerprint(father_graph.entities, father_graph.relations)
    assert len(father_graph.fingerprint) == 16


def test_export_ntriples(father_graph):
    text = export_ntriples(father_graph, BASE)
    lines = text.splitlines()
    assert len(lines) == 7
    assert lines == sorted(lines)
    assert f"<{BASE}#markus> {RDF_TYPE} <{BASE}#Father> ." in lines
    assert f"<{BASE}#Father> {SUBCLASS} <{BASE}#Male> ." in lines
    assert text.endswith("\n")


@pytest.mark.parametrize("base", ["http://example.org/family#", "http://example.org/family/"])
def test_export_base_with_separator(father_graph, base):
    assert f"<{base}markus> <{base}hasChild> <{base}stefan> ." in export_ntriples(father_graph, base)


def test_import_inverts_export(father_graph):
    assert import_ntriples(export_ntriples(father_graph, BASE)) == father_graph


def test_import_skips_comments_and_blank_lines():
    text = f"# header\n\n<{BASE}#a> {RDF_TYPE} <{BASE}#A> .\n"
    assert set(import_ntriples(text).named_triples()) == {("a", "rdf:type", "A")}


@pytest.mark.parametrize("line", [
    f'<{BASE}#a> <{BASE}#name> "Alice" .',
    f"_:b0 <{BASE}#knows> <{BASE}#a> .",
    f"<{BASE}#a> <{BASE}#knows>",
    f"<{BASE}#a> <{BASE}#knows> <{BASE}#b>",
    f"<{BASE}/> <{BASE}#knows> <{BASE}#b> .",
])
def test_import_rejects_unsupported_lines(line):
    text = f"<{BASE}#a> {RDF_TYPE} <{BASE}#A> .\n{line}\n"
    with pytest.raises(NTriplesFormatError) as e:
        import_ntriples(text)
    assert e.value.line_number == 2


def test_import_urn_local_names():
    text = "<urn:a> <urn:knows> <urn:b> .\n<urn:x:c> <urn:knows> <urn:a> .\n"
    assert set(import_ntriples(text).named_triples()) == {("a", "knows", "b"), ("c", "knows", "a")}


def test_graph_equality_ignores_cached_indexes(father_graph, father_kb):
    other = extract_triples(father_kb)
    father_graph.entity_index
    assert other == father_graph
    assert hash(other) == hash(father_graph)
    assert other != TripleGraph()
