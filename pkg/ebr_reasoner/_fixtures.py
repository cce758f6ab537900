import os
from dataclasses import dataclass

from ._parser import parse_kb
from ._syntax import KnowledgeBase
from .exceptions import UnknownFixtureError


FIXTURE_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "fixtures")

PROVENANCE = {
    "father": "Six-person family with one role and a three-axiom taxonomy.",
    "family-small": "Authored fifteen-couple KB over four generations; every atomic type asserted.",
    "inconsistent-abc": "C(a) with C below two disjoint classes A and B.",
    "incomplete-knows": "Persons Bob, Paul and Ani; Joe is known but untyped.",
}
FIXTURE_NAMES = tuple(PROVENANCE)


@dataclass(frozen=True)
class Fixture:
    name: str
    text: str
    provenance: str

    def kb(self) -> KnowledgeBase:
        return parse_kb(self.text)


def fixture_path(name: str) -> str:
    if name not in PROVENANCE:
        raise UnknownFixtureError(name, FIXTURE_NAMES)
    return os.path.join(FIXTURE_DIR, f"{name}.dl")


def get_fixture(name: str) -> Fixture:
    with open(fixture_path(name), encoding="utf-8") as f:
        return Fixture(name, f.read(), PROVENANCE[name])


def load_fixture(name: str) -> KnowledgeBase:
    return get_fixture(name).kb()
