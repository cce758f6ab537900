from typing import List, Union

from ._manager import _ReasonerManager
from ._oracle import Clash, detect_clashes, oracle_retrieve
from ._syntax import ConceptExpr


class SymbolicReasoner(_ReasonerManager):
    def clashes(self) -> List[Clash]:
        """Disjointness and functionality violations of the materialized KB."""
        return detect_clashes(self.materialization, self.kb)

    def is_consistent(self) -> bool:
        return not self.clashes()

    def oracle(self, concept: Union[str, ConceptExpr]) -> List[str]:
        """
        Sorted closed-world extension of a concept.

        Raises:
            InconsistentKBError: when the reasoner is strict and the KB clashes.
        """
        extension = oracle_retrieve(self._as_concept(concept), self.materialization, strict=self.strict)
        return sorted(extension)
