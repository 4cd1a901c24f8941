"""Domain errors. Each class carries the CLI exit code it maps to."""
from typing import Any, Dict, Optional

EXIT_OK = 0
EXIT_INVALID_INPUT = 1
EXIT_NON_GENERIC = 2
EXIT_BOUND = 3
EXIT_GOLDEN_MISMATCH = 4


class FriezeError(Exception):
    exit_code = EXIT_INVALID_INPUT

    def details(self) -> Dict[str, Any]:
        return {}

    def to_json(self) -> Dict[str, Any]:
        out = {"error": type(self).__name__, "message": str(self)}
        out.update(self.details())
        return out


# ---- arith ----

class ParseError(FriezeError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position

    def details(self):
        return {"position": self.position}


class VariableOutOfRange(FriezeError):
    def __init__(self, index: int, nvars: int):
        super().__init__(f"x{index} is outside x1..x{nvars}")
        self.index = index
        self.nvars = nvars


class DivisionByZeroFunction(FriezeError):
    pass


class PoleAtPoint(FriezeError):
    pass


# ---- quiver ----

class QuiverError(FriezeError):
    pass


class NotAcyclic(QuiverError):
    pass


class InvalidArrow(QuiverError):
    pass


class NotAdmissible(QuiverError):
    pass


class VertexCountTooLarge(QuiverError):
    pass


# ---- cluster / orbit ----

class LaurentCertificationFailed(FriezeError):
    pass


class TermBudgetExceeded(FriezeError):
    exit_code = EXIT_BOUND

    def __init__(self, terms: int, budget: int):
        super().__init__(f"cluster variable has {terms} terms, budget is {budget}")
        self.terms = terms
        self.budget = budget

    def details(self):
        return {"terms": self.terms, "budget": self.budget}


class BudgetExceeded(FriezeError):
    exit_code = EXIT_BOUND

    def __init__(self, step: int, bits: int, budget: int):
        super().__init__(f"coordinate at step {step} needs {bits} bits, budget is {budget}")
        self.step = step
        self.bits = bits
        self.budget = budget

    def details(self):
        return {"step": self.step, "bits": self.bits, "budget": self.budget}


class ZeroStartCoordinate(FriezeError):
    exit_code = EXIT_NON_GENERIC


class NonGenericSpecialization(FriezeError):
    exit_code = EXIT_NON_GENERIC

    def __init__(self, step: int, vertex: int, record: Optional[Any] = None):
        super().__init__(f"coordinate {vertex} vanishes at step {step}")
        self.step = step
        self.vertex = vertex
        self.record = record

    def details(self):
        return {"step": self.step, "vertex": self.vertex}


# ---- variety / invariants ----

class PointNotOnVariety(FriezeError):
    pass


class NotInvariant(FriezeError):
    exit_code = EXIT_BOUND


class DegenerateInvariant(FriezeError):
    pass


class NoSymmetryPair(FriezeError):
    exit_code = EXIT_BOUND


class IdentityAutomorphism(FriezeError):
    pass


# ---- cli ----

class GoldenMismatch(FriezeError):
    exit_code = EXIT_GOLDEN_MISMATCH

    def __init__(self, case: str, diff: str):
        super().__init__(f"golden mismatch for case '{case}'")
        self.case = case
        self.diff = diff
