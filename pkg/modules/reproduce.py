"""Worked examples recomputed end to end and compared against golden reports.

A golden file golden/<case>.json looks like

    {"case": "a2", "expect": {"period": {"kind": "exact", "value": 5}, ...}}

and each expectation kind compares canonical forms:

    exact     rendered value equals the stored JSON value
    points    list of points, exact rationals
    polys     (nested lists of) polynomials, each up to a nonzero scalar
    function  rational function, compared as a function
    span      vanishing space equals the degree-bounded span of the stored generators
    contains  vanishing space contains every stored polynomial
"""
import difflib
import json
import logging
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from modules.arith import (LaurentPolynomial, RationalFunction, parse, parse_polynomial,
                           ratfunc_eq, same_up_to_scalar)
from modules.cluster import compose, coxeter_power_state, initial_state, rotate_cluster
from modules.env_check import DEFAULT_BIT_BUDGET, DEFAULT_TERM_BUDGET
from modules.errors import GoldenMismatch
from modules.invariants import (certificate_holds, component_equations, symmetry_invariant)
from modules.orbit import iterate
from modules.quiver import Quiver, classify, find_symmetry_pair
from modules.variety import (VanishingSpace, detect_components, dimension_estimate,
                             evaluation_matrix, monomial_basis, nullspace, span_space,
                             stabilized_vanishing_space)

logger = logging.getLogger(__name__)

GOLDEN_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "golden")

CASE_QUIVERS: Dict[str, List[List[int]]] = {
    "a2": [[2, 1, 1]],
    "kronecker": [[2, 1, 2]],
    "a3double": [[2, 1, 2], [3, 2, 2]],
    "atilde2": [[2, 1, 1], [3, 1, 1], [3, 2, 1]],
    "qa5": [[2, 1, 1], [3, 2, 1], [5, 3, 1], [5, 4, 1], [4, 1, 1]],
}

CASES = ("a2", "kronecker", "a3double", "atilde2", "atilden", "qa5")


@dataclass
class CaseRun:
    name: str
    quiver: Quiver
    start: Tuple[Fraction, ...]
    results: Dict[str, Any] = field(default_factory=dict)
    recorded: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Budgets:
    bit_budget: int = DEFAULT_BIT_BUDGET
    term_budget: int = DEFAULT_TERM_BUDGET
    m_max: int = 6


def atilde_quiver(n: int) -> Quiver:
    """Ã_n on vertices 1..n+1: the path n+1 -> n -> ... -> 1 plus n+1 -> 1."""
    if n < 2:
        raise ValueError("atilden needs n >= 2")
    arrows = [(k + 1, k, 1) for k in range(1, n + 1)] + [(n + 1, 1, 1)]
    return Quiver.from_arrows(n + 1, arrows)


def atilde_invariant(n: int) -> RationalFunction:
    return parse(f"(x{n - 1} + x{n + 1})/x{n}", n + 1)


# ---- cases ----

def _a2(b: Budgets) -> CaseRun:
    q = Quiver.from_arrows(2, CASE_QUIVERS["a2"])
    run = CaseRun("a2", q, (Fraction(1), Fraction(1)))
    record = iterate(q, run.start, 10, b.bit_budget)
    period = record.period
    run.results["orbit"] = record.points[:period]
    run.results["period"] = period
    basis = monomial_basis(2, 2)
    run.results["kernel_d2"] = nullspace(evaluation_matrix(record.points[:period], basis)).basis
    run.results["vanishing_d2"] = stabilized_vanishing_space(q, run.start, 2, bit_budget=b.bit_budget)
    run.results["vanishing_d1"] = stabilized_vanishing_space(q, run.start, 1, bit_budget=b.bit_budget)
    run.results["classify"] = classify(q).to_json()
    comps = detect_components(q, run.start, 2, b.m_max, b.bit_budget, b.term_budget)
    run.results["components_m"] = comps.m
    run.results["verified_cycle"] = comps.verified_cycle
    run.results["dims"] = comps.dims
    return run


def _kronecker(b: Budgets) -> CaseRun:
    q = Quiver.from_arrows(2, CASE_QUIVERS["kronecker"])
    run = CaseRun("kronecker", q, (Fraction(1), Fraction(1)))
    record = iterate(q, run.start, 2, b.bit_budget)
    run.results["orbit_prefix"] = record.points
    run.results["det_d1"] = evaluation_matrix(record.points, monomial_basis(2, 1)).determinant()
    space = stabilized_vanishing_space(q, run.start, 2, bit_budget=b.bit_budget)
    run.results["vanishing_d2"] = space
    h = parse("(x1^2 + x2^2 + 1)/(x1*x2)", 2)
    cert = component_equations(q, h, run.start, 3, b.term_budget, b.bit_budget)
    run.results["invariant_period"] = cert.period
    run.results["constants"] = cert.constants
    run.results["equations"] = cert.equations
    run.results["dimension_at_2_5"] = dimension_estimate(space, (2, 5)).estimate
    run.results["classify"] = classify(q).to_json()
    comps = detect_components(q, run.start, 2, b.m_max, b.bit_budget, b.term_budget)
    run.results["components_m"] = comps.m
    run.results["verified_cycle"] = comps.verified_cycle
    return run


def _a3double(b: Budgets) -> CaseRun:
    q = Quiver.from_arrows(3, CASE_QUIVERS["a3double"])
    run = CaseRun("a3double", q, (Fraction(1),) * 3)
    run.results["orbit_prefix"] = iterate(q, run.start, 1, b.bit_budget).points
    run.results["symmetry_pair"] = find_symmetry_pair(q).to_json()
    h, f0, f1 = symmetry_invariant(q, b.term_budget)
    run.results["h"] = h
    run.results["F0"] = f0
    run.results["F1"] = f1
    mu = coxeter_power_state(q, 1, b.term_budget)
    run.results["inversion_law"] = ratfunc_eq(compose(h, mu), h.inverse())
    cert = component_equations(q, h, run.start, 2, b.term_budget, b.bit_budget)
    run.results["invariant_period"] = cert.period
    run.results["constants"] = cert.constants
    run.results["equations"] = cert.equations
    run.results["certificate_failures"] = certificate_holds(cert, iterate(q, run.start, 3, b.bit_budget))
    run.results["classify"] = classify(q).to_json()
    return run


def _atilde2(b: Budgets) -> CaseRun:
    q = Quiver.from_arrows(3, CASE_QUIVERS["atilde2"])
    run = CaseRun("atilde2", q, (Fraction(1),) * 3)
    run.results["orbit_prefix"] = iterate(q, run.start, 2, b.bit_budget).points
    h = atilde_invariant(2)
    rotated = rotate_cluster(initial_state(q), b.term_budget)
    h_prime = compose(h, rotated)
    run.results["h"] = h
    run.results["h_prime"] = h_prime
    run.results["h_prime_is_h_after_coxeter"] = ratfunc_eq(
        h_prime, compose(h, coxeter_power_state(q, 1, b.term_budget)))
    run.results["h_after_two_rotations"] = ratfunc_eq(
        compose(h, rotate_cluster(rotated, b.term_budget)), h)
    cert = component_equations(q, h, run.start, 4, b.term_budget, b.bit_budget)
    run.results["invariant_period"] = cert.period
    run.results["constants"] = cert.constants
    run.results["equations"] = cert.equations
    run.results["certificate_failures"] = certificate_holds(cert, iterate(q, run.start, 6, b.bit_budget))
    comps = detect_components(q, run.start, 2, b.m_max, b.bit_budget, b.term_budget)
    run.results["components_m"] = comps.m
    for r, space in enumerate(comps.classes):
        run.results[f"class_{r}_space"] = space
    run.results["dims"] = comps.dims
    run.results["verified_cycle"] = comps.verified_cycle
    run.results["classify"] = classify(q).to_json()
    return run


def _atilden(b: Budgets, n: int) -> CaseRun:
    q = atilde_quiver(n)
    run = CaseRun(f"atilden-{n}", q, (Fraction(1),) * (n + 1))
    record = iterate(q, run.start, 2 * n, b.bit_budget)
    run.results["orbit_prefix"] = record.points[:2]
    run.recorded["orbit"] = [[str(v) for v in p] for p in record.points]
    h = atilde_invariant(n)
    run.results["h"] = h
    cert = component_equations(q, h, run.start, n, b.term_budget, b.bit_budget)
    run.results["invariant_period"] = cert.period
    run.results["constants"] = cert.constants
    run.results["F0"] = cert.equations[0]
    run.results["F1"] = cert.equations[1]
    run.results["certificate_failures"] = certificate_holds(cert, record)
    comps = detect_components(q, run.start, 2, n + 1, b.bit_budget, b.term_budget)
    run.results["components_m"] = comps.m
    run.results["class_0_space"] = comps.classes[0]
    run.results["equal_dims"] = len(set(comps.dims)) == 1
    run.results["verified_cycle"] = comps.verified_cycle
    run.recorded["dims"] = list(comps.dims)
    return run


def atilden_expectations(n: int) -> Dict[str, dict]:
    """Closed forms for the relabeled Ã_n family.

    Period n, c_1 = 3 and every other c_t = 2. Class 0 is cut out by the
    linear forms x_{k-1} + x_{k+1} - 2 x_k and the quadric
    x_1 x_n + x_2 x_{n+1} + 1 - 3 x_1 x_{n+1}; class 1 swaps in 3 x_n and
    the quadric with 2 x_1 x_{n+1}.
    """
    linear = [f"x{k - 1} + x{k + 1} - 2*x{k}" for k in range(2, n + 1)]

    def quadric(c: int) -> str:
        return f"x1*x{n} + x2*x{n + 1} + 1 - {c}*x1*x{n + 1}"

    return {
        "orbit_prefix": {"kind": "points", "value": [["1"] * (n + 1),
                                                     [str(k + 1) for k in range(1, n + 1)] + [str(2 * n + 3)]]},
        "h": {"kind": "function", "value": f"(x{n - 1} + x{n + 1})/x{n}"},
        "invariant_period": {"kind": "exact", "value": n},
        "constants": {"kind": "exact", "value": ["3" if t == 1 else "2" for t in range(n)]},
        "F0": {"kind": "polys", "value": [linear[-1], quadric(3)] + linear[:n - 2]},
        "F1": {"kind": "polys", "value": [f"x{n - 1} + x{n + 1} - 3*x{n}", quadric(2)] + linear[:n - 2]},
        "certificate_failures": {"kind": "exact", "value": []},
        "components_m": {"kind": "exact", "value": n},
        "class_0_space": {"kind": "contains", "value": linear + [quadric(3)]},
        "equal_dims": {"kind": "exact", "value": True},
        "verified_cycle": {"kind": "exact", "value": True},
    }


def _qa5(b: Budgets) -> CaseRun:
    q = Quiver.from_arrows(5, CASE_QUIVERS["qa5"])
    run = CaseRun("qa5", q, (Fraction(1),) * 5)
    run.results["orbit_prefix"] = iterate(q, run.start, 1, b.bit_budget).points
    run.results["classify"] = classify(q).to_json()
    comps = detect_components(q, run.start, 2, b.m_max, b.bit_budget, b.term_budget)
    run.recorded["components_m"] = comps.m
    run.recorded["verified_cycle"] = comps.verified_cycle
    run.recorded["dims"] = list(comps.dims)
    run.recorded["period"] = comps.period
    return run


_BUILDERS: Dict[str, Callable[[Budgets], CaseRun]] = {
    "a2": _a2,
    "kronecker": _kronecker,
    "a3double": _a3double,
    "atilde2": _atilde2,
    "qa5": _qa5,
}


# ---- rendering and comparison ----

def render(value: Any) -> Any:
    """JSON form of a result: polynomials and functions in text syntax,
    rationals as strings, vanishing spaces as their reduced basis."""
    if isinstance(value, VanishingSpace):
        return [f.to_text() for f in value.basis]
    if isinstance(value, (LaurentPolynomial, RationalFunction)):
        return value.to_text()
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(k): render(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [render(v) for v in value]
    return value


def _polys_match(expected: Any, actual: Any, nvars: int) -> bool:
    if isinstance(expected, str):
        return isinstance(actual, LaurentPolynomial) and same_up_to_scalar(
            parse_polynomial(expected, nvars), actual)
    if not isinstance(actual, (list, tuple)) or len(expected) != len(actual):
        return False
    return all(_polys_match(e, a, nvars) for e, a in zip(expected, actual))


def matches(kind: str, expected: Any, actual: Any, nvars: int) -> bool:
    if kind == "exact":
        return render(actual) == expected
    if kind == "points":
        return ([tuple(Fraction(v) for v in p) for p in expected]
                == [tuple(Fraction(v) for v in p) for p in actual])
    if kind == "polys":
        return _polys_match(expected, actual, nvars)
    if kind == "function":
        return isinstance(actual, RationalFunction) and ratfunc_eq(parse(expected, nvars), actual)
    if kind == "span":
        polys = [parse_polynomial(t, nvars) for t in expected]
        return span_space(polys, actual.degree_bound, nvars) == actual
    if kind == "contains":
        return all(actual.contains(parse_polynomial(t, nvars)) for t in expected)
    raise ValueError(f"unknown expectation kind {kind!r}")


def _diff(name: str, expected: Any, actual: Any) -> List[str]:
    a = json.dumps(expected, indent=2, ensure_ascii=False, sort_keys=True).splitlines()
    b = json.dumps(render(actual), indent=2, ensure_ascii=False, sort_keys=True).splitlines()
    return list(difflib.unified_diff(a, b, fromfile=f"expected:{name}", tofile=f"actual:{name}", lineterm=""))


def compare(run: CaseRun, expect: Dict[str, dict]) -> Tuple[Dict[str, str], List[str]]:
    """Per-name pass/fail and the unified diff lines of every failure."""
    checks: Dict[str, str] = {}
    diff: List[str] = []
    for name, entry in expect.items():
        kind, expected = entry["kind"], entry["value"]
        if name not in run.results:
            checks[name] = "missing"
            diff.extend(_diff(name, expected, None))
            continue
        actual = run.results[name]
        if matches(kind, expected, actual, run.quiver.n):
            checks[name] = "pass"
        else:
            checks[name] = "fail"
            diff.extend(_diff(name, expected, actual))
    return checks, diff


def golden_path(case: str, golden_dir: Optional[str] = None) -> str:
    return os.path.join(golden_dir or GOLDEN_DIR, f"{case}.json")


def load_golden(case: str, golden_dir: Optional[str] = None) -> Dict[str, dict]:
    with open(golden_path(case, golden_dir), "r", encoding="utf-8") as f:
        data = json.load(f)
    return data["expect"]


def write_golden(run: CaseRun, expect: Dict[str, dict], golden_dir: Optional[str] = None) -> str:
    """Rewrite the stored values from the current results, keeping each kind."""
    updated = {name: {"kind": entry["kind"], "value": render(run.results.get(name))}
               for name, entry in expect.items()}
    path = golden_path(run.name, golden_dir)
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump({"case": run.name, "expect": updated}, f, indent=2, ensure_ascii=False)
        f.write("\n")
    logger.info(f"golden file {path} updated")
    return path


def run_case(case: str, budgets: Budgets = Budgets(), n: Optional[int] = None) -> CaseRun:
    if case == "atilden":
        if n is None:
            raise ValueError("atilden needs --n")
        return _atilden(budgets, n)
    if case not in _BUILDERS:
        raise ValueError(f"unknown case {case!r}; choose from {', '.join(CASES)}")
    return _BUILDERS[case](budgets)


def reproduce(case: str, budgets: Budgets = Budgets(), n: Optional[int] = None,
              golden_dir: Optional[str] = None, update_golden: bool = False) -> dict:
    """Recompute a case and compare it with its expectations. Raises GoldenMismatch
    (carrying the report) when any comparison fails."""
    logger.info(f"reproducing case {case}" + (f" with n={n}" if n is not None else ""))
    run = run_case(case, budgets, n)
    if case == "atilden":
        expect = atilden_expectations(n)
        if update_golden:
            logger.info("atilden expectations are closed forms; nothing to update")
    else:
        expect = load_golden(case, golden_dir)
        if update_golden:
            write_golden(run, expect, golden_dir)
            expect = load_golden(case, golden_dir)

    checks, diff = compare(run, expect)
    report = {
        "case": run.name,
        "quiver": run.quiver.to_json(),
        "start": [str(v) for v in run.start],
        "results": render(run.results),
        "recorded": render(run.recorded),
        "checks": checks,
        "passed": all(v == "pass" for v in checks.values()),
    }
    if not report["passed"]:
        err = GoldenMismatch(run.name, "\n".join(diff))
        err.report = report
        raise err
    return report


def reproduce_all(budgets: Budgets = Budgets(), atilden_sizes: Sequence[int] = (3, 4),
                  golden_dir: Optional[str] = None) -> List[dict]:
    reports = [reproduce(c, budgets, golden_dir=golden_dir) for c in CASES if c != "atilden"]
    reports.extend(reproduce("atilden", budgets, n=k) for k in atilden_sizes)
    return reports
