"""Command-line front end. Every command prints JSON on stdout; logs go to stderr."""
import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from modules.arith import LaurentPolynomial, RationalFunction, parse, parse_rational
from modules.cluster import ClusterState, compose
from modules.env_check import DEFAULT_BIT_BUDGET, DEFAULT_DEGREE, DEFAULT_TERM_BUDGET, env_int
from modules.errors import EXIT_INVALID_INPUT, EXIT_OK, FriezeError, GoldenMismatch
from modules.invariants import (automorphism_invariant, certificate_holds, component_equations,
                                symmetry_invariant)
from modules.logging_setup import setup_logger
from modules.orbit import OrbitWalker, iterate
from modules.quiver import Quiver, automorphisms, classify, find_symmetry_pair, load_quiver_file
from modules.reproduce import CASES, Budgets, reproduce, reproduce_all
from modules.variety import detect_components, dimension_estimate, stabilized_vanishing_space

logger = logging.getLogger(__name__)

QUIVER_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "quivers")

DEFAULT_STEPS = 10
DEFAULT_M_MAX = 6
DEFAULT_K_MAX = 6


@dataclass(frozen=True)
class RunConfig:
    command: str
    bit_budget: int = DEFAULT_BIT_BUDGET
    term_budget: int = DEFAULT_TERM_BUDGET
    degree: int = DEFAULT_DEGREE
    steps: int = DEFAULT_STEPS
    m_max: int = DEFAULT_M_MAX
    k_max: int = DEFAULT_K_MAX
    pretty: bool = False
    log_level: str = "INFO"

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        """Flag, then environment, then default."""
        def pick(flag: Optional[int], env_key: Optional[str], default: int, name: str) -> int:
            if flag is not None:
                if flag < 1:
                    raise ValueError(f"{name} must be a positive integer, got {flag}")
                return flag
            return env_int(env_key) if env_key else default

        return cls(
            command=args.command,
            bit_budget=pick(args.bit_budget, "FRIEZE_BUDGET_BITS", DEFAULT_BIT_BUDGET, "--bit-budget"),
            term_budget=pick(args.term_budget, "FRIEZE_TERM_BUDGET", DEFAULT_TERM_BUDGET, "--term-budget"),
            degree=pick(getattr(args, "degree", None), "FRIEZE_DEGREE", DEFAULT_DEGREE, "--degree"),
            steps=pick(getattr(args, "steps", None), None, DEFAULT_STEPS, "--steps"),
            m_max=pick(getattr(args, "m_max", None), None, DEFAULT_M_MAX, "--m-max"),
            k_max=pick(getattr(args, "k_max", None), None, DEFAULT_K_MAX, "--k-max"),
            pretty=args.pretty,
            log_level=args.log_level or os.getenv("LOG_LEVEL", "INFO"),
        )

    def budgets(self) -> Budgets:
        return Budgets(self.bit_budget, self.term_budget, self.m_max)


# ---- input helpers ----

def _resolve_quiver_path(path: str) -> str:
    if os.path.exists(path):
        return path
    bundled = os.path.join(QUIVER_DIR, os.path.basename(path))
    for candidate in (bundled, bundled + ".json"):
        if os.path.exists(candidate):
            return candidate
    raise FileNotFoundError(f"quiver file not found: {path}")


def _load(args) -> Tuple[Quiver, Dict[int, int]]:
    return load_quiver_file(_resolve_quiver_path(args.quiver))


def _is_identity(relabeling: Dict[int, int]) -> bool:
    return all(old == new for old, new in relabeling.items())


def _start(text: Optional[str], relabeling: Dict[int, int]) -> Tuple[Fraction, ...]:
    """Start point in input labels, reordered to the admissible labels."""
    n = len(relabeling)
    if text is None:
        return (Fraction(1),) * n
    values = [parse_rational(v) for v in text.split(",")]
    if len(values) != n:
        raise ValueError(f"start point has {len(values)} coordinates, quiver has {n} vertices")
    out: List[Fraction] = [Fraction(0)] * n
    for old, new in relabeling.items():
        out[new - 1] = values[old - 1]
    return tuple(out)


def _relabel_function(h: RationalFunction, q: Quiver, relabeling: Dict[int, int]) -> RationalFunction:
    if _is_identity(relabeling):
        return h
    images = tuple(LaurentPolynomial.variable(q.n, relabeling[old]) for old in range(1, q.n + 1))
    return compose(h, ClusterState(q, images))


def _header(q: Quiver, relabeling: Dict[int, int]) -> Dict[str, Any]:
    out: Dict[str, Any] = {"quiver": q.to_json()}
    if not _is_identity(relabeling):
        out["relabeling"] = {str(k): v for k, v in sorted(relabeling.items())}
    return out


# ---- commands ----

def cmd_orbit(args, config: RunConfig) -> List[str]:
    q, relabeling = _load(args)
    start = _start(args.start, relabeling)
    try:
        record = iterate(q, start, config.steps, config.bit_budget)
    except FriezeError as e:
        partial = getattr(e, "record", None)
        if partial is not None:
            for line in partial.to_json_lines()[:-1]:
                print(line)
        raise
    lines = record.to_json_lines()
    header = _header(q, relabeling)
    if "relabeling" in header:
        summary = json.loads(lines[-1])
        summary["relabeling"] = header["relabeling"]
        lines[-1] = json.dumps(summary)
    return lines


def cmd_vanish(args, config: RunConfig) -> dict:
    q, relabeling = _load(args)
    start = _start(args.start, relabeling)
    walker = OrbitWalker(q, start, config.bit_budget)
    space = stabilized_vanishing_space(q, start, config.degree, args.offset, args.stride,
                                       config.bit_budget, walker)
    out = _header(q, relabeling)
    out["space"] = space.to_json()
    out["dimension"] = dimension_estimate(space, walker.point(args.offset)).to_json()
    return out


def cmd_components(args, config: RunConfig) -> dict:
    q, relabeling = _load(args)
    start = _start(args.start, relabeling)
    decomposition = detect_components(q, start, config.degree, config.m_max,
                                      config.bit_budget, config.term_budget)
    out = _header(q, relabeling)
    out.update(decomposition.to_json())
    return out


def cmd_invariant(args, config: RunConfig) -> dict:
    q, relabeling = _load(args)
    start = _start(args.start, relabeling)
    h = _relabel_function(parse(args.h, q.n), q, relabeling)
    cert = component_equations(q, h, start, config.k_max, config.term_budget, config.bit_budget)
    record = iterate(q, start, 2 * cert.period, config.bit_budget)
    out = _header(q, relabeling)
    out["certificate"] = cert.to_json()
    out["failures"] = [list(f) for f in certificate_holds(cert, record)]
    return out


def cmd_classify(args, config: RunConfig) -> dict:
    q, relabeling = _load(args)
    out = _header(q, relabeling)
    out.update(classify(q).to_json())
    return out


def cmd_symmetry(args, config: RunConfig) -> dict:
    q, relabeling = _load(args)
    out = _header(q, relabeling)
    if args.list:
        out["automorphisms"] = [list(s) for s in automorphisms(q)]
        return out
    if args.automorphism:
        sigma = [int(v) for v in args.automorphism.split(",")]
        out["automorphism"] = sigma
        out["h"] = automorphism_invariant(q, sigma, config.term_budget).to_json()
        return out
    h, f0, f1 = symmetry_invariant(q, config.term_budget)
    out["pair"] = find_symmetry_pair(q).to_json()
    out.update({"h": h.to_json(), "F0": f0.to_json(), "F1": f1.to_json()})
    return out


def cmd_reproduce(args, config: RunConfig):
    if args.case == "all":
        return reproduce_all(config.budgets(), golden_dir=args.golden_dir)
    if args.case == "atilden" and args.n is None:
        raise ValueError("reproduce atilden needs --n")
    return reproduce(args.case, config.budgets(), n=args.n, golden_dir=args.golden_dir,
                     update_golden=args.update_golden)


# ---- output ----

def _textify(node: Any) -> Any:
    """Replace polynomial and rational-function JSON objects by their text form."""
    if isinstance(node, dict):
        if set(node) == {"nvars", "terms"}:
            return LaurentPolynomial.from_json(node).to_text()
        if set(node) == {"num", "den"}:
            return RationalFunction.from_json(node).to_text()
        return {k: _textify(v) for k, v in node.items()}
    if isinstance(node, list):
        return [_textify(v) for v in node]
    return node


def emit(payload: Any, pretty: bool = False):
    if isinstance(payload, list) and all(isinstance(line, str) for line in payload):
        for line in payload:
            print(line)
        return
    if pretty:
        print(json.dumps(_textify(payload), indent=2, ensure_ascii=False))
    else:
        print(json.dumps(payload, ensure_ascii=False))


# ---- parsing ----

def _parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true", help="indent output and print polynomials as text")
    common.add_argument("--bit-budget", type=int, default=None, help="max bits per orbit coordinate")
    common.add_argument("--term-budget", type=int, default=None, help="max terms per cluster variable")
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")

    quiver = argparse.ArgumentParser(add_help=False)
    quiver.add_argument("--quiver", required=True, help="quiver JSON file")

    start = argparse.ArgumentParser(add_help=False)
    start.add_argument("--start", default=None, help="comma separated nonzero rationals (default all ones)")

    parser = argparse.ArgumentParser(prog="frieze", description="Frieze varieties of acyclic quivers")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("orbit", parents=[common, quiver, start], help="orbit points P_0..P_T")
    p.add_argument("--steps", type=int, default=None)
    p.set_defaults(handler=cmd_orbit)

    p = sub.add_parser("vanish", parents=[common, quiver, start], help="stabilized vanishing space")
    p.add_argument("--degree", type=int, default=None)
    p.add_argument("--offset", type=int, default=0)
    p.add_argument("--stride", type=int, default=1)
    p.set_defaults(handler=cmd_vanish)

    p = sub.add_parser("components", parents=[common, quiver, start], help="residue-class components")
    p.add_argument("--degree", type=int, default=None)
    p.add_argument("--m-max", type=int, default=None)
    p.set_defaults(handler=cmd_components)

    p = sub.add_parser("invariant", parents=[common, quiver, start], help="certify an invariant function")
    p.add_argument("--h", required=True, help='rational function, e.g. "(x1^2+x2^2+1)/(x1*x2)"')
    p.add_argument("--k-max", type=int, default=None)
    p.set_defaults(handler=cmd_invariant)

    p = sub.add_parser("classify", parents=[common, quiver], help="finite, tame or wild")
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("symmetry", parents=[common, quiver], help="sink/source or automorphism invariant")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--automorphism", default=None, help="sigma(1),...,sigma(n)")
    group.add_argument("--list", action="store_true", help="list all automorphisms")
    p.set_defaults(handler=cmd_symmetry)

    p = sub.add_parser("reproduce", parents=[common], help="recompute a worked example")
    p.add_argument("case", choices=CASES + ("all",))
    p.add_argument("--n", type=int, default=None, help="size for atilden")
    p.add_argument("--m-max", type=int, default=None)
    p.add_argument("--golden-dir", default=None)
    p.add_argument("--update-golden", action="store_true")
    p.set_defaults(handler=cmd_reproduce)

    return parser.parse_args(argv)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parse_args(argv)
    try:
        config = RunConfig.from_args(args)
    except ValueError as e:
        print(json.dumps({"error": "InvalidInput", "message": str(e)}))
        return EXIT_INVALID_INPUT
    setup_logger("modules", level=config.log_level)

    try:
        payload = args.handler(args, config)
    except GoldenMismatch as e:
        logger.error(f"{e}")
        print(e.diff, file=sys.stderr)
        emit(e.report, config.pretty)
        return e.exit_code
    except FriezeError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(json.dumps(e.to_json(), ensure_ascii=False))
        return e.exit_code
    except (ValueError, IndexError, OSError) as e:
        logger.error(f"invalid input: {e}")
        print(json.dumps({"error": "InvalidInput", "message": str(e)}, ensure_ascii=False))
        return EXIT_INVALID_INPUT
    except Exception as e:
        logger.exception(f"unexpected failure in {config.command}")
        print(json.dumps({"error": type(e).__name__, "message": str(e)}, ensure_ascii=False))
        return EXIT_INVALID_INPUT

    emit(payload, config.pretty)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
