"""Symbolic cluster mutation with cluster variables as Laurent polynomials
in the initial cluster x1..xn."""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

from modules.arith import LaurentPolynomial, RationalFunction, exact_divide
from modules.env_check import DEFAULT_TERM_BUDGET
from modules.errors import LaurentCertificationFailed, NotAdmissible, TermBudgetExceeded
from modules.quiver import Quiver, has_rotation, mutate_quiver

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClusterState:
    quiver: Quiver
    vars: Tuple[LaurentPolynomial, ...]
    history: Tuple[int, ...] = ()

    @property
    def n(self) -> int:
        return self.quiver.n

    def evaluate(self, point) -> tuple:
        return tuple(v.evaluate(point) for v in self.vars)

    def max_terms(self) -> int:
        return max(v.num_terms for v in self.vars)


def initial_state(q: Quiver) -> ClusterState:
    return ClusterState(q, tuple(LaurentPolynomial.variable(q.n, i) for i in range(1, q.n + 1)))


def _monomial_product(s: ClusterState, factors) -> LaurentPolynomial:
    out = LaurentPolynomial.constant(s.n, 1)
    for j, m in factors:
        out = out * s.vars[j] ** m
    return out


def mutate_cluster(s: ClusterState, k: int, term_budget: int = DEFAULT_TERM_BUDGET) -> ClusterState:
    """x_k' = (prod_{j->k} x_j^b + prod_{k->j} x_j^b) / x_k, certified Laurent."""
    q = s.quiver
    if not 1 <= k <= q.n:
        raise IndexError(f"mutation vertex {k} out of range 1..{q.n}")
    c = k - 1
    ins = [(j, q.b[j][c]) for j in range(q.n) if q.b[j][c] > 0]
    outs = [(j, q.b[c][j]) for j in range(q.n) if q.b[c][j] > 0]
    exchange = _monomial_product(s, ins) + _monomial_product(s, outs)

    # split off monomial content so the division is a polynomial one
    old = s.vars[c]
    quotient = exact_divide(exchange.content_free(), old.content_free())
    if quotient is None:
        raise LaurentCertificationFailed(
            f"exchange polynomial at vertex {k} is not divisible by {old.to_text()}")
    new = quotient.mul_monom(tuple(a - b for a, b in zip(exchange.shift, old.shift)))
    if new.num_terms > term_budget:
        raise TermBudgetExceeded(new.num_terms, term_budget)

    vars_ = list(s.vars)
    vars_[c] = new
    return ClusterState(mutate_quiver(q, k), tuple(vars_), s.history + (k,))


def coxeter_mutate_cluster(s: ClusterState, term_budget: int = DEFAULT_TERM_BUDGET) -> ClusterState:
    if not s.quiver.is_admissible:
        raise NotAdmissible("Coxeter mutation needs an admissible labeling")
    for k in range(1, s.n + 1):
        s = mutate_cluster(s, k, term_budget)
    logger.debug(f"Coxeter step done, largest variable has {s.max_terms()} terms")
    return s


def rotate_cluster(s: ClusterState, term_budget: int = DEFAULT_TERM_BUDGET) -> ClusterState:
    """(x1, ..., xN) -> (x2, ..., xN, x1') for quivers where mu_1 followed by v -> v-1
    gives the quiver back. N rotations equal one Coxeter mutation. The history only
    records mutations in a fixed labeling, so it is left unchanged."""
    if not has_rotation(s.quiver):
        raise NotAdmissible("quiver has no rotation symmetry")
    mutated = mutate_cluster(s, 1, term_budget)
    return ClusterState(s.quiver, mutated.vars[1:] + mutated.vars[:1], s.history)


@lru_cache(maxsize=128)
def coxeter_power_state(q: Quiver, t: int, term_budget: int = DEFAULT_TERM_BUDGET) -> ClusterState:
    """Cluster after t Coxeter mutations of the initial state."""
    if t == 0:
        return initial_state(q)
    return coxeter_mutate_cluster(coxeter_power_state(q, t - 1, term_budget), term_budget)


def compose(h: RationalFunction, s: ClusterState) -> RationalFunction:
    """h with x_i replaced by s.vars[i-1], reduced to lowest terms."""
    if h.nvars != s.n:
        raise ValueError(f"h has {h.nvars} variables, cluster has {s.n}")
    values = s.vars
    num_core = h.num.content_free().substitute(values)
    den = h.den.substitute(values)
    for i, e in enumerate(h.num.shift):
        if e > 0:
            num_core = num_core * values[i] ** e
        elif e < 0:
            den = den * values[i] ** (-e)
    return RationalFunction(num_core, den).reduced()
