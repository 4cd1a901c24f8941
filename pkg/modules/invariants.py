"""Invariant Laurent polynomials under Coxeter mutation and the component
equations they generate."""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from modules.arith import LaurentPolynomial, RationalFunction, numerator_normal_form, ratfunc_eq
from modules.cluster import compose, coxeter_power_state
from modules.env_check import DEFAULT_BIT_BUDGET, DEFAULT_TERM_BUDGET
from modules.errors import DegenerateInvariant, IdentityAutomorphism, NoSymmetryPair, NotInvariant
from modules.orbit import OrbitRecord, OrbitWalker
from modules.quiver import Quiver, automorphisms, find_symmetry_pair

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InvariantCertificate:
    h: RationalFunction
    period: int
    iterates: Tuple[RationalFunction, ...]
    constants: Tuple[Fraction, ...]
    equations: Tuple[Tuple[LaurentPolynomial, ...], ...]
    base_point: Tuple[Fraction, ...] = ()

    def equation(self, j: int, t: int) -> LaurentPolynomial:
        k = self.period
        return self.equations[j % k][t % k]

    def to_json(self) -> dict:
        return {
            "h": self.h.to_json(),
            "period": self.period,
            "base_point": [str(v) for v in self.base_point],
            "iterates": [f.to_json() for f in self.iterates],
            "constants": [str(c) for c in self.constants],
            "equations": [[f.to_json() for f in row] for row in self.equations],
        }


def check_invariant(q: Quiver, h: RationalFunction, k_max: int,
                    term_budget: int = DEFAULT_TERM_BUDGET) -> Optional[int]:
    """Smallest k <= k_max with h(mu_*^k(x)) = h(x) as rational functions."""
    if h.nvars != q.n:
        raise ValueError(f"h has {h.nvars} variables, quiver has {q.n} vertices")
    for k in range(1, k_max + 1):
        if ratfunc_eq(compose(h, coxeter_power_state(q, k, term_budget)), h):
            logger.debug(f"{h.to_text()} is invariant with period {k}")
            return k
    return None


def constants(q: Quiver, h: RationalFunction, a: Sequence, k: int,
              bit_budget: int = DEFAULT_BIT_BUDGET) -> Tuple[Fraction, ...]:
    """c_t = h(P_t) for t < k, checked to repeat over t = k..2k-1."""
    walker = OrbitWalker(q, a, bit_budget)
    values = [h.evaluate(walker.point(t)) for t in range(2 * k)]
    for t in range(k):
        if values[t] != values[t + k]:
            raise NotInvariant(f"c_{t + k} = {values[t + k]} differs from c_{t} = {values[t]}")
    return tuple(values[:k])


def component_equations(q: Quiver, h: RationalFunction, a: Sequence, k_max: int = 6,
                        term_budget: int = DEFAULT_TERM_BUDGET,
                        bit_budget: int = DEFAULT_BIT_BUDGET) -> InvariantCertificate:
    """F_{j,t} = Num(f_t - c_{t+j} g_t) for h(mu_*^t(x)) = f_t/g_t, indices mod k."""
    if h.is_constant:
        raise DegenerateInvariant(f"constant function {h.to_text()} gives no equations")
    k = check_invariant(q, h, k_max, term_budget)
    if k is None:
        raise NotInvariant(f"{h.to_text()} is not invariant under mu_*^k for k <= {k_max}")
    iterates = tuple(compose(h, coxeter_power_state(q, t, term_budget)) for t in range(k))
    cs = constants(q, h, a, k, bit_budget)
    grid = []
    for j in range(k):
        row = []
        for t in range(k):
            diff = iterates[t] - cs[(t + j) % k]
            if diff.is_zero:
                raise DegenerateInvariant(f"h(mu_*^{t}(x)) is the constant {cs[(t + j) % k]}")
            row.append(numerator_normal_form(diff))
        grid.append(tuple(row))
    return InvariantCertificate(h, k, iterates, cs, tuple(grid), tuple(Fraction(v) for v in a))


def certificate_holds(cert: InvariantCertificate, record: OrbitRecord) -> List[Tuple[int, int, int]]:
    """(j, t, i) for every F_{j,t} that fails at a recorded P_i with i = j mod k."""
    failures = []
    k = cert.period
    for i, p in enumerate(record.points):
        j = i % k
        for t in range(k):
            if cert.equations[j][t].evaluate(p) != 0:
                failures.append((j, t, i))
    return failures


def symmetry_invariant(q: Quiver, term_budget: int = DEFAULT_TERM_BUDGET
                       ) -> Tuple[RationalFunction, LaurentPolynomial, LaurentPolynomial]:
    """For a sink i and source j with arrows(k->i) = arrows(j->k) = n_k:
    h = (1 + prod x_k^n_k)/(x_i x_j), F0 = 1 - 2 x_i x_j + prod, F1 = 2 - x_i x_j + 2 prod."""
    pair = find_symmetry_pair(q)
    if pair is None:
        raise NoSymmetryPair("no sink/source pair with matching arrow counts")
    if not pair.multiplicities:
        raise DegenerateInvariant(
            f"pair ({pair.sink}, {pair.source}) has no intermediate vertices; h would be 2/(x{pair.sink}*x{pair.source})")
    n = q.n
    exp = [0] * n
    for k, m in pair.multiplicities.items():
        exp[k - 1] = m
    prod = LaurentPolynomial.monomial(n, exp)
    ij = LaurentPolynomial.variable(n, pair.sink) * LaurentPolynomial.variable(n, pair.source)
    h = RationalFunction(1 + prod, ij)
    f0 = 1 - 2 * ij + prod
    f1 = 2 - ij + 2 * prod
    period = check_invariant(q, h, 2, term_budget)
    if period is None:
        raise NotInvariant(f"{h.to_text()} is not invariant under mu_*^2")
    return h, f0, f1


def automorphism_invariant(q: Quiver, sigma: Sequence[int],
                           term_budget: int = DEFAULT_TERM_BUDGET) -> RationalFunction:
    """x_sigma(k)/x_k for the smallest vertex k that sigma moves."""
    sigma = tuple(sigma)
    if sigma not in automorphisms(q):
        raise ValueError(f"{sigma} is not an automorphism of the quiver")
    moved = [k for k in range(1, q.n + 1) if sigma[k - 1] != k]
    if not moved:
        raise IdentityAutomorphism("the identity gives only constant invariants")
    k = moved[0]
    h = RationalFunction(LaurentPolynomial.variable(q.n, sigma[k - 1]), LaurentPolynomial.variable(q.n, k))
    period = check_invariant(q, h, 2, term_budget)
    if period is None:
        raise NotInvariant(f"{h.to_text()} is not invariant under mu_*^2")
    return h
