"""Defining polynomials of orbit closures by exact linear algebra on monomial
evaluation matrices, residue-class component detection and Jacobian dimension
estimates."""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import factorint
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from modules.arith import LaurentPolynomial, RationalFunction, to_fraction
from modules.cluster import compose, coxeter_power_state
from modules.env_check import DEFAULT_BIT_BUDGET, DEFAULT_TERM_BUDGET
from modules.errors import BudgetExceeded, PointNotOnVariety
from modules.orbit import OrbitWalker, Point
from modules.quiver import FINITE, Quiver, classify

logger = logging.getLogger(__name__)

STABLE_RUN = 3
EXTRA_SAMPLES = 3
MAX_EXTRA_SAMPLES = 12
# finite-type orbits close within the Coxeter number plus two steps (<= 32 for E8);
# unions of components close at the lcm of their periods
FINITE_PERIOD_CAP = 1024

Vector = List[Fraction]


# ---- exact linear algebra ----

def _to_domain(rows: Sequence[Sequence[Fraction]]) -> DomainMatrix:
    return DomainMatrix.from_list([[(Fraction(c).numerator, Fraction(c).denominator) for c in r]
                                   for r in rows], QQ)


def _echelon(rows: Sequence[Vector]) -> List[Vector]:
    """Reduced echelon basis of the row span, pivots taken from the last column
    (the largest monomial) backwards."""
    if not rows:
        return []
    R, pivots = _to_domain([list(reversed(r)) for r in rows]).rref()
    return [[to_fraction(c) for c in reversed(row)] for row in R.to_list()[:len(pivots)]]


def _kernel(rows: Sequence[Vector], width: int) -> List[Vector]:
    if not rows:
        return [[Fraction(int(i == j)) for j in range(width)] for i in range(width)]
    R, pivots = _to_domain(rows).rref()
    R = R.to_list()
    free = [c for c in range(width) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * width
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -to_fraction(R[i][f])
        basis.append(v)
    return _echelon(basis)


def matrix_rank(rows: Sequence[Vector]) -> int:
    if not rows or not rows[0]:
        return 0
    return _to_domain(rows).rank()


# ---- monomials ----

@dataclass(frozen=True)
class MonomialBasis:
    nvars: int
    degree_bound: int
    monomials: Tuple[Tuple[int, ...], ...]

    def __len__(self):
        return len(self.monomials)

    def index(self) -> Dict[Tuple[int, ...], int]:
        return {m: i for i, m in enumerate(self.monomials)}

    def row(self, point: Sequence[Fraction]) -> Vector:
        powers = [[Fraction(1)] for _ in point]
        for i, v in enumerate(point):
            for _ in range(self.degree_bound):
                powers[i].append(powers[i][-1] * v)
        out = []
        for m in self.monomials:
            value = Fraction(1)
            for i, e in enumerate(m):
                if e:
                    value *= powers[i][e]
            out.append(value)
        return out

    def to_polynomial(self, coeffs: Sequence[Fraction]) -> LaurentPolynomial:
        return LaurentPolynomial.from_terms(self.nvars, dict(zip(self.monomials, coeffs)))

    def to_vector(self, f: LaurentPolynomial) -> Vector:
        idx = self.index()
        v = [Fraction(0)] * len(self.monomials)
        for e, c in f.terms.items():
            if e not in idx:
                raise ValueError(f"{f.to_text()} is not a polynomial of degree <= {self.degree_bound}")
            v[idx[e]] = c
        return v


def monomial_basis(n: int, d: int) -> MonomialBasis:
    """Degree ascending; within a degree x1^2 before x1*x2 before x2^2."""
    if n < 1 or d < 0:
        raise ValueError("need n >= 1 and d >= 0")
    monos = []
    for deg in range(d + 1):
        for combo in combinations_with_replacement(range(n), deg):
            e = [0] * n
            for i in combo:
                e[i] += 1
            monos.append(tuple(e))
    assert len(monos) == comb(n + d, n)
    return MonomialBasis(n, d, tuple(monos))


@dataclass(frozen=True)
class EvaluationMatrix:
    rows: Tuple[Tuple[Fraction, ...], ...]
    basis: MonomialBasis

    def determinant(self) -> Fraction:
        if len(self.rows) != len(self.basis):
            raise ValueError("determinant needs a square matrix")
        return to_fraction(_to_domain(self.rows).det())


def evaluation_matrix(points: Sequence[Sequence], basis: MonomialBasis) -> EvaluationMatrix:
    rows = []
    for p in points:
        if len(p) != basis.nvars:
            raise ValueError(f"point {p} does not have {basis.nvars} coordinates")
        rows.append(tuple(basis.row([Fraction(v) for v in p])))
    return EvaluationMatrix(tuple(rows), basis)


# ---- vanishing spaces ----

@dataclass(frozen=True, eq=False)
class VanishingSpace:
    nvars: int
    degree_bound: int
    basis: Tuple[LaurentPolynomial, ...]
    points_used: int
    stabilized: bool = True
    sample_steps: Tuple[int, ...] = field(default=())

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __eq__(self, other):
        if not isinstance(other, VanishingSpace):
            return NotImplemented
        return (self.nvars, self.degree_bound, self.basis) == (other.nvars, other.degree_bound, other.basis)

    def __hash__(self):
        return hash((self.nvars, self.degree_bound, self.basis))

    def contains(self, f: LaurentPolynomial) -> bool:
        # each basis element has coefficient 1 at its pivot, the last monomial
        # in basis order it uses, and no other element uses that monomial
        idx = monomial_basis(self.nvars, self.degree_bound).index()
        rest = f
        for b in self.basis:
            pivot = max(b.terms, key=idx.__getitem__)
            c = rest.terms.get(pivot)
            if c:
                rest = rest - b.scale(c)
        return rest.is_zero

    def includes(self, other: "VanishingSpace") -> bool:
        return all(self.contains(f) for f in other.basis)

    def strictly_contains(self, other: "VanishingSpace") -> bool:
        return self.dim > other.dim and self.includes(other)

    def vanishes_at(self, point: Sequence) -> bool:
        return all(f.evaluate(point) == 0 for f in self.basis)

    def to_json(self) -> dict:
        return {"degree_bound": self.degree_bound, "basis": [f.to_json() for f in self.basis],
                "points_used": self.points_used, "stabilized": self.stabilized}


def _space(basis: MonomialBasis, vectors: Sequence[Vector], points_used: int,
           stabilized: bool = True, steps: Sequence[int] = ()) -> VanishingSpace:
    polys = tuple(basis.to_polynomial(v) for v in vectors)
    return VanishingSpace(basis.nvars, basis.degree_bound, polys, points_used, stabilized, tuple(steps))


def nullspace(m: EvaluationMatrix) -> VanishingSpace:
    vectors = _kernel([list(r) for r in m.rows], len(m.basis))
    return _space(m.basis, vectors, len(m.rows))


def span_space(polys: Sequence[LaurentPolynomial], d: int, nvars: int) -> VanishingSpace:
    """Degree <= d part of the ideal generated by polys, in reduced form."""
    basis = monomial_basis(nvars, d)
    rows = []
    for f in polys:
        deg = f.total_degree()
        if f.is_zero or deg > d:
            continue
        for mono in monomial_basis(nvars, d - deg).monomials:
            rows.append(basis.to_vector(f.mul_monom(mono)))
    return _space(basis, _echelon(rows), 0)


def stabilized_vanishing_space(q: Quiver, a: Sequence, d: int, offset: int = 0, stride: int = 1,
                               bit_budget: int = DEFAULT_BIT_BUDGET,
                               walker: Optional[OrbitWalker] = None) -> VanishingSpace:
    """Degree <= d polynomials vanishing on P_offset, P_offset+stride, ...

    Sampling stops once the space is zero, once a sample repeats (periodic orbit),
    or once the space survived STABLE_RUN consecutive new points after at least
    width + EXTRA_SAMPLES samples. Hitting the sample cap leaves stabilized False.
    """
    if stride < 1 or offset < 0:
        raise ValueError("need stride >= 1 and offset >= 0")
    walker = walker or OrbitWalker(q, a, bit_budget)
    basis = monomial_basis(q.n, d)
    width = len(basis)
    rows: List[Vector] = []
    steps: List[int] = []
    kernel: List[Vector] = []
    unchanged = 0
    t = offset
    while True:
        point = walker.point(t)
        period = walker.period
        if period is not None and any((s - t) % period == 0 for s in steps):
            logger.debug(f"samples repeat after {len(steps)} points (period {period})")
            return _space(basis, _kernel(rows, width), len(steps), True, steps)
        row = basis.row(point)
        rows.append(row)
        steps.append(t)
        t += stride

        if len(rows) < width:
            continue
        if len(rows) == width:
            kernel = _kernel(rows, width)
        elif all(sum(c * r for c, r in zip(v, row)) == 0 for v in kernel):
            unchanged += 1
        else:
            kernel = _kernel(rows, width)
            unchanged = 0
            logger.debug(f"space shrank to dimension {len(kernel)} at {len(rows)} points")

        if not kernel:
            return _space(basis, kernel, len(rows), True, steps)
        if len(rows) >= width + EXTRA_SAMPLES and unchanged >= STABLE_RUN:
            return _space(basis, kernel, len(rows), True, steps)
        if len(rows) >= width + MAX_EXTRA_SAMPLES:
            logger.warning(f"vanishing space did not stabilize within {len(rows)} samples")
            return _space(basis, kernel, len(rows), False, steps)


def pullback_numerator(f: LaurentPolynomial, q: Quiver,
                       term_budget: int = DEFAULT_TERM_BUDGET) -> LaurentPolynomial:
    """f(mu_*(x)) times the monomial that clears its negative exponents."""
    g = compose(RationalFunction(f), coxeter_power_state(q, 1, term_budget)).num
    if g.is_zero:
        return g
    return g.mul_monom(tuple(max(-s, 0) for s in g.shift))


# ---- dimension ----

@dataclass(frozen=True)
class DimensionEstimate:
    estimate: int
    rank: int
    upper_bound: bool = True

    def to_json(self) -> dict:
        return {"estimate": self.estimate, "jacobian_rank": self.rank, "upper_bound": self.upper_bound}


def dimension_estimate(v: VanishingSpace, p: Sequence) -> DimensionEstimate:
    """n - rank of the Jacobian of v's basis at p. An upper bound for the local
    dimension when p is singular."""
    point = [Fraction(c) for c in p]
    if not v.vanishes_at(point):
        raise PointNotOnVariety(f"basis polynomials do not all vanish at {point}")
    jac = [[f.diff(i).evaluate(point) for i in range(1, v.nvars + 1)] for f in v.basis]
    rank = matrix_rank(jac)
    return DimensionEstimate(v.nvars - rank, rank)


# ---- components ----

@dataclass(frozen=True)
class ComponentDecomposition:
    m: int
    classes: Tuple[VanishingSpace, ...]
    dims: Tuple[int, ...]
    verified_cycle: bool
    full: VanishingSpace
    period: Optional[int] = None

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "period": self.period,
            "classes": [{"residue": r, "basis": [f.to_json() for f in c.basis],
                         "dim_estimate": dim, "stabilized": c.stabilized}
                        for r, (c, dim) in enumerate(zip(self.classes, self.dims))],
            "verified_cycle": self.verified_cycle,
        }


class _ClassSpaces:
    """Cached residue-class spaces over one orbit."""

    def __init__(self, q: Quiver, walker: OrbitWalker, d: int):
        self.q, self.walker, self.d = q, walker, d
        self.cache: Dict[Tuple[int, int], VanishingSpace] = {}

    def get(self, m: int, r: int) -> VanishingSpace:
        if (m, r) not in self.cache:
            self.cache[(m, r)] = stabilized_vanishing_space(
                self.q, None, self.d, offset=r, stride=m, walker=self.walker)
        return self.cache[(m, r)]

    def informative(self, m: int) -> bool:
        for p in factorint(m):
            coarse = m // p
            for r in range(m):
                if not self.get(m, r).strictly_contains(self.get(coarse, r % coarse)):
                    return False
        return True


def _verify_cycle(q: Quiver, walker: OrbitWalker, classes: Sequence[VanishingSpace],
                  term_budget: int) -> bool:
    m = len(classes)
    for r in range(m):
        samples = [walker.point(t) for t in classes[r].sample_steps]
        for f in classes[(r + 1) % m].basis:
            pulled = pullback_numerator(f, q, term_budget)
            if any(pulled.evaluate(p) != 0 for p in samples):
                logger.warning(f"pullback of a class-{(r + 1) % m} equation fails on class {r}")
                return False
    return True


def _probe_period(q: Quiver, walker: OrbitWalker, d: int) -> Optional[int]:
    """Walk far enough to see whether the orbit closes.

    Finite-type orbits are followed up to FINITE_PERIOD_CAP points, others up to
    the sample cap of one vanishing space. Running out of bit budget ends the
    walk without error; a fast-growing orbit is not periodic.
    """
    horizon = FINITE_PERIOD_CAP if classify(q).kind == FINITE else len(monomial_basis(q.n, d)) + MAX_EXTRA_SAMPLES
    try:
        walker.point(horizon)
    except BudgetExceeded as e:
        logger.debug(f"period probe stopped at step {e.step}: {e}")
    return walker.period


def detect_components(q: Quiver, a: Sequence, d: int, m_max: int,
                      bit_budget: int = DEFAULT_BIT_BUDGET,
                      term_budget: int = DEFAULT_TERM_BUDGET) -> ComponentDecomposition:
    """Residue-class decomposition of the orbit closure.

    A periodic orbit gives m = period and one point per class, whatever m_max is.
    Otherwise m is the largest m <= m_max such that for every prime p | m each
    class mod m has a strictly larger space than its class mod m/p.
    """
    walker = OrbitWalker(q, a, bit_budget)
    _probe_period(q, walker, d)
    spaces = _ClassSpaces(q, walker, d)
    full = spaces.get(1, 0)

    if walker.period is not None:
        m = walker.period
        linear = monomial_basis(q.n, 1)
        classes = tuple(_space(linear, _kernel([linear.row(walker.point(r))], len(linear)), 1, True, (r,))
                        for r in range(m))
    else:
        m = max(c for c in range(1, m_max + 1) if c == 1 or spaces.informative(c))
        classes = tuple(spaces.get(m, r) for r in range(m))
    logger.info(f"detected {m} residue classes")

    dims = tuple(dimension_estimate(c, walker.point(r)).estimate for r, c in enumerate(classes))
    verified = _verify_cycle(q, walker, classes, term_budget)
    return ComponentDecomposition(m, classes, dims, verified, full, walker.period)
