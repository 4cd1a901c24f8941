"""Exact numeric Coxeter-mutation orbits."""
import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from modules.env_check import DEFAULT_BIT_BUDGET
from modules.errors import BudgetExceeded, NonGenericSpecialization, NotAdmissible, ZeroStartCoordinate
from modules.quiver import Quiver

logger = logging.getLogger(__name__)

Point = Tuple[Fraction, ...]


@dataclass(frozen=True)
class OrbitRecord:
    quiver: Quiver
    points: Tuple[Point, ...]
    generic_up_to: int
    period: Optional[int] = None

    @property
    def horizon(self) -> int:
        return len(self.points) - 1

    def to_json_lines(self) -> List[str]:
        lines = [json.dumps({"t": t, "point": point_to_json(p)}) for t, p in enumerate(self.points)]
        lines.append(json.dumps({"generic_up_to": self.generic_up_to, "period": self.period,
                                 "certified_horizon": self.horizon}))
        return lines


def point_to_json(p: Sequence[Fraction]) -> List[str]:
    return [str(Fraction(v)) for v in p]


def _neighbors(q: Quiver):
    n = q.n
    ins = [[(j, q.b[j][i]) for j in range(n) if q.b[j][i] > 0] for i in range(n)]
    outs = [[(j, q.b[i][j]) for j in range(n) if q.b[i][j] > 0] for i in range(n)]
    return ins, outs


def _product(values: Sequence[Fraction], factors) -> Fraction:
    out = Fraction(1)
    for j, m in factors:
        out *= values[j] ** m
    return out


def _check_admissible(q: Quiver):
    if not q.is_admissible:
        raise NotAdmissible("orbit recurrence needs an admissible labeling")


def forward_step(q: Quiver, p: Sequence[Fraction], step: int = 1) -> Point:
    """mu_* on a point: f_i(t+1) = (1 + prod_{j->i} f_j(t) * prod_{i->j} f_j(t+1)) / f_i(t)."""
    _check_admissible(q)
    ins, outs = _neighbors(q)
    return _forward(ins, outs, p, step)


def _forward(ins, outs, p: Sequence[Fraction], step: int) -> Point:
    old = [Fraction(v) for v in p]
    new = list(old)
    for i in range(len(old)):
        if old[i] == 0:
            raise NonGenericSpecialization(step - 1, i + 1)
        # new already holds f_j(t+1) for j < i and f_j(t) for j > i
        new[i] = (1 + _product(new, ins[i]) * _product(new, outs[i])) / old[i]
        if new[i] == 0:
            raise NonGenericSpecialization(step, i + 1)
    return tuple(new)


def inverse_step(q: Quiver, p: Sequence[Fraction]) -> Point:
    """mu_*^{-1} = mu_1 o ... o mu_n, processing vertices n..1."""
    _check_admissible(q)
    ins, outs = _neighbors(q)
    cur = [Fraction(v) for v in p]
    for i in reversed(range(len(cur))):
        if cur[i] == 0:
            raise NonGenericSpecialization(0, i + 1)
        # cur holds f_j(t) for j > i and f_j(t+1) for j < i
        cur[i] = (1 + _product(cur, ins[i]) * _product(cur, outs[i])) / cur[i]
        if cur[i] == 0:
            raise NonGenericSpecialization(-1, i + 1)
    return tuple(cur)


def _bits(x: Fraction) -> int:
    return max(abs(x.numerator).bit_length(), x.denominator.bit_length())


class OrbitWalker:
    """Lazily extended orbit with cached points."""

    def __init__(self, q: Quiver, a: Sequence, bit_budget: int = DEFAULT_BIT_BUDGET):
        _check_admissible(q)
        if len(a) != q.n:
            raise ValueError(f"start point has {len(a)} coordinates, quiver has {q.n} vertices")
        start = tuple(Fraction(v) for v in a)
        for i, v in enumerate(start):
            if v == 0:
                raise ZeroStartCoordinate(f"start coordinate {i + 1} is zero")
        self.quiver = q
        self.bit_budget = bit_budget
        self.points: List[Point] = [start]
        self.period: Optional[int] = None
        self._ins, self._outs = _neighbors(q)

    def point(self, t: int) -> Point:
        if self.period is not None:
            return self.points[t % self.period]
        while len(self.points) <= t:
            step = len(self.points)
            try:
                nxt = _forward(self._ins, self._outs, self.points[-1], step)
            except NonGenericSpecialization as e:
                e.record = self.record()
                raise
            bits = max(_bits(v) for v in nxt)
            if bits > self.bit_budget:
                raise BudgetExceeded(step, bits, self.bit_budget)
            if nxt == self.points[0]:
                self.period = step
                logger.debug(f"orbit closes with period {step}")
                return self.points[t % step]
            self.points.append(nxt)
        return self.points[t]

    def record(self) -> OrbitRecord:
        return OrbitRecord(self.quiver, tuple(self.points), len(self.points) - 1, self.period)


def iterate(q: Quiver, a: Sequence, steps: int, bit_budget: int = DEFAULT_BIT_BUDGET) -> OrbitRecord:
    """P_0..P_steps. A vanishing coordinate raises NonGenericSpecialization carrying
    the partial record."""
    walker = OrbitWalker(q, a, bit_budget)
    points = [walker.point(t) for t in range(steps + 1)]
    logger.debug(f"iterated {steps} steps from {points[0]}")
    record = OrbitRecord(q, tuple(points), steps)
    return OrbitRecord(q, record.points, steps, detect_period(record))


def detect_period(record: OrbitRecord) -> Optional[int]:
    pts = record.points
    for p in range(1, len(pts)):
        if pts[p] == pts[0] and all(pts[t + p] == pts[t] for t in range(len(pts) - p)):
            return p
    return None
