import json
from fractions import Fraction

import pytest

from conftest import random_admissible_quiver
from modules.errors import BudgetExceeded, NonGenericSpecialization, NotAdmissible, ZeroStartCoordinate
from modules.orbit import OrbitWalker, detect_period, forward_step, inverse_step, iterate
from modules.quiver import Quiver


def pts(*rows):
    return tuple(tuple(Fraction(v) for v in r) for r in rows)


def test_a2_orbit_has_five_points(a2):
    record = iterate(a2, (1, 1), 10)
    assert record.points[:5] == pts((1, 1), (2, 3), (2, 1), (1, 2), (3, 2))
    assert record.period == 5
    assert record.points[5] == record.points[0]


def test_kronecker_prefix(kronecker):
    assert iterate(kronecker, (1, 1), 2).points == pts((1, 1), (2, 5), (13, 34))
    assert iterate(kronecker, (1, 1), 2).period is None


def test_atilde2_prefix(atilde2):
    record = iterate(atilde2, (1, 1, 1), 3)
    assert record.points[1:] == pts((2, 3, 7), (11, 26, 41), (97, 153, 362))


def test_triple_kronecker_first_step(kronecker3):
    assert forward_step(kronecker3, (1, 1)) == pts((2, 9))[0]


def test_rational_start(a2):
    assert forward_step(a2, (Fraction(1, 2), 3)) == (Fraction(8), Fraction(3))


def test_zero_start_coordinate(a2):
    with pytest.raises(ZeroStartCoordinate):
        iterate(a2, (0, 1), 1)


def test_vanishing_coordinate_reports_step_and_vertex(a2):
    with pytest.raises(NonGenericSpecialization) as e:
        iterate(a2, (1, -1), 3)
    assert (e.value.step, e.value.vertex) == (1, 1)
    assert e.value.record.points == pts((1, -1))
    assert e.value.record.generic_up_to == 0


def test_bit_budget(kronecker):
    with pytest.raises(BudgetExceeded) as e:
        iterate(kronecker, (1, 1), 5, bit_budget=4)
    assert e.value.step == 2
    assert e.value.bits == 6


def test_needs_admissible_labels():
    with pytest.raises(NotAdmissible):
        forward_step(Quiver.from_arrows(2, [[1, 2, 1]]), (1, 1))


def test_inverse_step(a2, atilde2):
    assert inverse_step(a2, (2, 3)) == pts((1, 1))[0]
    assert inverse_step(atilde2, (97, 153, 362)) == pts((11, 26, 41))[0]


def test_inverse_step_round_trip(rng):
    for _ in range(100):
        q = random_admissible_quiver(rng, rng.randint(1, 5))
        start = tuple(Fraction(rng.randint(1, 5), rng.randint(1, 3)) for _ in range(q.n))
        assert inverse_step(q, forward_step(q, start)) == start


def test_walker_reuses_period(a2):
    walker = OrbitWalker(a2, (1, 1))
    assert walker.point(12) == pts((2, 1))[0]
    assert walker.period == 5
    assert len(walker.points) == 5


def test_detect_period_on_record(a2, kronecker):
    assert detect_period(iterate(a2, (2, 3), 7)) == 5
    assert detect_period(iterate(kronecker, (1, 1), 3)) is None


def test_finite_type_orbits_are_periodic():
    for arrows, n in (([[2, 1, 1]], 2), ([[2, 1, 1], [3, 2, 1]], 3), ([[2, 1, 1], [3, 2, 1], [4, 3, 1]], 4)):
        assert iterate(Quiver.from_arrows(n, arrows), (1,) * n, 20).period is not None


def test_json_lines(a2):
    lines = iterate(a2, (1, 1), 2).to_json_lines()
    assert [json.loads(line) for line in lines] == [
        {"t": 0, "point": ["1", "1"]},
        {"t": 1, "point": ["2", "3"]},
        {"t": 2, "point": ["2", "1"]},
        {"generic_up_to": 2, "period": None, "certified_horizon": 2},
    ]
