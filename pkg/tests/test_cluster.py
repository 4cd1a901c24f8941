import pytest

from conftest import random_admissible_quiver
from modules.arith import parse, parse_polynomial, ratfunc_eq
from modules.cluster import (compose, coxeter_mutate_cluster, coxeter_power_state, initial_state,
                             mutate_cluster, rotate_cluster)
from modules.errors import NotAdmissible, TermBudgetExceeded
from modules.orbit import iterate


def test_single_mutation(a2):
    s = mutate_cluster(initial_state(a2), 1)
    assert s.vars[0] == parse_polynomial("x1^-1*x2 + x1^-1", 2)
    assert s.vars[1] == parse_polynomial("x2", 2)
    assert s.history == (1,)
    assert s.quiver.arrows() == [[1, 2, 1]]


def test_coxeter_step_on_a2(a2):
    s = coxeter_mutate_cluster(initial_state(a2))
    assert s.vars == (parse_polynomial("(1 + x2)/x1", 2), parse_polynomial("(x1 + x2 + 1)/(x1*x2)", 2))
    assert s.quiver == a2
    assert s.history == (1, 2)


def test_a3double_first_step(a3double):
    s = coxeter_power_state(a3double, 1)
    assert s.evaluate((1, 1, 1)) == (2, 5, 26)


def test_out_of_range_vertex(a2):
    with pytest.raises(IndexError):
        mutate_cluster(initial_state(a2), 0)


def test_term_budget(kronecker):
    with pytest.raises(TermBudgetExceeded) as e:
        coxeter_mutate_cluster(initial_state(kronecker), term_budget=1)
    assert (e.value.terms, e.value.budget) == (2, 1)


def test_laurent_with_positive_integer_coefficients(rng):
    for _ in range(100):
        q = random_admissible_quiver(rng, rng.randint(2, 5), max_mult=2)
        s = initial_state(q)
        for _ in range(rng.randint(1, 6)):
            s = mutate_cluster(s, rng.randint(1, q.n))
        for v in s.vars:
            assert all(c > 0 and c.denominator == 1 for c in v.terms.values())


def test_symbolic_orbit_agrees_with_numeric(rng):
    for _ in range(100):
        n = rng.randint(1, 3)
        q = random_admissible_quiver(rng, n, max_mult=2 if n < 3 else 1)
        t = rng.randint(1, 3) if n < 3 else rng.randint(1, 2)
        start = tuple(rng.randint(1, 3) for _ in range(n))
        assert coxeter_power_state(q, t).evaluate(start) == iterate(q, start, t).points[t]


def test_rotation(atilde2):
    s = rotate_cluster(initial_state(atilde2))
    assert s.vars[:2] == (parse_polynomial("x2", 3), parse_polynomial("x3", 3))
    assert s.vars[2] == parse_polynomial("(x2*x3 + 1)/x1", 3)
    assert s.history == ()
    for _ in range(2):
        s = rotate_cluster(s)
    assert s.vars == coxeter_power_state(atilde2, 1).vars


def test_rotation_needs_symmetry(a3double):
    with pytest.raises(NotAdmissible):
        rotate_cluster(initial_state(a3double))


def test_compose(kronecker, a3double):
    h = parse("(x1^2 + x2^2 + 1)/(x1*x2)", 2)
    assert ratfunc_eq(compose(h, coxeter_power_state(kronecker, 1)), h)
    g = parse("(x2^2 + 1)/(x1*x3)", 3)
    assert ratfunc_eq(compose(g, coxeter_power_state(a3double, 1)), g.inverse())
    with pytest.raises(ValueError):
        compose(g, initial_state(kronecker))
