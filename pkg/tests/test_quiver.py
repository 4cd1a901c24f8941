import json

import pytest

from conftest import random_admissible_quiver
from modules.errors import InvalidArrow, NotAcyclic, NotAdmissible, VertexCountTooLarge
from modules.quiver import (FINITE, TAME, WILD, Quiver, automorphisms, classify,
                            coxeter_mutate_quiver, find_symmetry_pair, has_rotation, load_quiver,
                            load_quiver_file, mutate_quiver)


def test_exchange_matrix_and_arrows(a3double):
    assert a3double.b == ((0, -2, 0), (2, 0, -2), (0, 2, 0))
    assert a3double.arrows() == [[2, 1, 2], [3, 2, 2]]
    assert a3double.sinks() == [1]
    assert a3double.sources() == [3]
    assert a3double.is_admissible and a3double.is_acyclic


def test_matrix_must_be_skew_symmetric():
    with pytest.raises(InvalidArrow):
        Quiver(((0, 1), (1, 0)))


def test_load_keeps_admissible_labels():
    q, relabeling = load_quiver({"n": 3, "arrows": [[2, 1, 1], [3, 1, 1], [3, 2, 1]]})
    assert relabeling == {1: 1, 2: 2, 3: 3}
    assert q.arrows() == [[2, 1, 1], [3, 1, 1], [3, 2, 1]]


def test_load_relabels_smallest_sink_first():
    q, relabeling = load_quiver({"n": 3, "arrows": [[1, 2, 2], [3, 2, 2]]})
    assert relabeling == {2: 1, 1: 2, 3: 3}
    assert q.arrows() == [[2, 1, 2], [3, 1, 2]]
    assert q.is_admissible


def test_load_merges_parallel_arrows_and_accepts_pairs():
    q, _ = load_quiver([[2, 1], [2, 1, 2]])
    assert q.arrows() == [[2, 1, 3]]


def test_load_from_file(tmp_path):
    path = tmp_path / "q.json"
    path.write_text(json.dumps({"n": 2, "arrows": [[2, 1, 2]]}), encoding="utf-8")
    q, _ = load_quiver_file(str(path))
    assert q == Quiver.from_arrows(2, [[2, 1, 2]])


@pytest.mark.parametrize("data, error", [
    ({"n": 3, "arrows": [[1, 2, 1], [2, 3, 1], [3, 1, 1]]}, NotAcyclic),
    ({"n": 2, "arrows": [[1, 1, 1]]}, InvalidArrow),
    ({"n": 2, "arrows": [[2, 1, 0]]}, InvalidArrow),
    ({"n": 2, "arrows": [[2, 1, 1], [1, 2, 1]]}, InvalidArrow),
    ({"n": 2, "arrows": [[3, 1, 1]]}, InvalidArrow),
    ({"n": 2, "arrows": [[0, 1, 1]]}, InvalidArrow),
])
def test_load_rejects_bad_input(data, error):
    with pytest.raises(error):
        load_quiver(data)


def test_mutation_at_middle_of_path():
    q = Quiver.from_arrows(3, [[2, 1, 1], [3, 2, 1]])
    assert mutate_quiver(q, 2).arrows() == [[1, 2, 1], [2, 3, 1], [3, 1, 1]]
    with pytest.raises(IndexError):
        mutate_quiver(q, 4)


def test_mutation_is_an_involution(rng):
    for _ in range(100):
        q = random_admissible_quiver(rng, rng.randint(2, 6), max_mult=3)
        k = rng.randint(1, q.n)
        assert mutate_quiver(mutate_quiver(q, k), k) == q


def test_coxeter_mutation_fixes_admissible_quivers(rng):
    for _ in range(100):
        q = random_admissible_quiver(rng, rng.randint(1, 8), max_mult=3)
        assert coxeter_mutate_quiver(q) == q


def test_classification_ignores_labels(rng):
    for _ in range(100):
        n = rng.randint(1, 7)
        q = random_admissible_quiver(rng, n, max_mult=rng.choice([1, 2]), density=0.4)
        perm = list(range(1, n + 1))
        rng.shuffle(perm)
        arrows = [[perm[i - 1], perm[j - 1], m] for i, j, m in q.arrows()]
        shuffled, _ = load_quiver({"n": n, "arrows": arrows})
        assert classify(shuffled) == classify(q)


def test_coxeter_mutation_needs_admissible_labels():
    with pytest.raises(NotAdmissible):
        coxeter_mutate_quiver(Quiver.from_arrows(2, [[1, 2, 1]]))


@pytest.mark.parametrize("arrows, n, kind, diagram", [
    ([[2, 1, 1]], 2, FINITE, "A2"),
    ([[2, 1, 1], [3, 2, 1], [4, 3, 1]], 4, FINITE, "A4"),
    ([[2, 1, 1], [3, 1, 1], [4, 1, 1]], 4, FINITE, "D4"),
    ([[2, 1, 1], [3, 1, 1], [4, 3, 1], [5, 1, 1], [6, 5, 1]], 6, FINITE, "E6"),
    ([[2, 1, 2]], 2, TAME, "Ã1"),
    ([[2, 1, 1], [3, 1, 1], [3, 2, 1]], 3, TAME, "Ã2"),
    ([[2, 1, 1], [3, 2, 1], [5, 3, 1], [5, 4, 1], [4, 1, 1]], 5, TAME, "Ã4"),
    ([[2, 1, 1], [3, 1, 1], [4, 1, 1], [5, 1, 1]], 5, TAME, "D̃4"),
    ([[2, 1, 1], [3, 2, 1], [4, 1, 1], [5, 4, 1], [6, 1, 1], [7, 6, 1]], 7, TAME, "Ẽ6"),
    ([[3, 2, 1]], 3, FINITE, "A1+A2"),
    ([[2, 1, 3]], 2, WILD, None),
    ([[2, 1, 2], [3, 2, 2]], 3, WILD, None),
    ([[2, 1, 1], [3, 1, 1], [4, 1, 1], [5, 1, 1], [6, 1, 1]], 6, WILD, None),
])
def test_classify(arrows, n, kind, diagram):
    c = classify(Quiver.from_arrows(n, arrows))
    assert (c.kind, c.diagram) == (kind, diagram)


def test_symmetry_pair(a3double, a2):
    pair = find_symmetry_pair(a3double)
    assert (pair.sink, pair.source, pair.multiplicities) == (1, 3, {2: 2})
    assert pair.to_json() == {"sink": 1, "source": 3, "multiplicities": {"2": 2}}
    assert find_symmetry_pair(a2).multiplicities == {}
    assert find_symmetry_pair(Quiver.from_arrows(3, [[3, 1, 1], [3, 2, 2]])) is None


def test_automorphisms():
    fork = Quiver.from_arrows(3, [[3, 1, 1], [3, 2, 1]])
    assert automorphisms(fork) == [(1, 2, 3), (2, 1, 3)]
    assert automorphisms(Quiver.from_arrows(3, [[3, 1, 1], [3, 2, 2]])) == [(1, 2, 3)]
    with pytest.raises(VertexCountTooLarge):
        automorphisms(Quiver.from_arrows(11, []))


def test_rotation_symmetry(atilde2, a3double):
    assert has_rotation(atilde2)
    assert not has_rotation(a3double)
