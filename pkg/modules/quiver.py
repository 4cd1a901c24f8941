"""Acyclic quivers as skew-symmetric exchange matrices.

Vertices are 1-based everywhere outside this module's internals.
b[i][j] counts arrows i->j minus arrows j->i.
"""
import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from networkx.algorithms.isomorphism import DiGraphMatcher, numerical_edge_match

from modules.errors import InvalidArrow, NotAcyclic, NotAdmissible, VertexCountTooLarge

logger = logging.getLogger(__name__)

AUTOMORPHISM_VERTEX_LIMIT = 10

FINITE = "finite"
TAME = "tame"
WILD = "wild"


@dataclass(frozen=True)
class Quiver:
    b: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        b = tuple(tuple(int(x) for x in row) for row in self.b)
        n = len(b)
        if n < 1:
            raise InvalidArrow("a quiver needs at least one vertex")
        for i, row in enumerate(b):
            if len(row) != n:
                raise InvalidArrow("exchange matrix must be square")
            for j in range(n):
                if row[j] != -b[j][i]:
                    raise InvalidArrow(f"exchange matrix is not skew-symmetric at ({i + 1},{j + 1})")
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return len(self.b)

    def entry(self, i: int, j: int) -> int:
        return self.b[i - 1][j - 1]

    def arrows_between(self, i: int, j: int) -> int:
        """Number of arrows i->j."""
        return max(self.b[i - 1][j - 1], 0)

    def arrows(self) -> List[List[int]]:
        return [[i + 1, j + 1, self.b[i][j]]
                for i in range(self.n) for j in range(self.n) if self.b[i][j] > 0]

    def sinks(self) -> List[int]:
        return [i + 1 for i in range(self.n) if all(x <= 0 for x in self.b[i])]

    def sources(self) -> List[int]:
        return [i + 1 for i in range(self.n) if all(x >= 0 for x in self.b[i])]

    def digraph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(1, self.n + 1))
        for i, j, m in self.arrows():
            g.add_edge(i, j, m=m)
        return g

    @property
    def is_acyclic(self) -> bool:
        return nx.is_directed_acyclic_graph(self.digraph())

    @property
    def is_admissible(self) -> bool:
        return all(i > j for i, j, _ in self.arrows())

    def to_json(self) -> dict:
        return {"n": self.n, "arrows": self.arrows()}

    @classmethod
    def from_arrows(cls, n: int, arrows: Iterable[Sequence[int]]) -> "Quiver":
        b = [[0] * n for _ in range(n)]
        for i, j, m in arrows:
            b[i - 1][j - 1] += m
            b[j - 1][i - 1] -= m
        return cls(tuple(tuple(r) for r in b))


@dataclass(frozen=True)
class QuiverClass:
    kind: str
    diagram: Optional[str] = None

    def to_json(self) -> dict:
        return {"kind": self.kind, "diagram": self.diagram}


@dataclass(frozen=True)
class SymmetryPair:
    sink: int
    source: int
    multiplicities: Dict[int, int] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"sink": self.sink, "source": self.source,
                "multiplicities": {str(k): v for k, v in sorted(self.multiplicities.items())}}


# ---- loading ----

def _arrow_list(data) -> Tuple[Optional[int], List[Sequence]]:
    if isinstance(data, Mapping):
        return data.get("n"), list(data.get("arrows", []))
    return None, list(data)


def load_quiver(data: Union[Mapping, Sequence]) -> Tuple[Quiver, Dict[int, int]]:
    """Validate an arrow list and return (quiver, relabeling old -> new).

    Non-admissible input is relabeled by repeatedly taking the smallest remaining
    sink, so sinks get small labels. The relabeling is the identity otherwise.
    """
    n, raw = _arrow_list(data)
    arrows = []
    for a in raw:
        if len(a) not in (2, 3):
            raise InvalidArrow(f"arrow must be [from, to, multiplicity]: {a!r}")
        i, j = int(a[0]), int(a[1])
        m = int(a[2]) if len(a) == 3 else 1
        if m < 1:
            raise InvalidArrow(f"multiplicity must be at least 1: {a!r}")
        if i == j:
            raise InvalidArrow(f"self-loop at vertex {i}")
        if i < 1 or j < 1:
            raise InvalidArrow(f"vertices are 1-based: {a!r}")
        arrows.append((i, j, m))
    if n is None:
        n = max([max(i, j) for i, j, _ in arrows], default=1)
    n = int(n)
    merged: Dict[Tuple[int, int], int] = {}
    for i, j, m in arrows:
        if max(i, j) > n:
            raise InvalidArrow(f"arrow {i}->{j} leaves the vertex range 1..{n}")
        if (j, i) in merged:
            raise InvalidArrow(f"arrows in both directions between {i} and {j}")
        merged[(i, j)] = merged.get((i, j), 0) + m

    g = nx.DiGraph()
    g.add_nodes_from(range(1, n + 1))
    g.add_edges_from(merged)
    if not nx.is_directed_acyclic_graph(g):
        cycle = [u for u, _ in nx.find_cycle(g)]
        raise NotAcyclic(f"quiver has an oriented cycle through {cycle}")

    order = list(nx.lexicographical_topological_sort(g.reverse()))
    relabeling = {old: new for new, old in enumerate(order, start=1)}
    if any(old != new for old, new in relabeling.items()):
        logger.info(f"relabeled vertices to an admissible order: {relabeling}")
    quiver = Quiver.from_arrows(n, [(relabeling[i], relabeling[j], m) for (i, j), m in merged.items()])
    return quiver, relabeling


def load_quiver_file(path: str) -> Tuple[Quiver, Dict[int, int]]:
    with open(path, "r", encoding="utf-8") as f:
        return load_quiver(json.load(f))


def relabel(q: Quiver, mapping: Mapping[int, int]) -> Quiver:
    """Quiver with vertex v renamed mapping[v]."""
    n = q.n
    b = [[0] * n for _ in range(n)]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            b[mapping[i] - 1][mapping[j] - 1] = q.entry(i, j)
    return Quiver(tuple(tuple(r) for r in b))


# ---- mutation ----

def mutate_quiver(q: Quiver, k: int) -> Quiver:
    if not 1 <= k <= q.n:
        raise IndexError(f"mutation vertex {k} out of range 1..{q.n}")
    B = np.array(q.b, dtype=np.int64)
    c = k - 1
    col, row = B[:, c], B[c, :]
    Bp = B + np.sign(col)[:, None] * np.maximum(np.outer(col, row), 0)
    Bp[c, :] = -row
    Bp[:, c] = -col
    return Quiver(tuple(tuple(int(x) for x in r) for r in Bp))


def coxeter_mutate_quiver(q: Quiver) -> Quiver:
    """mu_n o ... o mu_1; returns q itself for an admissible acyclic quiver."""
    if not q.is_admissible:
        raise NotAdmissible("Coxeter mutation needs an admissible labeling")
    for k in range(1, q.n + 1):
        q = mutate_quiver(q, k)
    return q


def has_rotation(q: Quiver) -> bool:
    """True when mu_1(q) relabeled by v -> v-1 (1 -> n) is q again."""
    n = q.n
    if n < 2:
        return False
    shift = {v: (v - 2) % n + 1 for v in range(1, n + 1)}
    return relabel(mutate_quiver(q, 1), shift) == q


# ---- classification ----

def _arms(g: nx.Graph, center) -> List[int]:
    lengths = []
    for start in g.neighbors(center):
        prev, cur, length = center, start, 1
        while g.degree(cur) == 2:
            prev, cur = cur, next(v for v in g.neighbors(cur) if v != prev)
            length += 1
        lengths.append(length)
    return sorted(lengths)


def _classify_tree(g: nx.Graph) -> QuiverClass:
    v = g.number_of_nodes()
    branch = [u for u in g if g.degree(u) >= 3]
    if not branch:
        return QuiverClass(FINITE, f"A{v}")
    if len(branch) == 1:
        center = branch[0]
        if g.degree(center) == 4:
            return QuiverClass(TAME, "D̃4") if v == 5 else QuiverClass(WILD)
        arms = _arms(g, center)
        if g.degree(center) != 3 or any(g.degree(u) > 2 for u in g if u != center):
            return QuiverClass(WILD)
        p, q, r = arms
        total = Fraction(1, p + 1) + Fraction(1, q + 1) + Fraction(1, r + 1)
        if total > 1:
            if p == q == 1:
                return QuiverClass(FINITE, f"D{v}")
            return QuiverClass(FINITE, f"E{v}")
        if total == 1:
            return QuiverClass(TAME, f"Ẽ{v - 1}")
        return QuiverClass(WILD)
    if len(branch) == 2 and all(g.degree(u) == 3 for u in branch):
        leaves = [sum(1 for w in g.neighbors(u) if g.degree(w) == 1) for u in branch]
        if leaves == [2, 2]:
            return QuiverClass(TAME, f"D̃{v - 1}")
    return QuiverClass(WILD)


def _classify_component(sub: nx.Graph) -> QuiverClass:
    v = sub.number_of_nodes()
    if v == 1:
        return QuiverClass(FINITE, "A1")
    weights = [d["w"] for _, _, d in sub.edges(data=True)]
    if max(weights) >= 3:
        return QuiverClass(WILD)
    if max(weights) == 2:
        return QuiverClass(TAME, "Ã1") if v == 2 else QuiverClass(WILD)
    e = sub.number_of_edges()
    if e == v - 1:
        return _classify_tree(sub)
    if e == v and all(d == 2 for _, d in sub.degree()):
        return QuiverClass(TAME, f"Ã{v - 1}")
    return QuiverClass(WILD)


def classify(q: Quiver) -> QuiverClass:
    g = nx.Graph()
    g.add_nodes_from(range(1, q.n + 1))
    for i, j, m in q.arrows():
        g.add_edge(i, j, w=m)
    parts = [_classify_component(g.subgraph(c).copy())
             for c in sorted(nx.connected_components(g), key=min)]
    kinds = {p.kind for p in parts}
    if WILD in kinds:
        return QuiverClass(WILD)
    kind = TAME if TAME in kinds else FINITE
    # sorted so the name does not depend on vertex labels
    return QuiverClass(kind, "+".join(sorted(p.diagram for p in parts)))


# ---- symmetry ----

def find_symmetry_pair(q: Quiver) -> Optional[SymmetryPair]:
    """First (sink i, source j) in lexicographic order with arrows(k->i) = arrows(j->k)
    for every other vertex k."""
    sources = q.sources()
    for i in q.sinks():
        for j in sources:
            if i == j:
                continue
            mult = {}
            for k in range(1, q.n + 1):
                if k in (i, j):
                    continue
                into_i, from_j = q.arrows_between(k, i), q.arrows_between(j, k)
                if into_i != from_j:
                    break
                if into_i:
                    mult[k] = into_i
            else:
                return SymmetryPair(i, j, mult)
    return None


def automorphisms(q: Quiver) -> List[Tuple[int, ...]]:
    """All sigma with b[sigma(i)][sigma(j)] = b[i][j], as tuples (sigma(1), ..., sigma(n))."""
    if q.n > AUTOMORPHISM_VERTEX_LIMIT:
        raise VertexCountTooLarge(f"automorphism search is limited to {AUTOMORPHISM_VERTEX_LIMIT} vertices")
    g = q.digraph()
    matcher = DiGraphMatcher(g, g, edge_match=numerical_edge_match("m", 1))
    perms = {tuple(iso[v] for v in range(1, q.n + 1)) for iso in matcher.isomorphisms_iter()}
    return sorted(perms)
