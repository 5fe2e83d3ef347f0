"""Triangulations of isotropic matroids and the swaps that relate them.

A triangulation partitions the ground set into 3-sets, each a circuit or a
union of two circuits.  Parallel elements may be exchanged freely (the
transposition is an automorphism); ``ps_equivalent`` explores that orbit and
``equivalent`` looks for any automorphism carrying one triangulation onto
another.
"""

from __future__ import annotations

import itertools
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterator

from .gf2 import XorBasis
from .isotropic import Graph, ias_matroid, vertex_triple
from .matroid import (BinaryMatroid, ElementLabel, GroundMap, ResourceLimitError, chi, phi, psi,
                      invariant_colors, parse_label)

__all__ = [
    "Triangulation",
    "triple_shape",
    "is_triangle_set",
    "check_triangulation",
    "vertex_triangulation",
    "enumerate_triangulations",
    "parallel_swap",
    "ps_equivalent",
    "ps_orbit",
    "equivalent",
    "apply_map",
    "classify_nonvertex_circuit_triple",
    "CircuitTripleForm",
    "PreconditionError",
    "TriangulationSummary",
    "analyze_triangulations",
    "format_triangulation",
    "parse_triangulation",
    "DEFAULT_ENUM_BOUND",
    "DEFAULT_ORBIT_CAP",
]

DEFAULT_ENUM_BOUND = 18
DEFAULT_ORBIT_CAP = 10 ** 6
_TRIPLE_TAG = 100


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class Triangulation:
    triples: frozenset[frozenset[ElementLabel]]

    @classmethod
    def of(cls, triples) -> Triangulation:
        return cls(frozenset(frozenset(t) for t in triples))

    def sorted_triples(self, M: BinaryMatroid) -> list[list[ElementLabel]]:
        idx = M.index
        rows = [sorted(t, key=idx.__getitem__) for t in self.triples]
        return sorted(rows, key=lambda r: [idx[x] for x in r])

    def triple_of(self, x: ElementLabel) -> frozenset[ElementLabel]:
        for t in self.triples:
            if x in t:
                return t
        raise KeyError(x)

    def __len__(self):
        return len(self.triples)

    def __contains__(self, triple):
        return frozenset(triple) in self.triples


def triple_shape(M: BinaryMatroid, triple) -> str | None:
    """'circuit', 'loop+parallel', 'other' for a valid triple; None if invalid."""
    triple = list(triple)
    circuits = [set(s) for r in (1, 2, 3) for s in itertools.combinations(triple, r)
                if M.is_circuit(s)]
    covered = set().union(*circuits) if circuits else set()
    if covered != set(triple):
        return None
    if any(len(c) == 3 for c in circuits):
        return "circuit"
    sizes = sorted(len(c) for c in circuits)
    if sizes == [1, 2]:
        return "loop+parallel"
    return "other"


def is_triangle_set(M: BinaryMatroid, triple) -> bool:
    return len(set(triple)) == 3 and triple_shape(M, triple) is not None


def check_triangulation(M: BinaryMatroid, T: Triangulation) -> None:
    seen = set()
    for t in T.triples:
        if len(t) != 3:
            raise ValueError(f"triple {sorted(t)} does not have 3 elements")
        if seen & t:
            raise ValueError("triples overlap")
        seen |= t
        if not is_triangle_set(M, t):
            raise ValueError(f"triple {sorted(t)} is not a circuit or union of two circuits")
    if seen != set(M.labels):
        raise ValueError("triples do not cover the ground set")


def vertex_triangulation(G: Graph) -> Triangulation:
    M = ias_matroid(G)
    return Triangulation.of(vertex_triple(M, v) for v in G.vertices)


def enumerate_triangulations(M: BinaryMatroid, bound: int = DEFAULT_ENUM_BOUND) -> Iterator[Triangulation]:
    """Every triangulation of ``M`` exactly once.

    Backtracks on the lowest uncovered element, trying each valid triple
    through it in ordinal order.
    """
    n = len(M)
    if n > bound:
        raise ResourceLimitError(f"ground set of size {n} exceeds enumeration bound {bound}")
    if n % 3:
        return
    labels = M.labels
    through: list[list[int]] = [[] for _ in range(n)]
    for a, b, c in itertools.combinations(range(n), 3):
        if triple_shape(M, (labels[a], labels[b], labels[c])) is not None:
            through[a].append((1 << a) | (1 << b) | (1 << c))
    full = (1 << n) - 1
    chosen: list[int] = []

    def rec(covered):
        if covered == full:
            yield Triangulation(frozenset(
                frozenset(labels[j] for j in range(n) if (m >> j) & 1) for m in chosen))
            return
        low = (~covered & (covered + 1)).bit_length() - 1
        for m in through[low]:
            if not m & covered:
                chosen.append(m)
                yield from rec(covered | m)
                chosen.pop()

    yield from rec(0)


def _are_parallel(M: BinaryMatroid, x: ElementLabel, y: ElementLabel) -> bool:
    return x != y and M.vectors[x] != 0 and M.vectors[x] == M.vectors[y]


def apply_map(f: GroundMap, T: Triangulation) -> Triangulation:
    return Triangulation(frozenset(frozenset(f[x] for x in t) for t in T.triples))


def parallel_swap(M: BinaryMatroid, T: Triangulation, x: ElementLabel, y: ElementLabel) -> Triangulation:
    if not _are_parallel(M, x, y):
        raise ValueError(f"{x} and {y} are not parallel")
    sw = {x: y, y: x}
    return Triangulation(frozenset(frozenset(sw.get(e, e) for e in t) for t in T.triples))


def _parallel_pairs(M: BinaryMatroid) -> list[tuple[ElementLabel, ElementLabel]]:
    groups: dict[int, list[ElementLabel]] = {}
    for x in M.labels:
        if M.vectors[x]:
            groups.setdefault(M.vectors[x], []).append(x)
    return [p for g in groups.values() for p in itertools.combinations(g, 2)]


def ps_orbit(M: BinaryMatroid, T: Triangulation, cap: int = DEFAULT_ORBIT_CAP
             ) -> dict[Triangulation, tuple[Triangulation | None, tuple | None]]:
    """Breadth-first orbit of ``T`` under parallel swaps, with parent pointers."""
    pairs = _parallel_pairs(M)
    parent = {T: (None, None)}
    queue = deque([T])
    while queue:
        cur = queue.popleft()
        for x, y in pairs:
            if cur.triple_of(x) == cur.triple_of(y):
                continue
            nxt = parallel_swap(M, cur, x, y)
            if nxt not in parent:
                parent[nxt] = (cur, (x, y))
                if len(parent) > cap:
                    raise ResourceLimitError(f"swap orbit exceeds {cap} triangulations")
                queue.append(nxt)
    return parent


def _path_to(parent, T):
    swaps = []
    while parent[T][0] is not None:
        T, sw = parent[T]
        swaps.append(sw)
    swaps.reverse()
    return swaps


def ps_equivalent(M: BinaryMatroid, T1: Triangulation, T2: Triangulation,
                  cap: int = DEFAULT_ORBIT_CAP) -> tuple[bool, list | None]:
    """Whether swaps carry ``T1`` to ``T2``; on success also the swap sequence."""
    if T1 == T2:
        return True, []
    parent = ps_orbit(M, T1, cap)
    if T2 not in parent:
        return False, None
    return True, _path_to(parent, T2)


def equivalent(M: BinaryMatroid, T1: Triangulation, T2: Triangulation,
               node_cap: int | None = None) -> tuple[bool, GroundMap | None]:
    """Search for an automorphism ``a`` of ``M`` with ``a(T1) = T2``.

    Triples are matched to triples first; within a triple every ordering of
    the image is tried, keeping the induced linear map consistent.  At each
    level the source triple with the fewest viable images is expanded.
    """
    if len(T1) != len(T2):
        return False, None
    c1, c2 = invariant_colors(M, M, extra=[[(_TRIPLE_TAG, t) for t in T1.triples],
                                           [(_TRIPLE_TAG, t) for t in T2.triples]])
    if Counter(c1) != Counter(c2):
        return False, None
    idx = M.index
    cols = M.matrix.columns
    src = [[idx[x] for x in t] for t in T1.sorted_triples(M)]
    tgt = [[idx[x] for x in t] for t in T2.sorted_triples(M)]
    k = len(src)
    nodes = 0

    def extend(sb, tb, pairs):
        sb, tb = sb.copy(), tb.copy()
        for e, t in pairs:
            if c1[e] != c2[t]:
                return None
            residual, image = sb.reduce(cols[e])
            if residual == 0:
                if image != cols[t]:
                    return None
                continue
            if tb.contains(cols[t]):
                return None
            sb.add(residual, image ^ cols[t])
            tb.add(cols[t])
        return sb, tb

    def options(i, sb, tb, used):
        out = []
        for j in range(k):
            if used[j]:
                continue
            for perm in itertools.permutations(tgt[j]):
                state = extend(sb, tb, zip(src[i], perm))
                if state is not None:
                    out.append((j, perm, state))
        return out

    assign: dict[int, int] = {}

    def rec(sb, tb, done, used):
        nonlocal nodes
        if all(done):
            return True
        nodes += 1
        if node_cap is not None and nodes > node_cap:
            raise ResourceLimitError(f"triangulation equivalence search exceeded {node_cap} nodes")
        best = None
        for i in range(k):
            if done[i]:
                continue
            opts = options(i, sb, tb, used)
            if not opts:
                return False
            if best is None or len(opts) < len(best[1]):
                best = (i, opts)
        i, opts = best
        done[i] = True
        for j, perm, (nsb, ntb) in opts:
            used[j] = True
            for e, t in zip(src[i], perm):
                assign[e] = t
            if rec(nsb, ntb, done, used):
                return True
            used[j] = False
        done[i] = False
        return False

    if not rec(XorBasis(), XorBasis(), [False] * k, [False] * k):
        return False, None
    labels = M.labels
    return True, {labels[e]: labels[t] for e, t in assign.items()}


# structure of non-vertex 3-circuits in trees

@dataclass
class CircuitTripleForm:
    """A 3-circuit brought by parallel swaps to one of the two degree-2 shapes."""

    z: int
    x: int
    y: int
    form: str                     # "phi-phi-chi" or "psi-phi-psi"
    swaps: list[tuple[ElementLabel, ElementLabel]]
    result: frozenset[ElementLabel]


def _swap_reachable(M: BinaryMatroid, tau) -> list[tuple[frozenset, list]]:
    """All 3-sets reachable from ``tau`` by swapping members with parallels."""
    tau = list(tau)
    alts = []
    for x in tau:
        v = M.vectors[x]
        alts.append([y for y in M.labels if y == x or (v and M.vectors[y] == v)])
    out = []
    for choice in itertools.product(*alts):
        if len(set(choice)) == 3:
            swaps = [(a, b) for a, b in zip(tau, choice) if a != b]
            out.append((frozenset(choice), swaps))
    return out


def classify_nonvertex_circuit_triple(T: Graph, tau) -> CircuitTripleForm:
    """Locate the degree-2 vertex explaining a 3-circuit that is not a swapped vertex triple."""
    if not T.is_tree():
        raise PreconditionError("input graph is not a tree")
    if T.n < 4:
        raise PreconditionError("tree needs at least four vertices")
    M = ias_matroid(T)
    tau = frozenset(tau)
    if len(tau) != 3 or not M.is_circuit(tau):
        raise PreconditionError("tau is not a 3-element circuit")
    reach = _swap_reachable(M, tau)
    triples = {vertex_triple(M, v) for v in T.vertices}
    for s, _ in reach:
        if s in triples:
            raise PreconditionError(f"parallel swaps turn tau into the vertex triple {sorted(s)}")
    for z in T.vertices:
        if T.degree(z) != 2:
            continue
        a, b = T.neighbors(z)
        for x, y in ((a, b), (b, a)):
            forms = [("phi-phi-chi", frozenset((phi(x), phi(y), chi(z))))]
            if T.degree(x) == 1:
                forms.append(("psi-phi-psi", frozenset((psi(x), phi(y), psi(z)))))
            for name, target in forms:
                for s, swaps in reach:
                    if s == target:
                        return CircuitTripleForm(z, x, y, name, swaps, s)
    raise AssertionError(f"no degree-2 explanation for {sorted(tau)}")


# summaries

@dataclass
class TriangulationSummary:
    count: int
    ps_classes: list[list[Triangulation]]
    vertex_class: int | None            # index of the ps-class holding the vertex triangulation
    equivalence_classes: list[list[int]]  # groups of ps-class indices related by automorphisms
    witnesses: dict[int, GroundMap] = field(default_factory=dict)  # ps-class -> map onto vertex tri
    unexpected_shapes: list[tuple[Triangulation, frozenset, str]] = field(default_factory=list)

    @property
    def all_ps_equivalent(self) -> bool:
        return len(self.ps_classes) == 1

    @property
    def all_equivalent(self) -> bool:
        return len(self.equivalence_classes) == 1


def analyze_triangulations(G: Graph, bound: int = DEFAULT_ENUM_BOUND,
                           orbit_cap: int = DEFAULT_ORBIT_CAP) -> TriangulationSummary:
    M = ias_matroid(G)
    vt = vertex_triangulation(G)
    tris = list(enumerate_triangulations(M, bound))
    unexpected = []
    for T in tris:
        for t in T.triples:
            shape = triple_shape(M, t)
            if shape not in ("circuit", "loop+parallel"):
                unexpected.append((T, t, shape))
    remaining = set(tris)
    classes = []
    for T in tris:
        if T not in remaining:
            continue
        orbit = ps_orbit(M, T, orbit_cap)
        members = [S for S in tris if S in orbit]
        remaining.difference_update(members)
        classes.append(members)
    vclass = next((i for i, c in enumerate(classes) if vt in c), None)
    eq_groups: list[list[int]] = []
    witnesses = {}
    for i, c in enumerate(classes):
        rep = c[0]
        for group in eq_groups:
            ok, f = equivalent(M, rep, classes[group[0]][0])
            if ok:
                group.append(i)
                break
        else:
            eq_groups.append([i])
        ok, f = equivalent(M, rep, vt)
        if ok:
            witnesses[i] = f
    return TriangulationSummary(len(tris), classes, vclass, eq_groups, witnesses, unexpected)


def format_triangulation(M: BinaryMatroid, T: Triangulation) -> str:
    return "".join(", ".join(str(x) for x in row) + "\n" for row in T.sorted_triples(M))


def parse_triangulation(text: str) -> Triangulation:
    triples = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p for p in line.split(",")]
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected three comma-separated labels")
        triples.append([parse_label(p) for p in parts])
    return Triangulation.of(triples)
