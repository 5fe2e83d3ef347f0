"""Graphs and their (restricted) isotropic matroids.

``ia_matroid(G)`` is the matroid of ``[I | A(G)]`` and ``ias_matroid(G)`` the
matroid of ``[I | A(G) | I + A(G)]``.  Columns come in blocks (phi, chi, psi),
each block in vertex order, so the matrices match the usual displays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .gf2 import BitMatrix
from .matroid import (BinaryMatroid, ElementLabel, GroundMap, Kind, chi, components, dual,
                      parallel_classes, phi, psi, restrict, verify_map)

__all__ = [
    "Graph",
    "NotAForestError",
    "ClassificationError",
    "parse_graph",
    "format_graph",
    "path",
    "cycle",
    "star",
    "ia_matroid",
    "ias_matroid",
    "vertex_triple",
    "neighborhood_circuit",
    "classify_parallels",
    "ParallelPair",
    "ComponentPair",
    "ia_component_structure",
    "flip",
]


class NotAForestError(ValueError):
    pass


class ClassificationError(AssertionError):
    """A parallel pair fits none of the known forest cases."""

    def __init__(self, pair, message):
        super().__init__(message)
        self.pair = pair


class Graph:
    """Simple undirected graph on an explicit tuple of integer vertex ids.

    The adjacency matrix is indexed by position in ``vertices``.  Vertex ids
    survive vertex deletion, so labels of derived matroids stay comparable.
    """

    __slots__ = ("vertices", "adjacency", "__dict__")

    def __init__(self, vertices: Sequence[int], adjacency: BitMatrix):
        vertices = tuple(vertices)
        n = len(vertices)
        if len(set(vertices)) != n:
            raise ValueError("duplicate vertex ids")
        if adjacency.row_count != n or adjacency.col_count != n:
            raise ValueError("adjacency matrix must be n x n")
        for i in range(n):
            if adjacency.entry(i, i):
                raise ValueError("adjacency diagonal must be zero")
        if adjacency.rows != adjacency.columns:
            raise ValueError("adjacency matrix must be symmetric")
        self.vertices = vertices
        self.adjacency = adjacency

    @classmethod
    def from_edges(cls, vertices: int | Sequence[int], edges: Iterable[tuple[int, int]]) -> Graph:
        if isinstance(vertices, int):
            vertices = range(vertices)
        vertices = tuple(vertices)
        pos = {v: i for i, v in enumerate(vertices)}
        rows = [0] * len(vertices)
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            i, j = pos[u], pos[v]
            if (rows[i] >> j) & 1:
                raise ValueError(f"duplicate edge {u} {v}")
            rows[i] |= 1 << j
            rows[j] |= 1 << i
        return cls(vertices, BitMatrix(len(vertices), len(vertices), tuple(rows)))

    @property
    def n(self) -> int:
        return len(self.vertices)

    @cached_property
    def position(self) -> dict[int, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def _nbrs(self) -> dict[int, tuple[int, ...]]:
        out = {}
        for i, v in enumerate(self.vertices):
            row = self.adjacency.rows[i]
            out[v] = tuple(self.vertices[j] for j in range(self.n) if (row >> j) & 1)
        return out

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._nbrs[v]

    def degree(self, v: int) -> int:
        return len(self._nbrs[v])

    def adjacent(self, u: int, v: int) -> bool:
        return bool((self.adjacency.rows[self.position[u]] >> self.position[v]) & 1)

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for i, u in enumerate(self.vertices):
            for v in self._nbrs[u]:
                if self.position[v] > i:
                    out.append((u, v))
        return out

    def leaves(self) -> list[int]:
        return [v for v in self.vertices if self.degree(v) == 1]

    def isolated(self) -> list[int]:
        return [v for v in self.vertices if self.degree(v) == 0]

    def connected_components(self) -> list[list[int]]:
        seen = set()
        out = []
        for s in self.vertices:
            if s in seen:
                continue
            comp = [s]
            seen.add(s)
            stack = [s]
            while stack:
                u = stack.pop()
                for w in self._nbrs[u]:
                    if w not in seen:
                        seen.add(w)
                        comp.append(w)
                        stack.append(w)
            out.append(sorted(comp, key=self.position.__getitem__))
        return out

    def distances_from(self, s: int) -> dict[int, int]:
        dist = {s: 0}
        frontier = [s]
        while frontier:
            nxt = []
            for u in frontier:
                for w in self._nbrs[u]:
                    if w not in dist:
                        dist[w] = dist[u] + 1
                        nxt.append(w)
            frontier = nxt
        return dist

    def is_forest(self) -> bool:
        return len(self.edges()) == self.n - len(self.connected_components())

    def is_tree(self) -> bool:
        return self.n > 0 and self.is_forest() and len(self.connected_components()) == 1

    def require_forest(self) -> None:
        if not self.is_forest():
            raise NotAForestError("graph is not a forest")

    def remove_vertex(self, v: int) -> Graph:
        keep = [u for u in self.vertices if u != v]
        return Graph.from_edges(keep, [(a, b) for a, b in self.edges() if v not in (a, b)])

    def induced(self, vertices: Iterable[int]) -> Graph:
        keep = set(vertices)
        vs = [u for u in self.vertices if u in keep]
        return Graph.from_edges(vs, [(a, b) for a, b in self.edges() if a in keep and b in keep])

    def relabel(self, mapping: dict[int, int]) -> Graph:
        """Image graph under a vertex bijection; vertices sorted by new id."""
        vs = sorted(mapping[v] for v in self.vertices)
        return Graph.from_edges(vs, [(mapping[a], mapping[b]) for a, b in self.edges()])

    def __eq__(self, other):
        return (isinstance(other, Graph) and self.vertices == other.vertices
                and self.adjacency == other.adjacency)

    def __hash__(self):
        return hash((self.vertices, self.adjacency.rows))

    def __repr__(self):
        return f"Graph(vertices={list(self.vertices)}, edges={self.edges()})"


def path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star(leaves: int) -> Graph:
    """``K_{1,leaves}`` with centre 0."""
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def parse_graph(text: str) -> Graph:
    """Read ``n m`` then ``m`` lines ``u v`` (0-based); ``#`` starts a comment."""
    header = None
    edges = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected two integers")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"line {lineno}: expected two integers") from None
        if header is None:
            if a < 0 or b < 0:
                raise ValueError(f"line {lineno}: negative count")
            header = (a, b)
            continue
        n = header[0]
        if not (0 <= a < n and 0 <= b < n):
            raise ValueError(f"line {lineno}: vertex out of range 0..{n - 1}")
        if a == b:
            raise ValueError(f"line {lineno}: self-loop at {a}")
        key = frozenset((a, b))
        if key in seen:
            raise ValueError(f"line {lineno}: duplicate edge {a} {b}")
        seen.add(key)
        edges.append((a, b))
    if header is None:
        raise ValueError("missing 'n m' header line")
    if len(edges) != header[1]:
        raise ValueError(f"header declares {header[1]} edges, found {len(edges)}")
    return Graph.from_edges(header[0], edges)


def format_graph(G: Graph) -> str:
    pos = G.position
    edges = G.edges()
    lines = [f"{G.n} {len(edges)}"] + [f"{pos[a]} {pos[b]}" for a, b in edges]
    return "\n".join(lines) + "\n"


# matroids

def ia_matroid(G: Graph) -> BinaryMatroid:
    n = G.n
    B = BitMatrix.identity(n).hstack(G.adjacency)
    return BinaryMatroid(B, [phi(v) for v in G.vertices] + [chi(v) for v in G.vertices])


def ias_matroid(G: Graph) -> BinaryMatroid:
    n = G.n
    I = BitMatrix.identity(n)
    B = I.hstack(G.adjacency, I + G.adjacency)
    labels = ([phi(v) for v in G.vertices] + [chi(v) for v in G.vertices]
              + [psi(v) for v in G.vertices])
    return BinaryMatroid(B, labels)


def vertex_triple(M: BinaryMatroid, v: int) -> frozenset[ElementLabel]:
    triple = frozenset((phi(v), chi(v), psi(v)))
    if not triple <= set(M.labels):
        raise KeyError(f"matroid has no vertex triple for {v}")
    return triple


def neighborhood_circuit(G: Graph, v: int) -> frozenset[ElementLabel]:
    return frozenset([chi(v)] + [phi(w) for w in G.neighbors(v)])


def flip(x: ElementLabel) -> ElementLabel:
    """Exchange phi and chi at the same vertex."""
    if x.kind is Kind.PHI:
        return chi(x.index)
    if x.kind is Kind.CHI:
        return phi(x.index)
    raise ValueError(f"{x} is not a phi or chi element")


# structure of forest matroids

@dataclass(frozen=True)
class ParallelPair:
    x: ElementLabel
    y: ElementLabel
    case: int  # 3: phi/psi of an isolated vertex, 4: chi(leaf)/phi(neighbour),
    #            5: chi of two leaves with a common neighbour, 6: psi/psi of a K2 component


def _classify_pair(F: Graph, x: ElementLabel, y: ElementLabel) -> int | None:
    kx, ky = x.kind, y.kind
    a, b = x.index, y.index
    kinds = {kx, ky}
    if kinds == {Kind.PHI, Kind.PSI} and a == b and F.degree(a) == 0:
        return 3
    if kinds == {Kind.CHI, Kind.PHI}:
        v, w = (a, b) if kx is Kind.CHI else (b, a)
        if F.neighbors(v) == (w,):
            return 4
    if kx is ky is Kind.CHI and a != b:
        na, nb = F.neighbors(a), F.neighbors(b)
        if len(na) == 1 and na == nb:
            return 5
    if kx is ky is Kind.PSI and a != b:
        if F.neighbors(a) == (b,) and F.neighbors(b) == (a,):
            return 6
    return None


def classify_parallels(F: Graph) -> list[ParallelPair]:
    """Tag every parallel pair of ``M[IAS(F)]`` with the forest case it falls under."""
    F.require_forest()
    M = ias_matroid(F)
    out = []
    for cls in parallel_classes(M):
        for i in range(len(cls)):
            for j in range(i + 1, len(cls)):
                x, y = cls[i], cls[j]
                case = _classify_pair(F, x, y)
                if case is None:
                    raise ClassificationError((x, y), f"unclassified parallel pair {x}, {y}")
                out.append(ParallelPair(x, y, case))
    return out


@dataclass
class ComponentPair:
    vertices: list[int]
    first: list[ElementLabel]    # contains phi of the lowest vertex
    second: list[ElementLabel]
    witness: GroundMap           # first -> second, same vertex
    dual_verified: bool = field(default=False)


def ia_component_structure(F: Graph, verify: bool = True) -> list[ComponentPair]:
    """The two ``M[IA(F)]`` components of each connected component of ``F``.

    The first component holds ``phi`` at even distance from the lowest vertex
    and ``chi`` at odd distance; the second holds the rest.  The witness map
    sends each element to the element of the same vertex in the other
    component, and with ``verify`` the two are checked to be dual under it.
    """
    F.require_forest()
    M = ia_matroid(F)
    out = []
    for comp in F.connected_components():
        root = comp[0]
        dist = F.distances_from(root)
        first = [phi(v) if dist[v] % 2 == 0 else chi(v) for v in comp]
        second = [flip(x) for x in first]
        order = M.index
        first.sort(key=order.__getitem__)
        second.sort(key=order.__getitem__)
        witness = {x: flip(x) for x in first}
        pair = ComponentPair(comp, first, second, witness)
        if verify:
            A = restrict(M, first)
            B = restrict(M, second)
            pair.dual_verified = verify_map(dual(A), B, witness)
        out.append(pair)
    return out


def ia_component_sets(F: Graph) -> set[frozenset[ElementLabel]]:
    return {frozenset(c) for c in components(ia_matroid(F))}
