"""Trees and forests up to isomorphism, and the exhaustive classification sweep.

Canonical forms are AHU codes: a tree is rooted at its centroid (the smaller
code wins when there are two) and a forest is the sorted tuple of its tree
codes.  The sweep in ``verify_theorem_main`` compares forest isomorphism
with isomorphism of both matroids and runs both reconstructions.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import asdict, dataclass, field

from .isotropic import Graph, NotAForestError, ia_matroid, ias_matroid
from .matroid import ResourceLimitError, find_isomorphism, verify_map

__all__ = [
    "canonical_form",
    "forests_isomorphic",
    "brute_force_isomorphic",
    "graph_from_code",
    "enumerate_trees",
    "enumerate_forests",
    "random_forest",
    "random_relabel",
    "PairRecord",
    "SweepReport",
    "check_pair",
    "verify_theorem_main",
    "MAX_N",
]

MAX_N = 8


def _rooted_code(G: Graph, root: int, parent: int | None = None) -> str:
    kids = sorted(_rooted_code(G, c, root) for c in G.neighbors(root) if c != parent)
    return "(" + "".join(kids) + ")"


def _centroids(G: Graph, comp: list[int]) -> list[int]:
    n = len(comp)
    root = comp[0]
    order = []
    parent = {root: None}
    stack = [root]
    while stack:
        u = stack.pop()
        order.append(u)
        for w in G.neighbors(u):
            if w != parent[u]:
                parent[w] = u
                stack.append(w)
    size = {}
    for u in reversed(order):
        size[u] = 1 + sum(size[w] for w in G.neighbors(u) if w != parent[u])
    best = []
    best_val = None
    for u in comp:
        heaviest = n - size[u]
        for w in G.neighbors(u):
            if w != parent[u]:
                heaviest = max(heaviest, size[w])
        if best_val is None or heaviest < best_val:
            best, best_val = [u], heaviest
        elif heaviest == best_val:
            best.append(u)
    return best


def canonical_form(F: Graph) -> tuple[str, ...]:
    if not F.is_forest():
        raise NotAForestError("canonical forms are defined for forests only")
    codes = []
    for comp in F.connected_components():
        codes.append(min(_rooted_code(F, c) for c in _centroids(F, comp)))
    return tuple(sorted(codes))


def forests_isomorphic(F: Graph, H: Graph) -> bool:
    return canonical_form(F) == canonical_form(H)


def brute_force_isomorphic(G: Graph, H: Graph) -> bool:
    """Isomorphism by trying every vertex bijection (any simple graphs)."""
    if G.n != H.n or len(G.edges()) != len(H.edges()):
        return False
    hs = set(map(frozenset, H.edges()))
    for perm in itertools.permutations(H.vertices):
        m = dict(zip(G.vertices, perm))
        if all(frozenset((m[a], m[b])) in hs for a, b in G.edges()):
            return True
    return False


def graph_from_code(code: str, offset: int = 0) -> Graph:
    """Rebuild a rooted tree from its AHU code; vertices numbered in preorder."""
    edges = []
    stack = []
    count = 0
    for ch in code:
        if ch == "(":
            v = offset + count
            count += 1
            if stack:
                edges.append((stack[-1], v))
            stack.append(v)
        else:
            stack.pop()
    return Graph.from_edges(range(offset, offset + count), edges)


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n must lie in 1..{MAX_N}")


def _trees(n: int) -> list[str]:
    if n == 1:
        return ["()"]
    codes = set()
    for code in _trees(n - 1):
        T = graph_from_code(code)
        for v in T.vertices:
            grown = Graph.from_edges(n, T.edges() + [(v, n - 1)])
            codes.add(canonical_form(grown)[0])
    return sorted(codes)


def enumerate_trees(n: int) -> list[Graph]:
    """One tree per isomorphism class on ``n`` vertices, sorted by canonical code."""
    _check_n(n)
    return [graph_from_code(c) for c in _trees(n)]


def _forest_codes(n: int, max_part: tuple[int, str] | None = None) -> list[tuple[str, ...]]:
    if n == 0:
        return [()]
    out = []
    for size in range(1, n + 1):
        for code in _trees(size):
            key = (size, code)
            if max_part is not None and key > max_part:
                continue
            for rest in _forest_codes(n - size, key):
                out.append((code,) + rest)
    return out


def enumerate_forests(n: int) -> list[Graph]:
    """One forest per isomorphism class on ``n`` vertices, sorted by canonical form."""
    _check_n(n)
    forests = []
    for parts in _forest_codes(n):
        edges = []
        offset = 0
        for code in parts:
            T = graph_from_code(code, offset)
            edges.extend(T.edges())
            offset += T.n
        forests.append(Graph.from_edges(n, edges))
    return sorted(forests, key=canonical_form)


def random_forest(n: int, rng: random.Random, edge_prob: float = 0.8) -> Graph:
    """Random labelled forest: each vertex joins an earlier one with probability ``edge_prob``."""
    edges = []
    for v in range(1, n):
        if rng.random() < edge_prob:
            edges.append((rng.randrange(v), v))
    perm = list(range(n))
    rng.shuffle(perm)
    return Graph.from_edges(n, [(perm[a], perm[b]) for a, b in edges])


def random_relabel(G: Graph, rng: random.Random) -> tuple[Graph, dict[int, int]]:
    new = list(range(G.n))
    rng.shuffle(new)
    mapping = dict(zip(G.vertices, new))
    return G.relabel(mapping), mapping


# sweep

@dataclass
class PairRecord:
    n: int
    id_a: str
    id_b: str
    forest_iso: bool
    ia_iso: bool
    ias_iso: bool
    reconstructed: bool | None = None
    certified: bool | None = None
    millis: float = 0.0
    error: str | None = None
    capped: bool = False
    phi_agreement: bool | None = None

    @property
    def passed(self) -> bool:
        if self.error:
            return False
        if not (self.forest_iso == self.ia_iso == self.ias_iso):
            return False
        if self.forest_iso:
            return bool(self.reconstructed and self.certified and self.phi_agreement)
        return True

    def line(self) -> str:
        def b(v):
            return "-" if v is None else ("yes" if v else "no")
        return (f"{self.n}, {self.id_a}, {self.id_b}, {b(self.forest_iso)}, {b(self.ia_iso)}, "
                f"{b(self.ias_iso)}, {b(self.reconstructed)}, {b(self.certified)}, "
                f"{self.millis:.1f}")


@dataclass
class SweepReport:
    records: list[PairRecord] = field(default_factory=list)

    @property
    def failures(self) -> list[PairRecord]:
        return [r for r in self.records if not r.passed]

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def capped(self) -> bool:
        return any(r.capped for r in self.records)

    def to_text(self) -> str:
        head = "n, idA, idB, forest_iso, ia_iso, ias_iso, reconstructed, certified, millis\n"
        return head + "".join(r.line() + "\n" for r in self.records)

    def to_json(self) -> list[dict]:
        return [dict(asdict(r), passed=r.passed) for r in self.records]


def check_pair(A: Graph, B: Graph, id_a: str = "A", id_b: str = "B",
               reconstruct: bool = True, allow_non_forest: bool = False,
               node_cap: int | None = None) -> PairRecord:
    """Compare graph isomorphism with IA/IAS matroid isomorphism for one pair.

    A search that hits ``node_cap`` leaves the record flagged ``capped``.
    """
    from .reconstruct import (CertificationError, phi_agrees, reconstruct_forest_iso_ia_adjusted,
                              reconstruct_forest_iso_ias)

    start = time.perf_counter()
    forests = A.is_forest() and B.is_forest()
    if not forests and not allow_non_forest:
        raise NotAForestError("pair contains a non-forest")
    if forests:
        giso = forests_isomorphic(A, B)
    else:
        giso = brute_force_isomorphic(A, B)
    rec = PairRecord(A.n, id_a, id_b, giso, False, False)
    MA, MB = ia_matroid(A), ia_matroid(B)
    SA, SB = ias_matroid(A), ias_matroid(B)
    try:
        f_ia = find_isomorphism(MA, MB, node_cap=node_cap)
        f_ias = find_isomorphism(SA, SB, node_cap=node_cap)
    except ResourceLimitError as exc:
        rec.capped = True
        rec.error = str(exc)
        rec.millis = (time.perf_counter() - start) * 1000
        return rec
    if f_ia is not None and not verify_map(MA, MB, f_ia):
        rec.error = "IA search returned a non-isomorphism"
    if f_ias is not None and not verify_map(SA, SB, f_ias):
        rec.error = "IAS search returned a non-isomorphism"
    rec.ia_iso = f_ia is not None
    rec.ias_iso = f_ias is not None
    if forests and reconstruct and f_ia is not None and f_ias is not None and rec.error is None:
        try:
            f1, g1 = reconstruct_forest_iso_ia_adjusted(A, B, f_ia)
            f2, g2 = reconstruct_forest_iso_ias(A, B, f_ias, node_cap=node_cap)
            rec.reconstructed = True
            rec.phi_agreement = phi_agrees(g1, f1) and phi_agrees(g2, f2)
            rec.certified = (forests_isomorphic(A, B) and _is_graph_iso(A, B, g1)
                             and _is_graph_iso(A, B, g2))
        except CertificationError as exc:
            rec.reconstructed = True
            rec.certified = False
            rec.error = str(exc)
        except ResourceLimitError as exc:
            rec.capped = True
            rec.error = str(exc)
    rec.millis = (time.perf_counter() - start) * 1000
    return rec


def _is_graph_iso(A: Graph, B: Graph, g: dict[int, int]) -> bool:
    if sorted(g) != sorted(A.vertices) or sorted(g.values()) != sorted(B.vertices):
        return False
    return all(A.adjacent(u, v) == B.adjacent(g[u], g[v])
               for u, v in itertools.combinations(A.vertices, 2))


def verify_theorem_main(n_max: int, tree_n_max: int | None = None, seed: int = 0,
                        reconstruct: bool = True, progress=None,
                        node_cap: int | None = None) -> SweepReport:
    """Sweep all forest pairs on at most ``n_max`` vertices and tree pairs up to ``tree_n_max``.

    Every unordered pair of distinct class representatives is checked, plus
    each representative against a random relabelling of itself (the
    isomorphic pairs, which also exercise both reconstructions).
    """
    if tree_n_max is None:
        tree_n_max = n_max
    if not 1 <= n_max <= 7 or not 1 <= tree_n_max <= 7:
        raise ValueError("n_max must lie in 1..7")
    rng = random.Random(seed)
    groups: list[tuple[str, list[Graph]]] = []
    for n in range(1, n_max + 1):
        groups.append((f"F{n}", enumerate_forests(n)))
    for n in range(n_max + 1, tree_n_max + 1):
        groups.append((f"T{n}", enumerate_trees(n)))
    report = SweepReport()
    for prefix, graphs in groups:
        ids = [f"{prefix}.{i}" for i in range(len(graphs))]
        for i, A in enumerate(graphs):
            B, _ = random_relabel(A, rng)
            report.records.append(check_pair(A, B, ids[i], ids[i] + "'", reconstruct,
                                             node_cap=node_cap))
            if progress:
                progress(report.records[-1])
        for i, j in itertools.combinations(range(len(graphs)), 2):
            report.records.append(check_pair(graphs[i], graphs[j], ids[i], ids[j], reconstruct,
                                             node_cap=node_cap))
            if progress:
                progress(report.records[-1])
    return report
