"""Recovering forest isomorphisms from isomorphisms of their matroids.

Two inductions are implemented.  For ``M[IA]`` a leaf ``v`` with neighbour
``w`` is peeled off after the component map has been adjusted (by the
transpositions of ``seraut_transpositions``) to send ``chi(v)`` and
``phi(w)`` to the matching elements of a leaf of the other tree.  For
``M[IAS]`` the map is first made to send vertex triples to vertex triples,
its leaf index is driven to zero with ``beta`` automorphisms, a ``gamma``
automorphism fixes the peeled leaf, and the induction continues on the
minor obtained by deleting ``chi(v), psi(v)`` and contracting ``phi(v)``.

All ground maps are dicts from source labels to target labels; vertex maps
are dicts from source vertex ids to target vertex ids.
"""

from __future__ import annotations

import logging
from typing import Mapping

from .isotropic import Graph, NotAForestError, flip, ia_matroid, ias_matroid, vertex_triple
from .matroid import (BinaryMatroid, ElementLabel, GroundMap, Kind, chi, components, compose,
                      inverse, phi, psi, restrict, verify_map)
from .triangulate import apply_map, equivalent, vertex_triangulation

__all__ = [
    "CertificationError",
    "seraut_transpositions",
    "beta_automorphism",
    "gamma_automorphism",
    "leaf_index",
    "normalize_leaf_index",
    "is_triple_preserving",
    "reconstruct_tree_iso_ia",
    "reconstruct_forest_iso_ia",
    "reconstruct_forest_iso_ia_adjusted",
    "reconstruct_forest_iso_ias",
    "induced_ground_map",
    "certify_vertex_map",
    "format_vertex_map",
    "phi_agrees",
    "parse_vertex_map",
]

log = logging.getLogger(__name__)


class CertificationError(ValueError):
    """Input map is not an isomorphism, or a produced vertex map fails its checks."""


def _leaf_neighbor(F: Graph, v: int, w: int) -> None:
    if v not in F.position or w not in F.position:
        raise ValueError(f"unknown vertex {v if v not in F.position else w}")
    if F.neighbors(v) != (w,):
        raise ValueError(f"vertex {v} is not a leaf with unique neighbour {w}")


def _cycles(M: BinaryMatroid, *pairs) -> GroundMap:
    f = {x: x for x in M.labels}
    for x, y in pairs:
        f[x], f[y] = y, x
    return f


def seraut_transpositions(F: Graph, v: int, w: int) -> tuple[GroundMap, GroundMap]:
    """The automorphisms ``(phi(v) chi(w))`` and ``(chi(v) phi(w))`` of ``M[IA(F)]``."""
    F.require_forest()
    _leaf_neighbor(F, v, w)
    M = ia_matroid(F)
    return _cycles(M, (phi(v), chi(w))), _cycles(M, (chi(v), phi(w)))


def beta_automorphism(F: Graph, v: int, w: int) -> GroundMap:
    """``(phi(v) psi(w))(chi(v) phi(w))(psi(v) chi(w))`` on ``M[IAS(F)]``."""
    F.require_forest()
    _leaf_neighbor(F, v, w)
    return _cycles(ias_matroid(F), (phi(v), psi(w)), (chi(v), phi(w)), (psi(v), chi(w)))


def gamma_automorphism(F: Graph, v: int, w: int) -> GroundMap:
    """``(phi(v) psi(v))(chi(w) psi(w))`` on ``M[IAS(F)]``."""
    F.require_forest()
    _leaf_neighbor(F, v, w)
    return _cycles(ias_matroid(F), (phi(v), psi(v)), (chi(w), psi(w)))


# vertex maps

def induced_ground_map(g: Mapping[int, int], kinds=(Kind.PHI, Kind.CHI, Kind.PSI)) -> GroundMap:
    """The ground map ``kind(v) -> kind(g(v))`` of a vertex bijection."""
    return {ElementLabel(k, v): ElementLabel(k, g[v]) for v in g for k in kinds}


def certify_vertex_map(F: Graph, F2: Graph, g: Mapping[int, int]) -> None:
    if set(g) != set(F.vertices) or set(g.values()) != set(F2.vertices) or len(g) != F.n:
        raise CertificationError("vertex map is not a bijection")
    vs = F.vertices
    for i, u in enumerate(vs):
        for v in vs[i + 1:]:
            if F.adjacent(u, v) != F2.adjacent(g[u], g[v]):
                raise CertificationError(f"vertex map breaks adjacency of {u}, {v}")


def phi_agrees(g: Mapping[int, int], f: Mapping[ElementLabel, ElementLabel]) -> bool:
    """True when ``g(x) = x'`` for every ``f(phi(x)) = phi(x')``."""
    return all(g.get(x.index) == y.index for x, y in f.items()
               if x.kind is Kind.PHI and y.kind is Kind.PHI)


def format_vertex_map(g: Mapping[int, int], certified: bool = True) -> str:
    lines = [f"{u} -> {g[u]}" for u in sorted(g)]
    lines.append(f"certified: {'yes' if certified else 'no'}")
    return "\n".join(lines) + "\n"


def parse_vertex_map(text: str) -> dict[int, int]:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("certified:"):
            continue
        left, sep, right = line.partition("->")
        if not sep:
            raise ValueError(f"line {lineno}: expected 'u -> v'")
        out[int(left)] = int(right)
    return out


# IA reconstruction

def _leaf_of_chi(F: Graph, x: ElementLabel) -> int | None:
    if x.kind is Kind.CHI and F.degree(x.index) == 1:
        return x.index
    return None


def reconstruct_tree_iso_ia(T: Graph, T2: Graph, f: Mapping[ElementLabel, ElementLabel],
                            check: bool = True) -> dict[int, int]:
    """Graph isomorphism ``T -> T2`` from an isomorphism between components of their IA matroids.

    ``f`` is defined on one component of ``M[IA(T)]`` and lands on a
    component of ``M[IA(T2)]``.  The result agrees with ``f``: ``g(v) = v2``
    whenever ``f(phi(v)) = phi(v2)`` or ``f(chi(v)) = chi(v2)``.
    """
    if not T.is_tree() or not T2.is_tree():
        raise NotAForestError("both graphs must be trees")
    f = dict(f)
    if check:
        M, M2 = ia_matroid(T), ia_matroid(T2)
        dom, cod = set(f), set(f.values())
        if dom not in set(map(frozenset, components(M))) or \
                cod not in set(map(frozenset, components(M2))):
            raise CertificationError("map is not between components of the IA matroids")
        if not verify_map(restrict(M, dom), restrict(M2, cod), f):
            raise CertificationError("map is not a matroid isomorphism")
    g = _tree_ia(T, T2, f)
    certify_vertex_map(T, T2, g)
    return g


def _tree_ia(T: Graph, T2: Graph, f: dict) -> dict[int, int]:
    if T.n != T2.n:
        raise CertificationError("trees differ in size")
    if T.n == 1:
        return {T.vertices[0]: T2.vertices[0]}
    v = T.leaves()[0]
    (w,) = T.neighbors(v)
    if chi(v) not in f:
        # move to the other component; it is dual to this one through flip
        f = {flip(x): flip(y) for x, y in f.items()}
    a, b = f[chi(v)], f[phi(w)]
    v2 = _leaf_of_chi(T2, a)
    if v2 is None:
        v2 = _leaf_of_chi(T2, b)
    if v2 is None:
        raise CertificationError(f"images of chi({v}), phi({w}) are not a leaf parallel pair")
    (w2,) = T2.neighbors(v2)
    other = b if a == chi(v2) else a
    if other.kind is Kind.CHI and other != chi(v2):
        # a second leaf v'' at w2: compose with (chi(v'') phi(w2))
        sw = {other: phi(w2), phi(w2): other}
        f = {x: sw.get(y, y) for x, y in f.items()}
        log.debug("IA: swap %s <-> %s", other, phi(w2))
    if f[chi(v)] != chi(v2):
        sw = {chi(v2): phi(w2), phi(w2): chi(v2)}
        f = {x: sw.get(y, y) for x, y in f.items()}
        log.debug("IA: swap %s <-> %s", chi(v2), phi(w2))
    if f[chi(v)] != chi(v2) or f[phi(w)] != phi(w2):
        raise CertificationError("could not align the leaf parallel pair")
    del f[chi(v)]
    log.debug("IA: peel leaf %s -> %s", v, v2)
    h = _tree_ia(T.remove_vertex(v), T2.remove_vertex(v2), f)
    h[v] = v2
    return h


def reconstruct_forest_iso_ia(F: Graph, F2: Graph, f: Mapping[ElementLabel, ElementLabel],
                              check: bool = True) -> dict[int, int]:
    """Graph isomorphism ``F -> F2`` from an isomorphism ``M[IA(F)] -> M[IA(F2)]``."""
    return reconstruct_forest_iso_ia_adjusted(F, F2, f, check)[1]


def reconstruct_forest_iso_ia_adjusted(F: Graph, F2: Graph, f: Mapping[ElementLabel, ElementLabel],
                                       check: bool = True) -> tuple[GroundMap, dict[int, int]]:
    """Like :func:`reconstruct_forest_iso_ia`, also returning the map ``g`` agrees with.

    The adjusted map is ``f`` on each matroid component the induction consumes
    and its flip-conjugate on the partner component, so it is again an IA
    isomorphism and ``g(x) = x'`` whenever it sends ``phi(x)`` to ``phi(x')``.
    """
    F.require_forest()
    F2.require_forest()
    M, M2 = ia_matroid(F), ia_matroid(F2)
    if check and not verify_map(M, M2, f):
        raise CertificationError("map is not an isomorphism of the IA matroids")
    g: dict[int, int] = {}
    f_adj: GroundMap = {}
    f = dict(f)
    while F.n:
        comps = components(M)
        comps2 = components(M2)
        comp_of2 = {x: frozenset(c) for c in comps2 for x in c}
        K = comps[0]
        K2 = comp_of2[f[K[0]]]
        partner = [flip(x) for x in K]
        partner2 = frozenset(flip(y) for y in K2)
        # the partner of K must land on the partner of K2; if not, trade images
        if f[partner[0]] not in partner2:
            h = {flip(x): flip(f[x]) for x in K}          # partner -> partner2
            J = [x for x in f if f[x] in partner2]         # current preimage of partner2
            h_inv = inverse(h)
            old = {x: f[x] for x in partner}               # partner -> its current image
            for x in J:
                f[x] = old[h_inv[f[x]]]
            f.update(h)
            log.debug("IA forest: realigned partner component of %s", K[0])
        C = sorted({x.index for x in K}, key=F.position.__getitem__)
        C2 = sorted({y.index for y in K2}, key=F2.position.__getitem__)
        g.update(_tree_ia(F.induced(C), F2.induced(C2), {x: f[x] for x in K}))
        for x in K:
            f_adj[x] = f[x]
            f_adj[flip(x)] = flip(f[x])
        F = F.induced(u for u in F.vertices if u not in set(C))
        F2 = F2.induced(u for u in F2.vertices if u not in set(C2))
        M, M2 = ia_matroid(F), ia_matroid(F2)
        f = {x: y for x, y in f.items() if x in M.index}
    return f_adj, g


# IAS reconstruction

def is_triple_preserving(F: Graph, F2: Graph, f: Mapping[ElementLabel, ElementLabel]) -> bool:
    M2 = ias_matroid(F2)
    targets = {vertex_triple(M2, u) for u in F2.vertices}
    return all(frozenset(f[x] for x in (phi(v), chi(v), psi(v))) in targets for v in F.vertices)


def _leaf_index_terms(F: Graph, F2: Graph, f) -> list[int]:
    out = []
    for w in F.vertices:
        if not any(F.degree(u) == 1 for u in F.neighbors(w)):
            continue
        y = f[phi(w)]
        if y.kind is Kind.CHI and F2.degree(y.index) == 1:
            out.append(w)
    return out


def leaf_index(F: Graph, F2: Graph, f: Mapping[ElementLabel, ElementLabel]) -> int:
    """Number of leaf-adjacent ``w`` with ``f(phi(w))`` equal to ``chi`` of a leaf."""
    if not is_triple_preserving(F, F2, f):
        raise ValueError("map does not send vertex triples to vertex triples")
    return len(_leaf_index_terms(F, F2, f))


def normalize_leaf_index(F: Graph, F2: Graph, f: Mapping[ElementLabel, ElementLabel],
                         steps: list | None = None) -> GroundMap:
    """Compose ``f`` with ``beta`` automorphisms until its leaf index is zero.

    Images of the form ``phi(x) -> phi(x2)`` are kept.  Each composition
    lowers the index by one, or by two when ``v`` and ``w`` form a
    two-vertex component; ``steps`` collects the ``(v, w)`` used.
    """
    f = dict(f)
    current = leaf_index(F, F2, f)
    while current:
        w = _leaf_index_terms(F, F2, f)[0]
        v2 = f[phi(w)].index
        (w2,) = F2.neighbors(v2)
        v = next((u for u in F.neighbors(w) if F.degree(u) == 1 and f[chi(u)] == phi(w2)), None)
        if v is None:
            raise CertificationError(f"no leaf at {w} maps chi onto phi({w2})")
        f = compose(f, beta_automorphism(F, v, w))
        nxt = leaf_index(F, F2, f)
        # v also counts when it is adjacent to the leaf w, i.e. in a two-vertex component
        drop = 2 if F.degree(w) == 1 and current - nxt == 2 else 1
        if nxt != current - drop:
            raise CertificationError("beta composition did not lower the leaf index")
        if steps is not None:
            steps.append((v, w))
        log.debug("IAS: beta_(%s,%s) lowers leaf index to %s", v, w, nxt)
        current = nxt
    return f


def reconstruct_forest_iso_ias(F: Graph, F2: Graph, f: Mapping[ElementLabel, ElementLabel],
                               check: bool = True, node_cap: int | None = None
                               ) -> tuple[GroundMap, dict[int, int]]:
    """Triple-preserving adjustment of ``f`` and a graph isomorphism agreeing with it.

    Returns ``(f_adjusted, g)`` where ``f_adjusted`` maps vertex triples onto
    vertex triples and ``g(x) = x2`` whenever ``f_adjusted(phi(x)) = phi(x2)``.
    """
    F.require_forest()
    F2.require_forest()
    M, M2 = ias_matroid(F), ias_matroid(F2)
    if check and not verify_map(M, M2, f):
        raise CertificationError("map is not an isomorphism of the IAS matroids")
    f = dict(f)
    if not is_triple_preserving(F, F2, f):
        image = apply_map(f, vertex_triangulation(F))
        ok, a = equivalent(M2, image, vertex_triangulation(F2), node_cap=node_cap)
        if not ok:
            raise CertificationError("image of the vertex triangulation is not equivalent to it")
        f = compose(a, f)
        log.debug("IAS: composed with a triangulation automorphism")
    g = _forest_ias(F, F2, f, check)
    certify_vertex_map(F, F2, g)
    for x in F.vertices:
        y = f[phi(x)]
        if y.kind is Kind.PHI and g[x] != y.index:
            raise CertificationError(f"g({x}) = {g[x]} but phi({x}) maps to {y}")
    return f, g


def _forest_ias(F: Graph, F2: Graph, f: dict, check: bool) -> dict[int, int]:
    if F.n != F2.n:
        raise CertificationError("forests differ in size")
    if F.n == 0:
        return {}
    if check:
        if not verify_map(ias_matroid(F), ias_matroid(F2), f):
            raise CertificationError("intermediate map is not an isomorphism")
    if not is_triple_preserving(F, F2, f):
        raise CertificationError("intermediate map is not triple-preserving")
    iso = F.isolated()
    if iso:
        v = iso[0]
        v2 = f[chi(v)].index
        if F2.degree(v2) != 0:
            raise CertificationError(f"loop chi({v}) not sent to an isolated vertex")
        if f[phi(v)] == psi(v2):
            sw = {phi(v2): psi(v2), psi(v2): phi(v2)}
            f = {x: sw.get(y, y) for x, y in f.items()}
            log.debug("IAS: swap parallels %s <-> %s", phi(v2), psi(v2))
        return _peel(F, F2, f, v, v2, check)
    f = normalize_leaf_index(F, F2, f)
    v = F.leaves()[0]
    (w,) = F.neighbors(v)
    if f[phi(w)].kind is Kind.PSI:
        # only inside a two-vertex component: peel the other end instead
        v, w = w, v
    w2_elem = f[phi(w)]
    if w2_elem.kind is not Kind.PHI:
        raise CertificationError(f"phi({w}) maps to {w2_elem} after normalisation")
    w2 = w2_elem.index
    v2_elem = f[chi(v)]
    if v2_elem.kind is not Kind.CHI or F2.neighbors(v2_elem.index) != (w2,):
        raise CertificationError(f"chi({v}) maps to {v2_elem}, not chi of a leaf at {w2}")
    v2 = v2_elem.index
    if f[phi(v)] == psi(v2):
        f = compose(gamma_automorphism(F2, v2, w2), f)
        log.debug("IAS: gamma_(%s,%s) applied", v2, w2)
    return _peel(F, F2, f, v, v2, check)


def _peel(F, F2, f, v, v2, check):
    if (f[phi(v)], f[chi(v)], f[psi(v)]) != (phi(v2), chi(v2), psi(v2)):
        raise CertificationError(f"triple of {v} not aligned with triple of {v2}")
    log.debug("IAS: peel %s -> %s", v, v2)
    rest = {x: y for x, y in f.items() if x.index != v}
    g = _forest_ias(F.remove_vertex(v), F2.remove_vertex(v2), rest, check)
    g[v] = v2
    return g
