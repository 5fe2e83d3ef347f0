from __future__ import annotations

import itertools

import pytest

import oracles
from conftest import GOLDEN
from isomat.forestgen import enumerate_trees, forests_isomorphic
from isomat.isotropic import Graph, cycle, ias_matroid, path, star
from isomat.matroid import ResourceLimitError, chi, parse_ground_map, phi, psi, verify_map
from isomat.triangulate import (PreconditionError, Triangulation, analyze_triangulations, apply_map,
                                check_triangulation, classify_nonvertex_circuit_triple,
                                enumerate_triangulations, equivalent, format_triangulation,
                                parallel_swap, parse_triangulation, ps_equivalent, ps_orbit,
                                triple_shape, vertex_triangulation)

P4_WITNESS = frozenset({phi(0), chi(1), chi(3)})


def two_isolated():
    return Graph.from_edges(2, [])


def test_vertex_triangulation():
    T = vertex_triangulation(path(4))
    assert len(T) == 4
    assert frozenset({phi(2), chi(2), psi(2)}) in T
    M = ias_matroid(Graph.from_edges(1, []))
    (t,) = vertex_triangulation(Graph.from_edges(1, [])).triples
    assert triple_shape(M, t) == "loop+parallel"
    for G in (path(5), star(4), cycle(3)):
        assert len(vertex_triangulation(G)) == G.n
        check_triangulation(ias_matroid(G), vertex_triangulation(G))


@pytest.mark.parametrize("G", [path(2), path(3), path(4), star(3), two_isolated(),
                               Graph.from_edges(3, [(0, 1)]), cycle(3)])
def test_enumeration_matches_brute_force(G):
    M = ias_matroid(G)
    got = [T.triples for T in enumerate_triangulations(M)]
    assert len(got) == len(set(got))
    assert set(got) == oracles.triangulations(M)
    assert vertex_triangulation(G).triples in set(got)
    for T in enumerate_triangulations(M):
        check_triangulation(M, T)


def test_triangulation_counts():
    assert len(list(enumerate_triangulations(ias_matroid(path(3))))) == 6
    assert len(list(enumerate_triangulations(ias_matroid(path(4))))) == 8


def test_p4_enumeration_reaches_the_witness_triple():
    assert any(P4_WITNESS in T for T in enumerate_triangulations(ias_matroid(path(4))))


def test_enumeration_bound():
    with pytest.raises(ResourceLimitError):
        list(enumerate_triangulations(ias_matroid(path(7))))
    with pytest.raises(ResourceLimitError):
        list(enumerate_triangulations(ias_matroid(path(4)), bound=9))


def test_mutually_parallel_triple_is_a_union_of_circuits():
    M = ias_matroid(star(3))
    t = {chi(1), chi(2), chi(3)}
    assert triple_shape(M, t) == "other"
    assert M.is_dependent(t) and not M.is_circuit(t)


def test_invalid_triangulations_rejected():
    M = ias_matroid(path(3))
    T = vertex_triangulation(path(3))
    with pytest.raises(ValueError):
        check_triangulation(M, Triangulation.of(list(T.triples)[:2]))
    with pytest.raises(ValueError):
        check_triangulation(M, Triangulation.of([{phi(0), phi(1), phi(2)}, {chi(0), chi(1), chi(2)},
                                                 {psi(0), psi(1), psi(2)}]))


def test_text_round_trip():
    M = ias_matroid(path(4))
    for T in enumerate_triangulations(M):
        assert parse_triangulation(format_triangulation(M, T)) == T
    with pytest.raises(ValueError, match="line 1"):
        parse_triangulation("phi:0, chi:0\n")


# parallel swaps

def test_parallel_swap_examples():
    M = ias_matroid(path(4))
    V = vertex_triangulation(path(4))
    S = parallel_swap(M, V, chi(0), phi(1))
    assert frozenset({phi(0), phi(1), psi(0)}) in S and frozenset({chi(0), chi(1), psi(1)}) in S
    assert parallel_swap(M, S, chi(0), phi(1)) == V
    with pytest.raises(ValueError):
        parallel_swap(M, V, chi(0), phi(0))
    N = ias_matroid(Graph.from_edges(1, []))
    W = vertex_triangulation(Graph.from_edges(1, []))
    assert parallel_swap(N, W, phi(0), psi(0)) == W


def test_ps_equivalence_examples():
    M = ias_matroid(path(3))
    V = vertex_triangulation(path(3))
    assert ps_equivalent(M, V, V) == (True, [])
    for T in enumerate_triangulations(M):
        ok, swaps = ps_equivalent(M, T, V)
        assert ok
        cur = T
        for x, y in swaps:
            cur = parallel_swap(M, cur, x, y)
        assert cur == V


def test_p4_has_a_triangulation_outside_the_vertex_swap_class():
    M = ias_matroid(path(4))
    V = vertex_triangulation(path(4))
    outside = [T for T in enumerate_triangulations(M) if not ps_equivalent(M, T, V)[0]]
    assert outside
    assert all(equivalent(M, T, V)[0] for T in outside)


@pytest.mark.parametrize("G", [path(2), path(3), path(4), star(3), two_isolated()])
def test_ps_equivalence_is_an_equivalence_relation(G):
    M = ias_matroid(G)
    tris = list(enumerate_triangulations(M))
    rel = {(a, b): ps_equivalent(M, tris[a], tris[b])[0] for a in range(len(tris))
           for b in range(len(tris))}
    for a in range(len(tris)):
        assert rel[a, a]
        for b in range(len(tris)):
            assert rel[a, b] == rel[b, a]
            for c in range(len(tris)):
                if rel[a, b] and rel[b, c]:
                    assert rel[a, c]


def test_orbit_cap():
    M = ias_matroid(star(3))
    with pytest.raises(ResourceLimitError):
        ps_orbit(M, vertex_triangulation(star(3)), cap=2)


# equivalence under automorphisms

def test_equivalent_witness_maps_triples_onto_triples():
    M = ias_matroid(path(4))
    V = vertex_triangulation(path(4))
    for T in enumerate_triangulations(M):
        ok, a = equivalent(M, T, V)
        assert ok and verify_map(M, M, a) and apply_map(a, T) == V
        if ps_equivalent(M, T, V)[0]:
            assert ok


def test_table_automorphism_carries_witness_triple_to_a_vertex_triple():
    M = ias_matroid(path(4))
    f = parse_ground_map((GOLDEN / "p4_strange.map").read_text())
    assert frozenset(f[x] for x in P4_WITNESS) == {phi(2), chi(2), psi(2)}
    V = vertex_triangulation(path(4))
    for T in enumerate_triangulations(M):
        if P4_WITNESS in T:
            assert ps_equivalent(M, apply_map(f, T), V)[0]


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_every_tree_triangulation_equivalent_to_vertex(n):
    for T in enumerate_trees(n):
        s = analyze_triangulations(T)
        assert s.all_equivalent and len(s.witnesses) == len(s.ps_classes)
        M = ias_matroid(T)
        V = vertex_triangulation(T)
        for i, a in s.witnesses.items():
            assert verify_map(M, M, a) and apply_map(a, s.ps_classes[i][0]) == V
        assert s.all_ps_equivalent == (not forests_isomorphic(T, path(4)))


def test_equivalent_rejects_partitions_no_automorphism_reaches():
    M = ias_matroid(two_isolated())
    V = vertex_triangulation(two_isolated())
    mixed = Triangulation.of([{phi(0), psi(0), chi(1)}, {chi(0), phi(1), psi(1)}])
    check_triangulation(M, mixed)
    ok, a = equivalent(M, V, mixed)
    assert ok and apply_map(a, V) == mixed
    P = ias_matroid(path(3))
    blocks = Triangulation.of([{phi(0), phi(1), phi(2)}, {chi(0), chi(1), chi(2)},
                               {psi(0), psi(1), psi(2)}])
    assert equivalent(P, vertex_triangulation(path(3)), blocks) == (False, None)
    assert equivalent(M, V, Triangulation.of(list(V.triples)[:1])) == (False, None)


# degree-two classification

def test_classify_p4_witness_triple():
    r = classify_nonvertex_circuit_triple(path(4), P4_WITNESS)
    assert r.form == "phi-phi-chi" and r.z == 1 and {r.x, r.y} == {0, 2}
    assert path(4).degree(r.z) == 2
    assert r.result == {phi(0), phi(2), chi(1)}
    t = set(P4_WITNESS)
    for x, y in r.swaps:
        t = {y if e == x else x if e == y else e for e in t}
    assert t == r.result


def test_classify_finds_psi_form_with_leaf():
    M = ias_matroid(path(4))
    found = []
    for t in itertools.combinations(M.labels, 3):
        if not M.is_circuit(t):
            continue
        try:
            r = classify_nonvertex_circuit_triple(path(4), t)
        except PreconditionError:
            continue
        assert path(4).degree(r.z) == 2
        if r.form == "psi-phi-psi":
            assert path(4).degree(r.x) == 1
            assert r.result == {psi(r.x), phi(r.y), psi(r.z)}
            found.append(r)
    assert found


def test_star_has_no_qualifying_triples():
    M = ias_matroid(star(3))
    for t in itertools.combinations(M.labels, 3):
        if M.is_circuit(t):
            with pytest.raises(PreconditionError):
                classify_nonvertex_circuit_triple(star(3), t)


def test_classify_preconditions():
    with pytest.raises(PreconditionError):
        classify_nonvertex_circuit_triple(path(3), {chi(1), phi(0), phi(2)})
    with pytest.raises(PreconditionError):
        classify_nonvertex_circuit_triple(path(4), {phi(1), chi(1), psi(1)})
    with pytest.raises(PreconditionError):
        classify_nonvertex_circuit_triple(path(4), {phi(0), phi(1), phi(2)})
    with pytest.raises(PreconditionError):
        classify_nonvertex_circuit_triple(Graph.from_edges(4, [(0, 1), (2, 3)]), P4_WITNESS)
