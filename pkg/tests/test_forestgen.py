from __future__ import annotations

import itertools
import json
import random
from collections import Counter

import pytest

import oracles
from isomat.forestgen import (MAX_N, SweepReport, brute_force_isomorphic, canonical_form, check_pair,
                              enumerate_forests, enumerate_trees, forests_isomorphic, graph_from_code,
                              random_forest, random_relabel, verify_theorem_main)
from isomat.isotropic import Graph, NotAForestError, cycle, path, star

TREE_COUNTS = [1, 1, 1, 2, 3, 6, 11]
FOREST_COUNTS = [1, 2, 3, 6, 10, 20, 37]


def degree_key(G):
    return tuple(sorted(G.degree(v) for v in G.vertices))


def brute_classes(graphs):
    """Representatives up to isomorphism, by exhaustive permutation checks."""
    reps: dict[tuple, list[Graph]] = {}
    for G in graphs:
        bucket = reps.setdefault((degree_key(G), len(G.edges())), [])
        if not any(brute_force_isomorphic(G, H) for H in bucket):
            bucket.append(G)
    return [G for b in reps.values() for G in b]


def labelled_forests(n):
    pairs = list(itertools.combinations(range(n), 2))
    for k in range(n):
        for edges in itertools.combinations(pairs, k):
            G = Graph.from_edges(n, edges)
            if G.is_forest():
                yield G


def test_counts():
    assert [len(enumerate_trees(n)) for n in range(1, 8)] == TREE_COUNTS
    assert [len(enumerate_forests(n)) for n in range(1, 8)] == FOREST_COUNTS


@pytest.mark.parametrize("n", range(1, 7))
def test_tree_counts_match_labelled_enumeration(n):
    trees = [Graph.from_edges(n, e) for e in oracles.labelled_trees(n)]
    assert len(trees) == max(1, n ** (n - 2))
    assert len(brute_classes(trees)) == TREE_COUNTS[n - 1]


@pytest.mark.parametrize("n", range(1, 6))
def test_forest_counts_match_labelled_enumeration(n):
    assert len(brute_classes(labelled_forests(n))) == FOREST_COUNTS[n - 1]


@pytest.mark.parametrize("n", range(1, 7))
def test_representatives_pairwise_non_isomorphic(n):
    forests = enumerate_forests(n)
    assert all(F.is_forest() and F.n == n for F in forests)
    assert len({canonical_form(F) for F in forests}) == len(forests)
    for A, B in itertools.combinations(forests, 2):
        assert not brute_force_isomorphic(A, B)
    assert all(T.is_tree() for T in enumerate_trees(n))


def test_enumeration_is_deterministic():
    assert [F.edges() for F in enumerate_forests(6)] == [F.edges() for F in enumerate_forests(6)]
    assert enumerate_trees(1)[0] == Graph.from_edges(1, [])
    assert enumerate_forests(1) == [Graph.from_edges(1, [])]


def test_n_out_of_range():
    with pytest.raises(ValueError):
        enumerate_trees(0)
    with pytest.raises(ValueError):
        enumerate_forests(MAX_N + 1)
    with pytest.raises(ValueError):
        verify_theorem_main(8)


def test_canonical_form_examples():
    P4 = path(4)
    P4b, _ = random_relabel(P4, random.Random(1))
    assert forests_isomorphic(P4, P4b)
    assert not forests_isomorphic(P4, star(3))
    with pytest.raises(NotAForestError):
        canonical_form(cycle(3))
    assert graph_from_code("(()())") == Graph.from_edges(3, [(0, 1), (0, 2)])


def test_canonical_form_matches_brute_force():
    rng = random.Random(11)
    for _ in range(300):
        n = rng.randint(1, 6)
        A = random_forest(n, rng, edge_prob=rng.random())
        B = random_forest(n, rng, edge_prob=rng.random()) if rng.random() < 0.5 else random_relabel(A, rng)[0]
        assert forests_isomorphic(A, B) == brute_force_isomorphic(A, B)


def test_random_relabel_is_isomorphism():
    rng = random.Random(2)
    G = random_forest(7, rng)
    H, m = random_relabel(G, rng)
    assert all(H.adjacent(m[u], m[v]) for u, v in G.edges())


# sweep

def test_sweep_small():
    report = verify_theorem_main(3)
    assert report.ok and not report.capped
    assert len(report.records) == 1 + 2 + 1 + 3 + 3
    iso = [r for r in report.records if r.forest_iso]
    assert all(r.reconstructed and r.certified for r in iso)


def test_sweep_p4_vs_star():
    report = verify_theorem_main(4)
    assert report.ok
    reps = enumerate_forests(4)
    ip = next(i for i, F in enumerate(reps) if forests_isomorphic(F, path(4)))
    istar = next(i for i, F in enumerate(reps) if forests_isomorphic(F, star(3)))
    rec = next(r for r in report.records if {r.id_a, r.id_b} == {f"F4.{ip}", f"F4.{istar}"})
    assert (rec.forest_iso, rec.ia_iso, rec.ias_iso) == (False, False, False)


def test_non_forest_pair_shows_forest_hypothesis_is_needed():
    rec = check_pair(cycle(3), path(3), "C3", "P3", allow_non_forest=True)
    assert not rec.forest_iso and rec.ias_iso
    assert not rec.passed
    with pytest.raises(NotAForestError):
        check_pair(cycle(3), path(3))
    rec = check_pair(path(4), cycle(4), allow_non_forest=True)
    assert not rec.forest_iso and rec.ia_iso


def test_capped_pair_is_flagged():
    rec = check_pair(path(5), path(5), node_cap=1)
    assert rec.capped and not rec.passed


def test_report_formats():
    report = verify_theorem_main(2)
    lines = report.to_text().splitlines()
    assert lines[0] == "n, idA, idB, forest_iso, ia_iso, ias_iso, reconstructed, certified, millis"
    assert lines[1].startswith("1, F1.0, F1.0', yes, yes, yes, yes, yes, ")
    assert any(", no, no, no, -, -, " in line for line in lines)
    data = json.loads(json.dumps(report.to_json()))
    assert Counter(d["passed"] for d in data) == Counter({True: len(report.records)})
    assert SweepReport().ok
