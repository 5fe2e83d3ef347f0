"""Binary matroids given by labelled GF(2) matrices.

Dependence of a set of elements is linear dependence of their columns.  Two
bijections between binary matroids are compared through the linear map they
induce on column spaces: a bijection is an isomorphism exactly when the
column assignment extends to an injective linear map (binary matroids are
uniquely representable over GF(2)).  Both the map checker and the
backtracking search below are built on that test.
"""

from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

from .gf2 import BitMatrix, XorBasis, column_add_transform, rref, standard_representation

__all__ = [
    "Kind",
    "ElementLabel",
    "BinaryMatroid",
    "GroundMap",
    "ResourceLimitError",
    "phi",
    "chi",
    "psi",
    "col",
    "parse_label",
    "loops",
    "coloops",
    "parallel_classes",
    "circuits_up_to",
    "components",
    "restrict",
    "delete",
    "contract",
    "dual",
    "verify_map",
    "check_bijection",
    "find_isomorphism",
    "automorphisms",
    "automorphism_generators",
    "iter_isomorphisms",
    "invariant_colors",
    "compose",
    "inverse",
    "identity_map",
    "transposition",
    "format_ground_map",
    "parse_ground_map",
]


class ResourceLimitError(RuntimeError):
    """A configured search bound was exceeded; the answer is unknown."""


class Kind(Enum):
    PHI = "phi"
    CHI = "chi"
    PSI = "psi"
    PLAIN = "col"


_KIND_ORDER = {Kind.PHI: 0, Kind.CHI: 1, Kind.PSI: 2, Kind.PLAIN: 3}


@dataclass(frozen=True)
class ElementLabel:
    """Name of a ground-set element.

    For PHI/CHI/PSI labels ``index`` is the vertex id; for PLAIN labels it is
    the column ordinal the element had when the matroid was built.
    """

    kind: Kind
    index: int

    @property
    def vertex(self) -> int | None:
        return None if self.kind is Kind.PLAIN else self.index

    @property
    def ordinal(self) -> int | None:
        return self.index if self.kind is Kind.PLAIN else None

    def sort_key(self):
        return (_KIND_ORDER[self.kind], self.index)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        return f"{self.kind.value}:{self.index}"

    def __repr__(self):
        return f"<{self}>"


def phi(v: int) -> ElementLabel:
    return ElementLabel(Kind.PHI, v)


def chi(v: int) -> ElementLabel:
    return ElementLabel(Kind.CHI, v)


def psi(v: int) -> ElementLabel:
    return ElementLabel(Kind.PSI, v)


def col(j: int) -> ElementLabel:
    return ElementLabel(Kind.PLAIN, j)


def parse_label(text: str) -> ElementLabel:
    try:
        kind, _, index = text.strip().partition(":")
        return ElementLabel(Kind(kind), int(index))
    except ValueError:
        raise ValueError(f"bad element label {text!r}") from None


GroundMap = dict  # ElementLabel -> ElementLabel


class BinaryMatroid:
    """The matroid ``M[B]`` of a GF(2) matrix with one label per column."""

    __slots__ = ("matrix", "labels", "__dict__")

    def __init__(self, matrix: BitMatrix, labels: Sequence[ElementLabel] | None = None):
        if labels is None:
            labels = [col(j) for j in range(matrix.col_count)]
        labels = tuple(labels)
        if len(labels) != matrix.col_count:
            raise ValueError("need exactly one label per column")
        if len(set(labels)) != len(labels):
            raise ValueError("labels must be unique")
        self.matrix = matrix
        self.labels = labels

    @cached_property
    def index(self) -> dict[ElementLabel, int]:
        return {x: j for j, x in enumerate(self.labels)}

    @cached_property
    def vectors(self) -> dict[ElementLabel, int]:
        return dict(zip(self.labels, self.matrix.columns))

    @property
    def ground(self) -> tuple[ElementLabel, ...]:
        return self.labels

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, x):
        return x in self.index

    def __repr__(self):
        return f"BinaryMatroid({self.matrix.row_count}x{self.matrix.col_count})"

    def column(self, x: ElementLabel) -> int:
        return self.vectors[x]

    def rank(self, subset: Iterable[ElementLabel] | None = None) -> int:
        basis = XorBasis()
        vec = self.vectors
        for x in (self.labels if subset is None else subset):
            basis.add(vec[x])
        return len(basis)

    def is_dependent(self, subset: Iterable[ElementLabel]) -> bool:
        basis = XorBasis()
        vec = self.vectors
        for x in subset:
            if not basis.add(vec[x]):
                return True
        return False

    def is_circuit(self, subset: Iterable[ElementLabel]) -> bool:
        subset = list(subset)
        if not subset:
            return False
        total = 0
        for x in subset:
            total ^= self.vectors[x]
        # zero sum with rank |S|-1 means the whole set is the only dependency
        return total == 0 and self.rank(subset) == len(subset) - 1

    def _check_labels(self, subset: Iterable[ElementLabel]) -> list[ElementLabel]:
        subset = list(subset)
        unknown = [x for x in subset if x not in self.index]
        if unknown:
            raise KeyError(f"unknown elements: {', '.join(map(str, unknown))}")
        return subset


# elementary structure

def loops(M: BinaryMatroid) -> set[ElementLabel]:
    return {x for x in M.labels if M.vectors[x] == 0}


def coloops(M: BinaryMatroid) -> set[ElementLabel]:
    full = M.rank()
    out = set()
    for x in M.labels:
        if M.rank(y for y in M.labels if y != x) < full:
            out.add(x)
    return out


def parallel_classes(M: BinaryMatroid) -> list[list[ElementLabel]]:
    """Partition the non-loop elements by column value (singletons included)."""
    groups: dict[int, list[ElementLabel]] = {}
    for x in M.labels:
        v = M.vectors[x]
        if v:
            groups.setdefault(v, []).append(x)
    return list(groups.values())


def circuits_up_to(M: BinaryMatroid, k: int) -> set[frozenset[ElementLabel]]:
    if k < 1:
        raise ValueError("size bound must be at least 1")
    out = set()
    labels = M.labels
    vec = M.vectors
    for size in range(1, min(k, len(labels)) + 1):
        for combo in itertools.combinations(labels, size):
            total = 0
            for x in combo:
                total ^= vec[x]
            if total == 0 and M.rank(combo) == size - 1:
                out.add(frozenset(combo))
    return out


def components(M: BinaryMatroid) -> list[list[ElementLabel]]:
    """Connected components, from the fundamental circuits of a greedy basis."""
    n = len(M)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    reduced, pivots = rref(M.matrix)
    for row, p in zip(reduced, pivots):
        j = 0
        r = row
        while r:
            if r & 1:
                a, b = find(p), find(j)
                if a != b:
                    parent[a] = b
            r >>= 1
            j += 1
    groups: dict[int, list[ElementLabel]] = {}
    for j in range(n):
        groups.setdefault(find(j), []).append(M.labels[j])
    return sorted(groups.values(), key=lambda g: M.index[g[0]])


# minors and duality

def restrict(M: BinaryMatroid, subset: Iterable[ElementLabel]) -> BinaryMatroid:
    """``M | S``; columns keep the order they have in ``M``."""
    keep = set(M._check_labels(subset))
    idx = [j for j, x in enumerate(M.labels) if x in keep]
    return BinaryMatroid(M.matrix.select_columns(idx), [M.labels[j] for j in idx])


def delete(M: BinaryMatroid, subset: Iterable[ElementLabel]) -> BinaryMatroid:
    drop = set(M._check_labels(subset))
    return restrict(M, [x for x in M.labels if x not in drop])


def contract(M: BinaryMatroid, x: ElementLabel) -> BinaryMatroid:
    """``M / x``: pivot the column of ``x`` down to one 1, then drop its row and column."""
    M._check_labels([x])
    j = M.index[x]
    B = M.matrix
    v = B.columns[j]
    if v:
        i = (v & -v).bit_length() - 1
        B = column_add_transform(B, i, v & ~(1 << i))
        B = B.delete_row(i)
    keep = [c for c in range(B.col_count) if c != j]
    return BinaryMatroid(B.select_columns(keep), [M.labels[c] for c in keep])


def dual(M: BinaryMatroid) -> BinaryMatroid:
    """The dual matroid on the same labels, via ``[I_r | A] -> [A^T | I_{n-r}]``."""
    n = len(M)
    r = M.rank()
    if r == 0:
        return BinaryMatroid(BitMatrix.identity(n), M.labels)
    if r == n:
        return BinaryMatroid(BitMatrix.zeros(n, n), M.labels)
    perm, S = standard_representation(M.matrix)
    A_cols = S.columns[r:]  # each an r-bit int
    # [A^T | I_{n-r}]: column k < r is row k of A, column r+t is e_t
    cols_std = []
    for k in range(r):
        v = 0
        for t, a in enumerate(A_cols):
            if (a >> k) & 1:
                v |= 1 << t
        cols_std.append(v)
    cols_std.extend(1 << t for t in range(n - r))
    cols = [0] * n
    for k, j in enumerate(perm):
        cols[j] = cols_std[k]
    return BinaryMatroid(BitMatrix.from_columns(cols, n - r), M.labels)


# ground maps

def identity_map(M: BinaryMatroid) -> GroundMap:
    return {x: x for x in M.labels}


def compose(f: Mapping, g: Mapping) -> GroundMap:
    """``f o g``: apply ``g`` first."""
    return {x: f[y] for x, y in g.items()}


def inverse(f: Mapping) -> GroundMap:
    out = {y: x for x, y in f.items()}
    if len(out) != len(f):
        raise ValueError("map is not injective")
    return out


def transposition(M: BinaryMatroid, x: ElementLabel, y: ElementLabel) -> GroundMap:
    f = identity_map(M)
    f[x], f[y] = y, x
    return f


def format_ground_map(f: Mapping, order: Iterable[ElementLabel] | None = None) -> str:
    keys = list(order) if order is not None else sorted(f)
    return "".join(f"{x} -> {f[x]}\n" for x in keys)


def parse_ground_map(text: str) -> GroundMap:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        left, sep, right = line.partition("->")
        if not sep:
            raise ValueError(f"line {lineno}: expected '<label> -> <label>'")
        try:
            x, y = parse_label(left), parse_label(right)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        if x in out:
            raise ValueError(f"line {lineno}: {x} mapped twice")
        out[x] = y
    return out


def check_bijection(M1: BinaryMatroid, M2: BinaryMatroid, f: Mapping) -> None:
    if set(f) != set(M1.labels):
        raise ValueError("map is not total on the source ground set")
    if len(set(f.values())) != len(f):
        raise ValueError("map is not injective")
    if set(f.values()) != set(M2.labels):
        raise ValueError("map does not land on the target ground set")


def verify_map(M1: BinaryMatroid, M2: BinaryMatroid, f: Mapping, brute_force: bool = False) -> bool:
    """True iff the bijection ``f`` matches dependent sets to dependent sets.

    The default check walks the elements once, growing the linear map that
    ``f`` forces between column spaces.  ``brute_force=True`` compares every
    subset instead (only sensible for small ground sets).
    """
    check_bijection(M1, M2, f)
    if brute_force:
        labels = M1.labels
        for mask in range(1, 1 << len(labels)):
            sub = [labels[j] for j in range(len(labels)) if (mask >> j) & 1]
            if M1.is_dependent(sub) != M2.is_dependent(f[x] for x in sub):
                return False
        return True
    src = XorBasis()
    tgt = XorBasis()
    v1, v2 = M1.vectors, M2.vectors
    for x in M1.labels:
        residual, image = src.reduce(v1[x])
        t = v2[f[x]]
        if residual == 0:
            if image != t:
                return False
        else:
            if tgt.contains(t):
                return False
            src.add(residual, image ^ t)
            tgt.add(t)
    return True


# isomorphism search

def _refine(elements: list, initial: list, hyperedges: list[tuple[object, list[int]]]) -> list[int]:
    """Colour refinement of elements over tagged hyperedges.

    ``hyperedges`` is a list of ``(tag, members)``; an element's new colour
    collects, for each hyperedge through it, the tag and the sorted colours
    of the other members.  Iterates until the partition stops splitting.
    """
    table = {c: i for i, c in enumerate(sorted(set(initial), key=repr))}
    colors = [table[c] for c in initial]
    incident: list[list[int]] = [[] for _ in elements]
    for h, (_, members) in enumerate(hyperedges):
        for m in members:
            incident[m].append(h)
    while True:
        sigs = []
        for e in range(len(elements)):
            around = []
            for h in incident[e]:
                tag, members = hyperedges[h]
                others = sorted(colors[m] for m in members if m != e)
                around.append((tag, tuple(others)))
            around.sort()
            sigs.append((colors[e], tuple(around)))
        table = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [table[s] for s in sigs]
        if len(table) == len(set(colors)):
            return new
        colors = new


def _base_invariants(M: BinaryMatroid) -> list:
    vec = M.vectors
    par = Counter(vec[x] for x in M.labels)
    comp_of = {}
    for comp in components(M):
        key = (len(comp), M.rank(comp))
        for x in comp:
            comp_of[x] = key
    return [(vec[x] == 0, par[vec[x]] if vec[x] else 0, comp_of[x]) for x in M.labels]


def invariant_colors(*matroids: BinaryMatroid, k: int = 4,
                     extra: Sequence[Iterable[tuple[int, Iterable[ElementLabel]]]] | None = None
                     ) -> list[list[int]]:
    """Joint isomorphism-invariant colourings of the given matroids.

    Colours are comparable across the matroids: an isomorphism between any
    two of them must preserve colour.  ``extra`` adds, per matroid, tagged
    element sets (integer tags) that a map is also required to preserve.
    """
    elements = []
    initial = []
    hyperedges = []
    offsets = []
    for i, M in enumerate(matroids):
        off = len(elements)
        offsets.append(off)
        elements.extend(M.labels)
        initial.extend(_base_invariants(M))
        for C in circuits_up_to(M, k):
            hyperedges.append((len(C), [off + M.index[x] for x in C]))
        if extra is not None:
            for tag, members in extra[i]:
                hyperedges.append((tag, [off + M.index[x] for x in members]))
    colors = _refine(elements, initial, hyperedges)
    return [colors[off:off + len(M)] for off, M in zip(offsets, matroids)]


class _Matcher:
    """Backtracking over element assignments kept linearly consistent.

    Unassigned source elements whose column already lies in the span of the
    assigned ones have a forced image column; those are placed first.
    Otherwise the element with the fewest colour-compatible candidates is
    branched on (lowest ordinal on ties), trying targets in ordinal order.
    """

    def __init__(self, src_cols, tgt_cols, src_colors, tgt_colors):
        self.src = list(src_cols)
        self.tgt = list(tgt_cols)
        self.scol = list(src_colors)
        self.tcol = list(tgt_colors)
        self.n = len(self.src)
        self.by_color: dict[int, list[int]] = defaultdict(list)
        for t, c in enumerate(self.tcol):
            self.by_color[c].append(t)
        self.nodes = 0

    def search(self, fixed: Mapping[int, int] | None = None, node_cap: int | None = None) -> Iterator[list[int]]:
        if self.n != len(self.tgt):
            return
        if Counter(self.scol) != Counter(self.tcol):
            return
        assign = [-1] * self.n
        used = [False] * self.n
        sbasis, tbasis = XorBasis(), XorBasis()
        for e, t in (fixed or {}).items():
            if used[t] or self.scol[e] != self.tcol[t]:
                return
            state = self._extend(sbasis, tbasis, e, t)
            if state is None:
                return
            sbasis, tbasis = state
            assign[e] = t
            used[t] = True
        self.node_cap = node_cap
        yield from self._recurse(assign, used, sbasis, tbasis, self.n - len(fixed or {}))

    def _extend(self, sbasis, tbasis, e, t):
        residual, image = sbasis.reduce(self.src[e])
        tv = self.tgt[t]
        if residual == 0:
            return (sbasis, tbasis) if image == tv else None
        if tbasis.contains(tv):
            return None
        sb, tb = sbasis.copy(), tbasis.copy()
        sb.add(residual, image ^ tv)
        tb.add(tv)
        return sb, tb

    def _recurse(self, assign, used, sbasis, tbasis, remaining):
        if remaining == 0:
            yield list(assign)
            return
        self.nodes += 1
        if self.node_cap is not None and self.nodes > self.node_cap:
            raise ResourceLimitError(f"isomorphism search exceeded {self.node_cap} nodes")
        best = None
        best_forced = False
        for e in range(self.n):
            if assign[e] >= 0:
                continue
            residual, image = sbasis.reduce(self.src[e])
            if residual == 0:
                cands = [t for t in self.by_color[self.scol[e]]
                         if not used[t] and self.tgt[t] == image]
                if not cands:
                    return
                if not best_forced or len(cands) < len(best[1]):
                    best, best_forced = (e, cands), True
            elif not best_forced:
                cands = [t for t in self.by_color[self.scol[e]]
                         if not used[t] and not tbasis.contains(self.tgt[t])]
                if not cands:
                    return
                if best is None or len(cands) < len(best[1]):
                    best = (e, cands)
        e, cands = best
        for t in cands:
            state = self._extend(sbasis, tbasis, e, t)
            if state is None:
                continue
            assign[e] = t
            used[t] = True
            yield from self._recurse(assign, used, state[0], state[1], remaining - 1)
            assign[e] = -1
            used[t] = False


def iter_isomorphisms(M1: BinaryMatroid, M2: BinaryMatroid, use_invariants: bool = True,
                      fixed: Mapping[ElementLabel, ElementLabel] | None = None,
                      node_cap: int | None = None) -> Iterator[GroundMap]:
    """All isomorphisms ``M1 -> M2`` (optionally extending ``fixed``)."""
    if len(M1) != len(M2):
        return
    if use_invariants:
        c1, c2 = invariant_colors(M1, M2)
    else:
        c1, c2 = [0] * len(M1), [0] * len(M2)
    matcher = _Matcher(M1.matrix.columns, M2.matrix.columns, c1, c2)
    fixed_idx = {M1.index[x]: M2.index[y] for x, y in (fixed or {}).items()}
    for assign in matcher.search(fixed_idx, node_cap=node_cap):
        yield {M1.labels[e]: M2.labels[t] for e, t in enumerate(assign)}


def _first(it):
    for x in it:
        return x
    return None


def find_isomorphism(M1: BinaryMatroid, M2: BinaryMatroid, use_invariants: bool = True,
                     node_cap: int | None = None) -> GroundMap | None:
    """Some isomorphism ``M1 -> M2``, or ``None`` when there is none.

    With ``use_invariants`` the matroids are coloured jointly, components
    are paired by (size, rank, colour multiset) and each pair is searched
    separately.  Without it the search is plain backtracking on the whole
    ground set.
    """
    if len(M1) != len(M2) or M1.rank() != M2.rank():
        return None
    if not use_invariants:
        return _first(iter_isomorphisms(M1, M2, use_invariants=False, node_cap=node_cap))
    c1, c2 = invariant_colors(M1, M2)
    if Counter(c1) != Counter(c2):
        return None
    color1 = dict(zip(M1.labels, c1))
    color2 = dict(zip(M2.labels, c2))

    def comp_key(M, comp, color):
        return (len(comp), M.rank(comp), tuple(sorted(color[x] for x in comp)))

    comps1 = components(M1)
    comps2 = components(M2)
    keys2 = [comp_key(M2, C, color2) for C in comps2]
    if sorted(comp_key(M1, C, color1) for C in comps1) != sorted(keys2):
        return None
    used = [False] * len(comps2)
    result: GroundMap = {}
    for C in comps1:
        key = comp_key(M1, C, color1)
        R1 = restrict(M1, C)
        for j, D in enumerate(comps2):
            if used[j] or keys2[j] != key:
                continue
            R2 = restrict(M2, D)
            matcher = _Matcher(R1.matrix.columns, R2.matrix.columns,
                               [color1[x] for x in R1.labels], [color2[y] for y in R2.labels])
            assign = _first(matcher.search(node_cap=node_cap))
            if assign is not None:
                used[j] = True
                result.update({R1.labels[e]: R2.labels[t] for e, t in enumerate(assign)})
                break
        else:
            # component isomorphism is an equivalence relation, so greedy pairing is complete
            return None
    return result


DEFAULT_FULL_LIST = 15
DEFAULT_AUT_CAP = 64


def automorphisms(M: BinaryMatroid, full_limit: int = DEFAULT_FULL_LIST,
                  cap: int = DEFAULT_AUT_CAP) -> list[GroundMap]:
    """Every automorphism when ``|M| <= full_limit``, else a generating set."""
    if len(M) > cap:
        raise ResourceLimitError(f"ground set of size {len(M)} exceeds automorphism cap {cap}")
    if len(M) > full_limit:
        return automorphism_generators(M, cap=cap)
    return list(iter_isomorphisms(M, M))


def automorphism_generators(M: BinaryMatroid, cap: int = DEFAULT_AUT_CAP) -> list[GroundMap]:
    """Coset representatives along a point-stabiliser chain (a strong generating set)."""
    if len(M) > cap:
        raise ResourceLimitError(f"ground set of size {len(M)} exceeds automorphism cap {cap}")
    (colors,) = invariant_colors(M)
    gens = []
    seen = set()
    for i, b in enumerate(M.labels):
        fixed = {x: x for x in M.labels[:i]}
        for j in range(i + 1, len(M)):
            c = M.labels[j]
            if colors[j] != colors[i]:
                continue
            f = _first(iter_isomorphisms(M, M, fixed={**fixed, b: c}))
            if f is not None:
                key = tuple(f[x] for x in M.labels)
                if key not in seen:
                    seen.add(key)
                    gens.append(f)
    return gens
