"""Bit-packed matrices over GF(2).

A row is a Python int whose bit ``j`` is the entry in column ``j``.  Column
vectors handed around by the rest of the package are ints as well, with bit
``i`` holding the entry in row ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

__all__ = [
    "BitMatrix",
    "XorBasis",
    "rank",
    "vectors_rank",
    "rref",
    "column_add_transform",
    "standard_representation",
    "is_dependent_columns",
    "as_vector",
]


def as_vector(bits: int | Sequence[int]) -> int:
    """Accept a column vector as an int or a 0/1 sequence (index 0 = row 0)."""
    if isinstance(bits, int):
        if bits < 0:
            raise ValueError("bit vector must be non-negative")
        return bits
    vec = 0
    for i, b in enumerate(bits):
        if b not in (0, 1):
            raise ValueError(f"entry {b!r} is not in GF(2)")
        if b:
            vec |= 1 << i
    return vec


@dataclass(frozen=True)
class BitMatrix:
    row_count: int
    col_count: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if self.row_count < 0 or self.col_count < 0:
            raise ValueError("matrix dimensions must be non-negative")
        if len(self.rows) != self.row_count:
            raise ValueError(f"expected {self.row_count} rows, got {len(self.rows)}")
        limit = 1 << self.col_count
        for i, r in enumerate(self.rows):
            if not 0 <= r < limit:
                raise ValueError(f"row {i} has bits outside {self.col_count} columns")

    # construction

    @classmethod
    def from_lists(cls, data: Sequence[Sequence[int]], col_count: int | None = None) -> BitMatrix:
        if col_count is None:
            col_count = len(data[0]) if data else 0
        rows = []
        for i, row in enumerate(data):
            if len(row) != col_count:
                raise ValueError(f"row {i} has length {len(row)}, expected {col_count}")
            rows.append(as_vector(row))
        return cls(len(rows), col_count, tuple(rows))

    @classmethod
    def from_columns(cls, columns: Sequence[int], row_count: int) -> BitMatrix:
        rows = [0] * row_count
        for j, col in enumerate(columns):
            if col >> row_count:
                raise ValueError(f"column {j} has bits outside {row_count} rows")
            i = 0
            while col:
                if col & 1:
                    rows[i] |= 1 << j
                col >>= 1
                i += 1
        return cls(row_count, len(columns), tuple(rows))

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def zeros(cls, row_count: int, col_count: int) -> BitMatrix:
        return cls(row_count, col_count, (0,) * row_count)

    @classmethod
    def parse(cls, text: str) -> BitMatrix:
        """Read the ``0``/``1`` line format; a blank line ends the matrix."""
        data = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line:
                break
            if set(line) - {"0", "1"}:
                raise ValueError(f"line {lineno}: expected only '0'/'1' characters")
            data.append([int(c) for c in line])
        if data and len({len(r) for r in data}) != 1:
            raise ValueError("rows have unequal lengths")
        return cls.from_lists(data)

    # access

    def entry(self, i: int, j: int) -> int:
        if not (0 <= i < self.row_count and 0 <= j < self.col_count):
            raise IndexError((i, j))
        return (self.rows[i] >> j) & 1

    def column(self, j: int) -> int:
        return self.columns[j]

    @cached_property
    def columns(self) -> tuple[int, ...]:
        cols = [0] * self.col_count
        for i, row in enumerate(self.rows):
            bit = 1 << i
            j = 0
            while row:
                if row & 1:
                    cols[j] |= bit
                row >>= 1
                j += 1
        return tuple(cols)

    def to_lists(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.col_count)] for r in self.rows]

    def to_text(self) -> str:
        """Serialise as one ``0``/``1`` line per row followed by a blank line."""
        lines = ["".join(str((r >> j) & 1) for j in range(self.col_count)) for r in self.rows]
        return "\n".join(lines) + "\n\n"

    def __str__(self):
        return self.to_text().rstrip("\n")

    # derived matrices

    def transpose(self) -> BitMatrix:
        return BitMatrix(self.col_count, self.row_count, self.columns)

    def select_columns(self, indices: Sequence[int]) -> BitMatrix:
        cols = self.columns
        return BitMatrix.from_columns([cols[j] for j in indices], self.row_count)

    def delete_row(self, i: int) -> BitMatrix:
        rows = self.rows[:i] + self.rows[i + 1:]
        return BitMatrix(self.row_count - 1, self.col_count, rows)

    def hstack(self, *others: BitMatrix) -> BitMatrix:
        rows = list(self.rows)
        width = self.col_count
        for other in others:
            if other.row_count != self.row_count:
                raise ValueError("row counts differ")
            rows = [r | (o << width) for r, o in zip(rows, other.rows)]
            width += other.col_count
        return BitMatrix(self.row_count, width, tuple(rows))

    def __add__(self, other: BitMatrix) -> BitMatrix:
        if (self.row_count, self.col_count) != (other.row_count, other.col_count):
            raise ValueError("shapes differ")
        return BitMatrix(self.row_count, self.col_count,
                         tuple(a ^ b for a, b in zip(self.rows, other.rows)))


class XorBasis:
    """Incrementally grown GF(2) span of int vectors.

    Each stored vector carries a companion ``tag`` that is XORed along during
    reduction, so the basis can also track a linear map (vector -> tag).
    """

    __slots__ = ("_rows",)

    def __init__(self, rows: dict[int, tuple[int, int]] | None = None):
        self._rows = {} if rows is None else rows

    def reduce(self, vec: int, tag: int = 0) -> tuple[int, int]:
        rows = self._rows
        while vec:
            entry = rows.get(vec.bit_length() - 1)
            if entry is None:
                break
            vec ^= entry[0]
            tag ^= entry[1]
        return vec, tag

    def add(self, vec: int, tag: int = 0) -> bool:
        vec, tag = self.reduce(vec, tag)
        if not vec:
            return False
        self._rows[vec.bit_length() - 1] = (vec, tag)
        return True

    def contains(self, vec: int) -> bool:
        return self.reduce(vec)[0] == 0

    def copy(self) -> XorBasis:
        return XorBasis(dict(self._rows))

    def __len__(self):
        return len(self._rows)


def vectors_rank(vectors: Iterable[int]) -> int:
    basis = XorBasis()
    for v in vectors:
        basis.add(v)
    return len(basis)


def rank(B: BitMatrix) -> int:
    return vectors_rank(B.rows)


def is_dependent_columns(B: BitMatrix, subset: Iterable[int]) -> bool:
    """True iff the chosen columns are linearly dependent; the empty set is independent."""
    cols = B.columns
    basis = XorBasis()
    for j in subset:
        if not 0 <= j < B.col_count:
            raise IndexError(j)
        if not basis.add(cols[j]):
            return True
    return False


def rref(B: BitMatrix) -> tuple[list[int], list[int]]:
    """Reduced row echelon form with greedy left-to-right pivots.

    Returns the nonzero reduced rows and their pivot columns.  The pivot
    columns are the lexicographically first column basis.
    """
    work = list(B.rows)
    pivots = []
    top = 0
    for j in range(B.col_count):
        bit = 1 << j
        for r in range(top, len(work)):
            if work[r] & bit:
                break
        else:
            continue
        work[top], work[r] = work[r], work[top]
        for s in range(len(work)):
            if s != top and work[s] & bit:
                work[s] ^= work[top]
        pivots.append(j)
        top += 1
        if top == len(work):
            break
    return work[:top], pivots


def column_add_transform(B: BitMatrix, pivot_row: int, kappa: int | Sequence[int]) -> BitMatrix:
    """Add ``kappa`` to every column of ``B`` having a 1 in ``pivot_row``.

    ``kappa`` must vanish in ``pivot_row``; the resulting matrix then has
    exactly the same dependent column sets as ``B``.
    """
    kappa = as_vector(kappa)
    if not 0 <= pivot_row < B.row_count:
        raise IndexError(pivot_row)
    if kappa >> B.row_count:
        raise ValueError("kappa is longer than the column height")
    if (kappa >> pivot_row) & 1:
        raise ValueError("kappa must have a 0 in the pivot row")
    mask = B.rows[pivot_row]
    if not mask:
        raise ValueError(f"row {pivot_row} has no nonzero entry")
    # column additions restricted to the pivot row's support are row operations
    rows = [r ^ mask if (kappa >> i) & 1 else r for i, r in enumerate(B.rows)]
    return BitMatrix(B.row_count, B.col_count, tuple(rows))


def standard_representation(B: BitMatrix) -> tuple[tuple[int, ...], BitMatrix]:
    """Return ``(perm, S)`` with ``S = [I_r | A]`` representing ``M[B]``.

    ``perm[k]`` is the column of ``B`` that sits in position ``k`` of ``S``.
    Rank 0 gives the ``n x n`` zero matrix and full column rank gives ``I_n``.
    """
    n = B.col_count
    reduced, pivots = rref(B)
    r = len(pivots)
    if r == 0:
        return tuple(range(n)), BitMatrix.zeros(n, n)
    if r == n:
        return tuple(range(n)), BitMatrix.identity(n)
    pivot_set = set(pivots)
    perm = tuple(pivots) + tuple(j for j in range(n) if j not in pivot_set)
    rows = []
    for row in reduced:
        out = 0
        for k, j in enumerate(perm):
            if (row >> j) & 1:
                out |= 1 << k
        rows.append(out)
    return perm, BitMatrix(r, n, tuple(rows))
