"""
Dense GF(2) linear algebra on bit-packed rows.

A matrix is a list of Python integers, one per row, with column ``c``
stored in bit ``c`` (LSB first).  All routines track the row operations
they perform, so every derived vector can be expressed as an explicit
combination of the original rows; the set-tracking machinery in the
classification algorithm depends on that.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Combination:
    """A GF(2) combination of rows from a named generator list.

    ``mask`` has bit ``i`` set iff generator ``i`` participates; ``size``
    is the length of the generator list the mask refers to.
    """

    mask: int
    size: int

    def indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.size) if (self.mask >> i) & 1)

    def evaluate(self, rows: list[int]) -> int:
        """XOR together the selected rows; reproduces the combined vector."""
        acc = 0
        for i in self.indices():
            acc ^= rows[i]
        return acc

    def __bool__(self) -> bool:
        return self.mask != 0


@dataclass
class BitMatrix:
    """Row-major bit matrix; row order is significant."""

    rows: list[int]
    cols: int

    def copy(self) -> "BitMatrix":
        return BitMatrix(list(self.rows), self.cols)


def _lowest_bit(value: int) -> int:
    return (value & -value).bit_length() - 1


def rref(matrix: BitMatrix) -> tuple[BitMatrix, BitMatrix, int]:
    """Reduced row echelon form over GF(2) with transform tracking.

    Pivots are chosen leftmost-column first, lowest row index first, and
    elimination clears the pivot column both below and above, so the
    result is canonical for a given row span and row order.

    Args:
        matrix: Input matrix (not modified).

    Returns:
        (echelon, transform, rank): ``echelon.rows[i]`` equals the XOR of
        the input rows selected by ``transform.rows[i]``; ``transform`` is
        invertible; ``rank`` counts the nonzero echelon rows (which come
        first, zero rows are kept at the bottom with their transforms).
    """
    rows = list(matrix.rows)
    m = len(rows)
    trans = [1 << i for i in range(m)]
    pivot_row = 0
    for col in range(matrix.cols):
        bit = 1 << col
        found = -1
        for r in range(pivot_row, m):
            if rows[r] & bit:
                found = r
                break
        if found < 0:
            continue
        rows[pivot_row], rows[found] = rows[found], rows[pivot_row]
        trans[pivot_row], trans[found] = trans[found], trans[pivot_row]
        for r in range(m):
            if r != pivot_row and rows[r] & bit:
                rows[r] ^= rows[pivot_row]
                trans[r] ^= trans[pivot_row]
        pivot_row += 1
        if pivot_row == m:
            break
    return BitMatrix(rows, matrix.cols), BitMatrix(trans, matrix.cols), pivot_row


def rank(rows: list[int], cols: int) -> int:
    """GF(2) rank of a list of bit-packed rows."""
    _, _, r = rref(BitMatrix(list(rows), cols))
    return r


class _Echelon:
    """Incremental echelon basis with per-row combination tracking."""

    def __init__(self, cols: int) -> None:
        self.cols = cols
        self.pivots: dict[int, tuple[int, int]] = {}  # pivot bit -> (row, combo)
        self.count = 0

    def reduce(self, vec: int, combo: int = 0) -> tuple[int, int]:
        for pivot, (row, row_combo) in self.pivots.items():
            if vec & (1 << pivot):
                vec ^= row
                combo ^= row_combo
        return vec, combo

    def add(self, vec: int, tag: int) -> bool:
        """Insert a vector tagged with an original-row mask.

        Returns True if the vector was independent of the current basis.
        """
        vec, combo = self.reduce(vec, tag)
        if vec == 0:
            return False
        self.pivots[_lowest_bit(vec)] = (vec, combo)
        self.count += 1
        return True


def in_span(vector: int, basis: BitMatrix) -> Combination | None:
    """Express a vector over the rows of ``basis`` if possible.

    Args:
        vector: Bit-packed target of width ``basis.cols``.
        basis: Candidate generating rows (need not be independent).

    Returns:
        A :class:`Combination` ``c`` with ``c.evaluate(basis.rows) ==
        vector``, or None when the vector lies outside the row span.
    """
    if vector >> basis.cols:
        raise ValueError("vector is wider than the basis")
    ech = _Echelon(basis.cols)
    for i, row in enumerate(basis.rows):
        ech.add(row, 1 << i)
    residue, combo = ech.reduce(vector, 0)
    if residue != 0:
        return None
    return Combination(combo, len(basis.rows))


@dataclass(frozen=True)
class IntersectionElement:
    """One generator of the span intersection, with row provenance.

    ``vector`` is zero for redundancy witnesses: those arise from linear
    dependencies among the first-argument rows, and each one still carries
    a distinct combination over those rows.
    """

    vector: int
    left_combo: Combination
    right_combo: Combination


def span_intersection(
    c_basis: BitMatrix, v_basis: BitMatrix
) -> tuple[list[IntersectionElement], list[IntersectionElement]]:
    """Intersection of two row spans via the doubled-width block matrix.

    Rows ``[v | v]`` for the second span and ``[c | 0]`` for the first are
    stacked and row reduced; echelon rows of shape ``[0 | w]`` yield the
    intersection generators, and all-zero rows witness dependencies among
    the ``c`` rows.  The rows of ``v_basis`` must be independent so that
    zero rows can be attributed unambiguously.

    Returns:
        (elements, redundancies): intersection generators (nonzero
        ``vector``) and zero-vector redundancy witnesses.  Both carry the
        combination over ``c_basis`` rows (``left_combo``) and over
        ``v_basis`` rows (``right_combo``) that produces them.
    """
    if c_basis.cols != v_basis.cols:
        raise ValueError("width mismatch between the two bases")
    width = c_basis.cols
    m = len(v_basis.rows)
    k = len(c_basis.rows)
    block_rows = [row | (row << width) for row in v_basis.rows]
    block_rows += list(c_basis.rows)
    echelon, transform, _ = rref(BitMatrix(block_rows, 2 * width))
    low_mask = (1 << width) - 1
    v_mask = (1 << m) - 1
    elements: list[IntersectionElement] = []
    redundancies: list[IntersectionElement] = []
    for row, combo in zip(echelon.rows, transform.rows):
        if row & low_mask:
            continue
        left = Combination(combo >> m, k)
        right = Combination(combo & v_mask, m)
        entry = IntersectionElement(row >> width, left, right)
        if entry.vector:
            elements.append(entry)
        elif left:
            redundancies.append(entry)
    return elements, redundancies


def nullspace(matrix: BitMatrix) -> list[int]:
    """Basis of ``{v : parity(v & row) == 0 for every row}``."""
    echelon, _, r = rref(matrix)
    pivot_cols = [_lowest_bit(row) for row in echelon.rows[:r]]
    pivot_set = set(pivot_cols)
    free_cols = [c for c in range(matrix.cols) if c not in pivot_set]
    basis = []
    for free in free_cols:
        vec = 1 << free
        for row, pivot in zip(echelon.rows[:r], pivot_cols):
            if (row >> free) & 1:
                vec |= 1 << pivot
        basis.append(vec)
    return basis


def solve_linear(
    rows: list[int], rhs: list[int], cols: int
) -> tuple[int, list[int]] | None:
    """Solve ``parity(v & rows[i]) == rhs[i]`` for all i.

    Returns:
        (particular, homogeneous_basis), or None when inconsistent.
    """
    augmented = [row | (bit << cols) for row, bit in zip(rows, rhs)]
    echelon, _, r = rref(BitMatrix(augmented, cols + 1))
    particular = 0
    for row in echelon.rows[:r]:
        pivot = _lowest_bit(row)
        if pivot == cols:
            return None
        if (row >> cols) & 1:
            particular |= 1 << pivot
    return particular, nullspace(BitMatrix(rows, cols))


def minimize_over_span(vector: int, basis: list[int], cols: int) -> int:
    """Smallest integer value of ``vector ^ s`` over the span of ``basis``.

    Used to pick a canonical (lexicographically least) representative of
    an affine solution set.
    """
    by_top: dict[int, int] = {}
    for vec in basis:
        while vec:
            top = vec.bit_length() - 1
            if top in by_top:
                vec ^= by_top[top]
            else:
                by_top[top] = vec
                break
    for top in sorted(by_top, reverse=True):
        if (vector >> top) & 1:
            vector ^= by_top[top]
    return vector


def kernel_under_form(generators: BitMatrix) -> BitMatrix:
    """Basis of all symplectic vectors orthogonal to every generator row.

    Rows are 2n-bit vectors (x block low, z block high); orthogonality is
    under the symplectic form, i.e. the returned vectors encode exactly
    the Pauli operators commuting with every input operator.
    """
    if generators.cols % 2:
        raise ValueError("symplectic rows must have even width")
    n = generators.cols // 2
    low = (1 << n) - 1
    swapped = [((row & low) << n) | (row >> n) for row in generators.rows]
    return BitMatrix(nullspace(BitMatrix(swapped, 2 * n)), 2 * n)
