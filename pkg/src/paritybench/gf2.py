"""GF(2) linear algebra on bit-packed rows.

Rows are Python ints used as bit vectors, which keeps arbitrary widths cheap
and makes XOR the row operation.
"""

from __future__ import annotations

from typing import Iterable, Sequence


def popcount(x: int) -> int:
    return bin(x).count("1")


def bits_of(x: int) -> list[int]:
    out = []
    i = 0
    while x:
        if x & 1:
            out.append(i)
        x >>= 1
        i += 1
    return out


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def rank(rows: Sequence[int]) -> int:
    """GF(2) rank by Gaussian elimination with pivots on the highest set bit."""
    pivots: dict[int, int] = {}
    r = 0
    for row in rows:
        while row:
            top = row.bit_length() - 1
            if top in pivots:
                row ^= pivots[top]
            else:
                pivots[top] = row
                r += 1
                break
    return r


def nullspace(rows: Sequence[int]) -> list[int]:
    """Basis of {x : XOR of rows[k] over bits k of x == 0}.

    Each returned vector is a mask over row indices. The row reduction
    carries an identity tag per row; rows that reduce to zero yield
    the dependency recorded in their tag.
    """
    pivots: dict[int, tuple[int, int]] = {}
    basis = []
    for k, row in enumerate(rows):
        tag = 1 << k
        while row:
            top = row.bit_length() - 1
            if top in pivots:
                prow, ptag = pivots[top]
                row ^= prow
                tag ^= ptag
            else:
                pivots[top] = (row, tag)
                break
        if not row:
            basis.append(tag)
    return basis


class IncrementalBasis:
    """Echelon basis supporting independence tests and insertion."""

    def __init__(self) -> None:
        self._pivots: dict[int, int] = {}

    def __len__(self) -> int:
        return len(self._pivots)

    def reduce(self, v: int) -> int:
        while v:
            top = v.bit_length() - 1
            p = self._pivots.get(top)
            if p is None:
                return v
            v ^= p
        return 0

    def add(self, v: int) -> bool:
        """Insert ``v``; returns False when it is already in the span."""
        r = self.reduce(v)
        if not r:
            return False
        self._pivots[r.bit_length() - 1] = r
        return True
