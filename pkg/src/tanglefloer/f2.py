"""Linear algebra over F2 with rows packed into Python ints."""

from __future__ import annotations


def echelon(rows):
    """Reduced row echelon form.  Returns (pivot rows, pivot columns)."""
    pivots = []
    cols = []
    for r in rows:
        for p, c in zip(pivots, cols):
            if r >> c & 1:
                r ^= p
        if r:
            c = r.bit_length() - 1
            for i, p in enumerate(pivots):
                if p >> c & 1:
                    pivots[i] = p ^ r
            pivots.append(r)
            cols.append(c)
    return pivots, cols


def rank(rows):
    return len(echelon(rows)[0])


def solve(rows, rhs):
    """One solution x of A x = b, or None.

    ``rows[i]`` is the bitmask of row i of A and ``rhs[i]`` its right-hand
    bit.  Free variables are set to zero.
    """
    # append the rhs as bit 0 and shift the variables up by one
    aug = [(r << 1) | (b & 1) for r, b in zip(rows, rhs)]
    pivots, cols = echelon(aug)
    x = 0
    for p, c in zip(pivots, cols):
        if c == 0:
            return None
        if p & 1:
            x |= 1 << (c - 1)
    return x


def matrix_rank(entries, rows, cols):
    """Rank of a sparse matrix given as a set of (row, col) index pairs."""
    col_index = {c: k for k, c in enumerate(cols)}
    packed = {r: 0 for r in rows}
    for r, c in entries:
        if r in packed and c in col_index:
            packed[r] ^= 1 << col_index[c]
    return rank(packed.values())
