"""Bit-packed linear algebra over GF(2).

Vectors are numpy ``uint64`` arrays holding 64 bits per word, little-endian
within each word (bit ``j`` lives at ``words[j >> 6]``, position ``j & 63``).
Word size is internal; callers only ever see logical bit counts.
"""

from __future__ import annotations

import numpy as np

WORD_BITS = 64


def n_words(nbits: int) -> int:
    return (nbits + WORD_BITS - 1) // WORD_BITS


def zeros(nbits: int) -> np.ndarray:
    return np.zeros(n_words(nbits), dtype=np.uint64)


def from_bool(bits) -> np.ndarray:
    """Pack a boolean/0-1 array into a word vector."""
    bits = np.asarray(bits, dtype=np.uint8)
    pad = n_words(bits.size) * WORD_BITS - bits.size
    if pad:
        bits = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)])
    return np.packbits(bits, bitorder="little").view(np.uint64)


def to_bool(words: np.ndarray, nbits: int) -> np.ndarray:
    return np.unpackbits(words.view(np.uint8), bitorder="little")[:nbits].astype(bool)


def from_indices(indices, nbits: int) -> np.ndarray:
    words = zeros(nbits)
    idx = np.asarray(indices, dtype=np.int64)
    if idx.size:
        np.bitwise_or.at(words, idx >> 6, np.uint64(1) << (idx & 63).astype(np.uint64))
    return words


def nonzero_indices(words: np.ndarray, nbits: int) -> np.ndarray:
    return np.nonzero(to_bool(words, nbits))[0]


def get_bit(words: np.ndarray, j: int) -> int:
    return int((words[j >> 6] >> np.uint64(j & 63)) & np.uint64(1))


def set_bit(words: np.ndarray, j: int, value: int = 1) -> None:
    mask = np.uint64(1) << np.uint64(j & 63)
    if value:
        words[j >> 6] |= mask
    else:
        words[j >> 6] &= ~mask


def popcount(words: np.ndarray) -> int:
    return int(np.bitwise_count(words).sum())


def dot(a: np.ndarray, b: np.ndarray) -> int:
    """Inner product mod 2."""
    return popcount(a & b) & 1


def is_zero(words: np.ndarray) -> bool:
    return not words.any()


def to_int(words: np.ndarray) -> int:
    """Whole vector as a python int (hashable key; bit j of the int = bit j)."""
    return int.from_bytes(words.tobytes(), "little")


def from_int(value: int, nbits: int) -> np.ndarray:
    nb = n_words(nbits) * 8
    return np.frombuffer(value.to_bytes(nb, "little"), dtype=np.uint64).copy()


class BitMatrix:
    """Dense GF(2) matrix, one packed word-row per logical row."""

    __slots__ = ("words", "nrows", "ncols")

    def __init__(self, words: np.ndarray, ncols: int):
        words = np.ascontiguousarray(words, dtype=np.uint64)
        if words.ndim != 2:
            raise ValueError("expected a 2-d word array")
        self.words = words
        self.nrows = words.shape[0]
        self.ncols = ncols

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "BitMatrix":
        return cls(np.zeros((nrows, n_words(ncols)), dtype=np.uint64), ncols)

    @classmethod
    def from_rows(cls, rows, ncols: int) -> "BitMatrix":
        rows = list(rows)
        if not rows:
            return cls.zeros(0, ncols)
        return cls(np.vstack(rows), ncols)

    @classmethod
    def from_bool_array(cls, arr) -> "BitMatrix":
        arr = np.asarray(arr, dtype=np.uint8)
        nrows, ncols = arr.shape
        mat = cls.zeros(nrows, ncols)
        if nrows == 0 or ncols == 0:
            return mat
        pad = mat.words.shape[1] * WORD_BITS - ncols
        if pad:
            arr = np.concatenate([arr, np.zeros((nrows, pad), dtype=np.uint8)], axis=1)
        packed = np.ascontiguousarray(np.packbits(arr, axis=1, bitorder="little"))
        mat.words = packed.view(np.uint64)
        return mat

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.words.copy(), self.ncols)

    def row(self, i: int) -> np.ndarray:
        return self.words[i]

    def get(self, i: int, j: int) -> int:
        return get_bit(self.words[i], j)

    def set(self, i: int, j: int, value: int = 1) -> None:
        set_bit(self.words[i], j, value)

    def to_bool_array(self) -> np.ndarray:
        if self.nrows == 0:
            return np.zeros((0, self.ncols), dtype=bool)
        full = np.unpackbits(self.words.view(np.uint8), axis=1, bitorder="little")
        return full[:, : self.ncols].astype(bool)

    def column_bits(self, j: int) -> np.ndarray:
        """Boolean column extraction, vectorized over rows."""
        w, b = j >> 6, np.uint64(j & 63)
        return ((self.words[:, w] >> b) & np.uint64(1)).astype(bool)

    def select_columns(self, cols) -> "BitMatrix":
        """Submatrix keeping the given columns, in the given order."""
        cols = np.asarray(cols, dtype=np.int64)
        sub = BitMatrix.zeros(self.nrows, len(cols))
        if len(cols) == 0 or self.nrows == 0:
            return sub
        full = np.unpackbits(self.words.view(np.uint8), axis=1, bitorder="little")[:, cols]
        pad = sub.words.shape[1] * WORD_BITS - len(cols)
        if pad:
            full = np.concatenate([full, np.zeros((self.nrows, pad), dtype=np.uint8)], axis=1)
        packed = np.ascontiguousarray(np.packbits(full, axis=1, bitorder="little"))
        sub.words = packed.view(np.uint64)
        return sub

    def select_rows(self, rows) -> "BitMatrix":
        return BitMatrix(self.words[np.asarray(rows, dtype=np.int64)].copy(), self.ncols)

    def transpose(self) -> "BitMatrix":
        out = BitMatrix.zeros(self.ncols, self.nrows)
        if self.nrows == 0 or self.ncols == 0:
            return out
        full = np.unpackbits(self.words.view(np.uint8), axis=1, bitorder="little")[:, : self.ncols]
        fullT = np.ascontiguousarray(full.T)
        pad = out.words.shape[1] * WORD_BITS - self.nrows
        if pad:
            fullT = np.concatenate([fullT, np.zeros((self.ncols, pad), dtype=np.uint8)], axis=1)
        packed = np.ascontiguousarray(np.packbits(fullT, axis=1, bitorder="little"))
        out.words = packed.view(np.uint64)
        return out

    def parities_with(self, vec: np.ndarray) -> np.ndarray:
        """Row-wise inner products with ``vec``, mod 2 (uint8 array)."""
        return (np.bitwise_count(self.words & vec).sum(axis=1) & 1).astype(np.uint8)

    def rref(self) -> tuple["BitMatrix", list[int]]:
        """Reduced row-echelon form with deterministic leftmost pivoting.

        Returns the reduced matrix (zero rows dropped) and the pivot columns
        in increasing order, so repeated runs give identical output.
        """
        work = self.words.copy()
        nrows = self.nrows
        pivots: list[int] = []
        r = 0
        for col in range(self.ncols):
            if r == nrows:
                break
            w, b = col >> 6, np.uint64(col & 63)
            colbits = ((work[r:, w] >> b) & np.uint64(1)).astype(bool)
            hits = np.nonzero(colbits)[0]
            if hits.size == 0:
                continue
            pr = r + int(hits[0])
            if pr != r:
                work[[r, pr]] = work[[pr, r]]
            mask = ((work[:, w] >> b) & np.uint64(1)).astype(bool)
            mask[r] = False
            if mask.any():
                work[mask] ^= work[r]
            pivots.append(col)
            r += 1
        return BitMatrix(work[: len(pivots)].copy(), self.ncols), pivots

    def rank(self) -> int:
        return len(self.rref()[1])


def reduce_by_rref(rref: BitMatrix, pivots: list[int], vec: np.ndarray) -> np.ndarray:
    """Canonical residue of ``vec`` modulo the row space of an RREF basis.

    The residue is zero iff ``vec`` lies in the row space; two vectors share a
    residue iff they differ by a row-space element.
    """
    out = vec.copy()
    for r, col in enumerate(pivots):
        if get_bit(out, col):
            out ^= rref.words[r]
    return out


def in_rowspan(rref: BitMatrix, pivots: list[int], vec: np.ndarray) -> bool:
    return is_zero(reduce_by_rref(rref, pivots, vec))


def gf2_in_span(basis: BitMatrix, vec: np.ndarray) -> bool:
    """Membership of ``vec`` in the row space of ``basis`` (any basis)."""
    rref, pivots = basis.rref()
    return in_rowspan(rref, pivots, vec)


def gf2_solve(mat: BitMatrix, rhs: np.ndarray) -> np.ndarray | None:
    """Solve ``mat @ x = rhs`` over GF(2).

    Returns one solution (free variables set to zero, leftmost-pivot
    elimination, so the witness is reproducible), or None if inconsistent.
    ``rhs`` may be a packed word vector over ``mat.nrows`` bits or a plain
    0/1 array of length ``mat.nrows``.
    """
    rhs = np.asarray(rhs)
    if rhs.dtype == np.uint64:
        b = to_bool(rhs, mat.nrows).astype(np.uint8)
    else:
        if rhs.size != mat.nrows:
            raise ValueError("rhs length does not match row count")
        b = rhs.astype(np.uint8) & 1
    work = mat.words.copy()
    nrows = mat.nrows
    pivots: list[tuple[int, int]] = []  # (row, col)
    r = 0
    for col in range(mat.ncols):
        if r == nrows:
            break
        w, s = col >> 6, np.uint64(col & 63)
        colbits = ((work[r:, w] >> s) & np.uint64(1)).astype(bool)
        hits = np.nonzero(colbits)[0]
        if hits.size == 0:
            continue
        pr = r + int(hits[0])
        if pr != r:
            work[[r, pr]] = work[[pr, r]]
            b[[r, pr]] = b[[pr, r]]
        mask = ((work[:, w] >> s) & np.uint64(1)).astype(bool)
        mask[r] = False
        if mask.any():
            work[mask] ^= work[r]
            if b[r]:
                b[mask] ^= 1
        pivots.append((r, col))
        r += 1
    # Rows past the pivot block are all-zero; a set rhs bit there means
    # the system is inconsistent.
    if b[r:].any():
        return None
    x = zeros(mat.ncols)
    for row, col in pivots:
        if b[row]:
            set_bit(x, col, 1)
    return x


def nullspace(mat: BitMatrix) -> BitMatrix:
    """Basis of ``{x : mat @ x = 0}``, one packed row per basis vector."""
    rref, pivots = mat.rref()
    pivot_set = set(pivots)
    free_cols = [c for c in range(mat.ncols) if c not in pivot_set]
    if not free_cols:
        return BitMatrix.zeros(0, mat.ncols)
    rref_bool = rref.to_bool_array()
    basis = np.zeros((len(free_cols), mat.ncols), dtype=np.uint8)
    basis[np.arange(len(free_cols)), free_cols] = 1
    if pivots:
        basis[:, pivots] = rref_bool[:, free_cols].T
    return BitMatrix.from_bool_array(basis)


def matmul_vec(mat: BitMatrix, x: np.ndarray) -> np.ndarray:
    """``mat @ x`` over GF(2), returned as a packed vector over nrows bits."""
    return from_bool(mat.parities_with(x))
