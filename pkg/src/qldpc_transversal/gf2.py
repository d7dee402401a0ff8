"""Dense bit-packed linear algebra over GF(2).

Matrices are stored row-major, one bit per entry, in little-endian ``uint64``
words: column ``j`` of a row lives in word ``j // 64`` at bit ``j % 64``.
Padding bits past the last column are always zero, so whole-word operations
(XOR, AND, popcount) never need masking.

Besides the usual rank / kernel / product machinery this module carries the
elementwise ("dot") calculus used by the transversality conditions: the
AND-product of rows, fold products of distinct rows, and the
inclusion-exclusion expansion of the weight of an XOR.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Sequence
from functools import cached_property

import numpy as np

WORD = 64
_WORD_DTYPE = np.dtype("<u8")


class DimensionError(ValueError):
    """Operand shapes are incompatible."""


class BmatFormatError(ValueError):
    """Malformed text matrix."""


def _nwords(cols: int) -> int:
    return (cols + WORD - 1) // WORD


def _pack(dense: np.ndarray) -> np.ndarray:
    rows, cols = dense.shape
    nw = _nwords(cols)
    padded = np.zeros((rows, nw * WORD), dtype=np.uint8)
    padded[:, :cols] = dense
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view(_WORD_DTYPE).reshape(rows, nw)


def _unpack(words: np.ndarray, cols: int) -> np.ndarray:
    rows = words.shape[0]
    if rows == 0 or cols == 0:
        return np.zeros((rows, cols), dtype=np.uint8)
    raw = np.ascontiguousarray(words).view(np.uint8).reshape(rows, -1)
    return np.unpackbits(raw, axis=1, bitorder="little")[:, :cols]


def _int_to_words(value: int, nw: int) -> np.ndarray:
    return np.frombuffer(value.to_bytes(nw * 8, "little"), dtype=_WORD_DTYPE).copy()


def _popcount_words(words: np.ndarray) -> np.ndarray:
    """Popcount along the last axis."""
    if words.size == 0:
        return np.zeros(words.shape[:-1], dtype=np.int64)
    raw = words.view(np.uint8)
    return np.unpackbits(raw, axis=-1).sum(axis=-1, dtype=np.int64)


class BitVector:
    """Immutable bit-packed vector over GF(2)."""

    __slots__ = ("_len", "_words")

    def __init__(self, words: np.ndarray, length: int):
        words = np.asarray(words, dtype=_WORD_DTYPE)
        if words.shape != (_nwords(length),):
            raise DimensionError(f"expected {_nwords(length)} words for length {length}")
        words = words.copy()
        words.flags.writeable = False
        self._words = words
        self._len = length

    @classmethod
    def from_bits(cls, bits: Iterable[int] | str) -> BitVector:
        if isinstance(bits, str):
            bits = [_parse_bit(ch) for ch in bits]
        arr = np.asarray(list(bits), dtype=np.uint8).reshape(1, -1) & 1
        return cls(_pack(arr)[0], arr.shape[1])

    @classmethod
    def from_int(cls, value: int, length: int) -> BitVector:
        if value < 0 or value >> length:
            raise DimensionError(f"value does not fit in {length} bits")
        return cls(_int_to_words(value, _nwords(length)), length)

    @classmethod
    def zeros(cls, length: int) -> BitVector:
        return cls(np.zeros(_nwords(length), dtype=_WORD_DTYPE), length)

    @classmethod
    def ones(cls, length: int) -> BitVector:
        return cls.from_int((1 << length) - 1, length)

    @classmethod
    def unit(cls, index: int, length: int) -> BitVector:
        return cls.from_int(1 << index, length)

    def __len__(self) -> int:
        return self._len

    @property
    def words(self) -> np.ndarray:
        return self._words

    def to_int(self) -> int:
        return int.from_bytes(self._words.tobytes(), "little")

    def to_array(self) -> np.ndarray:
        return _unpack(self._words.reshape(1, -1), self._len)[0]

    def weight(self) -> int:
        return int(_popcount_words(self._words))

    def support(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.to_array())]

    def __getitem__(self, index: int) -> int:
        if not 0 <= index < self._len:
            raise IndexError(index)
        return int(self._words[index // WORD] >> np.uint64(index % WORD)) & 1

    def _check(self, other: BitVector) -> None:
        if len(other) != self._len:
            raise DimensionError(f"length mismatch: {self._len} vs {len(other)}")

    def __and__(self, other: BitVector) -> BitVector:
        self._check(other)
        return BitVector(self._words & other._words, self._len)

    def __xor__(self, other: BitVector) -> BitVector:
        self._check(other)
        return BitVector(self._words ^ other._words, self._len)

    __add__ = __xor__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self._len == other._len and bool(np.array_equal(self._words, other._words))

    def __hash__(self) -> int:
        return hash((self._len, self._words.tobytes()))

    def __str__(self) -> str:
        return "".join("1" if b else "0" for b in self.to_array())

    def __repr__(self) -> str:
        return f"BitVector('{self}')"


def _parse_bit(ch: str) -> int:
    if ch == "0":
        return 0
    if ch == "1":
        return 1
    raise BmatFormatError(f"invalid bit character {ch!r}")


class BitMatrix:
    """Immutable dense matrix over GF(2) with bit-packed rows.

    Build one with :meth:`from_dense`, :meth:`from_rows`, :meth:`parse` or the
    ``zeros`` / ``identity`` helpers.  Arithmetic returns new matrices.
    """

    def __init__(self, words: np.ndarray, cols: int):
        words = np.asarray(words, dtype=_WORD_DTYPE)
        if words.ndim != 2 or words.shape[1] != _nwords(cols):
            raise DimensionError(f"word array shape {words.shape} does not fit {cols} columns")
        words = np.ascontiguousarray(words).copy()
        if cols % WORD and words.shape[0]:
            tail = np.uint64((1 << (cols % WORD)) - 1)
            if np.any(words[:, -1] & ~tail):
                raise ValueError("padding bits beyond the last column must be zero")
        words.flags.writeable = False
        self._words = words
        self._cols = cols

    # construction -----------------------------------------------------

    @classmethod
    def from_dense(cls, dense: np.ndarray | Sequence[Sequence[int]]) -> BitMatrix:
        arr = np.asarray(dense)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2:
            raise DimensionError("dense input must be two-dimensional")
        arr = (arr.astype(np.int64) & 1).astype(np.uint8)
        return cls(_pack(arr), arr.shape[1])

    @classmethod
    def from_rows(cls, rows: Iterable[str | Sequence[int]], cols: int | None = None) -> BitMatrix:
        parsed = []
        for row in rows:
            if isinstance(row, str):
                row = [_parse_bit(ch) for ch in row]
            parsed.append(list(row))
        if not parsed:
            return cls.zeros(0, cols or 0)
        return cls.from_dense(np.array(parsed, dtype=np.uint8))

    @classmethod
    def from_ints(cls, values: Iterable[int], cols: int) -> BitMatrix:
        nw = _nwords(cols)
        values = list(values)
        words = np.zeros((len(values), nw), dtype=_WORD_DTYPE)
        for i, v in enumerate(values):
            if v < 0 or v >> cols:
                raise DimensionError(f"row {i} does not fit in {cols} columns")
            words[i] = _int_to_words(v, nw)
        return cls(words, cols)

    @classmethod
    def from_vectors(cls, vectors: Sequence[BitVector], cols: int | None = None) -> BitMatrix:
        if not vectors:
            return cls.zeros(0, cols or 0)
        length = len(vectors[0])
        if any(len(v) != length for v in vectors):
            raise DimensionError("vectors have different lengths")
        return cls(np.stack([v.words for v in vectors]), length)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> BitMatrix:
        if rows < 0 or cols < 0:
            raise DimensionError("negative dimension")
        return cls(np.zeros((rows, _nwords(cols)), dtype=_WORD_DTYPE), cols)

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @classmethod
    def ones(cls, rows: int, cols: int) -> BitMatrix:
        return cls.from_dense(np.ones((rows, cols), dtype=np.uint8))

    @classmethod
    def permutation(cls, perm: Sequence[int]) -> BitMatrix:
        """Permutation matrix with a 1 at ``(i, perm[i])`` for every row ``i``."""
        n = len(perm)
        if sorted(perm) != list(range(n)):
            raise ValueError("not a permutation")
        dense = np.zeros((n, n), dtype=np.uint8)
        dense[np.arange(n), list(perm)] = 1
        return cls.from_dense(dense)

    @classmethod
    def parse(cls, text: str) -> BitMatrix:
        """Parse the ``bmat`` text format (header ``rows cols`` then one 0/1 line per row)."""
        lines = [ln.strip() for ln in text.strip().splitlines()]
        if not lines:
            raise BmatFormatError("empty input")
        header = lines[0].split()
        if len(header) != 2 or not all(tok.isdigit() for tok in header):
            raise BmatFormatError(f"bad header {lines[0]!r}")
        rows, cols = int(header[0]), int(header[1])
        body = lines[1:]
        if cols == 0:
            body = [ln for ln in body if ln]
            if body:
                raise BmatFormatError("zero-column matrix must have empty rows")
            return cls.zeros(rows, 0)
        if len(body) != rows:
            raise BmatFormatError(f"expected {rows} rows, got {len(body)}")
        dense = np.zeros((rows, cols), dtype=np.uint8)
        for i, line in enumerate(body):
            if len(line) != cols:
                raise BmatFormatError(f"row {i} has {len(line)} entries, expected {cols}")
            dense[i] = [_parse_bit(ch) for ch in line]
        return cls.from_dense(dense)

    def to_bmat(self) -> str:
        lines = [f"{self.rows} {self.cols}"]
        lines.extend("".join("1" if b else "0" for b in row) for row in self.to_dense())
        if self.cols == 0:
            lines.extend("" for _ in range(self.rows))
        return "\n".join(lines) + "\n"

    # basic access -----------------------------------------------------

    @property
    def rows(self) -> int:
        return self._words.shape[0]

    @property
    def cols(self) -> int:
        return self._cols

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self._cols)

    @property
    def words(self) -> np.ndarray:
        return self._words

    @cached_property
    def _dense(self) -> np.ndarray:
        dense = _unpack(self._words, self._cols)
        dense.flags.writeable = False
        return dense

    def to_dense(self) -> np.ndarray:
        return self._dense.copy()

    @cached_property
    def _ints(self) -> tuple[int, ...]:
        return tuple(int.from_bytes(self._words[i].tobytes(), "little") for i in range(self.rows))

    def row_ints(self) -> tuple[int, ...]:
        """Rows as Python ints (bit ``j`` is column ``j``)."""
        return self._ints

    def row(self, i: int) -> BitVector:
        return BitVector(self._words[i], self._cols)

    def __iter__(self) -> Iterator[BitVector]:
        return (self.row(i) for i in range(self.rows))

    def __getitem__(self, key):
        if isinstance(key, tuple):
            i, j = key
            return int(self._dense[i, j])
        if isinstance(key, (int, np.integer)):
            return self.row(int(key))
        return BitMatrix(self._words[key].reshape(-1, self._words.shape[1]), self._cols)

    def select_rows(self, indices: Sequence[int]) -> BitMatrix:
        idx = np.asarray(list(indices), dtype=np.int64)
        return BitMatrix(self._words[idx].reshape(len(idx), self._words.shape[1]), self._cols)

    def select_cols(self, indices: Sequence[int]) -> BitMatrix:
        return BitMatrix.from_dense(self._dense[:, list(indices)].reshape(self.rows, -1))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._words, other._words))

    def __hash__(self) -> int:
        return hash((self.shape, self._words.tobytes()))

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"

    def __str__(self) -> str:
        return self.to_bmat()

    # arithmetic -------------------------------------------------------

    @property
    def T(self) -> BitMatrix:
        return self.transpose()

    def transpose(self) -> BitMatrix:
        return BitMatrix.from_dense(self._dense.T)

    def __xor__(self, other: BitMatrix) -> BitMatrix:
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        return BitMatrix(self._words ^ other._words, self._cols)

    __add__ = __xor__

    def __and__(self, other: BitMatrix) -> BitMatrix:
        if self.shape != other.shape:
            raise DimensionError(f"cannot AND {self.shape} and {other.shape}")
        return BitMatrix(self._words & other._words, self._cols)

    def __matmul__(self, other: BitMatrix) -> BitMatrix:
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        if self.rows == 0 or other.cols == 0 or self.cols == 0:
            return BitMatrix.zeros(self.rows, other.cols)
        # float BLAS is exact for inner dimensions far below 2**53
        prod = self._dense.astype(np.float64) @ other._dense.astype(np.float64)
        return BitMatrix.from_dense(np.remainder(prod, 2).astype(np.uint8))

    def mul_vec(self, v: BitVector) -> BitVector:
        """``self @ v`` for a column vector ``v``."""
        if len(v) != self.cols:
            raise DimensionError(f"cannot multiply {self.shape} by vector of length {len(v)}")
        bits = _popcount_words(self._words & v.words[None, :]) & 1
        return BitVector.from_bits(bits.tolist()) if self.rows else BitVector.zeros(0)

    def __pow__(self, exponent: int) -> BitMatrix:
        if self.rows != self.cols:
            raise DimensionError("power of a non-square matrix")
        result = BitMatrix.identity(self.rows)
        base = self
        while exponent:
            if exponent & 1:
                result = result @ base
            base = base @ base
            exponent >>= 1
        return result

    def is_zero(self) -> bool:
        return not np.any(self._words)

    def row_weights(self) -> np.ndarray:
        return _popcount_words(self._words)

    def col_weights(self) -> np.ndarray:
        return self._dense.sum(axis=0, dtype=np.int64)

    def rank(self) -> int:
        return rank(self)

    def kernel(self) -> BitMatrix:
        return kernel(self)


def hstack(blocks: Sequence[BitMatrix]) -> BitMatrix:
    rows = {b.rows for b in blocks}
    if len(rows) > 1:
        raise DimensionError(f"hstack of matrices with row counts {sorted(rows)}")
    return BitMatrix.from_dense(np.hstack([b.to_dense() for b in blocks]))


def vstack(blocks: Sequence[BitMatrix]) -> BitMatrix:
    cols = {b.cols for b in blocks}
    if len(cols) > 1:
        raise DimensionError(f"vstack of matrices with column counts {sorted(cols)}")
    return BitMatrix(np.vstack([b.words for b in blocks]), blocks[0].cols)


def block_diag(blocks: Sequence[BitMatrix]) -> BitMatrix:
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    dense = np.zeros((rows, cols), dtype=np.uint8)
    r = c = 0
    for b in blocks:
        dense[r : r + b.rows, c : c + b.cols] = b.to_dense()
        r += b.rows
        c += b.cols
    return BitMatrix.from_dense(dense)


def kron(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """Kronecker product over GF(2)."""
    return BitMatrix.from_dense(np.kron(a.to_dense(), b.to_dense()))


# elimination ----------------------------------------------------------


def rref(m: BitMatrix) -> tuple[BitMatrix, list[int]]:
    """Reduced row echelon form and pivot columns.

    The returned matrix keeps only the ``rank`` nonzero rows.
    """
    work = np.array(m.words, copy=True)
    nrows = work.shape[0]
    pivots: list[int] = []
    r = 0
    for c in range(m.cols):
        if r == nrows:
            break
        w = c // WORD
        bit = np.uint64(1) << np.uint64(c % WORD)
        below = np.flatnonzero(work[r:, w] & bit)
        if below.size == 0:
            continue
        p = r + int(below[0])
        if p != r:
            work[[r, p]] = work[[p, r]]
        hits = (work[:, w] & bit) != 0
        hits[r] = False
        work[hits] ^= work[r]
        pivots.append(c)
        r += 1
    return BitMatrix(work[:r], m.cols), pivots


def rank(m: BitMatrix) -> int:
    """GF(2) rank."""
    if m.rows == 0 or m.cols == 0:
        return 0
    return len(rref(m)[1])


def kernel(m: BitMatrix) -> BitMatrix:
    """Basis (as rows) of ``{x : m x = 0}``; a 0 x n matrix has kernel ``I_n``."""
    n = m.cols
    if m.rows == 0:
        return BitMatrix.identity(n)
    reduced, pivots = rref(m)
    free = [c for c in range(n) if c not in set(pivots)]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    if free:
        basis[:, free] = np.eye(len(free), dtype=np.uint8)
        if pivots:
            basis[:, pivots] = reduced.to_dense()[:, free].T
    return BitMatrix.from_dense(basis) if free else BitMatrix.zeros(0, n)


def inverse(m: BitMatrix) -> BitMatrix:
    """Inverse of a square invertible matrix."""
    n = m.rows
    if m.cols != n:
        raise DimensionError("inverse of a non-square matrix")
    aug = hstack([m, BitMatrix.identity(n)])
    reduced, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise np.linalg.LinAlgError("matrix is singular over GF(2)")
    return reduced.select_cols(range(n, 2 * n))


class RowSpace:
    """Incremental row-span membership over Python-int rows.

    Keeps an echelon basis keyed by leading bit, so ``reduce`` costs one XOR per
    basis vector whose pivot is present.
    """

    def __init__(self, rows: Iterable[int] = ()):
        self._basis: dict[int, int] = {}
        for r in rows:
            self.add(r)

    def __len__(self) -> int:
        return len(self._basis)

    def reduce(self, v: int) -> int:
        while v:
            top = v.bit_length() - 1
            b = self._basis.get(top)
            if b is None:
                return v
            v ^= b
        return 0

    def add(self, v: int) -> bool:
        v = self.reduce(v)
        if not v:
            return False
        self._basis[v.bit_length() - 1] = v
        return True

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0


def in_rowspan(m: BitMatrix, v: BitVector) -> bool:
    return RowSpace(m.row_ints()).contains(v.to_int())


# elementwise calculus -------------------------------------------------


def dot_rows(x: BitVector, y: BitVector) -> BitVector:
    """Elementwise product ``x . y``: positions where both are 1."""
    if len(x) != len(y):
        raise DimensionError(f"length mismatch: {len(x)} vs {len(y)}")
    return x & y


def fold_products(m: BitMatrix, i: int, *, skip_zero: bool = False) -> BitMatrix:
    """All ``i``-fold elementwise products of distinct rows of ``m``.

    One row per ``i``-subset of row indices, in lexicographic subset order.
    With ``skip_zero`` the all-zero products are dropped.
    """
    if i < 1:
        raise ValueError("fold order must be at least 1")
    if i == 1:
        return m
    ints = m.row_ints()
    out = []
    for subset in itertools.combinations(range(m.rows), i):
        prod = ints[subset[0]]
        for k in subset[1:]:
            prod &= ints[k]
            if not prod and skip_zero:
                break
        if prod or not skip_zero:
            out.append(prod)
    return BitMatrix.from_ints(out, m.cols)


def nonzero_products(rows: Sequence[int], max_order: int, mask: int = -1) -> Iterator[tuple[tuple[int, ...], int]]:
    """Yield ``(subset, product)`` for every subset of size 1..max_order whose
    AND-product (restricted to ``mask``) is nonzero.

    Subsets come out depth-first in lexicographic order; zero products prune
    their whole subtree, which is what makes the higher orders affordable on
    sparse matrices.
    """
    masked = [r & mask for r in rows]
    n = len(masked)

    def extend(start: int, subset: tuple[int, ...], prod: int):
        for k in range(start, n):
            nxt = prod & masked[k]
            if not nxt:
                continue
            s = subset + (k,)
            yield s, nxt
            if len(s) < max_order:
                yield from extend(k + 1, s, nxt)

    for k in range(n):
        if masked[k]:
            yield (k,), masked[k]
            if max_order > 1:
                yield from extend(k + 1, (k,), masked[k])


def xor_weight_expand(rows: BitMatrix, q: int) -> int:
    """``|XOR of all rows| mod 2**q`` computed directly and by inclusion-exclusion.

    The expansion sums ``(-2)**(s-1) * |product of s distinct rows|`` over
    subsets of size ``s <= q``; larger subsets vanish mod ``2**q``.
    """
    if q < 1:
        raise ValueError("q must be at least 1")
    mod = 1 << q
    ints = rows.row_ints()
    acc = 0
    for v in ints:
        acc ^= v
    direct = acc.bit_count() % mod
    expanded = 0
    for subset, prod in nonzero_products(ints, q):
        s = len(subset)
        expanded += (-2) ** (s - 1) * prod.bit_count()
    expanded %= mod
    if direct != expanded:
        raise ArithmeticError(f"XOR weight expansion mismatch: {direct} vs {expanded}")
    return direct
