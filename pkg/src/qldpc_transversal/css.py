"""CSS codes: assembly, logical operators, exact low-weight distance search."""

from __future__ import annotations

import enum
from bisect import bisect_left
from collections.abc import Iterator, Mapping
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Literal

from .gf2 import BitMatrix, BitVector, DimensionError, RowSpace, inverse, kernel, rank

PauliKind = Literal["X", "Z"]


class CommutationError(ValueError):
    """An X check and a Z check overlap on an odd number of qubits."""

    def __init__(self, row_x: int, row_z: int):
        super().__init__(f"X check {row_x} anticommutes with Z check {row_z}")
        self.row_x = row_x
        self.row_z = row_z


class LogicalOperatorError(ValueError):
    """Supplied logical operators violate the CSS pairing conditions."""


@dataclass(frozen=True, eq=False)
class CssCode:
    h_x: BitMatrix
    h_z: BitMatrix
    l_x: BitMatrix
    l_z: BitMatrix
    full_k: int
    subsystem: bool = False
    name: str = ""
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "metadata", MappingProxyType(dict(self.metadata)))

    @property
    def n(self) -> int:
        return self.h_x.cols

    @property
    def k(self) -> int:
        """Number of retained logical qubits (``full_k`` unless subsystem)."""
        return self.l_x.rows

    def parameters(self) -> str:
        return f"[[{self.n},{self.full_k}]]"

    def validate(self) -> None:
        """Raise if any orthogonality or pairing invariant fails."""
        _check_commutation(self.h_x, self.h_z)
        k = self.l_x.rows
        if self.l_z.rows != k:
            raise LogicalOperatorError("l_x and l_z have different row counts")
        for m, name in ((self.l_x, "l_x"), (self.l_z, "l_z")):
            if m.cols != self.n:
                raise DimensionError(f"{name} has {m.cols} columns, code has {self.n}")
        if not (self.h_z @ self.l_x.T).is_zero():
            raise LogicalOperatorError("an X logical anticommutes with a Z check")
        if not (self.h_x @ self.l_z.T).is_zero():
            raise LogicalOperatorError("a Z logical anticommutes with an X check")
        if self.l_x @ self.l_z.T != BitMatrix.identity(k):
            raise LogicalOperatorError("l_x l_z^T is not the identity")
        expected = self.n - rank(self.h_x) - rank(self.h_z)
        if self.full_k != expected:
            raise LogicalOperatorError(f"full_k={self.full_k} but rank count gives {expected}")
        if not self.subsystem and k != expected:
            raise LogicalOperatorError(f"{k} logicals given for a code with k={expected}")

    def with_logicals(self, l_x: BitMatrix, l_z: BitMatrix, *, subsystem: bool | None = None, **metadata) -> CssCode:
        """Replace the logical representatives (validated)."""
        if subsystem is None:
            subsystem = l_x.rows != self.full_k
        code = CssCode(
            self.h_x, self.h_z, l_x, l_z, self.full_k, subsystem, self.name,
            {**self.metadata, **metadata},
        )
        code.validate()
        return code

    def renamed(self, name: str, **metadata) -> CssCode:
        return CssCode(
            self.h_x, self.h_z, self.l_x, self.l_z, self.full_k, self.subsystem, name,
            {**self.metadata, **metadata},
        )


def _check_commutation(h_x: BitMatrix, h_z: BitMatrix) -> None:
    if h_x.cols != h_z.cols:
        raise DimensionError(f"h_x has {h_x.cols} columns, h_z has {h_z.cols}")
    overlap = (h_x @ h_z.T).to_dense()
    bad = overlap.nonzero()
    if bad[0].size:
        raise CommutationError(int(bad[0][0]), int(bad[1][0]))


def _quotient_basis(space: BitMatrix, candidates: BitMatrix) -> list[int]:
    """Rows of ``candidates`` extending rowspan(``space``), reduced modulo it."""
    span = RowSpace(space.row_ints())
    reps = []
    for v in candidates.row_ints():
        r = span.reduce(v)
        if r:
            span.add(r)
            reps.append(r)
    return reps


def compute_logicals(h_x: BitMatrix, h_z: BitMatrix) -> tuple[BitMatrix, BitMatrix]:
    """Paired logical bases with ``l_x l_z^T = I``.

    X logicals span ker(h_z) modulo rowspan(h_x); Z logicals likewise with the
    roles swapped, then re-paired through the inverse overlap matrix.
    """
    _check_commutation(h_x, h_z)
    n = h_x.cols
    lx = BitMatrix.from_ints(_quotient_basis(h_x, kernel(h_z)), n)
    lz = BitMatrix.from_ints(_quotient_basis(h_z, kernel(h_x)), n)
    if lx.rows != lz.rows:
        raise ArithmeticError("X and Z logical counts disagree")
    if lx.rows == 0:
        return lx, lz
    overlap = lx @ lz.T
    lz = inverse(overlap).T @ lz
    return lx, lz


def assemble(h_x: BitMatrix, h_z: BitMatrix, *, name: str = "", **metadata) -> CssCode:
    """Build a CSS code from its checks, computing logical operators."""
    l_x, l_z = compute_logicals(h_x, h_z)
    code = CssCode(h_x, h_z, l_x, l_z, l_x.rows, False, name, metadata)
    code.validate()
    return code


# distance ------------------------------------------------------------


@dataclass(frozen=True)
class DistanceCertificate:
    """Outcome of an exhaustive low-weight logical search.

    ``weight_found`` is None when nothing was found up to the search bound;
    ``exhausted_below`` is the largest weight known to carry no logical.
    """

    pauli_kind: PauliKind
    weight_found: int | None
    witness: BitVector | None
    exhausted_below: int

    def verify(self, code: CssCode) -> bool:
        """Recheck the witness against the code (the exhaustion claim is not rechecked)."""
        if self.witness is None:
            return self.weight_found is None
        checks, stabs = _search_matrices(code, self.pauli_kind)
        v = self.witness
        return (
            v.weight() == self.weight_found
            and (checks.mul_vec(v).weight() == 0)
            and not RowSpace(stabs.row_ints()).contains(v.to_int())
            and self.exhausted_below == self.weight_found - 1
        )


def _search_matrices(code: CssCode, kind: PauliKind) -> tuple[BitMatrix, BitMatrix]:
    if kind == "X":
        return code.h_z, code.h_x
    if kind == "Z":
        return code.h_x, code.h_z
    raise ValueError(f"unknown Pauli kind {kind!r}")


def _subsets(syn: tuple[int, ...], size: int, start: int, stop: int) -> Iterator[tuple[tuple[int, ...], int]]:
    """Lexicographic ``size``-subsets of range(start, stop) with their XORed syndromes."""

    def rec(first: int, prefix: tuple[int, ...], acc: int, left: int):
        for j in range(first, stop - left + 1):
            s = acc ^ syn[j]
            if left == 1:
                yield prefix + (j,), s
            else:
                yield from rec(j + 1, prefix + (j,), s, left - 1)

    if size == 0:
        yield (), 0
    else:
        yield from rec(start, (), 0, size)


def _first_logical(syn: tuple[int, ...], stabs: tuple[int, ...], w: int, shard: int, nshards: int):
    """Lexicographically first weight-``w`` support that is a nontrivial logical.

    Meet in the middle: the ``w - w//2`` smallest indices form the head, the
    rest the tail, with every tail index above every head index.  Each support
    pattern therefore appears exactly once, heads in lexicographic order and
    tails sorted, so the first hit is the lexicographic minimum.
    """
    n = len(syn)
    tail = w // 2
    head = w - tail
    span = RowSpace(stabs)
    table: dict[int, list[int]] = {}
    if tail:
        for t, s in _subsets(syn, tail, 0, n):
            code = 0
            for j in t:
                code = code * n + j
            table.setdefault(s, []).append(code)
    for first in range(shard, n - w + 1, nshards):
        for rest, s in _subsets(syn, head - 1, first + 1, n - tail):
            h = (first,) + rest
            s ^= syn[first]
            if tail == 0:
                if s == 0:
                    v = sum(1 << j for j in h)
                    if not span.contains(v):
                        return h
                continue
            cands = table.get(s)
            if cands is None:
                continue
            lo = bisect_left(cands, (h[-1] + 1) * n ** (tail - 1))
            hmask = sum(1 << j for j in h)
            for code in cands[lo:]:
                t = []
                for _ in range(tail):
                    code, j = divmod(code, n)
                    t.append(j)
                t.reverse()
                v = hmask | sum(1 << j for j in t)
                if not span.contains(v):
                    return h + tuple(t)
    return None


def distance_search(code: CssCode, kind: PauliKind, w_max: int, *, workers: int = 1) -> DistanceCertificate:
    """Exhaustively look for the lightest ``kind`` logical of weight ``<= w_max``.

    A hit commutes with every opposite-type check and lies outside the
    same-type stabilizer span; the search tries weights in increasing order so
    the first hit is the minimum weight.  Deterministic: the witness is the
    lexicographically first support at that weight.
    """
    if w_max < 1:
        raise ValueError("w_max must be at least 1")
    checks, stabs = _search_matrices(code, kind)
    syn = checks.T.row_ints()
    stab_ints = stabs.row_ints()
    n = code.n
    for w in range(1, min(w_max, n) + 1):
        if workers > 1:
            with ProcessPoolExecutor(workers) as pool:
                hits = pool.map(_first_logical, *zip(*[(syn, stab_ints, w, s, workers) for s in range(workers)]))
                found = [h for h in hits if h is not None]
            hit = min(found) if found else None
        else:
            hit = _first_logical(syn, stab_ints, w, 0, 1)
        if hit is not None:
            witness = BitVector.from_int(sum(1 << j for j in hit), n)
            return DistanceCertificate(kind, w, witness, w - 1)
    return DistanceCertificate(kind, None, None, min(w_max, n))


# density / robustness ------------------------------------------------


class Robustness(str, enum.Enum):
    ROBUST_POSSIBLE = "robust_possible"
    NOT_ROBUST = "not_robust"


def check_robustness(a: BitMatrix) -> Robustness:
    """Counting obstruction: with ``k = n - rank(a) > n/2`` two disjoint
    ``k``-subsets of the ``n`` columns cannot exist, so ``a`` is not robust."""
    k = a.cols - rank(a)
    return Robustness.NOT_ROBUST if 2 * k > a.cols else Robustness.ROBUST_POSSIBLE


def max_check_weight(code: CssCode) -> tuple[int, int]:
    """(max check weight, max number of same-type checks on one qubit)."""
    row = max((int(m.row_weights().max()) for m in (code.h_x, code.h_z) if m.rows), default=0)
    col = max((int(m.col_weights().max()) for m in (code.h_x, code.h_z) if m.rows and m.cols), default=0)
    return row, col
