"""Divisibility conditions for transversal diagonal phase gates.

A phase vector ``p`` (entries mod ``2**q``) applies ``diag(1, w^p_t)`` with
``w = exp(2 pi i / 2**q)`` on qubit ``t``.  The checks here decide exactly
when that gate preserves the code space of a CSS code with X checks ``h_x``
and X logicals ``l_x`` and acts as ``prod_m P^{w_m}`` on logical qubit ``m``.
"""

from __future__ import annotations

import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field

import numpy as np

from .gf2 import BitMatrix, BitVector, DimensionError

log = logging.getLogger(__name__)


class SearchLimitError(RuntimeError):
    """A search was refused because it would exceed its size budget."""


@dataclass(frozen=True)
class PhaseVector:
    """Integer exponents mod ``2**q``, one per qubit."""

    q: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be at least 1")
        entries = tuple(int(x) for x in self.entries)
        mod = 1 << self.q
        if any(not 0 <= x < mod for x in entries):
            raise ValueError(f"entries must lie in [0, {mod})")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def uniform(cls, n: int, q: int, value: int = 1, support: BitVector | None = None) -> PhaseVector:
        """``value`` on ``support`` (every qubit by default), zero elsewhere."""
        if support is not None and len(support) != n:
            raise DimensionError("support length does not match n")
        on = support.to_array() if support is not None else np.ones(n, dtype=np.uint8)
        v = value % (1 << q)
        return cls(q, tuple(v if b else 0 for b in on))

    def __len__(self) -> int:
        return len(self.entries)

    def to_array(self) -> np.ndarray:
        return np.asarray(self.entries, dtype=np.int64)

    def support(self) -> BitVector:
        return BitVector.from_bits([1 if x else 0 for x in self.entries])

    def inverse(self) -> PhaseVector:
        mod = 1 << self.q
        return PhaseVector(self.q, tuple((-x) % mod for x in self.entries))

    def lifted(self, q: int) -> PhaseVector:
        """Same gate written at level ``q >= self.q``."""
        if q < self.q:
            raise ValueError("cannot lower the level of a phase vector")
        return PhaseVector(q, tuple(x << (q - self.q) for x in self.entries))

    def bit_masks(self) -> list[int]:
        """``masks[b]`` has bit ``t`` set when bit ``b`` of entry ``t`` is set."""
        masks = [0] * self.q
        for t, x in enumerate(self.entries):
            b = 0
            while x:
                if x & 1:
                    masks[b] |= 1 << t
                x >>= 1
                b += 1
        return masks

    def masked_sum(self, support: int, masks: Sequence[int] | None = None) -> int:
        """``sum(p_t for t in support)`` for an int-encoded support."""
        masks = self.bit_masks() if masks is None else masks
        return sum((support & m).bit_count() << b for b, m in enumerate(masks))


@dataclass(frozen=True)
class Violation:
    """A subset of ``i`` check rows and ``j`` logical rows whose product fails its congruence."""

    i: int
    j: int
    h_rows: tuple[int, ...]
    l_rows: tuple[int, ...]
    residue: int
    modulus: int

    @property
    def order(self) -> tuple[int, int]:
        return self.i, self.j


@dataclass(frozen=True)
class TransversalityReport:
    """Result of :func:`check_conditions`.

    ``w[m]`` is the exponent ``sum(p_t for t in l_x[m]) mod 2**q`` of the phase
    gate induced on logical qubit ``m``.
    """

    q: int
    w: tuple[int, ...]
    passed: bool
    violations: tuple[Violation, ...] = field(default=())
    subsets_checked: int = 0

    def recheck(self, h_x: BitMatrix, l_x: BitMatrix, p: PhaseVector) -> bool:
        """Recompute every reported residue independently."""
        h = h_x.row_ints()
        lx = l_x.row_ints()
        for v in self.violations:
            prod = -1
            for r in v.h_rows:
                prod &= h[r]
            for r in v.l_rows:
                prod &= lx[r]
            if p.masked_sum(prod) % v.modulus != v.residue or v.residue == 0:
                return False
        return True


def check_disjoint_logicals(l_x: BitMatrix) -> bool:
    """True when the X logical representatives have pairwise disjoint supports."""
    seen = 0
    for r in l_x.row_ints():
        if seen & r:
            return False
        seen |= r
    return True


def _products(
    h: Sequence[int], lx: Sequence[int], q: int, mask: int, max_logicals: int
) -> Iterator[tuple[tuple[int, ...], tuple[int, ...], int]]:
    """Nonzero masked products of distinct rows, depth-first, at most ``q`` rows
    and at most ``max_logicals`` logical rows."""
    rows = [r & mask for r in h] + [r & mask for r in lx]
    nh = len(h)
    n = len(rows)

    def extend(start: int, chosen: tuple[int, ...], prod: int, nl: int):
        for k in range(start, n):
            is_l = k >= nh
            if is_l and nl == max_logicals:
                break
            nxt = prod & rows[k]
            if not nxt:
                continue
            s = chosen + (k,)
            yield s, nxt
            if len(s) < q:
                yield from extend(k + 1, s, nxt, nl + is_l)

    for s, prod in extend(0, (), -1, 0):
        yield tuple(k for k in s if k < nh), tuple(k - nh for k in s if k >= nh), prod


def check_conditions(
    h_x: BitMatrix, l_x: BitMatrix, p: PhaseVector, *, use_disjointness: bool = True
) -> TransversalityReport:
    """Decide whether ``p`` is a transversal logical phase gate.

    For every set of ``i`` distinct X-check rows and ``j`` distinct X-logical
    rows with ``1 <= i + j <= q`` and ``(i, j) != (0, 1)``, the ``p``-weighted
    size of their elementwise product must vanish mod ``2**(q + 1 - i - j)``.
    The gate then acts as ``P^{w_m}`` on logical ``m``.  Passing is
    equivalent to the gate mapping each logical basis state to itself times
    that phase exactly, not only up to a global phase.

    With ``use_disjointness`` and disjoint logical supports, subsets with two
    or more logical rows are skipped since their products vanish.
    """
    if h_x.cols != len(p) or l_x.cols != len(p):
        raise DimensionError("phase vector length does not match the code")
    q = p.q
    masks = p.bit_masks()
    mask = 0
    for m in masks:
        mask |= m
    lx = l_x.row_ints()
    w = tuple(p.masked_sum(r, masks) % (1 << q) for r in lx)
    max_l = 1 if use_disjointness and check_disjoint_logicals(l_x) else q
    bad = []
    checked = 0
    for h_rows, l_rows, prod in _products(h_x.row_ints(), lx, q, mask, max_l):
        i, j = len(h_rows), len(l_rows)
        if i == 0 and j == 1:
            continue
        checked += 1
        modulus = 1 << (q + 1 - i - j)
        residue = p.masked_sum(prod, masks) % modulus
        if residue:
            bad.append(Violation(i, j, h_rows, l_rows, residue, modulus))
    bad.sort(key=lambda v: (v.i + v.j, v.i, v.h_rows, v.l_rows))
    return TransversalityReport(q, w, not bad, tuple(bad), checked)


def local_violations(c0: BitMatrix, q: int) -> list[Violation]:
    """Weight conditions on a local code: ``|product of i rows| = 0 mod 2**(q+1-i)``."""
    return list(check_conditions(c0, BitMatrix.zeros(0, c0.cols), PhaseVector.uniform(c0.cols, q)).violations)


# search ---------------------------------------------------------------


def _w_ok(w: Sequence[int], q: int, target_w, require_odd: bool) -> bool:
    if target_w is not None:
        targets = [target_w] * len(w) if isinstance(target_w, int) else list(target_w)
        return [x % (1 << q) for x in targets] == list(w)
    return not require_odd or all(x % 2 for x in w)


def _valuation(a: np.ndarray) -> np.ndarray:
    low = a & -a
    out = np.full(a.shape, 1 << 30, dtype=np.int64)
    nz = low != 0
    out[nz] = np.log2(low[nz]).round().astype(np.int64)
    return out


def solve_mod_power_of_two(m: np.ndarray, b: np.ndarray, q: int) -> np.ndarray | None:
    """Some solution of ``m x = b (mod 2**q)``, or None if there is none.

    Gaussian elimination over the ring Z/2^q, pivoting on the entry of least
    2-adic valuation so every pivot divides the entries it clears.
    """
    mod = 1 << q
    a = np.concatenate([np.asarray(m, dtype=np.int64) % mod, (np.asarray(b, dtype=np.int64) % mod)[:, None]], axis=1)
    nrows, ncols = a.shape[0], a.shape[1] - 1
    order = np.arange(ncols)
    shifts = []
    for r in range(min(nrows, ncols)):
        sub = a[r:, r:ncols]
        vals = _valuation(sub)
        flat = int(vals.argmin())
        v = int(vals.flat[flat])
        if v >= q:
            break
        pr, pc = divmod(flat, sub.shape[1])
        pr += r
        pc += r
        a[[r, pr]] = a[[pr, r]]
        a[:, [r, pc]] = a[:, [pc, r]]
        order[[r, pc]] = order[[pc, r]]
        unit = int(a[r, r]) >> v
        a[r] = a[r] * pow(unit, -1, mod) % mod
        factors = a[r + 1 :, r] >> v
        a[r + 1 :] = (a[r + 1 :] - factors[:, None] * a[r]) % mod
        shifts.append(v)
    rk = len(shifts)
    if np.any(a[rk:, ncols] % mod):
        return None
    x = np.zeros(ncols, dtype=np.int64)
    for r in range(rk - 1, -1, -1):
        rhs = (a[r, ncols] - int(a[r, r + 1 : ncols] @ x[r + 1 :])) % mod
        if rhs % (1 << shifts[r]):
            return None
        x[r] = (rhs >> shifts[r]) % mod
    out = np.zeros(ncols, dtype=np.int64)
    out[order] = x
    if np.any((np.asarray(m, dtype=np.int64) @ out - b) % mod):
        raise ArithmeticError("modular solve produced a non-solution")
    return out


def find_phase_vector(
    h_x: BitMatrix,
    l_x: BitMatrix,
    q: int,
    support: BitVector | None = None,
    *,
    target_w: int | Sequence[int] | None = None,
    require_odd: bool = True,
    max_cells: int = 20_000_000,
) -> PhaseVector | None:
    """A phase vector supported inside ``support`` that passes
    :func:`check_conditions`, or None if none exists.

    Uniform vectors are tried first.  Otherwise the conditions are linear in
    ``p`` over Z/2^q and are solved exactly, so None means no such vector
    exists.  ``target_w`` fixes the induced exponents; without it,
    ``require_odd`` asks for every ``w_m`` odd.  Raises
    :class:`SearchLimitError` when the linear system has more than
    ``max_cells`` entries.
    """
    n = h_x.cols
    if support is None:
        support = BitVector.ones(n)
    mod = 1 << q
    values = [1] if target_w is None else list(range(1, mod, 2)) + list(range(2, mod, 2))
    for value in values:
        p = PhaseVector.uniform(n, q, value, support)
        rep = check_conditions(h_x, l_x, p)
        if rep.passed and _w_ok(rep.w, q, target_w, require_odd):
            log.debug("uniform phase vector with value %d works", value)
            return p

    cols = support.support()
    if not cols:
        return None
    pos = {t: c for c, t in enumerate(cols)}
    mask = support.to_int()
    lx = l_x.row_ints()
    rows, rhs = [], []

    def add(prod: int, scale: int, target: int):
        row = np.zeros(len(cols), dtype=np.int64)
        t = 0
        while prod:
            if prod & 1:
                row[pos[t]] = scale
            prod >>= 1
            t += 1
        rows.append(row)
        rhs.append(target)

    for h_rows, l_rows, prod in _products(h_x.row_ints(), lx, q, mask, q):
        size = len(h_rows) + len(l_rows)
        if not h_rows and size == 1:
            continue
        add(prod, 1 << (size - 1), 0)
        if len(rows) * len(cols) > max_cells:
            raise SearchLimitError(f"more than {max_cells} cells in the congruence system")
    for m, r in enumerate(lx):
        r &= mask
        if target_w is not None:
            t = target_w if isinstance(target_w, int) else target_w[m]
            add(r, 1, t % mod)
        elif require_odd:
            add(r, 1 << (q - 1), 1 << (q - 1))
    if not rows:
        return PhaseVector.uniform(n, q, 0)
    system = np.unique(np.concatenate([np.array(rows), np.array(rhs)[:, None]], axis=1), axis=0)
    sol = solve_mod_power_of_two(system[:, :-1], system[:, -1], q)
    if sol is None:
        return None
    entries = [0] * n
    for t, c in pos.items():
        entries[t] = int(sol[c])
    p = PhaseVector(q, tuple(entries))
    rep = check_conditions(h_x, l_x, p)
    if not rep.passed or not _w_ok(rep.w, q, target_w, require_odd):
        raise ArithmeticError("solved phase vector fails the direct check")
    return p
