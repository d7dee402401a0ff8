"""Code families: Tanner codes, hypergraph and balanced products built on
transposed Tanner codes, the direct construction, and distance balancing.

Permutation matrices follow one convention throughout: ``perm_of(P)[i]`` is
the column holding the 1 in row ``i``, so ``(P @ X)[i] == X[perm[i]]`` and
``(X @ P.T)[:, e] == X[:, perm[e]]``.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal

import logging

import numpy as np

from .css import CssCode, assemble
from .gf2 import BitMatrix, BitVector, DimensionError, block_diag, hstack, kernel, kron, rank, vstack
from .transversality import PhaseVector

log = logging.getLogger(__name__)

Direction = Literal["boost_x", "boost_z"]


class ConstructionError(ValueError):
    """Inputs violate a construction's preconditions."""


# permutations --------------------------------------------------------


def perm_of(p: BitMatrix) -> list[int]:
    dense = p.to_dense()
    if dense.shape[0] != dense.shape[1] or not (
        np.all(dense.sum(axis=0) == 1) and np.all(dense.sum(axis=1) == 1)
    ):
        raise ConstructionError("not a permutation matrix")
    return [int(j) for j in dense.argmax(axis=1)]


def cycle_permutation(n: int, shift: int = 1) -> BitMatrix:
    """Cyclic shift ``i -> i + shift mod n`` as a permutation matrix."""
    return BitMatrix.permutation([(i + shift) % n for i in range(n)])


def orbits(perm: Sequence[int]) -> list[list[int]]:
    seen = [False] * len(perm)
    out = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        orbit = []
        i = start
        while not seen[i]:
            seen[i] = True
            orbit.append(i)
            i = perm[i]
        out.append(orbit)
    return out


def induced_edge_permutation(i0: BitMatrix, vertex_perm: BitMatrix) -> BitMatrix:
    """Edge permutation ``P_E`` with ``P_V @ i0 == i0 @ P_E.T``."""
    pi = perm_of(vertex_perm)
    inv = [0] * len(pi)
    for i, j in enumerate(pi):
        inv[j] = i
    cols = i0.T.row_ints()
    lookup = {c: e for e, c in enumerate(cols)}
    if len(lookup) != len(cols):
        raise ConstructionError("incidence matrix has repeated columns")
    gamma = []
    for c in cols:
        image = sum(1 << inv[v] for v in range(i0.rows) if c >> v & 1)
        if image not in lookup:
            raise ConstructionError("vertex permutation is not a graph automorphism")
        gamma.append(lookup[image])
    p_e = BitMatrix.permutation(gamma)
    if vertex_perm @ i0 != i0 @ p_e.T:
        raise ArithmeticError("induced edge permutation failed its own check")
    return p_e


@dataclass(frozen=True)
class SymmetryPair:
    """Row and column permutations with ``r @ a == a @ c.T`` and all orbits of length ``order``."""

    r: BitMatrix
    c: BitMatrix
    order: int

    def __post_init__(self):
        for m, name in ((self.r, "r"), (self.c, "c")):
            lengths = {len(o) for o in orbits(perm_of(m))}
            if lengths and lengths != {self.order}:
                raise ConstructionError(f"{name} has orbit lengths {sorted(lengths)}, expected all {self.order}")

    def check(self, a: BitMatrix) -> None:
        if self.r.rows != a.rows or self.c.rows != a.cols:
            raise DimensionError("symmetry dimensions do not match the matrix")
        if self.r @ a != a @ self.c.T:
            raise ConstructionError("r a != a c^T")


# Tanner codes --------------------------------------------------------


@dataclass(frozen=True)
class TannerSpec:
    """Graph matrix, local code and per-vertex column assignment.

    ``assignment[i][t]`` is the column of ``c0`` placed on the ``t``-th
    (in increasing column order) support position of row ``i`` of ``i0``.
    """

    i0: BitMatrix
    c0: BitMatrix
    assignment: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        s = self.c0.cols
        weights = self.i0.row_weights()
        bad = [i for i, w in enumerate(weights) if w != s]
        if bad:
            raise ConstructionError(f"rows {bad[:5]} of i0 do not have weight {s}")
        if len(self.assignment) != self.i0.rows:
            raise ConstructionError("one assignment per row of i0 is required")
        for i, perm in enumerate(self.assignment):
            if sorted(perm) != list(range(s)):
                raise ConstructionError(f"assignment for row {i} is not a permutation of range({s})")

    @classmethod
    def identity(cls, i0: BitMatrix, c0: BitMatrix) -> TannerSpec:
        return cls(i0, c0, tuple(tuple(range(c0.cols)) for _ in range(i0.rows)))


def tanner(spec: TannerSpec) -> BitMatrix:
    """Replace each row of ``i0`` by ``r`` rows carrying ``c0`` on its support."""
    i0 = spec.i0.to_dense()
    c0 = spec.c0.to_dense()
    r = c0.shape[0]
    out = np.zeros((i0.shape[0] * r, i0.shape[1]), dtype=np.uint8)
    for i, perm in enumerate(spec.assignment):
        support = np.flatnonzero(i0[i])
        out[i * r : (i + 1) * r, support] = c0[:, list(perm)]
    return BitMatrix.from_dense(out)


def same_orbit_columns(i0: BitMatrix, r0: BitMatrix) -> list[int]:
    """Columns of ``i0`` touching two vertices in the same orbit of ``r0``."""
    orbit_of = {}
    for idx, orbit in enumerate(orbits(perm_of(r0))):
        for v in orbit:
            orbit_of[v] = idx
    out = []
    for e, col in enumerate(i0.T.to_dense()):
        ends = [orbit_of[int(v)] for v in np.flatnonzero(col)]
        if len(set(ends)) != len(ends):
            out.append(e)
    return out


def symmetric_assignment(
    i0: BitMatrix,
    c0: BitMatrix,
    r0: BitMatrix,
    c: BitMatrix,
    extra: Sequence[tuple[BitMatrix, BitMatrix]] = (),
    *,
    strict_orbits: bool = False,
) -> TannerSpec:
    """Column assignment for which ``(r0 x I_r) A == A c^T``.

    The lowest-index vertex of each orbit keeps the identity order and the
    symmetry transports it around the orbit.  ``extra`` holds further
    ``(vertex, edge)`` permutation pairs the assignment must also respect.

    Columns joining two vertices of one orbit are allowed unless
    ``strict_orbits``; any inconsistency they cause surfaces as a
    :class:`ConstructionError` during propagation.
    """
    if r0 @ i0 != i0 @ c.T:
        raise ConstructionError("r0 i0 != i0 c^T")
    pi = perm_of(r0)
    dense = i0.to_dense()
    shared = same_orbit_columns(i0, r0)
    if shared and strict_orbits:
        raise ConstructionError(f"column {shared[0]} joins vertices in the same orbit")
    if shared:
        log.info("%d columns join vertices in a common orbit; relying on the constructive check", len(shared))
    gens = [(pi, perm_of(c))]
    for pv, pe in extra:
        if pv @ i0 != i0 @ pe.T:
            raise ConstructionError("extra symmetry does not preserve i0")
        gens.append((perm_of(pv), perm_of(pe)))

    supports = [[int(e) for e in np.flatnonzero(row)] for row in dense]
    tau: list[dict[int, int] | None] = [None] * i0.rows
    for root in range(i0.rows):
        if tau[root] is not None:
            continue
        tau[root] = {e: t for t, e in enumerate(supports[root])}
        queue = deque([root])
        while queue:
            i = queue.popleft()
            for vp, ep in gens:
                j = vp[i]
                image = {e: tau[i][ep[e]] for e in supports[j]}
                if tau[j] is None:
                    tau[j] = image
                    queue.append(j)
                elif tau[j] != image:
                    raise ConstructionError(f"symmetries disagree on the assignment at vertex {j}")
    spec = TannerSpec(i0, c0, tuple(tuple(tau[i][e] for e in supports[i]) for i in range(i0.rows)))
    a = tanner(spec)
    eye = BitMatrix.identity(c0.rows)
    for pv, pe in [(r0, c)] + list(extra):
        if kron(pv, eye) @ a != a @ pe.T:
            raise ArithmeticError("assignment does not carry the symmetry")
    return spec


# products ------------------------------------------------------------


def hypergraph_product(a: BitMatrix, b: BitMatrix, *, name: str = "hypergraph_product") -> CssCode:
    """``H_X = [A x I | I x B^T]``, ``H_Z = [I x B | A^T x I]``."""
    m_a, n_a = a.shape
    m_b, n_b = b.shape
    h_x = hstack([kron(a, BitMatrix.identity(n_b)), kron(BitMatrix.identity(m_a), b.T)])
    h_z = hstack([kron(BitMatrix.identity(n_a), b), kron(a.T, BitMatrix.identity(m_b))])
    return assemble(h_x, h_z, name=name, construction="hypergraph_product")


def balanced_product(a: BitMatrix, sym: SymmetryPair, *, name: str = "balanced_product") -> CssCode:
    """``H_X = [A^T | I + C]``, ``H_Z = [I + R | A]`` for a symmetry ``R A = A C^T``."""
    sym.check(a)
    h_x = hstack([a.T, BitMatrix.identity(a.cols) + sym.c])
    h_z = hstack([BitMatrix.identity(a.rows) + sym.r, a])
    return assemble(h_x, h_z, name=name, construction="balanced_product", symmetry_order=sym.order)


def _local_vectors(c0: BitMatrix, v: Sequence[BitVector] | None) -> list[BitVector]:
    vs = list(v) if v is not None else [BitVector.ones(c0.rows)]
    for vec in vs:
        if len(vec) != c0.rows:
            raise DimensionError(f"local vector has length {len(vec)}, local code has {c0.rows} rows")
        if c0.T.mul_vec(vec).weight():
            raise ConstructionError("local vector is not a null vector of c0^T")
    return vs


def _pair_up(l_x: np.ndarray, l_z: np.ndarray) -> None:
    overlap = (l_x.astype(np.int64) @ l_z.T.astype(np.int64)) % 2
    if not np.array_equal(overlap, np.eye(l_x.shape[0], dtype=np.int64)):
        raise ConstructionError("structured logicals do not pair up (check local vector weights are odd and disjoint)")


def balanced_logicals(
    c0: BitMatrix,
    r0: BitMatrix,
    n: int,
    v: Sequence[BitVector] | None = None,
    v_z: Sequence[BitVector] | None = None,
) -> tuple[BitMatrix, BitMatrix]:
    """Orbit-sum X logicals and single-vertex Z logicals on the left block.

    One pair per (orbit of ``r0``, local null vector ``v``).  The Z logical
    sits on the lowest-index vertex of the orbit and carries ``v_z`` (default
    ``v``), which must satisfy ``v_z c0 = 0`` and overlap ``v`` oddly.
    """
    vs = [vec.to_array() for vec in _local_vectors(c0, v)]
    if v_z is None:
        zs = vs
    else:
        zs = [vec.to_array() for vec in v_z]
        if len(zs) != len(vs):
            raise ConstructionError("v_z needs one entry per local vector")
        for vec in zs:
            if len(vec) != c0.rows or np.any((vec.astype(np.int64) @ c0.to_dense()) % 2):
                raise ConstructionError("Z-side local vector does not annihilate c0")
    m = r0.rows
    r = c0.rows
    rows_x, rows_z = [], []
    for orbit in orbits(perm_of(r0)):
        rep = min(orbit)
        if len(orbit) % 2 == 0:
            raise ConstructionError("orbit sums need odd orbit length to pair with a single vertex")
        for vec, zvec in zip(vs, zs):
            x = np.zeros(n, dtype=np.uint8)
            z = np.zeros(n, dtype=np.uint8)
            for i in orbit:
                x[i * r : (i + 1) * r] = vec
            z[rep * r : (rep + 1) * r] = zvec
            rows_x.append(x)
            rows_z.append(z)
    if m * r > n:
        raise DimensionError("left block exceeds code length")
    lx, lz = np.array(rows_x), np.array(rows_z)
    _pair_up(lx, lz)
    return BitMatrix.from_dense(lx), BitMatrix.from_dense(lz)


def hypergraph_logicals(
    c0: BitMatrix, m: int, b: BitMatrix, n: int, v: Sequence[BitVector] | None = None
) -> tuple[BitMatrix, BitMatrix]:
    """``e_I x v x u`` X logicals with ``u`` in ker(B), paired with ``e_I x v x e_B``."""
    vs = [vec.to_array() for vec in _local_vectors(c0, v)]
    dense_k, units = _classical_logicals(b)
    n_b = b.cols
    r = c0.rows
    rows_x, rows_z = [], []
    for i in range(m):
        for vec in vs:
            e_i = np.zeros(m, dtype=np.uint8)
            e_i[i] = 1
            left = np.kron(e_i, vec)
            for j in range(dense_k.shape[0]):
                e_b = units[j]
                x = np.zeros(n, dtype=np.uint8)
                z = np.zeros(n, dtype=np.uint8)
                x[: m * r * n_b] = np.kron(left, dense_k[j])
                z[: m * r * n_b] = np.kron(left, e_b)
                rows_x.append(x)
                rows_z.append(z)
    if not rows_x:
        return BitMatrix.zeros(0, n), BitMatrix.zeros(0, n)
    lx, lz = np.array(rows_x), np.array(rows_z)
    _pair_up(lx, lz)
    return BitMatrix.from_dense(lx), BitMatrix.from_dense(lz)


def structured_logicals(kind: Literal["hyper", "balanced"], **inputs) -> tuple[BitMatrix, BitMatrix]:
    """Dispatch to :func:`hypergraph_logicals` or :func:`balanced_logicals`."""
    if kind == "balanced":
        return balanced_logicals(**inputs)
    if kind == "hyper":
        return hypergraph_logicals(**inputs)
    raise ValueError(f"unknown kind {kind!r}")


def transpose_tanner_balanced(
    i0: BitMatrix,
    c0: BitMatrix,
    r0: BitMatrix,
    c: BitMatrix,
    *,
    extra: Sequence[tuple[BitMatrix, BitMatrix]] = (),
    v: Sequence[BitVector] | None = None,
    v_z: Sequence[BitVector] | None = None,
    name: str = "transpose_tanner_balanced",
) -> CssCode:
    """Balanced product of a symmetric Tanner code, keeping the orbit logicals."""
    spec = symmetric_assignment(i0, c0, r0, c, extra)
    a = tanner(spec)
    order = len(orbits(perm_of(r0))[0])
    sym = SymmetryPair(kron(r0, BitMatrix.identity(c0.rows)), c, order)
    code = balanced_product(a, sym, name=name)
    l_x, l_z = balanced_logicals(c0, r0, code.n, v, v_z)
    return code.with_logicals(l_x, l_z, subsystem=True, construction="transpose_tanner_balanced", left_block=a.rows)


def transpose_tanner_hypergraph(
    spec: TannerSpec,
    b: BitMatrix,
    *,
    v: Sequence[BitVector] | None = None,
    name: str = "transpose_tanner_hypergraph",
) -> CssCode:
    """Hypergraph product with ``A = T^T`` for the Tanner matrix ``T``."""
    t = tanner(spec)
    code = hypergraph_product(t.T, b, name=name)
    l_x, l_z = hypergraph_logicals(spec.c0, spec.i0.rows, b, code.n, v)
    return code.with_logicals(
        l_x, l_z, subsystem=True, construction="transpose_tanner_hypergraph", left_block=t.rows * b.cols
    )


def direct_construction(
    c0: BitMatrix, k: int, d_x: int, r0: BitMatrix | None = None, q: int | None = None
) -> CssCode:
    """``A^T = I_{k d_X} x C_0``, ``C = R_0 x I_{kr}``, ``R = R_0^T x I_{ks}``.

    Logicals ``L_X = J_d x I_k x J_s`` and ``L_Z = e x I_k x J_s`` on the left
    block.  With ``q`` given, ``c0`` must meet the local weight conditions.
    """
    from .transversality import local_violations

    r, s = c0.shape
    if r0 is None:
        r0 = cycle_permutation(d_x)
    if r0.rows != d_x:
        raise ConstructionError("r0 must act on d_x points")
    if q is not None:
        bad = local_violations(c0, q)
        if bad:
            raise ConstructionError(f"c0 fails the level-{q} weight conditions: {bad[0]}")
    if c0 @ BitMatrix.ones(s, 1) != BitMatrix.zeros(r, 1):
        raise ConstructionError("c0 rows must have even weight")
    if s % 2 == 0:
        raise ConstructionError("c0 needs an odd number of columns for J_s to pair")
    a = kron(BitMatrix.identity(k * d_x), c0).T
    sym = SymmetryPair(
        kron(r0.T, BitMatrix.identity(k * s)),
        kron(r0, BitMatrix.identity(k * r)),
        d_x,
    )
    code = balanced_product(a, sym, name=f"direct_k{k}_d{d_x}")
    ones_d = np.ones((1, d_x), dtype=np.uint8)
    ones_s = np.ones((1, s), dtype=np.uint8)
    e = np.zeros((1, d_x), dtype=np.uint8)
    e[0, 0] = 1
    left = k * d_x * s
    pad = np.zeros((k, code.n - left), dtype=np.uint8)
    l_x = np.hstack([np.kron(np.kron(ones_d, np.eye(k, dtype=np.uint8)), ones_s), pad])
    l_z = np.hstack([np.kron(np.kron(e, np.eye(k, dtype=np.uint8)), ones_s), pad])
    return code.with_logicals(
        BitMatrix.from_dense(l_x),
        BitMatrix.from_dense(l_z),
        subsystem=True,
        construction="direct",
        left_block=left,
    )


# distance balancing --------------------------------------------------


def _classical_logicals(h_c: BitMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Codewords of ``h_c`` and unit vectors dual to them."""
    basis = kernel(h_c).to_dense()
    units = np.zeros_like(basis)
    for j in range(basis.shape[0]):
        col = next(c for c in range(basis.shape[1]) if basis[:, c].sum() == 1 and basis[j, c] == 1)
        units[j, col] = 1
    return basis, units


def distance_balance(code: CssCode, h_c: BitMatrix, direction: Direction) -> CssCode:
    """Combine ``code`` with a classical code ``h_c``.

    ``boost_x`` multiplies the X distance and keeps ``H_X x I`` as the X
    checks (transversal phase gates survive); ``boost_z`` swaps the roles and
    is labelled ``transversality_expected = False``.
    """
    if rank(h_c) != h_c.rows:
        raise ConstructionError("h_c must have full row rank")
    n_c = h_c.cols
    eye_c = BitMatrix.identity(n_c)
    eye_m = BitMatrix.identity(h_c.rows)
    words, units = _classical_logicals(h_c)
    if direction == "boost_x":
        outer, inner = code.h_x, code.h_z
    elif direction == "boost_z":
        outer, inner = code.h_z, code.h_x
    else:
        raise ValueError(f"unknown direction {direction!r}")
    n = code.n
    single = hstack([kron(outer, eye_c), kron(BitMatrix.identity(outer.rows), h_c.T)])
    pair = vstack(
        [
            hstack([kron(inner, eye_c), BitMatrix.zeros(inner.rows * n_c, outer.rows * h_c.rows)]),
            hstack([kron(BitMatrix.identity(n), h_c), kron(outer.T, eye_m)]),
        ]
    )
    total = n * n_c + outer.rows * h_c.rows
    pad = np.zeros((code.k * len(words), total - n * n_c), dtype=np.uint8)
    boosted = np.kron(code.l_x.to_dense() if direction == "boost_x" else code.l_z.to_dense(), words)
    dual = np.kron(code.l_z.to_dense() if direction == "boost_x" else code.l_x.to_dense(), units)
    # kron(a, b) orders rows as (logical, classical word), matching on both sides
    boosted = np.hstack([boosted, pad]) if boosted.size else np.zeros((0, total), dtype=np.uint8)
    dual = np.hstack([dual, pad]) if dual.size else np.zeros((0, total), dtype=np.uint8)
    if direction == "boost_x":
        h_x, h_z, l_x, l_z = single, pair, boosted, dual
    else:
        h_x, h_z, l_x, l_z = pair, single, dual, boosted
    base = assemble(h_x, h_z, name=f"{code.name}_{direction}")
    return base.with_logicals(
        BitMatrix.from_dense(l_x) if l_x.size else BitMatrix.zeros(0, total),
        BitMatrix.from_dense(l_z) if l_z.size else BitMatrix.zeros(0, total),
        construction=f"distance_balance_{direction}",
        transversality_expected=direction == "boost_x",
        base_left_block=n * n_c,
    )


def extend_phase(p: PhaseVector, code: CssCode, h_c: BitMatrix, direction: Direction) -> PhaseVector:
    """``[p x 1 | 0]``: copy each entry onto its ``n_c`` classical copies."""
    if len(p) != code.n:
        raise DimensionError("phase vector length does not match the code")
    outer = code.h_x if direction == "boost_x" else code.h_z
    entries = np.repeat(np.asarray(p.entries, dtype=np.int64), h_c.cols)
    return PhaseVector(p.q, tuple(int(x) for x in entries) + (0,) * (outer.rows * h_c.rows))


# intra-block symmetry ------------------------------------------------


def lift_symmetry_balanced(p_v: BitMatrix, p_e: BitMatrix, r: int) -> tuple[BitMatrix, BitMatrix]:
    """``S_L = P_E^T`` and ``S_R = diag(P_V^T x I_r, P_E)`` for a balanced product."""
    return p_e.T, block_diag([kron(p_v.T, BitMatrix.identity(r)), p_e])


def lift_symmetry_hypergraph(
    p_v: BitMatrix, p_e: BitMatrix, r: int, b: BitMatrix
) -> tuple[BitMatrix, BitMatrix]:
    """``S_L = P_E^T x I`` and ``S_R = diag(P_V^T x I_r x I, P_E x I)`` for a hypergraph product."""
    m_b, n_b = b.shape
    s_l = kron(p_e.T, BitMatrix.identity(n_b))
    s_r = block_diag(
        [kron(kron(p_v.T, BitMatrix.identity(r)), BitMatrix.identity(n_b)), kron(p_e, BitMatrix.identity(m_b))]
    )
    return s_l, s_r


def is_symmetry(h_x: BitMatrix, s_l: BitMatrix, s_r: BitMatrix) -> bool:
    return s_l @ h_x @ s_r == h_x
