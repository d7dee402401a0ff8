"""Exact verification of diagonal logical gates by enumerating basis states.

Every codeword basis state of logical label ``v`` is a string
``v L_X + u H_X``.  The simulator tracks each string together with an
integer phase exponent mod ``2**q`` through a gate sequence made of diagonal
phases, logical X operators, transversal CNOTs and physical CZ-type gates.
Keys are stored bit-packed (uint64 words) so a coset of ``2**20`` strings
fits comfortably in memory.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .css import CssCode
from .gf2 import WORD, BitMatrix, BitVector, DimensionError, rref
from .transversality import PhaseVector

DEFAULT_GUARD = 1 << 24


class EnumerationLimitError(RuntimeError):
    """The requested enumeration exceeds the state-count guard."""


class SymmetryPreconditionError(ValueError):
    """The permutation pair does not fix the X checks or does not map l1 to l2."""


# gate operations -----------------------------------------------------


@dataclass(frozen=True)
class DiagonalPhase:
    """``P_q^p`` applied to one block."""

    p: PhaseVector
    block: int = 0

    @property
    def q(self) -> int:
        return self.p.q


@dataclass(frozen=True)
class LogicalX:
    """The stored X logical representative ``index`` applied to one block."""

    index: int
    block: int = 0
    q: int = 1


@dataclass(frozen=True)
class TransversalCNOT:
    """Qubit-wise CNOT from block ``control`` to block ``target``."""

    control: int = 0
    target: int = 1
    q: int = 1


@dataclass(frozen=True)
class PhysicalCZ:
    """Adds ``exponent * sum(bit_i bit_j)`` mod ``2**q`` over ``pairs``.

    Qubit indices are global: qubit ``t`` of block ``b`` is ``b * n + t``.
    """

    pairs: tuple[tuple[int, int], ...]
    exponent: int = 1
    q: int = 1


GateOp = Union[DiagonalPhase, LogicalX, TransversalCNOT, PhysicalCZ]


def sequence_level(ops: Sequence[GateOp]) -> int:
    return max((op.q for op in ops), default=1)


# states --------------------------------------------------------------


@dataclass
class PhaseState:
    """Basis strings (``keys[s, block]`` as packed words) with phase exponents."""

    q: int
    n: int
    keys: np.ndarray
    phases: np.ndarray

    @property
    def blocks(self) -> int:
        return self.keys.shape[1]

    def copy(self) -> PhaseState:
        return PhaseState(self.q, self.n, self.keys.copy(), self.phases.copy())

    def bitstrings(self) -> list[str]:
        out = []
        for row in self.keys:
            out.append("".join(_words_to_str(w, self.n) for w in row))
        return out

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.bitstrings(), (int(x) for x in self.phases)))


def _words_to_str(words: np.ndarray, n: int) -> str:
    bits = np.unpackbits(words.astype("<u8").view(np.uint8), bitorder="little")[:n]
    return "".join("1" if b else "0" for b in bits)


def _span_words(basis: BitMatrix) -> np.ndarray:
    """All ``2**rows`` XOR combinations of the rows, as packed words."""
    words = np.zeros((1, basis.words.shape[1]), dtype=np.uint64)
    for row in basis.words:
        words = np.concatenate([words, words ^ row])
    return words


def _stabilizer_words(code: CssCode) -> np.ndarray:
    basis, _ = rref(code.h_x)
    return _span_words(basis)


def _label_offset(code: CssCode, label: Sequence[int]) -> np.ndarray:
    if len(label) != code.k:
        raise DimensionError(f"label has {len(label)} bits, code retains {code.k} logicals")
    out = np.zeros(code.l_x.words.shape[1], dtype=np.uint64)
    for m, bit in enumerate(label):
        if bit:
            out ^= code.l_x.words[m]
    return out


def _check_guard(code: CssCode, blocks: int, guard: int) -> int:
    per_block = code.h_x.rank() + code.k
    total = per_block * blocks
    if (1 << total) > guard:
        raise EnumerationLimitError(f"2^{total} basis states exceed the guard of {guard}")
    return total


def enumerate_codewords(code: CssCode, label: BitVector | Sequence[int], *, guard: int = DEFAULT_GUARD) -> set[str]:
    """All basis strings ``v L_X + u H_X`` of logical label ``v``."""
    _check_guard(code, 1, guard)
    bits = label.to_array().tolist() if isinstance(label, BitVector) else list(label)
    words = _stabilizer_words(code) ^ _label_offset(code, bits)
    return {_words_to_str(w, code.n) for w in words}


def initial_state(
    code: CssCode, labels: Sequence[Sequence[int]], q: int, stabilizers: np.ndarray | None = None
) -> PhaseState:
    """Product of one coset per block, all phases zero."""
    stab = _stabilizer_words(code) if stabilizers is None else stabilizers
    per = [stab ^ _label_offset(code, lab) for lab in labels]
    size = stab.shape[0]
    idx = np.indices((size,) * len(labels)).reshape(len(labels), -1)
    keys = np.stack([per[b][idx[b]] for b in range(len(labels))], axis=1)
    return PhaseState(q, code.n, keys, np.zeros(keys.shape[0], dtype=np.int64))


def _bit(keys: np.ndarray, qubit: int, n: int) -> np.ndarray:
    b, t = divmod(qubit, n)
    return ((keys[:, b, t // WORD] >> np.uint64(t % WORD)) & np.uint64(1)).astype(np.int64)


def apply_sequence(state: PhaseState, ops: Sequence[GateOp], code: CssCode) -> PhaseState:
    """Apply ``ops`` in order and return the new state (the input is untouched)."""
    out = state.copy()
    mod = 1 << out.q
    for op in ops:
        if op.q > out.q:
            raise ValueError(f"operation at level {op.q} exceeds the state level {out.q}")
        shift = out.q - op.q
        if isinstance(op, DiagonalPhase):
            if len(op.p) != code.n:
                raise DimensionError("phase vector length does not match the code")
            _check_block(op.block, out)
            masks = _bitplanes(op.p)
            keys = out.keys[:, op.block]
            acc = np.zeros(keys.shape[0], dtype=np.int64)
            for b, m in enumerate(masks):
                acc += np.bitwise_count(keys & m).sum(axis=1).astype(np.int64) << b
            out.phases = (out.phases + (acc << shift)) % mod
        elif isinstance(op, LogicalX):
            _check_block(op.block, out)
            if not 0 <= op.index < code.k:
                raise IndexError(f"logical index {op.index} out of range")
            out.keys[:, op.block] ^= code.l_x.words[op.index]
        elif isinstance(op, TransversalCNOT):
            _check_block(op.control, out)
            _check_block(op.target, out)
            if op.control == op.target:
                raise ValueError("CNOT control and target blocks coincide")
            out.keys[:, op.target] ^= out.keys[:, op.control]
        elif isinstance(op, PhysicalCZ):
            total = code.n * out.blocks
            acc = np.zeros(out.keys.shape[0], dtype=np.int64)
            for i, j in op.pairs:
                if not (0 <= i < total and 0 <= j < total):
                    raise IndexError(f"pair ({i}, {j}) out of range")
                acc += _bit(out.keys, i, code.n) & _bit(out.keys, j, code.n)
            out.phases = (out.phases + ((op.exponent * acc) << shift)) % mod
        else:
            raise TypeError(f"unknown gate operation {op!r}")
    return out


def _check_block(block: int, state: PhaseState) -> None:
    if not 0 <= block < state.blocks:
        raise IndexError(f"block {block} out of range for {state.blocks} blocks")


def _bitplanes(p: PhaseVector) -> list[np.ndarray]:
    nw = (len(p) + WORD - 1) // WORD
    out = []
    for m in p.bit_masks():
        out.append(np.array([(m >> (WORD * w)) & ((1 << WORD) - 1) for w in range(nw)], dtype=np.uint64))
    return out


# verification ---------------------------------------------------------


@dataclass
class VerificationReport:
    """Outcome of a basis-state verification.

    ``phases`` maps each logical label (bits of all blocks, block-major) to
    its phase relative to the all-zero label.
    """

    passed: bool
    q: int
    method: str
    phases: dict[tuple[int, ...], int] = field(default_factory=dict)
    failure: str | None = None
    witness: dict | None = None
    states_checked: int = 0


Expected = Union[Mapping[tuple[int, ...], int], Callable[[tuple[int, ...]], int]]


def _expected_value(expected: Expected, label: tuple[int, ...]) -> int:
    return int(expected(label)) if callable(expected) else int(expected[label])


def linear_phase(w: Sequence[int]) -> Callable[[tuple[int, ...]], int]:
    """Expected phase ``sum(w_m v_m)``."""
    return lambda v: sum(a * b for a, b in zip(w, v))


def verify_logical_diagonal(
    code: CssCode,
    ops: Sequence[GateOp],
    expected: Expected,
    *,
    blocks: int = 1,
    q: int | None = None,
    guard: int = DEFAULT_GUARD,
) -> VerificationReport:
    """Check that ``ops`` maps each logical basis state to itself times
    ``exp(2 pi i expected(v) / 2**q)``, up to one global phase.

    Every basis string of every coset is followed through the sequence.  The
    sequence must return each string to itself (a diagonal logical action),
    give one phase per coset, and match ``expected`` after removing the
    phase of the all-zero label.
    """
    level = q if q is not None else sequence_level(ops)
    mod = 1 << level
    if code.h_z.rows and not (code.h_z @ code.l_x.T).is_zero():
        raise ValueError("an X logical representative anticommutes with a Z check")
    _check_guard(code, blocks, guard)
    stab = _stabilizer_words(code)
    report = VerificationReport(True, level, "enumeration")
    offset = None
    exp0 = _expected_value(expected, (0,) * (code.k * blocks)) % mod
    for flat in itertools.product((0, 1), repeat=code.k * blocks):
        labels = [flat[b * code.k : (b + 1) * code.k] for b in range(blocks)]
        state = initial_state(code, labels, level, stab)
        final = apply_sequence(state, ops, code)
        report.states_checked += state.keys.shape[0]
        moved = np.any(final.keys != state.keys, axis=(1, 2))
        if moved.any():
            s = int(np.flatnonzero(moved)[0])
            report.passed = False
            report.failure = "sequence is not diagonal on the code space"
            report.witness = {"label": flat, "basis_state": _row_str(state, s)}
            return report
        phase = final.phases
        if np.any(phase != phase[0]):
            s = int(np.flatnonzero(phase != phase[0])[0])
            report.passed = False
            report.failure = "not a logical operation: phases differ within one coset"
            report.witness = {
                "label": flat,
                "basis_state": _row_str(state, s),
                "phase": int(phase[s]),
                "reference_state": _row_str(state, 0),
                "reference_phase": int(phase[0]),
            }
            return report
        value = int(phase[0])
        if offset is None:
            offset = value
        rel = (value - offset) % mod
        report.phases[flat] = rel
        want = (_expected_value(expected, flat) - exp0) % mod
        if rel != want:
            report.passed = False
            report.failure = "logical phase differs from the expected value"
            report.witness = {"label": flat, "basis_state": _row_str(state, 0), "phase": rel, "expected": want}
            return report
    return report


def _row_str(state: PhaseState, s: int) -> str:
    return "".join(_words_to_str(w, state.n) for w in state.keys[s])


# intra-block controlled phase -----------------------------------------


def image_logical(code: CssCode, s_r: BitMatrix, l1: int) -> int | None:
    """Index of the X logical equal to ``l_x[l1] S_R``, if any."""
    image = (BitMatrix.from_vectors([code.l_x.row(l1)]) @ s_r).row_ints()[0]
    rows = code.l_x.row_ints()
    return rows.index(image) if image in rows else None


def cz_pairs(code: CssCode, s_r: BitMatrix, l1: int) -> tuple[tuple[int, int], ...]:
    """``(t, sigma(t))`` for ``t`` in the support of ``l_x[l1]``, where ``sigma`` is the qubit map of ``S_R``."""
    sigma = s_r.to_dense().argmax(axis=1)
    return tuple((int(t), int(sigma[t])) for t in code.l_x.row(l1).support())


def verify_intra_cz(
    code: CssCode,
    s_l: BitMatrix,
    s_r: BitMatrix,
    l1: int,
    l2: int,
    *,
    guard: int = DEFAULT_GUARD,
    method: str = "auto",
) -> VerificationReport:
    """Check that CZ on the pairs ``(t, sigma(t))`` acts as logical CZ between
    logicals ``l1`` and ``l2`` and trivially elsewhere.

    ``method`` is ``enumeration``, ``algebraic`` or ``auto`` (enumerate when
    the guard allows).  The algebraic check writes the phase as a quadratic
    form over GF(2) in the generator coefficients of the code words and
    compares every coefficient, which is exact.
    """
    if s_l @ code.h_x @ s_r != code.h_x:
        raise SymmetryPreconditionError("S_L H_X S_R != H_X")
    if code.l_x.row(l1).to_int() & code.l_x.row(l2).to_int():
        raise SymmetryPreconditionError("logicals l1 and l2 overlap")
    if image_logical(code, s_r, l1) != l2:
        raise SymmetryPreconditionError("S_R does not map l1 to l2")
    pairs = cz_pairs(code, s_r, l1)

    def expected(v: tuple[int, ...]) -> int:
        return v[l1] * v[l2]

    use_enum = method == "enumeration"
    if method == "auto":
        use_enum = (1 << (code.h_x.rank() + code.k)) <= guard
    if use_enum:
        return verify_logical_diagonal(code, [PhysicalCZ(pairs, 1, 1)], expected, guard=guard)
    if method not in ("auto", "algebraic"):
        raise ValueError(f"unknown method {method!r}")
    return _algebraic_cz(code, pairs, l1, l2)


def _algebraic_cz(code: CssCode, pairs: Sequence[tuple[int, int]], l1: int, l2: int) -> VerificationReport:
    gens = np.concatenate([code.h_x.to_dense(), code.l_x.to_dense()]).astype(np.int64)
    m = code.h_x.rows
    left = [i for i, _ in pairs]
    right = [j for _, j in pairs]
    g1 = gens[:, left]
    g2 = gens[:, right]
    linear = (g1 * g2).sum(axis=1) % 2
    cross = (g1 @ g2.T + g2 @ g1.T) % 2
    want = np.zeros_like(cross)
    want[m + l1, m + l2] = want[m + l2, m + l1] = 1
    np.fill_diagonal(cross, 0)
    report = VerificationReport(True, 1, "algebraic", states_checked=0)
    bad_lin = np.flatnonzero(linear)
    if bad_lin.size:
        report.passed = False
        report.failure = "generator picks up a phase on its own"
        report.witness = {"generator": _gen_name(int(bad_lin[0]), m)}
        return report
    diff = np.argwhere(cross != want)
    if diff.size:
        a, b = (int(x) for x in diff[0])
        report.passed = False
        report.failure = "pair of generators has the wrong cross phase"
        report.witness = {"generators": (_gen_name(a, m), _gen_name(b, m)), "phase": int(cross[a, b])}
        return report
    report.phases = {(0, 0): 0, (0, 1): 0, (1, 0): 0, (1, 1): 1}
    return report


def _gen_name(index: int, m: int) -> str:
    return f"h_x[{index}]" if index < m else f"l_x[{index - m}]"


# gate sequence files ---------------------------------------------------


class GateFileError(ValueError):
    """A gate sequence file line could not be parsed."""


def parse_gate_file(text: str, n: int) -> list[GateOp]:
    """Parse a line-oriented gate sequence.

    Lines (``#`` starts a comment; ``block=<b>`` may follow PHASE and LX)::

        PHASE <q> <p_0> ... <p_{n-1}>
        PHASE <q> uniform <value> [<first>:<stop>]
        LX <index>
        CNOT <control_block> <target_block>
        CZ <q> <i>,<j> <i>,<j> ...
    """
    ops: list[GateOp] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        opts = {}
        while words and "=" in words[-1]:
            k, v = words.pop().split("=", 1)
            opts[k] = v
        try:
            block = int(opts.pop("block", 0))
            if opts:
                raise GateFileError(f"line {lineno}: unknown option {sorted(opts)[0]!r}")
            head, args = words[0].upper(), words[1:]
            if head == "PHASE":
                q = int(args[0])
                if len(args) > 1 and args[1] == "uniform":
                    value = int(args[2])
                    lo, hi = (int(x) for x in args[3].split(":")) if len(args) > 3 else (0, n)
                    entries = [value % (1 << q) if lo <= t < hi else 0 for t in range(n)]
                else:
                    entries = [int(x) for x in args[1:]]
                    if len(entries) != n:
                        raise GateFileError(f"line {lineno}: expected {n} phase entries, got {len(entries)}")
                ops.append(DiagonalPhase(PhaseVector(q, tuple(e % (1 << q) for e in entries)), block))
            elif head == "LX":
                ops.append(LogicalX(int(args[0]), block))
            elif head == "CNOT":
                ops.append(TransversalCNOT(int(args[0]), int(args[1])))
            elif head == "CZ":
                pairs = tuple(tuple(int(x) for x in a.split(",")) for a in args[1:])
                if any(len(pr) != 2 for pr in pairs):
                    raise GateFileError(f"line {lineno}: CZ pairs are written i,j")
                ops.append(PhysicalCZ(pairs, 1, int(args[0])))
            else:
                raise GateFileError(f"line {lineno}: unknown operation {words[0]!r}")
        except (IndexError, ValueError) as exc:
            if isinstance(exc, GateFileError):
                raise
            raise GateFileError(f"line {lineno}: {exc}") from exc
    return ops
