import numpy as np
import pytest

import oracles
from qldpc_transversal import codelib
from qldpc_transversal import constructions as cons
from qldpc_transversal.css import assemble
from qldpc_transversal.gf2 import BitMatrix, block_diag, hstack
from qldpc_transversal.simverify import (
    DiagonalPhase,
    EnumerationLimitError,
    GateFileError,
    LogicalX,
    PhysicalCZ,
    SymmetryPreconditionError,
    TransversalCNOT,
    apply_sequence,
    enumerate_codewords,
    image_logical,
    initial_state,
    linear_phase,
    parse_gate_file,
    verify_intra_cz,
    verify_logical_diagonal,
)
from qldpc_transversal.transversality import PhaseVector


def _random_phase(rng, n, q):
    return PhaseVector(q, tuple(int(x) for x in rng.integers(0, 1 << q, n)))


class TestEnumeration:
    def test_steane_cosets(self, steane):
        even = enumerate_codewords(steane, [0])
        odd = enumerate_codewords(steane, [1])
        assert len(even) == len(odd) == 8
        assert "0000000" in even and "1111111" in odd
        assert not even & odd
        assert {s.count("1") for s in even} == {0, 4}
        # same set as the independent span oracle
        span = oracles.span(steane.h_x.to_dense())
        assert {int(s[::-1], 2) for s in even} == span

    def test_guard(self, kirkman):
        with pytest.raises(EnumerationLimitError):
            enumerate_codewords(kirkman, [0] * 3)
        with pytest.raises(EnumerationLimitError):
            verify_logical_diagonal(codelib.build_named("steane"), [], {(0,): 0, (1,): 0}, guard=8)


class TestPhases:
    def test_transversal_s(self, steane):
        rep = verify_logical_diagonal(steane, [DiagonalPhase(PhaseVector.uniform(7, 2))], linear_phase([3]))
        assert rep.passed and rep.phases == {(0,): 0, (1,): 3}
        assert rep.states_checked == 16

    def test_transversal_t_is_not_logical(self, steane):
        rep = verify_logical_diagonal(steane, [DiagonalPhase(PhaseVector.uniform(7, 3))], linear_phase([1]))
        assert not rep.passed
        assert rep.failure.startswith("not a logical operation")

    def test_wrong_expectation_is_reported(self, steane):
        rep = verify_logical_diagonal(steane, [DiagonalPhase(PhaseVector.uniform(7, 2))], linear_phase([1]))
        assert not rep.passed
        assert rep.witness["phase"] == 3 and rep.witness["expected"] == 1

    def test_phase_then_inverse_is_identity(self, steane, rng):
        for q in (1, 2, 3):
            p = _random_phase(rng, 7, q)
            state = initial_state(steane, [[1]], q)
            final = apply_sequence(state, [DiagonalPhase(p), DiagonalPhase(p.inverse())], steane)
            assert not final.phases.any()
            assert np.array_equal(final.keys, state.keys)

    def test_phases_add(self, steane, rng):
        q = 3
        for _ in range(10):
            p, p2 = _random_phase(rng, 7, q), _random_phase(rng, 7, q)
            both = PhaseVector(q, tuple((a + b) % 8 for a, b in zip(p.entries, p2.entries)))
            state = initial_state(steane, [[0]], q)
            a = apply_sequence(state, [DiagonalPhase(p), DiagonalPhase(p2)], steane)
            b = apply_sequence(state, [DiagonalPhase(both)], steane)
            assert np.array_equal(a.phases, b.phases)

    def test_phase_matches_direct_sum(self, steane, rng):
        p = _random_phase(rng, 7, 3)
        state = apply_sequence(initial_state(steane, [[1]], 3), [DiagonalPhase(p)], steane)
        for s, phase in state.as_dict().items():
            assert phase == sum(int(c) * e for c, e in zip(s, p.entries)) % 8

    def test_k_zero_code(self):
        code = assemble(BitMatrix.from_rows(["11"]), BitMatrix.from_rows(["11"]))
        assert code.k == 0
        rep = verify_logical_diagonal(code, [DiagonalPhase(PhaseVector(2, (1, 3)))], {(): 0})
        assert rep.passed and rep.phases == {(): 0}


def test_cnot_on_two_steane_blocks(steane):
    for a in (0, 1):
        for b in (0, 1):
            state = initial_state(steane, [[a], [b]], 1)
            final = apply_sequence(state, [TransversalCNOT(0, 1)], steane)
            got = set(final.bitstrings())
            want = {x + y for x in enumerate_codewords(steane, [a]) for y in enumerate_codewords(steane, [a ^ b])}
            assert got == want


def test_cnot_alone_is_not_diagonal(steane):
    rep = verify_logical_diagonal(steane, [TransversalCNOT(0, 1)], lambda v: 0, blocks=2)
    assert not rep.passed
    assert rep.failure == "sequence is not diagonal on the code space"


def test_logical_x_moves_cosets(steane):
    state = initial_state(steane, [[0]], 1)
    final = apply_sequence(state, [LogicalX(0)], steane)
    assert set(final.bitstrings()) == enumerate_codewords(steane, [1])


class TestCommutatorIdentities:
    def test_phase_logical_x_commutator(self, steane):
        # P X P^-1 X leaves the relative phase 2 w v with w = 3 for transversal S
        p = PhaseVector.uniform(7, 2)
        ops = [DiagonalPhase(p), LogicalX(0), DiagonalPhase(p.inverse()), LogicalX(0)]
        rep = verify_logical_diagonal(steane, ops, linear_phase([2 * 3]))
        assert rep.passed and rep.phases[(1,)] == 2

    def test_direct_t_commutator_gives_s_on_each_qubit(self):
        code = codelib.build_named("direct_t")
        sup = [1] * 30 + [0] * (code.n - 30)
        p = PhaseVector(3, tuple(7 * s for s in sup))
        assert verify_logical_diagonal(code, [DiagonalPhase(p)], linear_phase([1, 1])).passed
        for i in range(code.k):
            ops = [DiagonalPhase(p), LogicalX(i), DiagonalPhase(p.inverse()), LogicalX(i)]
            w = [2 if m == i else 0 for m in range(code.k)]
            rep = verify_logical_diagonal(code, ops, linear_phase(w))
            assert rep.passed, rep.failure

    def test_cnot_conjugation_gives_controlled_phase(self):
        code = cons.direct_construction(codelib.matrix("hamming7_sym"), 1, 1, q=2)
        sup = [1] * 7 + [0] * 7
        p = PhaseVector(2, tuple(sup))
        w = 3
        ops = [TransversalCNOT(0, 1), DiagonalPhase(p, 1), TransversalCNOT(0, 1), DiagonalPhase(p.inverse(), 1)]
        rep = verify_logical_diagonal(code, ops, lambda v: w * v[0] - 2 * w * v[0] * v[1], blocks=2)
        assert rep.passed, rep.failure
        assert rep.phases == {(0, 0): 0, (0, 1): 0, (1, 0): 3, (1, 1): 1}


def _two_steanes(representative: str):
    steane = codelib.build_named("steane")
    zero = BitMatrix.zeros(1, 7)
    lx = BitMatrix.from_rows([representative])
    lz = BitMatrix.from_rows(["1111111"])
    code = assemble(block_diag([steane.h_x, steane.h_x]), block_diag([steane.h_z, steane.h_z]))
    code = code.with_logicals(
        BitMatrix.from_vectors([hstack([lx, zero]).row(0), hstack([zero, lx]).row(0)]),
        BitMatrix.from_vectors([hstack([lz, zero]).row(0), hstack([zero, lz]).row(0)]),
    )
    swap_rows = BitMatrix.permutation([3, 4, 5, 0, 1, 2])
    swap_qubits = BitMatrix.permutation(list(range(7, 14)) + list(range(7)))
    return code, swap_rows, swap_qubits


class TestIntraCZ:
    def test_swap_symmetry_gives_logical_cz(self):
        code, s_l, s_r = _two_steanes("1111111")
        enum = verify_intra_cz(code, s_l, s_r, 0, 1, method="enumeration")
        alg = verify_intra_cz(code, s_l, s_r, 0, 1, method="algebraic")
        assert enum.passed and alg.passed
        assert enum.phases == alg.phases == {(0, 0): 0, (0, 1): 0, (1, 0): 0, (1, 1): 1}

    def test_bad_representative_fails_both_ways(self):
        # weight-3 representative: stabilizer generators pick up odd cross terms
        code, s_l, s_r = _two_steanes("1101000")
        enum = verify_intra_cz(code, s_l, s_r, 0, 1, method="enumeration")
        alg = verify_intra_cz(code, s_l, s_r, 0, 1, method="algebraic")
        assert not enum.passed and not alg.passed

    def test_even_weight_logical_gives_no_cz(self):
        # [[4,2,2]] copies keeping one logical of weight 2: the cross phase is |l2| = 0 mod 2
        h = BitMatrix.from_rows(["1111"])
        block = assemble(h, h).with_logicals(BitMatrix.from_rows(["1100"]), BitMatrix.from_rows(["1010"]))
        zero = BitMatrix.zeros(1, 4)
        code = assemble(block_diag([h, h]), block_diag([h, h])).with_logicals(
            BitMatrix.from_vectors([hstack([block.l_x, zero]).row(0), hstack([zero, block.l_x]).row(0)]),
            BitMatrix.from_vectors([hstack([block.l_z, zero]).row(0), hstack([zero, block.l_z]).row(0)]),
        )
        s_l = BitMatrix.permutation([1, 0])
        s_r = BitMatrix.permutation([4, 5, 6, 7, 0, 1, 2, 3])
        enum = verify_intra_cz(code, s_l, s_r, 0, 1, method="enumeration")
        alg = verify_intra_cz(code, s_l, s_r, 0, 1, method="algebraic")
        assert not enum.passed and not alg.passed
        assert enum.phases.get((1, 1), 0) == 0

    def test_preconditions(self):
        code, s_l, s_r = _two_steanes("1111111")
        with pytest.raises(SymmetryPreconditionError):
            verify_intra_cz(code, BitMatrix.identity(6), s_r, 0, 1)
        with pytest.raises(SymmetryPreconditionError):
            verify_intra_cz(code, s_l, s_r, 0, 0)
        with pytest.raises(SymmetryPreconditionError):
            verify_intra_cz(code, BitMatrix.identity(6), BitMatrix.identity(14), 0, 1)

    @pytest.mark.slow
    def test_k16_all_pairs(self, k16):
        pv, pe = codelib.matrix("k16_vertex_cycle"), codelib.matrix("k16_edge_cycle")
        covered = set()
        for power in range(1, 16):
            s_l, s_r = cons.lift_symmetry_balanced(pv**power, pe**power, 15)
            for l1 in range(16):
                l2 = image_logical(k16, s_r, l1)
                assert l2 is not None and l2 != l1
                assert verify_intra_cz(k16, s_l, s_r, l1, l2).passed
                covered.add(frozenset((l1, l2)))
        assert len(covered) == 16 * 15 // 2

    def test_k16_lifted_symmetry(self, k16):
        s_l, s_r = cons.lift_symmetry_balanced(codelib.matrix("k16_vertex_cycle"), codelib.matrix("k16_edge_cycle"), 15)
        rep = verify_intra_cz(k16, s_l, s_r, 0, 15)
        assert rep.method == "algebraic" and rep.passed


class TestGateFile:
    def test_parse(self):
        ops = parse_gate_file(
            "# comment\nPHASE 2 uniform 1 0:3\nPHASE 1 1 0 1 0\nLX 0 block=1\nCNOT 0 1\nCZ 1 0,4 1,5\n", 4
        )
        assert ops[0] == DiagonalPhase(PhaseVector(2, (1, 1, 1, 0)))
        assert ops[1].p.entries == (1, 0, 1, 0)
        assert ops[2] == LogicalX(0, 1)
        assert ops[3] == TransversalCNOT(0, 1)
        assert ops[4] == PhysicalCZ(((0, 4), (1, 5)), 1, 1)

    @pytest.mark.parametrize(
        "text",
        ["PHASE 2 1 1\n", "FOO 1\n", "LX\n", "LX 0 colour=red\n", "CZ 1 0-1\n", "PHASE 2 uniform x\n"],
    )
    def test_rejects(self, text):
        with pytest.raises(GateFileError):
            parse_gate_file(text, 4)

    def test_file_runs_like_direct_ops(self, steane):
        ops = parse_gate_file("PHASE 2 uniform 1\n", 7)
        assert verify_logical_diagonal(steane, ops, linear_phase([3])).passed
