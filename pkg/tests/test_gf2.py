import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from qldpc_transversal.gf2 import (
    BitMatrix,
    BitVector,
    BmatFormatError,
    DimensionError,
    RowSpace,
    block_diag,
    dot_rows,
    fold_products,
    hstack,
    inverse,
    kernel,
    kron,
    rank,
    rref,
    vstack,
    xor_weight_expand,
)


def bit_arrays(max_rows=12, max_cols=70):
    return st.tuples(st.integers(0, max_rows), st.integers(1, max_cols)).flatmap(
        lambda s: arrays(np.uint8, s, elements=st.integers(0, 1))
    )


class TestBitVector:
    def test_roundtrip(self):
        v = BitVector.from_bits("1011000001")
        assert str(v) == "1011000001"
        assert v.weight() == 4
        assert v.support() == [0, 2, 3, 9]
        assert BitVector.from_int(v.to_int(), 10) == v

    def test_ops(self):
        a = BitVector.from_bits("1100")
        b = BitVector.from_bits("1010")
        assert str(a & b) == "1000"
        assert str(a ^ b) == "0110"
        with pytest.raises(DimensionError):
            a & BitVector.zeros(5)

    def test_long_vectors_span_words(self):
        v = BitVector.unit(130, 200)
        assert v.support() == [130]
        assert BitVector.ones(200).weight() == 200


class TestBitMatrix:
    def test_bmat_roundtrip(self):
        m = BitMatrix.parse("2 3\n101\n011\n")
        assert m.shape == (2, 3)
        assert BitMatrix.parse(m.to_bmat()) == m

    @pytest.mark.parametrize(
        "text",
        ["2 3\n101\n01x\n", "2 3\n101\n", "2 3\n1010\n011\n", "a b\n", "", "1 2\n1 0\n"],
    )
    def test_bmat_rejects(self, text):
        with pytest.raises(BmatFormatError):
            BitMatrix.parse(text)

    def test_permutation_convention(self):
        p = BitMatrix.permutation([2, 0, 1])
        x = BitMatrix.from_rows(["100", "010", "001"])
        assert p @ x == p
        assert p.to_dense()[0, 2] == 1

    def test_kron_matches_numpy(self, rng):
        a = rng.integers(0, 2, (3, 4), dtype=np.uint8)
        b = rng.integers(0, 2, (2, 5), dtype=np.uint8)
        assert np.array_equal(kron(BitMatrix.from_dense(a), BitMatrix.from_dense(b)).to_dense(), np.kron(a, b))

    def test_stacking(self):
        a = BitMatrix.identity(2)
        b = BitMatrix.ones(2, 1)
        assert hstack([a, b]).to_dense().tolist() == [[1, 0, 1], [0, 1, 1]]
        assert vstack([a, b.T]).rows == 3
        d = block_diag([a, b])
        assert d.shape == (4, 3)
        with pytest.raises(DimensionError):
            hstack([a, BitMatrix.zeros(3, 1)])

    def test_matmul_and_power(self):
        p = BitMatrix.permutation([1, 2, 3, 4, 0])
        assert p**5 == BitMatrix.identity(5)
        assert p**0 == BitMatrix.identity(5)
        with pytest.raises(DimensionError):
            p @ BitMatrix.zeros(4, 4)

    def test_empty_conventions(self):
        assert rank(BitMatrix.zeros(0, 4)) == 0
        assert kernel(BitMatrix.zeros(0, 4)) == BitMatrix.identity(4)

    def test_inverse(self):
        m = BitMatrix.from_rows(["110", "011", "001"])
        assert m @ inverse(m) == BitMatrix.identity(3)
        with pytest.raises(np.linalg.LinAlgError):
            inverse(BitMatrix.from_rows(["11", "11"]))


@settings(max_examples=60, deadline=None)
@given(bit_arrays(max_rows=64, max_cols=64))
def test_rank_equals_transpose_rank(a):
    m = BitMatrix.from_dense(a)
    assert rank(m) == rank(m.T) == oracles.rank(a)


@settings(max_examples=60, deadline=None)
@given(bit_arrays())
def test_kernel_dimension_and_orthogonality(a):
    m = BitMatrix.from_dense(a)
    ker = kernel(m)
    assert ker.rows == m.cols - rank(m)
    assert (m @ ker.T).is_zero()
    assert rank(ker) == ker.rows


@settings(max_examples=40, deadline=None)
@given(bit_arrays())
def test_rref_pivots(a):
    m = BitMatrix.from_dense(a)
    reduced, pivots = rref(m)
    dense = reduced.to_dense()
    for r, c in enumerate(pivots):
        assert dense[:, c].tolist() == [1 if i == r else 0 for i in range(len(pivots))]
    span = RowSpace(m.row_ints())
    assert all(span.contains(v) for v in reduced.row_ints())


def test_xor_identity_on_random_vectors(rng):
    for _ in range(1000):
        n = int(rng.integers(1, 40))
        x = rng.integers(0, 2, n)
        y = rng.integers(0, 2, n)
        bx, by = BitVector.from_bits(x), BitVector.from_bits(y)
        assert np.array_equal((bx ^ by).to_array(), x + y - 2 * dot_rows(bx, by).to_array())


def test_xor_weight_expansion_on_random_row_sets(rng):
    for _ in range(1000):
        q = int(rng.integers(1, 5))
        rows = rng.integers(0, 2, (int(rng.integers(1, 7)), int(rng.integers(1, 20))), dtype=np.uint8)
        m = BitMatrix.from_dense(rows)
        assert xor_weight_expand(m, q) == int(np.bitwise_xor.reduce(rows, axis=0).sum()) % (1 << q)


def test_xor_weight_expand_examples(steane):
    assert xor_weight_expand(BitMatrix.from_rows(["0011", "1010"]), 2) == 2
    for q in (1, 2, 3, 4):
        assert xor_weight_expand(BitMatrix.from_rows(["1111"]), q) == 4 % (1 << q)
    h = steane.h_x
    for size in range(1, 4):
        for subset in itertools.combinations(range(3), size):
            assert xor_weight_expand(h.select_rows(subset), 2) == 0


def test_fold_products_match_pairwise_dots(rng):
    for _ in range(20):
        rows = int(rng.integers(2, 11))
        m = BitMatrix.from_dense(rng.integers(0, 2, (rows, 17), dtype=np.uint8))
        folded = fold_products(m, 2)
        pairs = list(itertools.combinations(range(rows), 2))
        assert folded.rows == len(pairs)
        for r, (a, b) in enumerate(pairs):
            assert folded.row(r) == dot_rows(m.row(a), m.row(b))
        triple = fold_products(m, 3, skip_zero=True)
        assert all(v.weight() for v in triple)


def test_fold_products_rejects_order_zero():
    with pytest.raises(ValueError):
        fold_products(BitMatrix.identity(2), 0)
