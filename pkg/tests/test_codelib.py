import hashlib
import itertools

import numpy as np
import pytest

from qldpc_transversal import codelib
from qldpc_transversal.gf2 import BitMatrix, BitVector, kernel
from qldpc_transversal.transversality import local_violations


def test_kirkman_design():
    i0 = codelib.matrix("kirkman_i0").to_dense().astype(int)
    assert i0.shape == (15, 35)
    assert set(i0.sum(axis=1)) == {7}
    assert set(i0.sum(axis=0)) == {3}
    # every pair of points lies in exactly one block
    overlaps = i0 @ i0.T
    assert np.all(overlaps[~np.eye(15, dtype=bool)] == 1)


def test_kirkman_symmetry():
    i0, r0, c = (codelib.matrix(x) for x in ("kirkman_i0", "kirkman_r0", "kirkman_c"))
    assert r0 @ i0 == i0 @ c.T
    assert r0**5 == BitMatrix.identity(15)


@pytest.mark.parametrize("name, rows", [("hamming7_sym", 7), ("hamming15_sym", 15)])
def test_symmetric_hamming_local_codes(name, rows):
    c0 = codelib.matrix(name)
    assert c0.shape == (rows, rows)
    assert c0 == c0.T
    dense = c0.to_dense().astype(int)
    assert set(dense.sum(axis=1)) == {(rows + 1) // 2}
    # the all-ones vector annihilates c0 (every column has even weight)
    assert not c0.T.mul_vec(BitVector.ones(rows)).weight()
    assert kernel(c0).rows > 0


def test_local_weight_conditions():
    assert local_violations(codelib.matrix("hamming7_sym"), 2) == []
    assert local_violations(codelib.matrix("hamming15_sym"), 3) == []
    assert local_violations(codelib.matrix("hamming15_sym"), 4) != []


def test_k16_incidence():
    inc = codelib.matrix("k16_incidence").to_dense().astype(int)
    assert inc.shape == (16, 120)
    assert set(inc.sum(axis=0)) == {2}
    assert set(inc.sum(axis=1)) == {15}
    edges = [tuple(np.flatnonzero(inc[:, e])) for e in range(120)]
    assert edges == list(itertools.combinations(range(16), 2))


def test_k16_symmetries():
    i0, r0, c = (codelib.matrix(x) for x in ("k16_i0", "k16_r0", "k16_c"))
    assert r0 @ i0 == i0 @ c.T
    pv, pe = codelib.matrix("k16_vertex_cycle"), codelib.matrix("k16_edge_cycle")
    assert pv @ i0 == i0 @ pe.T
    assert pv**16 == BitMatrix.identity(48)


def test_cycle10_graph():
    i0 = codelib.matrix("cycle10_i0").to_dense().astype(int)
    assert i0.shape == (10, 15)
    assert set(i0.sum(axis=0)) == {2} and set(i0.sum(axis=1)) == {3}


def test_registry_lookup():
    assert "steane" in codelib.names() and "kirkman_i0" in codelib.names()
    assert codelib.get("kirkman_i0").kind == "graph"
    assert codelib.get("rep3").kind == "matrix"
    assert codelib.get("k16").kind == "code-recipe"
    with pytest.raises(codelib.UnknownArtifactError):
        codelib.get("no_such_thing")
    with pytest.raises(codelib.UnknownArtifactError):
        codelib.matrix("steane")
    with pytest.raises(codelib.UnknownArtifactError):
        codelib.build_named("rep3")


def test_resolve_matrix(tmp_path):
    assert codelib.resolve_matrix({"bmat": "1 2\n11\n"}) == BitMatrix.from_rows(["11"])
    (tmp_path / "m.bmat").write_text("1 2\n10\n")
    assert codelib.resolve_matrix({"path": "m.bmat"}, tmp_path) == BitMatrix.from_rows(["10"])
    with pytest.raises(codelib.RecipeError):
        codelib.resolve_matrix("missing")
    with pytest.raises(codelib.RecipeError):
        codelib.resolve_matrix(3)


def test_recipe_errors():
    with pytest.raises(codelib.RecipeError):
        codelib.build({"construction": "css", "h_x": "rep3"})
    with pytest.raises(codelib.RecipeError):
        codelib.build({"construction": "mystery"})


def test_recipes_build(steane, cycle10):
    assert steane.parameters() == "[[7,1]]"
    assert cycle10.parameters() == "[[45,5]]"
    hp = codelib.build({"construction": "hypergraph_product", "a": {"bmat": "1 2\n11\n"}, "b": {"bmat": "1 2\n11\n"}})
    assert hp.parameters() == "[[5,1]]"
    bp = codelib.build(
        {"construction": "balanced_product", "a": "rep3", "r": {"bmat": "2 2\n10\n01\n"},
         "c": {"bmat": "3 3\n100\n010\n001\n"}, "order": 1}
    )
    bp.validate()


# sha256 prefixes of the bmat text; a transcription change must be deliberate
CHECKSUMS = {
    "colourful_A": "d72384135fe687b3",
    "colourful_i0": "9960b2243cf9a67d",
    "cycle10_c": "543658508c19cea9",
    "cycle10_c0": "cc5de094bfc11cb3",
    "cycle10_i0": "3bbaf81069b5cf4d",
    "cycle10_r0": "33b2beabf5b5c355",
    "hamming15_sym": "105d7870c39eb4fb",
    "hamming7_sym": "d750a038cc00d271",
    "k16_c": "cd74877a3ded4c5f",
    "k16_edge_cycle": "a93c5c10a1d0357d",
    "k16_i0": "be254a0758b9b03f",
    "k16_incidence": "5304166f4020885f",
    "k16_r0": "9d95102ea92e46af",
    "k16_vertex_cycle": "54f4a06c456c7bcc",
    "kirkman_c": "34e1088c80bd35a5",
    "kirkman_i0": "610797d100c24e0f",
    "kirkman_r0": "cef633b7f2359027",
    "rep3": "bc16cbcab6d978bb",
    "steane_hx": "9d13d58e557253f0",
}


@pytest.mark.parametrize("name", sorted(CHECKSUMS))
def test_matrix_checksums(name):
    digest = hashlib.sha256(codelib.matrix(name).to_bmat().encode()).hexdigest()
    assert digest[:16] == CHECKSUMS[name]


def test_every_matrix_has_a_checksum():
    registered = {n for n in codelib.names() if codelib.get(n).kind != "code-recipe"}
    assert registered == set(CHECKSUMS)
