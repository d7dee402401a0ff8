"""Registry of named matrices, graphs and code recipes.

Displayed matrices are stored as bmat text; structured ones (cyclic
permutations, the complete-graph incidence matrix) are generated.  Recipes are
plain dicts in the same shape as the YAML recipe files read by the CLI.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Mapping
from dataclasses import dataclass
from functools import cache
from pathlib import Path
from typing import Any, Literal

import numpy as np

from . import constructions as cons
from .css import CssCode, assemble
from .gf2 import BitMatrix, BitVector, kron

ArtifactKind = Literal["matrix", "graph", "code-recipe"]


class UnknownArtifactError(KeyError):
    """No artifact is registered under the requested name."""


@dataclass(frozen=True)
class NamedArtifact:
    name: str
    kind: ArtifactKind
    payload: Any
    description: str = ""


_STEANE_HX = """3 7
1001011
0101101
0010111
"""

_HAMMING7_SYM = """7 7
1001101
0101011
0010111
1100110
1011010
0111100
1110001
"""

_HAMMING15_SYM = """15 15
100011100011101
010010011011011
001001010110111
000100101101111
110001111000110
101010110101010
100111001110010
011011001101100
010110110110100
001101111011000
111000101110001
110101010101001
101110011000101
011111100000011
111100000011110
"""

_KIRKMAN_I0 = """15 35
10001100101000010000100000000000000
11000010010100001000010000000000000
01100101000010000100001000000000000
00110010100001000010000100000000000
00011001010000100001000010000000000
10000000000010100000000101000110000
01000000001001000000000011100001000
00100000000100100000100000110000100
00010000001010000000010000011000010
00001000000101000000001000001100001
00000100000000000011010001000000101
00000010000000010001001000100010010
00000001000000011000000100010001001
00000000100000001100000010001010100
00000000010000000110100000000101010
"""

_REP3 = """2 3
110
011
"""

_COLOURFUL_I0 = """6 9
100001100
110000010
011000001
001100010
000110100
000011001
"""

_COLOURFUL_A = """12 9
100001000
000001100
100000010
110000000
001000001
011000000
001100000
000100010
000100100
000010100
000001001
000011000
"""

_CYCLE10_C0 = """3 3
110
011
101
"""

# per-vertex column orders realising the 12x9 Tanner matrix above
COLOURFUL_ASSIGNMENT = ((0, 1, 2), (1, 2, 0), (2, 1, 0), (0, 1, 2), (0, 2, 1), (2, 1, 0))


def _eye(n: int) -> BitMatrix:
    return BitMatrix.identity(n)


def _q5(power: int = 1) -> BitMatrix:
    return cons.cycle_permutation(5, power)


def _cycle10_i0() -> BitMatrix:
    from .gf2 import hstack, vstack

    return vstack([hstack([_eye(5), _eye(5), _eye(5)]), hstack([_eye(5), _q5(-1), _q5(2)])])


def complete_graph_incidence(n: int) -> BitMatrix:
    """Vertex-edge incidence of K_n, edges in lexicographic order of vertex pairs."""
    edges = list(itertools.combinations(range(n), 2))
    dense = np.zeros((n, len(edges)), dtype=np.uint8)
    for e, (a, b) in enumerate(edges):
        dense[a, e] = dense[b, e] = 1
    return BitMatrix.from_dense(dense)


_P3 = BitMatrix.permutation([1, 2, 0])
_K16_C_BLOCK = BitMatrix.permutation([2, 0, 1])


def _k16_vertex_cycle() -> BitMatrix:
    return kron(cons.cycle_permutation(16), _eye(3))


def _k16_edge_cycle() -> BitMatrix:
    return kron(cons.induced_edge_permutation(complete_graph_incidence(16), cons.cycle_permutation(16)), _eye(3))


_MATRICES: dict[str, tuple[Callable[[], BitMatrix], str]] = {
    "steane_hx": (lambda: BitMatrix.parse(_STEANE_HX), "X checks of the 7-qubit Steane code"),
    "hamming7_sym": (lambda: BitMatrix.parse(_HAMMING7_SYM), "symmetric 7-bit Hamming local code"),
    "hamming15_sym": (lambda: BitMatrix.parse(_HAMMING15_SYM), "symmetric 15-bit Hamming local code"),
    "kirkman_i0": (lambda: BitMatrix.parse(_KIRKMAN_I0), "15x35 incidence matrix of a (15,3,1) block design"),
    "kirkman_r0": (lambda: kron(_eye(3), _q5()), "order-5 vertex symmetry of kirkman_i0"),
    "kirkman_c": (lambda: kron(_eye(7), _q5()).T, "edge permutation paired with kirkman_r0"),
    "rep3": (lambda: BitMatrix.parse(_REP3), "3-bit repetition code"),
    "colourful_i0": (lambda: BitMatrix.parse(_COLOURFUL_I0), "incidence matrix of a 6-vertex 3-regular graph"),
    "colourful_A": (lambda: BitMatrix.parse(_COLOURFUL_A), "Tanner matrix of colourful_i0 with rep3"),
    "cycle10_i0": (_cycle10_i0, "10-cycle with diameters, 10x15 incidence"),
    "cycle10_c0": (lambda: BitMatrix.parse(_CYCLE10_C0), "3-bit cyclic local code"),
    "cycle10_r0": (lambda: kron(_eye(2), _q5()), "order-5 vertex symmetry of cycle10_i0"),
    "cycle10_c": (lambda: kron(_eye(3), _q5(-1)), "edge permutation paired with cycle10_r0"),
    "k16_incidence": (lambda: complete_graph_incidence(16), "incidence of K16, lexicographic edges"),
    "k16_i0": (lambda: kron(complete_graph_incidence(16), _eye(3)), "K16 incidence lifted by I_3"),
    "k16_r0": (lambda: kron(_eye(16), _P3), "order-3 vertex symmetry of k16_i0"),
    "k16_c": (lambda: kron(_eye(120), _K16_C_BLOCK), "edge permutation paired with k16_r0"),
    "k16_vertex_cycle": (_k16_vertex_cycle, "16-cycle on the vertices of k16_i0"),
    "k16_edge_cycle": (_k16_edge_cycle, "edge permutation induced by k16_vertex_cycle"),
}

_GRAPHS = {"k16_incidence", "kirkman_i0", "cycle10_i0", "colourful_i0"}

_RECIPES: dict[str, tuple[dict[str, Any], str]] = {
    "steane": ({"construction": "css", "h_x": "steane_hx", "h_z": "steane_hx", "q": 2}, "[[7,1,3]] Steane code"),
    "kirkman": (
        {
            "construction": "transpose_tanner_balanced",
            "i0": "kirkman_i0",
            "c0": "hamming7_sym",
            "r0": "kirkman_r0",
            "c": "kirkman_c",
            "v_z": ["0001110"],
            "q": 2,
            "support": "left",
        },
        "[[140,16]] balanced product from the block design",
    ),
    "k16": (
        {
            "construction": "transpose_tanner_balanced",
            "i0": "k16_i0",
            "c0": "hamming15_sym",
            "r0": "k16_r0",
            "c": "k16_c",
            "extra_symmetries": [["k16_vertex_cycle", "k16_edge_cycle"]],
            "q": 3,
            "support": "left",
        },
        "[[1080,232]] balanced product from K16",
    ),
    "cycle10": (
        {
            "construction": "transpose_tanner_balanced",
            "i0": "cycle10_i0",
            "c0": "cycle10_c0",
            "r0": "cycle10_r0",
            "c": "cycle10_c",
        },
        "[[45,5]] balanced product from the 10-cycle with diameters",
    ),
    "direct_s": (
        {"construction": "direct", "c0": "hamming7_sym", "k": 1, "d_x": 3, "q": 2, "support": "left"},
        "direct construction with transversal S, one logical qubit",
    ),
    "direct_t": (
        {"construction": "direct", "c0": "hamming15_sym", "k": 2, "d_x": 1, "q": 3, "support": "left"},
        "direct construction with transversal T, two logical qubits",
    ),
}


@cache
def get(name: str) -> NamedArtifact:
    """Look up a registered artifact by name."""
    if name in _MATRICES:
        make, desc = _MATRICES[name]
        return NamedArtifact(name, "graph" if name in _GRAPHS else "matrix", make(), desc)
    if name in _RECIPES:
        recipe, desc = _RECIPES[name]
        return NamedArtifact(name, "code-recipe", dict(recipe), desc)
    raise UnknownArtifactError(name)


def names() -> list[str]:
    return sorted(_MATRICES) + sorted(_RECIPES)


def matrix(name: str) -> BitMatrix:
    art = get(name)
    if not isinstance(art.payload, BitMatrix):
        raise UnknownArtifactError(f"{name} is not a matrix")
    return art.payload


# recipes -------------------------------------------------------------


class RecipeError(ValueError):
    """A recipe is missing fields or names an unusable input."""


def resolve_matrix(ref: Any, base: Path | None = None) -> BitMatrix:
    """A matrix given as a registry name, ``{bmat: text}`` or ``{path: file}``."""
    if isinstance(ref, BitMatrix):
        return ref
    if isinstance(ref, str):
        try:
            return matrix(ref)
        except UnknownArtifactError as exc:
            raise RecipeError(f"unknown matrix {ref!r}") from exc
    if isinstance(ref, Mapping):
        if "bmat" in ref:
            return BitMatrix.parse(ref["bmat"])
        if "path" in ref:
            path = Path(ref["path"])
            if base is not None and not path.is_absolute():
                path = base / path
            return BitMatrix.parse(path.read_text())
    raise RecipeError(f"cannot resolve matrix reference {ref!r}")


def _vectors(items: Any) -> list[BitVector] | None:
    if items is None:
        return None
    return [BitVector.from_bits(str(x)) for x in items]


def build(recipe: Mapping[str, Any], base: Path | None = None) -> CssCode:
    """Build the code a recipe describes."""
    kind = recipe.get("construction")
    name = recipe.get("name", kind or "")
    mat = lambda key: resolve_matrix(recipe[key], base)  # noqa: E731
    try:
        if kind == "css":
            return assemble(mat("h_x"), mat("h_z"), name=name)
        if kind == "transpose_tanner_balanced":
            extra = [(resolve_matrix(a, base), resolve_matrix(b, base)) for a, b in recipe.get("extra_symmetries", [])]
            return cons.transpose_tanner_balanced(
                mat("i0"), mat("c0"), mat("r0"), mat("c"),
                extra=extra, v=_vectors(recipe.get("v")), v_z=_vectors(recipe.get("v_z")), name=name,
            )
        if kind == "balanced_product":
            a = mat("a")
            sym = cons.SymmetryPair(mat("r"), mat("c"), int(recipe["order"]))
            return cons.balanced_product(a, sym, name=name)
        if kind == "hypergraph_product":
            return cons.hypergraph_product(mat("a"), mat("b"), name=name)
        if kind == "direct":
            r0 = mat("r0") if "r0" in recipe else None
            return cons.direct_construction(mat("c0"), int(recipe["k"]), int(recipe["d_x"]), r0, recipe.get("q"))
    except KeyError as exc:
        raise RecipeError(f"recipe is missing field {exc.args[0]!r}") from exc
    raise RecipeError(f"unknown construction {kind!r}")


def build_named(name: str) -> CssCode:
    art = get(name)
    if art.kind != "code-recipe":
        raise UnknownArtifactError(f"{name} is not a code recipe")
    return build({"name": name, **art.payload}).renamed(name)
