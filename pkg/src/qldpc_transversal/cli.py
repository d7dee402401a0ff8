"""Command-line interface: build, check, distance, verify-sim, list, export.

Exit codes: 0 pass, 1 a checked condition failed, 2 usage or input error.
Reports are deterministic plain text; run details go to a JSON sidecar
written next to any ``--out`` file.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import platform
import sys
from collections.abc import Callable, Sequence
from datetime import datetime, timezone
from importlib import metadata as importlib_metadata
from pathlib import Path
from typing import Any

import yaml

from . import codelib
from .constructions import ConstructionError
from .css import CssCode, DistanceCertificate, distance_search, max_check_weight
from .gf2 import BitMatrix, BitVector, BmatFormatError, DimensionError
from .simverify import (
    EnumerationLimitError,
    GateFileError,
    VerificationReport,
    linear_phase,
    parse_gate_file,
    verify_logical_diagonal,
)
from .transversality import PhaseVector, SearchLimitError, TransversalityReport, check_conditions, find_phase_vector

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

DESCRIPTOR_FORMAT = "css-code/1"

log = logging.getLogger(__name__)


class InputError(ValueError):
    """Bad user input; mapped to exit code 2."""


# yaml ---------------------------------------------------------------


class _Dumper(yaml.SafeDumper):
    pass


def _str_presenter(dumper: yaml.SafeDumper, data: str):
    style = "|" if "\n" in data else None
    return dumper.represent_scalar("tag:yaml.org,2002:str", data, style=style)


_Dumper.add_representer(str, _str_presenter)


def _dump(obj: Any) -> str:
    return yaml.dump(obj, Dumper=_Dumper, sort_keys=False, default_flow_style=False)


# descriptors ----------------------------------------------------------


def _plain(value: Any) -> Any:
    if isinstance(value, dict) or hasattr(value, "items"):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (bool, int, float, str)) or value is None:
        return value
    return str(value)


def code_to_descriptor(code: CssCode, extra: dict[str, Any] | None = None) -> str:
    doc = {
        "format": DESCRIPTOR_FORMAT,
        "name": code.name,
        "parameters": code.parameters(),
        "n": code.n,
        "k": code.k,
        "full_k": code.full_k,
        "subsystem": code.subsystem,
        "metadata": _plain(dict(code.metadata)),
    }
    if extra:
        doc["defaults"] = _plain(extra)
    for key in ("h_x", "h_z", "l_x", "l_z"):
        doc[key] = getattr(code, key).to_bmat()
    return _dump(doc)


def descriptor_to_code(text: str) -> tuple[CssCode, dict[str, Any]]:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise InputError(f"descriptor is not valid YAML: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != DESCRIPTOR_FORMAT:
        raise InputError(f"not a {DESCRIPTOR_FORMAT} descriptor")
    try:
        mats = {key: BitMatrix.parse(doc[key]) for key in ("h_x", "h_z", "l_x", "l_z")}
        code = CssCode(
            mats["h_x"], mats["h_z"], mats["l_x"], mats["l_z"],
            int(doc["full_k"]), bool(doc.get("subsystem", False)), str(doc.get("name", "")),
            doc.get("metadata") or {},
        )
    except KeyError as exc:
        raise InputError(f"descriptor is missing {exc.args[0]!r}") from exc
    code.validate()
    return code, doc.get("defaults") or {}


def load_code(ref: str) -> tuple[CssCode, dict[str, Any]]:
    """A descriptor file, or the name of a registered recipe."""
    path = Path(ref)
    if path.exists():
        return descriptor_to_code(path.read_text())
    try:
        art = codelib.get(ref)
    except codelib.UnknownArtifactError as exc:
        raise InputError(f"no descriptor file or registered recipe named {ref!r}") from exc
    if art.kind != "code-recipe":
        raise InputError(f"{ref!r} is a {art.kind}, not a code recipe")
    return codelib.build_named(ref), _recipe_defaults(art.payload)


def _recipe_defaults(recipe: dict[str, Any]) -> dict[str, Any]:
    return {k: recipe[k] for k in ("q", "support") if k in recipe}


# reports --------------------------------------------------------------


def _ints(values: Sequence[int]) -> str:
    return " ".join(str(int(v)) for v in values) if values else "-"


def format_check_report(code: CssCode, report: TransversalityReport, p: PhaseVector, support: str) -> str:
    lines = [
        f"code: {code.name}",
        f"parameters: {code.parameters()}",
        f"q: {report.q}",
        f"support: {support}",
        f"p_nonzero: {sum(1 for x in p.entries if x)}",
        f"p_values: {_ints(sorted(set(x for x in p.entries if x)))}",
        f"passed: {str(report.passed).lower()}",
        f"w: {_ints(report.w)}",
        f"subsets_checked: {report.subsets_checked}",
        f"violations: {len(report.violations)}",
    ]
    if report.violations:
        lines.append("i j h_rows l_rows residue modulus")
        for v in report.violations:
            h = ",".join(map(str, v.h_rows)) or "-"
            lrows = ",".join(map(str, v.l_rows)) or "-"
            lines.append(f"{v.i} {v.j} {h} {lrows} {v.residue} {v.modulus}")
    return "\n".join(lines) + "\n"


def format_distance_report(code: CssCode, cert: DistanceCertificate, w_max: int) -> str:
    return "\n".join(
        [
            f"code: {code.name}",
            f"parameters: {code.parameters()}",
            f"kind: {cert.pauli_kind}",
            f"w_max: {w_max}",
            f"weight_found: {cert.weight_found if cert.weight_found is not None else 'none'}",
            f"exhausted_below: {cert.exhausted_below}",
            f"witness: {_ints(cert.witness.support()) if cert.witness is not None else '-'}",
            f"max_check_weight: {_ints(max_check_weight(code))}",
        ]
    ) + "\n"


def format_sim_report(code: CssCode, report: VerificationReport, blocks: int) -> str:
    lines = [
        f"code: {code.name}",
        f"parameters: {code.parameters()}",
        f"blocks: {blocks}",
        f"q: {report.q}",
        f"method: {report.method}",
        f"states_checked: {report.states_checked}",
        f"passed: {str(report.passed).lower()}",
        f"failure: {report.failure or '-'}",
    ]
    if report.witness:
        for key, value in report.witness.items():
            if isinstance(value, tuple):
                value = "".join(map(str, value))
            lines.append(f"witness_{key}: {value}")
    if report.phases:
        lines.append("label phase")
        for label, phase in sorted(report.phases.items()):
            lines.append(f"{''.join(map(str, label))} {phase}")
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None, manifest: dict[str, Any]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.write_text(text)
    sidecar = path.with_name(path.name + ".provenance.json")
    info = {
        **manifest,
        "output": path.name,
        "sha256": hashlib.sha256(text.encode()).hexdigest(),
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "package_version": _version(),
        "python": platform.python_version(),
    }
    sidecar.write_text(json.dumps(info, indent=2, sort_keys=True) + "\n")


def _version() -> str:
    try:
        return importlib_metadata.version("artifact")
    except importlib_metadata.PackageNotFoundError:
        return "unknown"


# support / expected parsing -----------------------------------------


def parse_support(spec: str, code: CssCode) -> BitVector:
    n = code.n
    if spec == "all":
        return BitVector.ones(n)
    if spec == "left":
        left = code.metadata.get("left_block")
        if left is None:
            raise InputError("code has no recorded left block; use --support all or mask:")
        return BitVector.from_bits([1] * int(left) + [0] * (n - int(left)))
    if spec.startswith("mask:"):
        body = spec[5:]
        if body and set(body) <= {"0", "1"}:
            bits = body
        else:
            try:
                m = BitMatrix.parse(Path(body).read_text())
            except OSError as exc:
                raise InputError(f"cannot read mask file {body!r}") from exc
            if m.rows != 1:
                raise InputError("mask file must hold a single row")
            bits = m.row(0).to_array()
        v = BitVector.from_bits(bits)
        if len(v) != n:
            raise InputError(f"mask has {len(v)} bits, code has {n} qubits")
        return v
    raise InputError(f"unknown support spec {spec!r}")


def parse_expected(spec: str, k_total: int) -> Callable[[tuple[int, ...]], int] | dict[tuple[int, ...], int]:
    if spec.startswith("linear:"):
        w = [int(x) for x in spec[7:].split(",")]
        if len(w) != k_total:
            raise InputError(f"linear expectation needs {k_total} exponents")
        return linear_phase(w)
    if spec.startswith("cz:"):
        a, b = (int(x) for x in spec[3:].split(","))
        if not (0 <= a < k_total and 0 <= b < k_total):
            raise InputError("cz indices out of range")
        return lambda v: v[a] * v[b]
    path = Path(spec)
    if not path.exists():
        raise InputError(f"expected spec {spec!r} is neither linear:, cz: nor a file")
    doc = yaml.safe_load(path.read_text())
    table = doc.get("labels", doc) if isinstance(doc, dict) else None
    if not isinstance(table, dict):
        raise InputError("expected-phase file must map label bitstrings to exponents")
    out = {}
    for label, value in table.items():
        bits = tuple(int(c) for c in str(label))
        if len(bits) != k_total:
            raise InputError(f"label {label!r} does not have {k_total} bits")
        out[bits] = int(value)
    return out


# commands -------------------------------------------------------------


def cmd_build(args: argparse.Namespace) -> int:
    path = Path(args.recipe)
    if path.exists():
        try:
            recipe = yaml.safe_load(path.read_text())
        except yaml.YAMLError as exc:
            raise InputError(f"recipe is not valid YAML: {exc}") from exc
        if not isinstance(recipe, dict):
            raise InputError("recipe must be a mapping")
        base = path.parent
        recipe.setdefault("name", path.stem)
    else:
        try:
            art = codelib.get(args.recipe)
        except codelib.UnknownArtifactError as exc:
            raise InputError(f"no recipe file or registered recipe named {args.recipe!r}") from exc
        if art.kind != "code-recipe":
            raise InputError(f"{args.recipe!r} is not a code recipe")
        recipe = {"name": args.recipe, **art.payload}
        base = None
    try:
        code = codelib.build(recipe, base)
    except codelib.RecipeError as exc:
        raise InputError(str(exc)) from exc
    except ConstructionError as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    code = code.renamed(str(recipe["name"]))
    text = code_to_descriptor(code, _recipe_defaults(recipe))
    print(f"{code.parameters()} {code.name} retained_logicals={code.k}", file=sys.stderr)
    _emit(text, args.out, {"command": "build", "recipe": args.recipe})
    return EXIT_PASS


def cmd_check(args: argparse.Namespace) -> int:
    code, defaults = load_code(args.code)
    q = args.q if args.q is not None else defaults.get("q")
    if q is None:
        raise InputError("--q is required for this code")
    support_spec = args.support or defaults.get("support", "all")
    support = parse_support(support_spec, code)
    if args.search or args.target_w is not None:
        try:
            p = find_phase_vector(code.h_x, code.l_x, q, support, target_w=args.target_w)
        except SearchLimitError as exc:
            raise InputError(str(exc)) from exc
        if p is None:
            print("no phase vector satisfies the conditions", file=sys.stderr)
            p = PhaseVector.uniform(code.n, q, args.value, support)
    else:
        p = PhaseVector.uniform(code.n, q, args.value, support)
    report = check_conditions(code.h_x, code.l_x, p)
    text = format_check_report(code, report, p, support_spec)
    _emit(text, args.out, {"command": "check", "code": args.code, "q": q, "support": support_spec, "value": args.value})
    return EXIT_PASS if report.passed else EXIT_FAIL


def default_wmax(n: int) -> int:
    return 5 if n <= 200 else 3


def cmd_distance(args: argparse.Namespace) -> int:
    code, _ = load_code(args.code)
    w_max = args.wmax if args.wmax is not None else default_wmax(code.n)
    cert = distance_search(code, args.kind, w_max, workers=args.threads)
    if cert.witness is not None and not cert.verify(code):
        raise ArithmeticError("distance witness failed re-verification")
    text = format_distance_report(code, cert, w_max)
    _emit(text, args.out, {"command": "distance", "code": args.code, "kind": args.kind, "w_max": w_max})
    if args.expect is not None and cert.weight_found != args.expect:
        return EXIT_FAIL
    return EXIT_PASS


def cmd_verify_sim(args: argparse.Namespace) -> int:
    code, _ = load_code(args.code)
    try:
        ops = parse_gate_file(Path(args.gates).read_text(), code.n)
    except OSError as exc:
        raise InputError(f"cannot read gate file {args.gates!r}") from exc
    expected = parse_expected(args.expected, code.k * args.blocks)
    report = verify_logical_diagonal(code, ops, expected, blocks=args.blocks, q=args.q)
    text = format_sim_report(code, report, args.blocks)
    _emit(text, args.out, {"command": "verify-sim", "code": args.code, "gates": args.gates, "expected": args.expected})
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_list(args: argparse.Namespace) -> int:
    for name in codelib.names():
        art = codelib.get(name)
        shape = f" {art.payload.rows}x{art.payload.cols}" if isinstance(art.payload, BitMatrix) else ""
        print(f"{name}\t{art.kind}{shape}\t{art.description}")
    return EXIT_PASS


def cmd_export(args: argparse.Namespace) -> int:
    try:
        art = codelib.get(args.name)
    except codelib.UnknownArtifactError as exc:
        raise InputError(f"unknown artifact {args.name!r}") from exc
    text = art.payload.to_bmat() if isinstance(art.payload, BitMatrix) else _dump({"name": art.name, **art.payload})
    _emit(text, args.out, {"command": "export", "name": args.name})
    return EXIT_PASS


# parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qldpc-transversal", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a code descriptor from a recipe")
    p.add_argument("recipe", help="recipe YAML file or registered recipe name")
    p.add_argument("--out")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("check", help="check the transversal phase-gate conditions")
    p.add_argument("code", help="descriptor file or registered recipe name")
    p.add_argument("--q", type=int)
    p.add_argument("--support", help="left | all | mask:<bits or bmat path>")
    p.add_argument("--value", type=int, default=1, help="uniform phase value on the support")
    p.add_argument("--search", action="store_true", help="search for a passing phase vector")
    p.add_argument("--target-w", type=int, help="search for a vector giving this exponent on every logical")
    p.add_argument("--out")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("distance", help="exhaustive low-weight logical search")
    p.add_argument("code")
    p.add_argument("--kind", choices=("X", "Z"), required=True)
    p.add_argument("--wmax", type=int)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--expect", type=int, help="exit 1 unless this weight is found")
    p.add_argument("--out")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("verify-sim", help="verify a diagonal logical gate by basis-state enumeration")
    p.add_argument("code")
    p.add_argument("gates", help="gate sequence file")
    p.add_argument("--expected", required=True, help="linear:<w,...> | cz:<a>,<b> | YAML file")
    p.add_argument("--blocks", type=int, default=1)
    p.add_argument("--q", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_sim)

    p = sub.add_parser("list", help="list registered matrices and recipes")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("export", help="write a registered artifact")
    p.add_argument("name")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be positive")
    try:
        return args.func(args)
    except (InputError, BmatFormatError, DimensionError, GateFileError, EnumerationLimitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
