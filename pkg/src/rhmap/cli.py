"""Command-line driver: ``rhmap model | mc | component | hspace | check``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import report as R
from .cdga import FiniteCdga, harmonious_decomposition, is_minimal, two_stage_split
from .dsl import parse_algebra_source, parse_source, parse_sullivan_source
from .errors import InputError, InvariantError, NotTwoStage, ParseError, RHMapError
from .graded import render_vec
from .linfty import ce_dual, check_jacobi
from .mapspace import (
    check_transfer_agreement,
    component,
    component_homotopy_ranks,
    is_grouplike,
    mapping_space_model,
    maurer_cartan,
    solve_mc,
)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _load_report(path: str) -> dict:
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as e:
        raise ParseError(f"{path} is not JSON: {e.msg}", e.lineno, e.colno) from None


def _emit(rep: dict, out: str | None):
    text = R.dumps(rep)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_model(a) -> int:
    src = parse_algebra_source(_read(a.source))
    tgt = parse_sullivan_source(_read(a.target))
    M = mapping_space_model(src.payload, tgt.payload)
    rep = R.new_report(src, tgt, M)
    jac = check_jacobi(M.model)
    rep["checks"].append(R.check("jacobi", jac.passed, tuples=jac.checked))
    status = 0 if jac.passed else 2
    if a.check_transfer:
        agr = check_transfer_agreement(src.payload, tgt.payload, a.max_arity, method="trees")
        rep["checks"].append(
            R.check(
                "closed_formula_equals_transfer",
                agr.agrees,
                max_arity=a.max_arity,
                mismatches=[f"l{k}{key}: {render_vec(x)} vs {render_vec(y)}" for k, key, x, y in agr.mismatches],
            )
        )
        rep["checks"].append(
            R.check(
                "multi_vertex_trees_vanish",
                not agr.multi_vertex_nonzero,
                nonzero=[f"{code} on {w}: {render_vec(v)}" for code, w, v in agr.multi_vertex_nonzero],
            )
        )
        if not agr:
            status = 2
    _emit(rep, a.out)
    return status


def cmd_mc(a) -> int:
    rep = _load_report(a.model)
    _, _, M = R.load_model(rep)
    d = solve_mc(M, [R.parse_mc(c) for c in a.candidate or ()])
    rep["mc"] = R.mc_json(d)
    _emit(rep, a.out)
    return 0


def _component_entry(rep: dict, mc_text: str) -> tuple[dict, object]:
    _, _, M = R.load_model(rep)
    z = maurer_cartan(M, R.parse_mc(mc_text))
    C = component(M, z.element)
    key = render_vec(z.element)
    for entry in rep["components"]:
        if entry.get("mc_text") == key:
            return entry, C
    entry = R.component_json(C)
    rep["components"].append(entry)
    rep["components"].sort(key=lambda e: e["mc_text"])
    return entry, C


def cmd_component(a) -> int:
    rep = _load_report(a.model)
    entry, C = _component_entry(rep, a.mc)
    rep["checks"].append(
        R.check(f"euler_bookkeeping[{entry['mc_text']}]", entry["euler"]["holds"], **entry["euler"])
    )
    status = 0 if entry["euler"]["holds"] else 2
    if a.expect_ranks is not None:
        want = R.parse_ranks(a.expect_ranks)
        got = component_homotopy_ranks(C)
        diff = {str(n): {"expected": want.get(n, 0), "computed": got.get(n, 0)}
                for n in sorted(set(want) | set(got)) if want.get(n, 0) != got.get(n, 0)}
        rep["checks"].append(
            R.check(f"expected_ranks[{entry['mc_text']}]", not diff, expected=a.expect_ranks,
                    differences=diff, note=a.note or "")
        )
        if diff and a.strict:
            status = 2
    _emit(rep, a.out)
    return status


def cmd_hspace(a) -> int:
    rep = _load_report(a.model)
    entry, C = _component_entry(rep, a.mc)
    g = is_grouplike(C, a.max_arity)
    entry["grouplike"] = R.grouplike_json(g)
    status = 0
    if a.expect_grouplike is not None:
        want = a.expect_grouplike == "yes"
        rep["checks"].append(
            R.check(f"expected_grouplike[{entry['mc_text']}]", want == g.grouplike,
                    expected=want, computed=g.grouplike, max_arity=a.max_arity, note=a.note or "")
        )
        if want != g.grouplike and a.strict:
            status = 2
    _emit(rep, a.out)
    return status


def cmd_check(a) -> int:
    spec = parse_source(_read(a.file))
    obj = spec.payload
    checks = [R.check("invariants", True)]
    out = {"file": a.file, "kind": spec.kind, "name": obj.name, "warnings": spec.warnings}
    if isinstance(obj, FiniteCdga):
        r = harmonious_decomposition(obj)
        v = r.violations()
        checks.append(R.check("retract_identities", not v, violations=v))
        out["cohomology"] = [{"label": l, "degree": d} for l, d in r.homology]
        out["dimensions"] = {str(d): n for d, n in obj.space.dimensions().items()}
    else:
        checks.append(R.check("minimal", is_minimal(obj)))
        try:
            P, Q = two_stage_split(obj)
            checks.append(R.check("two_stage", True, P=P, Q=Q))
        except NotTwoStage as e:
            checks.append(R.check("two_stage", False, generator=e.generator, detail=str(e)))
        if is_minimal(obj):
            L = ce_dual(obj)
            jac = check_jacobi(L)
            checks.append(R.check("dual_jacobi", jac.passed, tuples=jac.checked))
    out["checks"] = checks
    _emit(out, a.out)
    return 0 if all(c["passed"] or c["name"] in ("minimal", "two_stage") for c in checks) else 2


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rhmap", description="L∞-models of mapping spaces into two-stage targets")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("model", help="build the model H⊗L")
    p.add_argument("--source", required=True, help=".alg file with the cohomology of X (or any finite CDGA with --check-transfer)")
    p.add_argument("--target", required=True, help=".sul file with a two-stage Sullivan algebra")
    p.add_argument("--check-transfer", action="store_true", help="also run the tree-sum transfer and compare")
    p.add_argument("--max-arity", type=int, default=4)
    p.add_argument("--out")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("mc", help="Maurer–Cartan system and solution families")
    p.add_argument("--model", required=True)
    p.add_argument("--candidate", action="append", help="MC candidate to verify (repeatable)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_mc)

    for name, fn, help_ in (("component", cmd_component, "twist, truncate, ranks and Sullivan model"),
                            ("hspace", cmd_hspace, "group-like test via transferred brackets")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--model", required=True)
        p.add_argument("--mc", required=True, help='MC element, e.g. "1*e5@y" or "0"')
        p.add_argument("--note", help="free text stored with the expectation check")
        p.add_argument("--strict", action="store_true", help="exit 2 when an expectation fails")
        p.add_argument("--out")
        p.set_defaults(func=fn)
        if name == "component":
            p.add_argument("--expect-ranks", help="expected π_n ranks, e.g. 1:2,3:2,5:3,7:2")
        else:
            p.add_argument("--max-arity", type=int, default=4)
            p.add_argument("--expect-grouplike", choices=("yes", "no"))

    p = sub.add_parser("check", help="audit a .alg or .sul file")
    p.add_argument("--file", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_check)
    return ap


def error_object(e: BaseException) -> dict:
    if isinstance(e, RHMapError):
        err = {"type": type(e).__name__, "message": str(e), "exit_code": e.exit_code}
    else:
        err = {"type": "InternalError", "message": f"{type(e).__name__}: {e}", "exit_code": 3}
    if isinstance(e, ParseError):
        err.update(line=e.line, col=e.col)
    if isinstance(e, NotTwoStage):
        err["offender"] = e.generator
    if isinstance(e, InvariantError) and e.offender is not None:
        off = e.offender
        err["offender"] = list(off) if isinstance(off, tuple) else off
    return {"error": err}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as e:  # every failure leaves a machine-readable object
        obj = error_object(e)
        sys.stdout.write(R.dumps(obj))
        sys.stderr.write(f"rhmap: {obj['error']['message']}\n")
        return obj["error"]["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
