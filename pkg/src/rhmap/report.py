"""JSON reports: canonical serialization of models, MC systems and components."""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Mapping

from .cdga import SullivanAlgebra, poly_str
from .dsl import SourceSpec, parse_algebra_source, parse_sullivan_source
from .errors import InputError
from .graded import render_vec
from .linfty import LInfinityAlgebra, ce_construct
from .mapspace import (
    ComponentModel,
    GroupLikeReport,
    MappingSpaceModel,
    MCDescription,
    component_homotopy_ranks,
    euler_bookkeeping,
    generator_names,
    homology_dimensions,
    mapping_space_model,
    minimal_component,
    poly_text,
    relabel,
)

SCHEMA = "rhmap-report/1"


def q(c) -> str:
    return str(Fraction(c))


def vec_json(v: Mapping) -> dict:
    return {k: q(c) for k, c in sorted(v.items()) if c}


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def brackets_json(L: LInfinityAlgebra, min_arity: int = 1) -> list:
    return [
        {"arity": k, "inputs": list(key), "value": vec_json(v), "text": f"l{k}({', '.join(key)}) = {render_vec(v)}"}
        for k, key, v in L.entries()
        if k >= min_arity
    ]


def sullivan_json(S: SullivanAlgebra) -> dict:
    return {
        "generators": [{"label": l, "degree": d} for l, d in S.generators],
        "differential": {g: poly_str(S.differential[g]) for g in S.generators.labels if g in S.differential},
    }


def new_report(source: SourceSpec, target: SourceSpec, M: MappingSpaceModel) -> dict:
    return {
        "schema": SCHEMA,
        "sources": {"source": source.text, "target": target.text},
        "warnings": list(source.warnings) + list(target.warnings),
        "model": model_json(M),
        "mc": None,
        "components": [],
        "checks": [],
    }


def model_json(M: MappingSpaceModel) -> dict:
    sp = M.space
    return {
        "source": M.H.name,
        "target": M.Y.name if M.Y is not None else None,
        "basis": [{"label": l, "degree": d} for l, d in sp],
        "dimensions": {str(d): n for d, n in sorted(sp.dimensions().items())},
        "arity_bound": M.model.arity_bound,
        "brackets": brackets_json(M.model, 2),
        "L": {
            "basis": [{"label": l, "degree": d} for l, d in M.L.space],
            "brackets": brackets_json(M.L),
        },
        "two_stage": {"P": list(M.P), "Q": list(M.Q)},
    }


def load_model(report: Mapping) -> tuple[SourceSpec, SourceSpec, MappingSpaceModel]:
    try:
        texts = report["sources"]
        src = parse_algebra_source(texts["source"])
        tgt = parse_sullivan_source(texts["target"])
    except (KeyError, TypeError) as e:
        raise InputError(f"report is missing its embedded sources ({e})") from None
    return src, tgt, mapping_space_model(src.payload, tgt.payload)


def mc_json(d: MCDescription) -> dict:
    return {
        "parameters": d.parameters,
        "kind": d.kind,
        "equations": {o: poly_text(p) for o, p in sorted(d.equations.items())},
        "family": [vec_json(v) for v in d.family],
        "dimension": d.dimension,
        "verified": [vec_json(v) for v in d.verified],
        "rejected": [vec_json(v) for v in d.rejected],
    }


def component_json(C: ComponentModel, max_arity: int | None = None) -> dict:
    tr = C.truncated
    _, minimal = minimal_component(C, max_arity)
    names = generator_names(minimal.space)
    S = ce_construct(relabel(minimal, names), name="component")
    total, dim, rk = euler_bookkeeping(C)
    return {
        "mc": vec_json(C.mc.element),
        "mc_text": render_vec(C.mc.element),
        "residual": vec_json(C.mc.residual),
        "truncated": {
            "basis": [{"label": l, "degree": d} for l, d in tr.space],
            "embedding": {l: vec_json(v) for l, v in sorted(C.embedding.items()) if v != {l: 1}},
            "brackets": brackets_json(tr),
        },
        "homology": {str(n): r for n, r in homology_dimensions(tr).items() if r},
        "ranks": {str(n): r for n, r in component_homotopy_ranks(C).items()},
        "euler": {"homology_total": total, "truncated_dim": dim, "rank_l1": rk, "holds": total == dim - 2 * rk},
        "minimal_linfty": {
            "basis": [{"label": l, "degree": d, "generator": names[l]} for l, d in minimal.space],
            "brackets": brackets_json(minimal, 2),
        },
        "sullivan_model": sullivan_json(S),
    }


def grouplike_json(g: GroupLikeReport) -> dict:
    return {
        "grouplike": g.grouplike,
        "max_arity": g.max_arity,
        "exhaustive": g.exhaustive,
        "examined_words": {str(k): n for k, n in g.examined.items()},
        "nonzero_brackets": [
            {
                "arity": k,
                "inputs": list(w),
                "value": vec_json(v),
                "trees": {code: vec_json(t) for code, t in sorted(prov.items()) if t},
            }
            for k, w, v, prov in g.brackets
        ],
    }


def check(name: str, passed: bool, **detail) -> dict:
    return {"name": name, "passed": bool(passed), **detail}


_TERM = re.compile(r"\s*([+-]?)\s*(?:(\d+(?:/\d+)?)\s*\*\s*)?([A-Za-z0-9_']+@[A-Za-z0-9_']+)\s*")


def parse_mc(text: str) -> dict[str, Fraction]:
    """``q*h@l`` terms joined by + or -; ``0`` is the zero element."""
    s = text.strip()
    if s in ("", "0"):
        return {}
    out: dict[str, Fraction] = {}
    pos = 0
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or (not first and not m.group(1)):
            raise InputError(f"cannot parse MC element at column {pos + 1}: {s[pos:]!r}")
        sign = -1 if m.group(1) == "-" else 1
        c = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        out[m.group(3)] = out.get(m.group(3), 0) + sign * c
        pos = m.end()
        first = False
    return {k: v for k, v in out.items() if v}


def parse_ranks(text: str) -> dict[int, int]:
    """``1:2,3:2,5:3`` -> {1: 2, 3: 2, 5: 3} (π_n ranks)."""
    out = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        try:
            n, r = part.split(":")
            out[int(n)] = int(r)
        except ValueError:
            raise InputError(f"bad rank entry {part!r}; expected n:r") from None
    return {n: r for n, r in out.items() if r}
