"""Text formats for finite CDGAs (``.alg``) and Sullivan algebras (``.sul``).

    algebra H { basis e2:2, e2p:2, e5:5; product e2*e2p = 0; default_product zero; }
    sullivan Y { generator x:3, y:5, z:7; d x = 0; d z = x*y; }

Right-hand sides are sums of terms ``[q*]f1*f2*...`` with rational ``q`` written
as ``p`` or ``p/q``; in ``.sul`` files a factor may carry a power ``x^2``.
``#`` starts a comment that runs to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .cdga import UNIT, FiniteCdga, SullivanAlgebra
from .errors import InvariantError, ParseError
from .graded import GradedVectorSpace

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+) |
    (?P<nl>\n) |
    (?P<comment>\#[^\n]*) |
    (?P<num>\d+(?:\.\d+)?) |
    (?P<ident>[A-Za-z_][A-Za-z0-9_']*) |
    (?P<sym>[{}:;,=*+\-/^])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "ident", "sym", "eof"
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    line, start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, start = line + 1, m.end()
        elif kind == "num" and "." in m.group():
            raise ParseError("decimal literals are not allowed; write p/q", line, pos - start + 1)
        elif kind in ("num", "ident", "sym"):
            out.append(Token(kind, m.group(), line, pos - start + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - start + 1))
    return out


@dataclass
class SourceSpec:
    text: str
    payload: FiniteCdga | SullivanAlgebra
    locations: dict = field(default_factory=dict)  # name or (a, b) -> (line, col)
    warnings: list = field(default_factory=list)

    @property
    def kind(self) -> str:
        return "algebra" if isinstance(self.payload, FiniteCdga) else "sullivan"


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def next(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def accept(self, text: str) -> Token | None:
        if self.tok.text == text and self.tok.kind != "eof":
            return self.next()
        return None

    def expect(self, text: str) -> Token:
        t = self.accept(text)
        if t is None:
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return t

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            raise self.error(f"expected a name, found {self.tok.text or 'end of input'!r}")
        return self.next()

    def integer(self) -> int:
        neg = self.accept("-") is not None
        if self.tok.kind != "num":
            raise self.error(f"expected an integer, found {self.tok.text or 'end of input'!r}")
        n = int(self.next().text)
        return -n if neg else n

    def rational(self) -> Fraction:
        p = int(self.next().text)
        if self.accept("/"):
            if self.tok.kind != "num":
                raise self.error("expected a denominator")
            t = self.next()
            q = int(t.text)
            if q == 0:
                raise self.error("zero denominator", t)
            return Fraction(p, q)
        return Fraction(p)

    def labelled_degrees(self) -> list[tuple[Token, int]]:
        out = [(self.ident(), self._degree())]
        while self.accept(","):
            out.append((self.ident(), self._degree()))
        return out

    def _degree(self) -> int:
        self.expect(":")
        return self.integer()

    def polynomial(self, powers: bool) -> list[tuple[Fraction, list[Token]]]:
        """Terms (coefficient, factor tokens); '0' alone is the empty sum."""
        terms = []
        sign = Fraction(1)
        if self.accept("-"):
            sign = Fraction(-1)
        else:
            self.accept("+")
        while True:
            coef, factors = self.term(powers)
            terms.append((sign * coef, factors))
            if self.accept("+"):
                sign = Fraction(1)
            elif self.accept("-"):
                sign = Fraction(-1)
            else:
                return [(c, f) for c, f in terms if c]

    def term(self, powers: bool) -> tuple[Fraction, list[Token]]:
        coef = Fraction(1)
        factors: list[Token] = []
        if self.tok.kind == "num":
            coef = self.rational()
            if not self.accept("*"):
                return coef, factors
        factors.append(self.factor(powers, factors))
        while self.accept("*"):
            if self.tok.kind == "num":
                coef *= self.rational()
                continue
            factors.append(self.factor(powers, factors))
        return coef, factors

    def factor(self, powers, factors):
        t = self.ident()
        if self.accept("^"):
            if not powers:
                raise self.error("powers are only allowed in sullivan blocks")
            n = self.integer()
            if n < 1:
                raise self.error("exponent must be positive")
            factors.extend([t] * (n - 1))
        return t


def _check_labels(p: _Parser, names: dict, toks, what: str):
    for t in toks:
        if t.text not in names:
            raise p.error(f"unknown {what} {t.text!r}", t)


def parse_algebra(text: str) -> FiniteCdga:
    return parse_algebra_source(text).payload


def parse_algebra_source(text: str) -> SourceSpec:
    p = _Parser(text)
    kw = p.ident()
    if kw.text != "algebra":
        raise p.error("expected 'algebra'", kw)
    name = p.ident().text
    p.expect("{")
    basis: dict[str, int] = {UNIT: 0}
    locs: dict = {}
    product: dict = {}
    diff: dict = {}
    while not p.accept("}"):
        t = p.ident()
        if t.text == "basis":
            for lt, d in p.labelled_degrees():
                if lt.text in basis:
                    raise p.error(f"duplicate basis element {lt.text!r}", lt)
                if d < 0:
                    raise p.error("basis degrees must be nonnegative", lt)
                basis[lt.text] = d
                locs[lt.text] = (lt.line, lt.col)
        elif t.text == "product":
            a = p.ident()
            p.expect("*")
            b = p.ident()
            p.expect("=")
            _check_labels(p, basis, (a, b), "basis element")
            rhs = _linear(p, basis, p.polynomial(False))
            key = (a.text, b.text)
            if key in product:
                raise p.error(f"product {a.text}*{b.text} given twice", a)
            if UNIT in key:
                raise p.error("products with the unit are fixed", a)
            product[key] = rhs
            locs[key] = (a.line, a.col)
        elif t.text == "default_product":
            v = p.ident()
            if v.text != "zero":
                raise p.error("only 'default_product zero' is supported", v)
        elif t.text == "d":
            a = p.ident()
            p.expect("=")
            _check_labels(p, basis, (a,), "basis element")
            if a.text in diff:
                raise p.error(f"d {a.text} given twice", a)
            diff[a.text] = _linear(p, basis, p.polynomial(False))
            locs[("d", a.text)] = (a.line, a.col)
        else:
            raise p.error(f"unknown statement {t.text!r}", t)
        p.expect(";")
    if p.tok.kind != "eof":
        raise p.error("trailing input after the closing brace")
    # fill graded-commutative partners a*b -> b*a
    for (a, b), v in list(product.items()):
        if (b, a) not in product:
            s = -1 if (basis[a] * basis[b]) & 1 else 1
            product[(b, a)] = {l: s * c for l, c in v.items()}
    space = GradedVectorSpace.of(basis)
    A = FiniteCdga(space, product, diff, name=name)
    try:
        A.check()
    except InvariantError as e:
        raise InvariantError(_locate(str(e), e.offender, locs), e.offender) from None
    return SourceSpec(text, A, locs)


def _locate(msg, offender, locs) -> str:
    keys = []
    if isinstance(offender, tuple):
        keys = [offender, offender[::-1], ("d", offender[0]), *offender]
    elif offender is not None:
        keys = [offender]
    for k in keys:
        if k in locs:
            line, col = locs[k]
            return f"{line}:{col}: {msg}"
    return msg


def _linear(p: _Parser, basis, terms) -> dict[str, Fraction]:
    out: dict[str, Fraction] = {}
    for c, fs in terms:
        if len(fs) > 1:
            raise p.error("algebra right-hand sides are linear combinations of basis elements", fs[1])
        label = fs[0].text if fs else UNIT
        if fs:
            _check_labels(p, basis, fs, "basis element")
        out[label] = out.get(label, 0) + c
    return {l: c for l, c in out.items() if c}


def parse_sullivan(text: str) -> SullivanAlgebra:
    return parse_sullivan_source(text).payload


def parse_sullivan_source(text: str, validate: bool = True) -> SourceSpec:
    p = _Parser(text)
    kw = p.ident()
    if kw.text != "sullivan":
        raise p.error("expected 'sullivan'", kw)
    name = p.ident().text
    p.expect("{")
    gens: dict[str, int] = {}
    locs: dict = {}
    raw: dict = {}
    while not p.accept("}"):
        t = p.ident()
        if t.text == "generator":
            for lt, d in p.labelled_degrees():
                if lt.text in gens:
                    raise p.error(f"duplicate generator {lt.text!r}", lt)
                if d <= 0:
                    raise p.error(f"generator {lt.text} has degree {d}; degrees must be >= 1", lt)
                gens[lt.text] = d
                locs[lt.text] = (lt.line, lt.col)
        elif t.text == "d":
            a = p.ident()
            p.expect("=")
            _check_labels(p, gens, (a,), "generator")
            if a.text in raw:
                raise p.error(f"d {a.text} given twice", a)
            terms = p.polynomial(True)
            for _, fs in terms:
                _check_labels(p, gens, fs, "generator")
            raw[a.text] = (a, terms)
            locs[("d", a.text)] = (a.line, a.col)
        else:
            raise p.error(f"unknown statement {t.text!r}", t)
        p.expect(";")
    if p.tok.kind != "eof":
        raise p.error("trailing input after the closing brace")
    space = GradedVectorSpace.of(gens)
    bare = SullivanAlgebra(space, {}, name=name, validate=False)
    warnings = []
    diff = {}
    for g, (tok, terms) in raw.items():
        poly: dict = {}
        for c, fs in terms:
            s, m = bare.normalize([f.text for f in fs])
            if not s:
                warnings.append(
                    f"{tok.line}:{tok.col}: term {'*'.join(f.text for f in fs)} in d {g} vanishes "
                    "(odd generators square to zero)"
                )
                continue
            poly[m] = poly.get(m, 0) + s * c
        diff[g] = {m: c for m, c in poly.items() if c}
    try:
        S = SullivanAlgebra(space, diff, name=name, validate=validate)
    except InvariantError as e:
        raise InvariantError(_locate(str(e), e.offender and ("d", e.offender), locs), e.offender) from None
    return SourceSpec(text, S, locs, warnings)


def parse_source(text: str) -> SourceSpec:
    """Dispatch on the leading keyword."""
    p = _Parser(text)
    kw = p.tok
    if kw.text == "algebra":
        return parse_algebra_source(text)
    if kw.text == "sullivan":
        return parse_sullivan_source(text)
    raise ParseError("expected 'algebra' or 'sullivan'", kw.line, kw.col)


# ---------------------------------------------------------------------------
# rendering


def fraction_text(c: Fraction) -> str:
    return str(Fraction(c))


def _terms_text(items) -> str:
    parts = []
    for factors, c in items:
        c = Fraction(c)
        mag = abs(c)
        body = "*".join(factors)
        if not body:
            t = fraction_text(mag)
        elif mag == 1:
            t = body
        else:
            t = f"{fraction_text(mag)}*{body}"
        parts.append(("- " if c < 0 else "+ ") + t)
    if not parts:
        return "0"
    s = " ".join(parts)
    return s[2:] if s.startswith("+ ") else "-" + s[2:]


def render_algebra(A: FiniteCdga) -> str:
    basis = ", ".join(f"{l}:{d}" for l, d in A.space if l != UNIT)
    lines = [f"algebra {A.name} {{"]
    if basis:
        lines.append(f"  basis {basis};")
    for (a, b), v in sorted(A.product.items(), key=lambda kv: (A.space.index(kv[0][0]), A.space.index(kv[0][1]))):
        if A.space.index(a) <= A.space.index(b):
            lines.append(f"  product {a}*{b} = {_terms_text(((l,) if l != UNIT else (), c) for l, c in sorted(v.items()))};")
    lines.append("  default_product zero;")
    for a in A.space.labels:
        if a in A.differential:
            v = A.differential[a]
            lines.append(f"  d {a} = {_terms_text(((l,) if l != UNIT else (), c) for l, c in sorted(v.items()))};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def render_sullivan(S: SullivanAlgebra) -> str:
    lines = [f"sullivan {S.name} {{"]
    gens = ", ".join(f"{l}:{d}" for l, d in S.generators)
    lines.append(f"  generator {gens};")
    for g in S.generators.labels:
        p = S.differential.get(g, {})
        lines.append(f"  d {g} = {_terms_text(sorted(p.items()))};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def render(payload) -> str:
    if isinstance(payload, FiniteCdga):
        return render_algebra(payload)
    return render_sullivan(payload)


def structure(payload) -> tuple:
    """Canonical comparable form used by round-trip checks."""
    if isinstance(payload, FiniteCdga):
        return (
            "algebra",
            payload.name,
            tuple(payload.space),
            tuple(sorted((k, tuple(sorted(v.items()))) for k, v in payload.product.items())),
            tuple(sorted((k, tuple(sorted(v.items()))) for k, v in payload.differential.items())),
        )
    return (
        "sullivan",
        payload.name,
        tuple(payload.generators),
        tuple(sorted((k, tuple(sorted(v.items()))) for k, v in payload.differential.items())),
    )
