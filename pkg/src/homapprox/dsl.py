"""Tokenizer and parsers for polynomial text and session scripts.

Polynomial syntax: ``3*x^2*y - z + 1``; juxtaposition is not multiplication,
parentheses and integer powers of parenthesized expressions are allowed.

Script syntax (statements end with ``;``, ``#`` starts a comment)::

    ring R = poly(x,y | weights 1,1 | char 32003 | order grevlex) / ideal(x*y);
    module M = coker [[x, y^2], [0, x]] twists (0, -1);
    module N = free (0, -1);          # twists; ``degrees (0, 1)`` is the same
    module P = coker [[x, y]] degrees (0);
    module W = canonical;
    module K = syzygy M 1;           # also: transpose M, dual M wrt C, shift M 2
    check torsionfree M wrt C level 3;
    check spherical M wrt C level 2;
    check semidualizing C level 2;
    check ntorsionfree M level 2;
    approximate M wrt C level 2;
    cm-approx M;
    ab-approx M level 2;
    resolve M length 3;
    ext M N upto 3;
    cdim M wrt C;
    descent M wrt C level 2;
    corpus run wrt C level 2;
    injdim C;

The ring's own name denotes R as a module; ``k`` (the residue field) and
``omega`` (the canonical module, computed on first use) are predeclared.

Matrices are row-major: row i lists the entries in generator i of the
presentation, so a matrix with r rows and c columns presents a module with
r generators and c relations.  ``twists (t_1, ...)`` presents a quotient of
the sum of the R(t_i), so generator i sits in degree -t_i; ``degrees`` gives
generator degrees directly.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .kernel import PolynomialRing, mono_mul


class ScriptError(ValueError):
    """Syntax or semantic error with a source location."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        self.bare = message
        super().__init__(f"{line}:{col}: {message}" if line else message)


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<num>\d+)
  | (?P<name>(?:cm|ab)-approx\b|[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*^()\[\],;=|/{}])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    line, col = 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ScriptError(f"unexpected character {text[pos]!r}", line, col)
        s = m.group(0)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, s, line, col))
        nl = s.count("\n")
        if nl:
            line += nl
            col = len(s) - s.rfind("\n")
        else:
            col += len(s)
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


class _Stream:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def accept(self, text: str) -> Token | None:
        t = self.peek()
        if t.text == text and t.kind in ("op", "name"):
            self.i += 1
            return t
        return None

    def expect(self, text: str) -> Token:
        t = self.peek()
        if t.text != text:
            raise ScriptError(f"expected {text!r}, found {t.text or 'end of input'!r}", t.line, t.col)
        return self.next()

    def expect_kind(self, kind: str, what: str) -> Token:
        t = self.peek()
        if t.kind != kind:
            raise ScriptError(f"expected {what}, found {t.text or 'end of input'!r}", t.line, t.col)
        return self.next()


# ------------------------------------------------------------ polynomials

def _parse_sum(st: _Stream, ring: PolynomialRing) -> dict:
    p = ring.p
    neg = False
    if st.accept("-"):
        neg = True
    elif st.accept("+"):
        pass
    acc = _parse_product(st, ring)
    if neg:
        acc = {m: (-c) % p for m, c in acc.items()}
    while True:
        t = st.peek()
        if t.text in ("+", "-") and t.kind == "op":
            st.next()
            term = _parse_product(st, ring)
            sgn = 1 if t.text == "+" else -1
            for m, c in term.items():
                v = (acc.get(m, 0) + sgn * c) % p
                if v:
                    acc[m] = v
                else:
                    acc.pop(m, None)
        else:
            return acc


def _mul(a: dict, b: dict, p: int) -> dict:
    out: dict = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = mono_mul(ma, mb)
            v = (out.get(m, 0) + ca * cb) % p
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def _parse_product(st: _Stream, ring: PolynomialRing) -> dict:
    acc = _parse_power(st, ring)
    while st.accept("*"):
        acc = _mul(acc, _parse_power(st, ring), ring.p)
    return acc


def _parse_power(st: _Stream, ring: PolynomialRing) -> dict:
    base = _parse_atom(st, ring)
    if st.accept("^"):
        t = st.expect_kind("num", "an exponent")
        e = int(t.text)
        out = {ring.one_mono(): 1}
        for _ in range(e):
            out = _mul(out, base, ring.p)
        return out
    return base


def _parse_atom(st: _Stream, ring: PolynomialRing) -> dict:
    t = st.peek()
    if t.kind == "num":
        st.next()
        c = int(t.text) % ring.p
        return {ring.one_mono(): c} if c else {}
    if t.kind == "name":
        if t.text not in ring.names:
            raise ScriptError(f"unknown variable {t.text!r}", t.line, t.col)
        st.next()
        i = ring.names.index(t.text)
        m = tuple(1 if j == i else 0 for j in range(ring.nvars))
        return {m: 1}
    if t.text == "(":
        st.next()
        inner = _parse_sum(st, ring)
        st.expect(")")
        return inner
    if t.text == "-":
        st.next()
        inner = _parse_power(st, ring)
        return {m: (-c) % ring.p for m, c in inner.items()}
    raise ScriptError(f"unexpected {t.text or 'end of input'!r} in polynomial", t.line, t.col)


def parse_polynomial(text: str, ring: PolynomialRing) -> dict:
    st = _Stream(tokenize(text))
    out = _parse_sum(st, ring)
    t = st.peek()
    if t.kind != "eof":
        raise ScriptError(f"trailing input {t.text!r}", t.line, t.col)
    return out


# ------------------------------------------------------------------ scripts

@dataclass(frozen=True)
class Span:
    line: int
    col: int


@dataclass(frozen=True)
class RingDecl:
    name: str
    variables: tuple
    weights: tuple | None
    char: int | None
    order: str | None
    ideal: tuple
    span: Span = field(compare=False, default=Span(0, 0))


@dataclass(frozen=True)
class ModuleDecl:
    """``kind`` is one of coker, free, canonical, syzygy, transpose, dual, shift."""
    name: str
    kind: str
    args: tuple
    span: Span = field(compare=False, default=Span(0, 0))


@dataclass(frozen=True)
class Command:
    verb: str
    args: tuple
    span: Span = field(compare=False, default=Span(0, 0))


@dataclass(frozen=True)
class SessionScript:
    statements: tuple = ()

    @property
    def ring(self) -> RingDecl | None:
        return next((s for s in self.statements if isinstance(s, RingDecl)), None)

    @property
    def commands(self) -> list[Command]:
        return [s for s in self.statements if isinstance(s, Command)]


PREDECLARED = ("k", "omega")
CHECKS = {"torsionfree": True, "spherical": True, "semidualizing": False, "ntorsionfree": False}


def make_poly_ring(decl: RingDecl) -> PolynomialRing:
    from .kernel import DEFAULT_PRIME
    return PolynomialRing(list(decl.variables), weights=list(decl.weights) if decl.weights else None,
                          p=decl.char or DEFAULT_PRIME, order=decl.order or "grevlex")


class _ScriptParser:
    def __init__(self, text: str):
        self.st = _Stream(tokenize(text))
        self.ring: PolynomialRing | None = None
        self.ring_decl: RingDecl | None = None
        self.names: set = set()

    def fail(self, msg: str, tok: Token):
        raise ScriptError(msg, tok.line, tok.col)

    def parse(self) -> SessionScript:
        out = []
        while self.st.peek().kind != "eof":
            out.append(self.statement())
        return SessionScript(tuple(out))

    # -- helpers
    def name(self, what: str = "a name") -> Token:
        return self.st.expect_kind("name", what)

    def integer(self) -> int:
        neg = bool(self.st.accept("-"))
        t = self.st.expect_kind("num", "an integer")
        return -int(t.text) if neg else int(t.text)

    def int_list(self) -> tuple:
        self.st.expect("(")
        vals = []
        if not self.st.accept(")"):
            vals.append(self.integer())
            while self.st.accept(","):
                vals.append(self.integer())
            self.st.expect(")")
        return tuple(vals)

    def module_ref(self) -> str:
        t = self.name("a module name")
        if t.text not in self.names:
            self.fail(f"undeclared name {t.text!r}", t)
        return t.text

    def keyword(self, *words: str) -> Token:
        t = self.st.peek()
        if t.kind != "name" or t.text not in words:
            self.fail(f"expected {' or '.join(repr(w) for w in words)}, found {t.text or 'end of input'!r}", t)
        return self.st.next()

    def level(self) -> int:
        self.keyword("level")
        t = self.st.peek()
        n = self.integer()
        if n < 0:
            self.fail("level must be non-negative", t)
        return n

    def poly(self) -> str:
        if self.ring is None:
            self.fail("polynomial before any ring declaration", self.st.peek())
        return self.ring.format(_parse_sum(self.st, self.ring))

    def end(self):
        self.st.expect(";")

    # -- statements
    def statement(self):
        t = self.st.peek()
        if t.kind != "name":
            self.fail(f"expected a statement, found {t.text!r}", t)
        span = Span(t.line, t.col)
        if t.text == "ring":
            return self.ring_decl_stmt(span)
        if self.ring_decl is None:
            self.fail("the first statement must declare the ring", t)
        if t.text == "module":
            return self.module_decl(span)
        return self.command(span)

    def ring_decl_stmt(self, span: Span) -> RingDecl:
        kw = self.st.next()
        if self.ring_decl is not None:
            self.fail("a script declares exactly one ring", kw)
        name = self.name("a ring name").text
        self.st.expect("=")
        self.keyword("poly")
        self.st.expect("(")
        variables = [self.name("a variable").text]
        while self.st.accept(","):
            variables.append(self.name("a variable").text)
        if len(set(variables)) != len(variables):
            self.fail("repeated variable", kw)
        weights = char = order = None
        while self.st.accept("|"):
            opt = self.keyword("weights", "char", "order")
            if opt.text == "weights":
                weights = [self.integer()]
                while self.st.accept(","):
                    weights.append(self.integer())
                if len(weights) != len(variables):
                    self.fail(f"{len(weights)} weights for {len(variables)} variables", opt)
                if any(w <= 0 for w in weights):
                    self.fail("weights must be positive", opt)
                weights = tuple(weights)
            elif opt.text == "char":
                char = int(self.st.expect_kind("num", "a prime").text)
            else:
                order = self.keyword("grevlex", "glex").text
        self.st.expect(")")
        decl = RingDecl(name, tuple(variables), weights, char, order, (), span)
        try:
            self.ring = make_poly_ring(decl)
        except ValueError as exc:
            self.fail(str(exc), kw)
        ideal = []
        if self.st.accept("/"):
            self.keyword("ideal")
            self.st.expect("(")
            if not self.st.accept(")"):
                ideal.append(self.poly())
                while self.st.accept(","):
                    ideal.append(self.poly())
                self.st.expect(")")
        self.end()
        decl = RingDecl(name, tuple(variables), weights, char, order, tuple(ideal), span)
        self.ring_decl = decl
        self.names.update((name,) + PREDECLARED)
        return decl

    def matrix(self) -> tuple:
        self.st.expect("[")
        rows = []
        width = None
        if self.st.peek().text == "[":
            while True:
                open_tok = self.st.expect("[")
                row = [self.poly()]
                while self.st.accept(","):
                    row.append(self.poly())
                self.st.expect("]")
                if width is None:
                    width = len(row)
                elif len(row) != width:
                    self.fail(f"arity mismatch: row has {len(row)} entries, expected {width}", open_tok)
                rows.append(tuple(row))
                if not self.st.accept(","):
                    break
        self.st.expect("]")
        return tuple(rows)

    def module_decl(self, span: Span) -> ModuleDecl:
        self.st.next()
        nt = self.name("a module name")
        if nt.text in self.names:
            self.fail(f"name {nt.text!r} is already declared", nt)
        self.st.expect("=")
        kt = self.keyword("coker", "free", "canonical", "syzygy", "transpose", "dual", "shift")
        kind = kt.text
        if kind == "coker":
            rows = self.matrix()
            grading = None
            if self.st.peek().text in ("twists", "degrees"):
                gt = self.st.next()
                vals = self.int_list()
                if len(vals) != len(rows):
                    self.fail(f"arity mismatch: {len(vals)} {gt.text} for {len(rows)} matrix rows", gt)
                grading = (gt.text, vals)
            elif not rows:
                self.fail("a presentation with no rows needs twists or degrees", kt)
            degrees = self._grading(rows, grading, kt)
            args = (rows, grading, degrees)
        elif kind == "free":
            gt = self.st.peek()
            if gt.text in ("twists", "degrees"):
                self.st.next()
                word = gt.text
            else:
                word = "twists"
            args = (word, self.int_list())
        elif kind == "canonical":
            args = ()
        elif kind == "syzygy":
            src = self.module_ref()
            t = self.st.peek()
            n = self.integer()
            if n < 0:
                self.fail("syzygy index must be non-negative", t)
            args = (src, n)
        elif kind == "transpose":
            args = (self.module_ref(),)
        elif kind == "dual":
            src = self.module_ref()
            self.keyword("wrt")
            args = (src, self.module_ref())
        else:
            src = self.module_ref()
            args = (src, self.integer())
        self.end()
        self.names.add(nt.text)
        return ModuleDecl(nt.text, kind, args, span)

    def _grading(self, rows, grading, at: Token) -> tuple:
        """Generator degrees; checks that every column is homogeneous."""
        ring = self.ring
        if grading is None:
            degs = [0] * len(rows)
        elif grading[0] == "twists":
            degs = [-t for t in grading[1]]
        else:
            degs = list(grading[1])
        ncols = len(rows[0]) if rows else 0
        for j in range(ncols):
            seen = set()
            for i, row in enumerate(rows):
                entry = ring(row[j]).as_dict()
                for m in entry:
                    seen.add(degs[i] + sum(a * w for a, w in zip(m, ring.weights)))
            if len(seen) > 1:
                self.fail(f"column {j + 1} of the matrix is not homogeneous for these generator degrees", at)
        return tuple(degs)

    def command(self, span: Span) -> Command:
        t = self.st.next()
        verb = t.text
        if verb == "check":
            what = self.keyword(*CHECKS).text
            M = self.module_ref()
            C = None
            if CHECKS[what]:
                self.keyword("wrt")
                C = self.module_ref()
            args = (what, M, C, self.level())
        elif verb == "approximate":
            M = self.module_ref()
            self.keyword("wrt")
            args = (M, self.module_ref(), self.level())
        elif verb == "cm-approx":
            args = (self.module_ref(),)
        elif verb == "ab-approx":
            args = (self.module_ref(), self.level())
        elif verb == "resolve":
            M = self.module_ref()
            self.keyword("length")
            args = (M, self.integer())
        elif verb == "ext":
            M = self.module_ref()
            N = self.module_ref()
            self.keyword("upto")
            args = (M, N, self.integer())
        elif verb == "cdim":
            M = self.module_ref()
            self.keyword("wrt")
            C = self.module_ref()
            bound = self.integer() if self.st.accept("bound") else None
            args = (M, C, bound)
        elif verb == "descent":
            M = self.module_ref()
            self.keyword("wrt")
            args = (M, self.module_ref(), self.level())
        elif verb == "corpus":
            self.keyword("run")
            self.keyword("wrt")
            args = (self.module_ref(), self.level())
        elif verb == "injdim":
            args = (self.module_ref(),)
        else:
            self.fail(f"unknown statement {verb!r}", t)
        self.end()
        return Command(verb, args, span)


def parse_script(text: str) -> SessionScript:
    return _ScriptParser(text).parse()


def _ints(vals) -> str:
    return "(" + ", ".join(str(v) for v in vals) + ")"


def format_statement(s) -> str:
    if isinstance(s, RingDecl):
        opts = ""
        if s.weights:
            opts += " | weights " + ",".join(str(w) for w in s.weights)
        if s.char is not None:
            opts += f" | char {s.char}"
        if s.order:
            opts += f" | order {s.order}"
        out = f"ring {s.name} = poly({','.join(s.variables)}{opts})"
        if s.ideal:
            out += " / ideal(" + ", ".join(s.ideal) + ")"
        return out + ";"
    if isinstance(s, ModuleDecl):
        head = f"module {s.name} = {s.kind}"
        a = s.args
        if s.kind == "coker":
            rows, grading, _ = a
            body = "[" + ", ".join("[" + ", ".join(r) + "]" for r in rows) + "]"
            tail = f" {grading[0]} {_ints(grading[1])}" if grading else ""
            return f"{head} {body}{tail};"
        if s.kind == "free":
            return f"{head} {a[0]} {_ints(a[1])};"
        if s.kind == "canonical":
            return head + ";"
        if s.kind == "dual":
            return f"{head} {a[0]} wrt {a[1]};"
        return head + " " + " ".join(str(x) for x in a) + ";"
    v, a = s.verb, s.args
    if v == "check":
        what, M, C, n = a
        wrt = f" wrt {C}" if C is not None else ""
        return f"check {what} {M}{wrt} level {n};"
    if v in ("approximate", "descent"):
        return f"{v} {a[0]} wrt {a[1]} level {a[2]};"
    if v in ("cm-approx", "injdim"):
        return f"{v} {a[0]};"
    if v == "ab-approx":
        return f"ab-approx {a[0]} level {a[1]};"
    if v == "resolve":
        return f"resolve {a[0]} length {a[1]};"
    if v == "ext":
        return f"ext {a[0]} {a[1]} upto {a[2]};"
    if v == "cdim":
        bound = f" bound {a[2]}" if a[2] is not None else ""
        return f"cdim {a[0]} wrt {a[1]}{bound};"
    if v == "corpus":
        return f"corpus run wrt {a[0]} level {a[1]};"
    raise ValueError(f"unknown command {v!r}")


def format_script(script: SessionScript) -> str:
    return "".join(format_statement(s) + "\n" for s in script.statements)
