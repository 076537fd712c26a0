"""A small line-oriented language for declaring sets and groups and asking
density, cone and Crofton questions about them.

    prime 5;
    set E = evenval(0);
    set C = raycone origin (0, 0) ray dir (1, 1) coset 1 * P 2;
    group L = P 2;
    query density E at 0;
    query mt-check C at (0, 0) with L;

Documents parse to frozen dataclasses; :func:`print_document` emits the
canonical text and ``parse(print_document(doc)) == doc``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .cells import (And, Cell1D, Const, CosetAtom, Not, Or, OrdAtom, Set1D, normalize_1d)
from .padic import InvalidSubgroup, Subgroup, is_prime, power_classes
from .sets import (BoxSet, MonomialGraph, Ray, RayCone, UnionSet, ambient_dim, dimension)


class DSLSyntaxError(SyntaxError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} at line {line}, column {col}")
        self.message, self.line, self.col = message, line, col


class SemanticError(ValueError):
    pass


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NameRef:
    name: str


@dataclass(frozen=True)
class FieldExpr:
    pass


@dataclass(frozen=True)
class CellExpr:
    center: Fraction
    lam: Fraction
    n: int
    bounds: tuple = ()


@dataclass(frozen=True)
class PointExpr:
    center: Fraction


@dataclass(frozen=True)
class BallExpr:
    center: Fraction
    level: int


@dataclass(frozen=True)
class SphereExpr:
    center: Fraction
    level: int


@dataclass(frozen=True)
class SphereUnionExpr:
    """union over k in Z of sphere(center, a*k + b)."""
    center: Fraction
    a: int
    b: int


@dataclass(frozen=True)
class FormulaExpr:
    text: str


@dataclass(frozen=True)
class UnionExpr:
    args: tuple


@dataclass(frozen=True)
class BoxExpr:
    args: tuple


@dataclass(frozen=True)
class GraphExpr:
    base: object
    coeff: Fraction
    k: int
    m0: Optional[int] = None


@dataclass(frozen=True)
class RayConeExpr:
    origin: tuple
    apex: bool
    rays: tuple  # of (direction tuple, lam, n)


@dataclass(frozen=True)
class PGroupExpr:
    n: int


@dataclass(frozen=True)
class CosetGroupExpr:
    n: int
    reps: tuple


@dataclass(frozen=True)
class SetDef:
    name: str
    expr: object


@dataclass(frozen=True)
class GroupDef:
    name: str
    expr: object


VERBS = ("density", "volume", "theta-sequence", "cone", "sc", "mt-check",
         "distinguished-check", "crofton", "cross-check", "member")


@dataclass(frozen=True)
class Query:
    verb: str
    target: str
    at: Optional[tuple] = None
    group: object = None
    level: Optional[int] = None
    on: Optional[tuple] = None
    refine: tuple = ()
    depth: Optional[int] = None


@dataclass(frozen=True)
class Document:
    prime: int
    items: tuple = field(default=())

    @property
    def queries(self) -> list[Query]:
        return [i for i in self.items if isinstance(i, Query)]


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+) |
    (?P<nl>\n) |
    (?P<comment>\#[^\n]*) |
    (?P<string>"[^"\n]*") |
    (?P<verb>theta-sequence|mt-check|distinguished-check|cross-check)\b |
    (?P<num>-?\d+(?:/\d+)?) |
    (?P<name>[A-Za-z_][A-Za-z0-9_]*) |
    (?P<op>>=|<=|[;=(),*{}+<>])
""", re.VERBOSE)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(src: str) -> list[Token]:
    out, pos, line, col = [], 0, 1, 1
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m:
            raise DSLSyntaxError(f"unexpected character {src[pos]!r}", line, col)
        kind, text = m.lastgroup, m.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind not in ("ws", "comment"):
                out.append(Token("name" if kind == "verb" else kind, text, line, col))
            col += len(text)
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, src: str):
        self.toks = tokenize(src)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Token | None = None):
        t = tok or self.tok
        raise DSLSyntaxError(msg, t.line, t.col)

    def next(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def peek_is(self, text: str) -> bool:
        return self.tok.kind in ("name", "op") and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.peek_is(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.next()

    def accept(self, text: str) -> bool:
        if self.peek_is(text):
            self.i += 1
            return True
        return False

    def name(self) -> str:
        if self.tok.kind != "name":
            self.error(f"expected a name, found {self.tok.text or 'end of input'!r}")
        return self.next().text

    def rational(self) -> Fraction:
        if self.tok.kind != "num":
            self.error(f"expected a number, found {self.tok.text or 'end of input'!r}")
        t = self.next()
        try:
            return Fraction(t.text)
        except ZeroDivisionError:
            self.error("zero denominator", t)

    def integer(self) -> int:
        t = self.tok
        r = self.rational()
        if r.denominator != 1:
            self.error("expected an integer", t)
        return int(r)

    def point(self) -> tuple:
        if self.accept("("):
            coords = [self.rational()]
            while self.accept(","):
                coords.append(self.rational())
            self.expect(")")
            return tuple(coords)
        return (self.rational(),)

    # document ---------------------------------------------------------------
    def document(self) -> Document:
        self.expect("prime")
        ptok = self.tok
        p = self.integer()
        self.expect(";")
        items = []
        while self.tok.kind != "eof":
            if self.peek_is("set"):
                items.append(self.set_def())
            elif self.peek_is("group"):
                items.append(self.group_def())
            elif self.peek_is("query"):
                items.append(self.query())
            elif self.peek_is("prime"):
                self.error("prime declared more than once")
            else:
                self.error(f"expected set, group or query, found {self.tok.text!r}")
        doc = Document(p, tuple(items))
        check_document(doc, ptok)
        return doc

    def set_def(self) -> SetDef:
        self.expect("set")
        n = self.name()
        self.expect("=")
        e = self.setexpr()
        self.expect(";")
        return SetDef(n, e)

    def group_def(self) -> GroupDef:
        self.expect("group")
        n = self.name()
        self.expect("=")
        e = self.groupexpr()
        self.expect(";")
        return GroupDef(n, e)

    def groupexpr(self):
        if self.accept("P"):
            return PGroupExpr(self.integer())
        if self.accept("cosets"):
            n = self.integer()
            self.expect("{")
            reps = [self.rational()]
            while self.accept(","):
                reps.append(self.rational())
            self.expect("}")
            return CosetGroupExpr(n, tuple(reps))
        if self.tok.kind == "name":
            return NameRef(self.name())
        self.error("expected a group")

    def coset(self) -> tuple[Fraction, int]:
        lam = self.rational()
        self.expect("*")
        self.expect("P")
        return lam, self.integer()

    def setexpr(self):
        t = self.tok
        if t.kind == "string":
            self.error("formula strings need the 'formula' keyword")
        if t.kind != "name":
            self.error(f"expected a set expression, found {t.text or 'end of input'!r}")
        kw = t.text
        if kw in ("K", "field"):
            self.next()
            return FieldExpr()
        if kw == "cell" and self.toks[self.i + 1].text == "(":
            self.next()
            self.expect("(")
            c = self.rational()
            self.expect(",")
            lam, n = self.coset()
            bounds = []
            while self.accept(","):
                self.expect("ord")
                if self.tok.kind != "op" or self.tok.text not in (">=", "<=", ">", "<", "="):
                    self.error("expected a comparison")
                op = self.next().text
                bounds.append((op, self.integer()))
            self.expect(")")
            return CellExpr(c, lam, n, tuple(bounds))
        if kw in ("point", "evenval") and self.toks[self.i + 1].text == "(":
            self.next()
            self.expect("(")
            c = self.rational()
            self.expect(")")
            return PointExpr(c) if kw == "point" else SphereUnionExpr(c, 2, 0)
        if kw in ("ball", "sphere") and self.toks[self.i + 1].text == "(":
            self.next()
            self.expect("(")
            c = self.rational()
            self.expect(",")
            k = self.integer()
            self.expect(")")
            return BallExpr(c, k) if kw == "ball" else SphereExpr(c, k)
        if kw == "formula":
            self.next()
            if self.tok.kind != "string":
                self.error("expected a quoted formula")
            s = self.next()
            text = s.text[1:-1]
            try:
                parse_formula(text)
            except DSLSyntaxError as e:
                raise DSLSyntaxError(f"in formula: {e.message}", s.line, s.col + e.col) from None
            return FormulaExpr(text)
        if kw == "union" and self.toks[self.i + 1].text == "over":
            self.next()
            self.expect("over")
            self.expect("k")
            self.expect("in")
            self.expect("Z")
            self.expect("of")
            self.expect("sphere")
            self.expect("(")
            c = self.rational()
            self.expect(",")
            a, b = self.affine()
            self.expect(")")
            return SphereUnionExpr(c, a, b)
        if kw in ("union", "box") and self.toks[self.i + 1].text == "(":
            self.next()
            self.expect("(")
            args = [self.setexpr()]
            while self.accept(","):
                args.append(self.setexpr())
            self.expect(")")
            return UnionExpr(tuple(args)) if kw == "union" else BoxExpr(tuple(args))
        if kw == "graph" and self.toks[self.i + 1].text == "(":
            self.next()
            self.expect("(")
            base = self.setexpr()
            self.expect(",")
            c = self.rational()
            self.expect(",")
            k = self.integer()
            m0 = None
            if self.accept(","):
                m0 = self.integer()
            self.expect(")")
            return GraphExpr(base, c, k, m0)
        if kw == "raycone":
            self.next()
            self.expect("origin")
            origin = self.point()
            apex = self.accept("apex")
            rays = []
            while self.accept("ray"):
                self.expect("dir")
                d = self.point()
                self.expect("coset")
                lam, n = self.coset()
                rays.append((d, lam, n))
            return RayConeExpr(origin, apex, tuple(rays))
        return NameRef(self.name())

    def affine(self) -> tuple[int, int]:
        """a*k + b written as '2k+1', 'k', '3k-2' or a plain integer."""
        a = 1
        if self.tok.kind == "num":
            v = self.integer()
            if not self.peek_is("k"):
                return 0, v
            a = v
        self.expect("k")
        b = 0
        if self.accept("+"):
            b = self.integer()
        elif self.tok.kind == "num" and self.tok.text.startswith("-"):
            b = self.integer()
        return a, b

    def query(self) -> Query:
        self.expect("query")
        vt = self.tok
        verb = self.name()
        if verb not in VERBS:
            self.error(f"unknown query verb {verb!r}", vt)
        target = self.name()
        opts: dict = {}
        while not self.peek_is(";"):
            t = self.tok
            key = self.name()
            if key in opts:
                self.error(f"option {key!r} given twice", t)
            if key == "at":
                opts["at"] = self.point()
            elif key == "on":
                opts["on"] = self.point()
            elif key == "with":
                opts["group"] = self.groupexpr()
            elif key == "level":
                opts["level"] = self.integer()
            elif key == "depth":
                opts["depth"] = self.integer()
            elif key == "refine":
                gs = [self.groupexpr()]
                while self.accept(","):
                    gs.append(self.groupexpr())
                opts["refine"] = tuple(gs)
            else:
                self.error(f"unknown query option {key!r}", t)
        self.expect(";")
        return Query(verb, target, **opts)


def parse(src: str) -> Document:
    return _Parser(src).document()


def check_document(doc: Document, where: Token | None = None):
    p = doc.prime
    if p < 3 or not is_prime(p):
        raise SemanticError(f"prime must be an odd prime, got {p}")
    sets: set = set()
    groups: set = set()

    def need_set(e):
        if isinstance(e, NameRef):
            if e.name not in sets:
                raise SemanticError(f"undefined set {e.name!r}")
        for sub in _children(e):
            need_set(sub)

    def need_group(g):
        if isinstance(g, NameRef):
            if g.name not in groups:
                raise SemanticError(f"undefined group {g.name!r}")
        elif isinstance(g, (PGroupExpr, CosetGroupExpr)):
            if g.n < 1:
                raise SemanticError("group exponent must be positive")
            if isinstance(g, CosetGroupExpr):
                try:
                    Subgroup(p, g.n, g.reps)
                except (InvalidSubgroup, ValueError) as e:
                    raise SemanticError(f"malformed cosets: {e}") from None

    for item in doc.items:
        if isinstance(item, SetDef):
            if item.name in sets or item.name in groups:
                raise SemanticError(f"name {item.name!r} defined twice")
            need_set(item.expr)
            _check_set_expr(item.expr, p)
            sets.add(item.name)
        elif isinstance(item, GroupDef):
            if item.name in sets or item.name in groups:
                raise SemanticError(f"name {item.name!r} defined twice")
            need_group(item.expr)
            groups.add(item.name)
        else:
            if item.target not in sets:
                raise SemanticError(f"query refers to undefined set {item.target!r}")
            for g in ((item.group,) if item.group is not None else ()) + item.refine:
                need_group(g)


def _children(e) -> tuple:
    if isinstance(e, (UnionExpr, BoxExpr)):
        return e.args
    if isinstance(e, GraphExpr):
        return (e.base,)
    return ()


def _check_set_expr(e, p):
    if isinstance(e, CellExpr):
        if e.n < 1:
            raise SemanticError("coset exponent must be positive")
        if e.lam == 0 and e.bounds:
            raise SemanticError("a point cell takes no valuation bounds")
    if isinstance(e, SphereUnionExpr) and e.a < 0:
        raise SemanticError("sphere family step must be nonnegative")
    if isinstance(e, GraphExpr) and e.k < 2:
        raise SemanticError("graph exponent must be at least 2")
    if isinstance(e, RayConeExpr):
        for d, lam, n in e.rays:
            if len(d) != len(e.origin):
                raise SemanticError("ray direction and origin have different lengths")
            if all(c == 0 for c in d) or lam == 0 or n < 1:
                raise SemanticError("malformed ray")
    for sub in _children(e):
        _check_set_expr(sub, p)


# ---------------------------------------------------------------------------
# Formula strings
# ---------------------------------------------------------------------------

_FTOKEN = re.compile(r"\s*(?:(?P<num>-?\d+(?:/\d+)?)|(?P<name>[A-Za-z_]+)|(?P<op>>=|<=|[()*<>=+-]))")


def parse_formula(text: str):
    """Formula1D from text such as 't - 1 in 2 * P 2 and not ord(t) >= 3'."""
    toks, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _FTOKEN.match(text, pos)
        if not m:
            raise DSLSyntaxError(f"unexpected {text[pos]!r}", 1, pos + 1)
        kind = m.lastgroup
        toks.append((kind, m.group(kind), m.start(kind) + 1))
        pos = m.end()
    toks.append(("eof", "", len(text) + 1))
    i = 0

    def peek():
        return toks[i]

    def take(expected=None):
        nonlocal i
        t = toks[i]
        if expected is not None and t[1] != expected:
            raise DSLSyntaxError(f"expected {expected!r}", 1, t[2])
        i += 1
        return t

    def number():
        t = take()
        if t[0] != "num":
            raise DSLSyntaxError("expected a number", 1, t[2])
        return Fraction(t[1])

    def center():
        """'t' or 't - c' or 't + c'; returns c."""
        take("t")
        if peek()[1] == "-":
            take()
            return number()
        if peek()[1] == "+":
            take()
            return -number()
        return Fraction(0)

    def atom():
        t = peek()
        if t[1] == "(":
            take()
            f = disj()
            take(")")
            return f
        if t[1] == "not":
            take()
            return Not(atom())
        if t[1] in ("true", "false"):
            take()
            return Const(t[1] == "true")
        if t[1] == "ord":
            take()
            take("(")
            c = center()
            take(")")
            op = take()
            if op[1] not in (">=", "<=", ">", "<", "="):
                raise DSLSyntaxError("expected a comparison", 1, op[2])
            k = number()
            if k.denominator != 1:
                raise DSLSyntaxError("valuation bound must be an integer", 1, op[2])
            return OrdAtom(c, op[1], int(k))
        if t[1] == "t":
            c = center()
            if peek()[1] == "=":
                take()
                v = number()
                return CosetAtom(c + v, 0, 1)
            take("in")
            lam = number()
            take("*")
            take("P")
            n = number()
            if n.denominator != 1 or n < 1:
                raise DSLSyntaxError("coset exponent must be a positive integer", 1, t[2])
            return CosetAtom(c, lam, int(n)) if lam != 0 else CosetAtom(c, 0, 1)
        raise DSLSyntaxError(f"unexpected {t[1] or 'end of formula'!r}", 1, t[2])

    def conj():
        parts = [atom()]
        while peek()[1] == "and":
            take()
            parts.append(atom())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def disj():
        parts = [conj()]
        while peek()[1] == "or":
            take()
            parts.append(conj())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    f = disj()
    if peek()[0] != "eof":
        raise DSLSyntaxError(f"trailing {peek()[1]!r}", 1, peek()[2])
    return f


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------

def _rat(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _pt(t: tuple) -> str:
    return "(" + ", ".join(_rat(c) for c in t) + ")"


def _affine(a: int, b: int) -> str:
    if a == 0:
        return str(b)
    s = "k" if a == 1 else f"{a}k"
    if b > 0:
        s += f"+{b}"
    elif b < 0:
        s += str(b)
    return s


def print_setexpr(e) -> str:
    if isinstance(e, NameRef):
        return e.name
    if isinstance(e, FieldExpr):
        return "K"
    if isinstance(e, CellExpr):
        s = f"cell({_rat(e.center)}, {_rat(e.lam)} * P {e.n}"
        for op, k in e.bounds:
            s += f", ord {op} {k}"
        return s + ")"
    if isinstance(e, PointExpr):
        return f"point({_rat(e.center)})"
    if isinstance(e, BallExpr):
        return f"ball({_rat(e.center)}, {e.level})"
    if isinstance(e, SphereExpr):
        return f"sphere({_rat(e.center)}, {e.level})"
    if isinstance(e, SphereUnionExpr):
        return f"union over k in Z of sphere({_rat(e.center)}, {_affine(e.a, e.b)})"
    if isinstance(e, FormulaExpr):
        return f'formula "{e.text}"'
    if isinstance(e, UnionExpr):
        return "union(" + ", ".join(print_setexpr(a) for a in e.args) + ")"
    if isinstance(e, BoxExpr):
        return "box(" + ", ".join(print_setexpr(a) for a in e.args) + ")"
    if isinstance(e, GraphExpr):
        tail = f", {e.m0}" if e.m0 is not None else ""
        return f"graph({print_setexpr(e.base)}, {_rat(e.coeff)}, {e.k}{tail})"
    if isinstance(e, RayConeExpr):
        s = f"raycone origin {_pt(e.origin)}"
        if e.apex:
            s += " apex"
        for d, lam, n in e.rays:
            s += f" ray dir {_pt(d)} coset {_rat(lam)} * P {n}"
        return s
    raise TypeError(f"not a set expression: {e!r}")


def print_group(g) -> str:
    if isinstance(g, NameRef):
        return g.name
    if isinstance(g, PGroupExpr):
        return f"P {g.n}"
    return f"cosets {g.n} {{" + ", ".join(_rat(r) for r in g.reps) + "}"


def print_query(q: Query) -> str:
    s = f"query {q.verb} {q.target}"
    if q.at is not None:
        s += " at " + (_rat(q.at[0]) if len(q.at) == 1 else _pt(q.at))
    if q.group is not None:
        s += " with " + print_group(q.group)
    if q.level is not None:
        s += f" level {q.level}"
    if q.on is not None:
        s += " on " + (_rat(q.on[0]) if len(q.on) == 1 else _pt(q.on))
    if q.refine:
        s += " refine " + ", ".join(print_group(g) for g in q.refine)
    if q.depth is not None:
        s += f" depth {q.depth}"
    return s + ";"


def print_document(doc: Document) -> str:
    lines = [f"prime {doc.prime};"]
    for item in doc.items:
        if isinstance(item, SetDef):
            lines.append(f"set {item.name} = {print_setexpr(item.expr)};")
        elif isinstance(item, GroupDef):
            lines.append(f"group {item.name} = {print_group(item.expr)};")
        else:
            lines.append(print_query(item))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Evaluation of definitions
# ---------------------------------------------------------------------------

class Environment:
    """Named sets and groups of a document, built in order."""

    def __init__(self, p: int):
        self.p = p
        self.sets: dict = {}
        self.groups: dict = {}
        self.broken: dict = {}  # name -> error raised while building it

    def add(self, item):
        if isinstance(item, SetDef):
            self.sets[item.name] = build_set(item.expr, self)
        elif isinstance(item, GroupDef):
            self.groups[item.name] = build_group(item.expr, self)

    def group(self, g) -> Subgroup:
        return build_group(g, self)


def build_group(g, env: Environment) -> Subgroup:
    if isinstance(g, NameRef):
        return env.groups[g.name]
    if isinstance(g, PGroupExpr):
        return Subgroup.P(env.p, g.n)
    return Subgroup(env.p, g.n, g.reps)


def _bounds(bounds) -> tuple:
    lo = hi = None
    for op, k in bounds:
        if op in (">=", ">", "="):
            v = k + 1 if op == ">" else k
            lo = v if lo is None else max(lo, v)
        if op in ("<=", "<", "="):
            v = k - 1 if op == "<" else k
            hi = v if hi is None else min(hi, v)
    return lo, hi


def build_set(e, env: Environment):
    p = env.p
    if isinstance(e, NameRef):
        return env.sets[e.name]
    if isinstance(e, FieldExpr):
        return Set1D.whole(p)
    if isinstance(e, CellExpr):
        if e.lam == 0:
            return Set1D(p, (Cell1D(p, e.center, 0),), verify=False)
        lo, hi = _bounds(e.bounds)
        try:
            cell = Cell1D(p, e.center, e.lam, e.n, lo, hi)
        except ValueError:
            return Set1D.empty(p)
        return Set1D(p, (cell,), verify=False)
    if isinstance(e, PointExpr):
        return Set1D(p, (Cell1D(p, e.center, 0),), verify=False)
    if isinstance(e, BallExpr):
        return normalize_1d(OrdAtom(e.center, ">=", e.level), p)
    if isinstance(e, SphereExpr):
        return normalize_1d(OrdAtom(e.center, "=", e.level), p)
    if isinstance(e, SphereUnionExpr):
        if e.a == 0:
            return normalize_1d(OrdAtom(e.center, "=", e.b), p)
        pc = power_classes(p, e.a)
        r = e.b % e.a
        cells = [Cell1D(p, e.center, Fraction(u) * Fraction(p) ** r, e.a) for u in pc.unit_reps]
        return Set1D(p, tuple(cells), verify=False)
    if isinstance(e, FormulaExpr):
        return normalize_1d(parse_formula(e.text), p)
    if isinstance(e, UnionExpr):
        members = [build_set(a, env) for a in e.args]
        if all(isinstance(m, Set1D) for m in members):
            out = members[0]
            for m in members[1:]:
                out = out.union(m)
            return out
        if all(isinstance(m, RayCone) for m in members) and len({m.origin for m in members}) == 1:
            out = members[0]
            for m in members[1:]:
                out = out.union(m)
            return out
        return UnionSet(p, members)
    if isinstance(e, BoxExpr):
        factors = [build_set(a, env) for a in e.args]
        if not all(isinstance(f, Set1D) for f in factors):
            raise SemanticError("box factors must be one-variable sets")
        return BoxSet(p, factors)
    if isinstance(e, GraphExpr):
        base = build_set(e.base, env)
        if not isinstance(base, Set1D):
            raise SemanticError("graph base must be a one-variable set")
        try:
            return MonomialGraph(p, base, e.coeff, e.k, e.m0)
        except ValueError as err:
            raise SemanticError(str(err)) from None
    if isinstance(e, RayConeExpr):
        return RayCone(p, e.origin, [Ray(d, lam, n) for d, lam, n in e.rays], e.apex)
    raise TypeError(f"not a set expression: {e!r}")


def default_group(X) -> Subgroup:
    """P_N with N the lcm of the coset exponents of X."""
    from .sets import exponents
    return Subgroup.P(X.p, math.lcm(1, *exponents(X)))


# ---------------------------------------------------------------------------
# Running queries
# ---------------------------------------------------------------------------

CHECK_VERBS = ("mt-check", "distinguished-check", "crofton", "cross-check")


@dataclass
class RunConfig:
    depth: int = 12
    refine_bound: int = 4
    precision: Optional[int] = None


@dataclass
class QueryResult:
    query: Query
    payload: dict
    is_check: bool
    passed: bool


def cone_json(C) -> dict:
    from .epseq import fraction_str as fs
    if isinstance(C, BoxSet):
        return {"box": [[{"center": fs(c.center), "lambda": fs(c.lam), "n": c.n,
                          "lo": c.lo, "hi": c.hi} for c in f.cells] for f in C.factors]}
    return {"origin": [fs(c) for c in C.origin], "include_origin": C.include_origin,
            "rays": [{"direction": [fs(c) for c in r.direction],
                      "coset": {"lambda": fs(r.lam), "n": r.n}} for r in C.rays]}


def _point_for(X, q: Query) -> tuple:
    if q.at is not None:
        if len(q.at) != ambient_dim(X):
            raise SemanticError(f"point has {len(q.at)} coordinates, set lives in K^{ambient_dim(X)}")
        return q.at
    return (Fraction(0),) * ambient_dim(X)


def run_query(q: Query, env: Environment, cfg: RunConfig) -> QueryResult:
    from .cone import (distinguished_check, sc_cross_check, sc_multiplicity, tangent_cone,
                       theorem_mt_check)
    from .crofton import verify_crofton
    from .density import (local_density, theta_ball_sequence, theta_sequence, volume_on_ball,
                          volume_on_sphere)
    from .epseq import fraction_str as fs
    from .padic import PadicNumber
    from .sets import member

    X = env.sets[q.target]
    x = _point_for(X, q)
    group = env.group(q.group) if q.group is not None else default_group(X)
    out: dict = {"query": print_query(q)}
    check, ok = q.verb in CHECK_VERBS, True
    if q.verb == "density":
        out.update(local_density(X, x, dimension(X)).to_json())
    elif q.verb == "volume":
        n = q.level if q.level is not None else 0
        out.update({"level": n, "ball": fs(volume_on_ball(X, x, n)),
                    "sphere": fs(volume_on_sphere(X, x, n))})
    elif q.verb == "theta-sequence":
        d = dimension(X)
        out.update({"sphere": theta_sequence(X, x, d).to_json(),
                    "ball": theta_ball_sequence(X, x, d).to_json()})
    elif q.verb == "cone":
        out.update(cone_json(tangent_cone(X, x, group)))
    elif q.verb == "sc":
        out.update(sc_multiplicity(X, x, group).to_json())
    elif q.verb == "mt-check":
        r = theorem_mt_check(X, x, group, cfg.refine_bound)
        ok = r.equal
        out.update({"lhs": fs(r.lhs), "rhs": fs(r.rhs), "equal": r.equal,
                    "refinements": r.refinements})
    elif q.verb == "distinguished-check":
        if q.refine:
            subs = [env.group(g) for g in q.refine]
        else:
            subs = [group.intersect(Subgroup.P(X.p, k * group.N)) for k in (2, 3, 6)]
        ok = distinguished_check(X, x, group, subs)
        out.update({"equal": ok, "refinements": [repr(s) for s in subs]})
    elif q.verb == "crofton":
        r = verify_crofton(X, x, group if q.group is not None else None)
        ok = r.equal
        out.update(r.to_json())
    elif q.verb == "cross-check":
        if q.on is None:
            raise SemanticError("cross-check needs a direction: on POINT")
        depth = q.depth if q.depth is not None else cfg.depth
        exact = sc_multiplicity(X, x, group).multiplicity_at(q.on)
        iv = sc_cross_check(X, x, group, q.on, depth=depth)
        ok = exact in iv
        out.update({"exact": fs(exact), "interval": iv.to_json(), "depth": depth,
                    "contains": ok})
    elif q.verb == "member":
        if cfg.precision is not None:
            pt = tuple(PadicNumber.from_rational(X.p, c, cfg.precision) for c in x)
        else:
            pt = x
        out.update({"member": member(X, pt if len(pt) > 1 else pt[0])})
    return QueryResult(q, out, check, ok)


def run(doc: Document, cfg: RunConfig | None = None) -> list[QueryResult]:
    """Execute the queries in order; errors become {query, error_kind, message}."""
    cfg = cfg or RunConfig()
    env = Environment(doc.prime)
    results = []
    for item in doc.items:
        if not isinstance(item, Query):
            try:
                env.add(item)
            except Exception as e:  # later queries on this name report the failure
                env.broken[item.name] = e
            continue
        try:
            if item.target not in env.sets:
                raise env.broken.get(item.target) or SemanticError(f"undefined set {item.target!r}")
            results.append(run_query(item, env, cfg))
        except Exception as e:
            payload = {"query": print_query(item), "error_kind": type(e).__name__,
                       "message": str(e)}
            results.append(QueryResult(item, payload, item.verb in CHECK_VERBS, False))
    return results


def exit_code(results: list[QueryResult]) -> int:
    """0 iff every equality check passed and no query failed."""
    bad = any(not r.passed for r in results)
    return 1 if bad else 0
