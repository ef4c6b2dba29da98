"""Text syntax for set expressions, schedules and words.

::

    set      := term (("|" term)* | ("&" term)*)
    term     := "!" term | "(" set ")" | call | atom
    atom     := "empty" | "full" | "fin{" ints "}" | "res(" r "," m ")"
              | "thick(" schedule ")" | "ret(" word "," pattern ["," "base=" 0|1] ")"
    call     := ("shiftdown" | "shiftup" | "dilate" | "quot") "(" int "," set ")"
    schedule := "geom" [b=INT] [c=INT] [len=NAME]
              | "explicit" ("[" INT "," INT "]")*
              | "sep" key=value ...             (rows cols sep start ratio len row col)
              | "stride(" step "," offset "," schedule ")"
    word     := "fib" | "tm" | "per(" letters ")" | "sturm(" ints [";" "cycled=" 0|1] ")"
              | "subst(" letter "->" letters ("," letter "->" letters)* ";" "seed=" letter ")"

``|`` and ``&`` may be chained but not mixed without parentheses.  ``#``
starts a comment that runs to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from lsc.errors import DSLError, LscError
from lsc.schedules import Explicit, Geometric, Layout, Separated, Stride
from lsc.setcalc import (
    Compl,
    Dilate,
    Empty,
    Finite,
    Full,
    Inter,
    Quotient,
    Residue,
    Return,
    ShiftDown,
    ShiftUp,
    Thick,
    Union,
)
from lsc.wordspec import FIBONACCI, THUE_MORSE, Periodic, Sturmian, Substitution

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<arrow>->)
  | (?P<int>-?\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<str>"[^"\n]*")
  | (?P<sym>[(){}\[\],|&!=;])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise DSLError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        tok = m.group()
        if kind != "ws":
            out.append(Token(kind, tok, line, pos - line_start + 1))
        nl = tok.count("\n")
        if nl:
            line += nl
            line_start = pos + tok.rindex("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


_UNARY = {"shiftdown": ShiftDown, "shiftup": ShiftUp, "dilate": Dilate, "quot": Quotient}


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def fail(self, msg, tok=None):
        tok = tok or self.tok
        raise DSLError(msg, tok.line, tok.col)

    def next(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def accept(self, text) -> bool:
        if self.tok.text == text and self.tok.kind in ("sym", "arrow", "name"):
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.accept(text):
            self.fail(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")

    def integer(self) -> int:
        if self.tok.kind != "int":
            self.fail(f"expected an integer, found {self.tok.text or 'end of input'!r}")
        return int(self.next().text)

    def name(self) -> Token:
        if self.tok.kind != "name":
            self.fail(f"expected a name, found {self.tok.text or 'end of input'!r}")
        return self.next()

    def build(self, tok, ctor, *args):
        try:
            return ctor(*args)
        except LscError as e:
            raise DSLError(str(e), tok.line, tok.col) from None

    # -- sets

    def parse(self):
        expr = self.set_expr()
        if self.tok.kind != "eof":
            self.fail(f"unexpected {self.tok.text!r}")
        return expr

    def set_expr(self):
        first = self.term()
        if self.tok.text not in ("|", "&") or self.tok.kind != "sym":
            return first
        op = self.tok.text
        parts = [first]
        while self.tok.kind == "sym" and self.tok.text in ("|", "&"):
            if self.tok.text != op:
                self.fail("mixing '|' and '&' needs parentheses")
            self.next()
            parts.append(self.term())
        return Union(tuple(parts)) if op == "|" else Inter(tuple(parts))

    def term(self):
        t = self.tok
        if self.accept("!"):
            return Compl(self.term())
        if self.accept("("):
            e = self.set_expr()
            self.expect(")")
            return e
        if t.kind != "name":
            self.fail(f"expected a set, found {t.text or 'end of input'!r}")
        self.next()
        word = t.text
        if word == "empty":
            return Empty()
        if word == "full":
            return Full()
        if word == "fin":
            self.expect("{")
            items = []
            if not self.accept("}"):
                items.append(self.integer())
                while self.accept(","):
                    items.append(self.integer())
                self.expect("}")
            return self.build(t, Finite, items)
        if word == "res":
            self.expect("(")
            r = self.integer()
            self.expect(",")
            m = self.integer()
            self.expect(")")
            return self.build(t, Residue, r, m)
        if word == "thick":
            self.expect("(")
            s = self.schedule()
            self.expect(")")
            return Thick(s)
        if word == "ret":
            self.expect("(")
            w = self.word()
            self.expect(",")
            if self.tok.kind != "str":
                self.fail("expected a quoted pattern")
            pat = self.next().text[1:-1]
            base = 0
            if self.accept(","):
                self.expect("base")
                self.expect("=")
                base = self.integer()
            self.expect(")")
            return self.build(t, Return, w, pat, base)
        if word in _UNARY:
            self.expect("(")
            n = self.integer()
            self.expect(",")
            inner = self.set_expr()
            self.expect(")")
            return self.build(t, _UNARY[word], n, inner)
        self.fail(f"unknown identifier {word!r}", t)

    # -- schedules

    def keyvals(self, allowed):
        out = {}
        while self.tok.kind == "name" and self.tok.text in allowed:
            key = self.next().text
            self.expect("=")
            if key in ("len", "sep"):
                out[key] = self.name().text
            else:
                out[key] = self.integer()
        return out

    def schedule(self):
        t = self.name()
        if t.text == "geom":
            kv = self.keyvals({"b", "c", "len"})
            return self.build(t, Geometric, kv.get("b", 10), kv.get("c", 1), kv.get("len", "lin"))
        if t.text == "explicit":
            spans = []
            while self.accept("["):
                lo = self.integer()
                self.expect(",")
                hi = self.integer()
                self.expect("]")
                spans.append((lo, hi))
            return self.build(t, Explicit, tuple(spans))
        if t.text == "sep":
            kv = self.keyvals({"rows", "cols", "sep", "start", "ratio", "len", "row", "col"})
            lay = self.build(
                t,
                Layout,
                kv.get("rows", 1),
                kv.get("cols", 1),
                kv.get("sep", "lin10"),
                kv.get("start", 1),
                kv.get("ratio", 2),
                kv.get("len", "lin"),
            )
            return self.build(t, Separated, lay, kv.get("row", 1), kv.get("col", 1))
        if t.text == "stride":
            self.expect("(")
            step = self.integer()
            self.expect(",")
            offset = self.integer()
            self.expect(",")
            parent = self.schedule()
            self.expect(")")
            return self.build(t, Stride, parent, offset, step)
        self.fail(f"unknown schedule kind {t.text!r}", t)

    # -- words

    def letters(self) -> str:
        t = self.tok
        if t.kind == "str":
            self.next()
            return t.text[1:-1]
        if t.kind in ("name", "int"):
            self.next()
            return t.text
        self.fail("expected letters")

    def word(self):
        t = self.name()
        if t.text == "fib":
            return FIBONACCI
        if t.text == "tm":
            return THUE_MORSE
        if t.text == "per":
            self.expect("(")
            w = self.letters()
            self.expect(")")
            return self.build(t, Periodic, w)
        if t.text == "sturm":
            self.expect("(")
            terms = [self.integer()]
            while self.accept(","):
                terms.append(self.integer())
            cycled = 1
            if self.accept(";"):
                self.expect("cycled")
                self.expect("=")
                cycled = self.integer()
            self.expect(")")
            return self.build(t, Sturmian, tuple(terms), bool(cycled))
        if t.text == "subst":
            self.expect("(")
            rules = []
            while True:
                a = self.letters()
                self.expect("->")
                rules.append((a, self.letters()))
                if not self.accept(","):
                    break
            self.expect(";")
            self.expect("seed")
            self.expect("=")
            seed = self.letters()
            self.expect(")")
            return self.build(t, Substitution, tuple(rules), seed)
        self.fail(f"unknown word {t.text!r}", t)


def parse_set(text: str):
    """Parse DSL text into a set expression."""
    return _Parser(text).parse()


def parse_schedule(text: str):
    p = _Parser(text)
    s = p.schedule()
    if p.tok.kind != "eof":
        p.fail(f"unexpected {p.tok.text!r}")
    return s


def parse_word(text: str):
    p = _Parser(text)
    w = p.word()
    if p.tok.kind != "eof":
        p.fail(f"unexpected {p.tok.text!r}")
    return w


# -- printing


def _letters(s: str) -> str:
    return s if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*|\d+", s) and not s.startswith("-") else f'"{s}"'


def format_word(w) -> str:
    if w == FIBONACCI:
        return "fib"
    if w == THUE_MORSE:
        return "tm"
    if isinstance(w, Periodic):
        return f'per("{w.word}")'
    if isinstance(w, Sturmian):
        tail = "" if w.cycled else "; cycled=0"
        return f"sturm({', '.join(map(str, w.terms))}{tail})"
    if isinstance(w, Substitution):
        rules = ", ".join(f"{_letters(a)}->{_letters(b)}" for a, b in w.rules)
        return f"subst({rules}; seed={_letters(w.seed)})"
    raise TypeError(f"not a word spec: {w!r}")


def format_schedule(s) -> str:
    if isinstance(s, Geometric):
        return f"geom b={s.base} c={s.anchor} len={s.lengths}"
    if isinstance(s, Explicit):
        return "explicit" + "".join(f" [{a},{b}]" for a, b in s.spans)
    if isinstance(s, Separated):
        L = s.layout
        return (
            f"sep rows={L.rows} cols={L.cols} sep={L.sep} start={L.start} ratio={L.ratio} "
            f"len={L.lengths} row={s.row} col={s.col}"
        )
    if isinstance(s, Stride):
        return f"stride({s.step}, {s.offset}, {format_schedule(s.parent)})"
    raise TypeError(f"not a schedule: {s!r}")


def format_set(e) -> str:
    """Canonical text; ``parse_set(format_set(e))`` denotes the same set."""
    if isinstance(e, Empty):
        return "empty"
    if isinstance(e, Full):
        return "full"
    if isinstance(e, Finite):
        return "fin{" + ",".join(map(str, e.elements)) + "}"
    if isinstance(e, Residue):
        return f"res({e.r},{e.m})"
    if isinstance(e, Thick):
        return f"thick({format_schedule(e.schedule)})"
    if isinstance(e, Return):
        base = ", base=1" if e.base else ""
        return f'ret({format_word(e.word)}, "{e.pattern}"{base})'
    if isinstance(e, (Union, Inter)):
        if not e.parts:
            return "empty" if isinstance(e, Union) else "full"
        op = " | " if isinstance(e, Union) else " & "
        return "(" + op.join(format_set(p) for p in e.parts) + ")"
    if isinstance(e, Compl):
        return "!" + format_set(e.inner)
    for name, cls in _UNARY.items():
        if isinstance(e, cls):
            arg = e.n if isinstance(e, (ShiftDown, ShiftUp)) else e.k
            return f"{name}({arg}, {format_set(e.inner)})"
    raise TypeError(f"not a set expression: {e!r}")
