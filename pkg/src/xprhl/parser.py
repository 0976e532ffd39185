"""Recursive-descent parser for the program and assertion syntax.

Statements are separated by ';'.  ``x <- e`` assigns, ``x <$ d`` samples,
``(x, y) <$ d`` samples a coupled pair.  Conditionals and loops use braced
blocks: ``if e then { ... } else { ... }``, ``while e do { ... }``.
``#`` starts a comment running to end of line.

An identifier ending in ``_1`` or ``_2`` denotes a side-tagged variable.
"""

import re

from .lang import (
    Abort, Assign, BinOp, Call, Cond, Coupled, CouplingSpec, Dirac, Index,
    Lit, ListLit, NamedDist, Sample, SetLit, Skip, Store, UnOp, Uniform,
    VarE, While, parse_var, seq,
)


class ParseError(Exception):
    def __init__(self, msg, pos=None):
        super().__init__(msg if pos is None else "%s (at token %d)" % (msg, pos))


_TOKEN_RE = re.compile(
    r"""
    \s+ | \#[^\n]* |
    (?P<num>\d+) |
    (?P<id>[A-Za-z_][A-Za-z0-9_']*) |
    (?P<op><\$|<-|->|=>|<=|>=|!=|&&|\|\||[()\[\]{},;+\-*/%<>=!])
    """,
    re.VERBOSE,
)

_KEYWORDS = {
    "skip", "abort", "if", "then", "else", "while", "do",
    "true", "false", "not", "in", "and", "or", "nil",
    "uniform", "dirac", "id_coupling", "bij_coupling", "prod_coupling",
    "table_coupling",
}


def tokenize(text):
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError("bad character %r at offset %d" % (text[pos], pos))
        pos = m.end()
        if m.lastgroup is not None:
            toks.append(m.group(m.lastgroup))
    return toks


class _Parser:
    def __init__(self, toks):
        self.toks = toks
        self.i = 0

    def peek(self, k=0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def next(self):
        t = self.peek()
        if t is None:
            raise ParseError("unexpected end of input")
        self.i += 1
        return t

    def expect(self, tok):
        t = self.next()
        if t != tok:
            raise ParseError("expected %r, got %r" % (tok, t), self.i)
        return t

    def at_end(self):
        return self.i >= len(self.toks)

    # -- expressions -------------------------------------------------------

    def expr(self):
        return self._implies()

    def _implies(self):
        a = self._or()
        if self.peek() == "=>":
            self.next()
            return BinOp("=>", a, self._implies())
        return a

    def _or(self):
        a = self._and()
        while self.peek() in ("or", "||"):
            self.next()
            a = BinOp("or", a, self._and())
        return a

    def _and(self):
        a = self._not()
        while self.peek() in ("and", "&&"):
            self.next()
            a = BinOp("and", a, self._not())
        return a

    def _not(self):
        if self.peek() in ("not", "!"):
            self.next()
            return UnOp("not", self._not())
        return self._cmp()

    def _cmp(self):
        a = self._add()
        t = self.peek()
        if t in ("=", "!=", "<", "<=", ">", ">=", "in"):
            self.next()
            return BinOp(t, a, self._add())
        return a

    def _add(self):
        a = self._mul()
        while self.peek() in ("+", "-"):
            op = self.next()
            a = BinOp(op, a, self._mul())
        return a

    def _mul(self):
        a = self._unary()
        while self.peek() in ("*", "/", "%"):
            op = self.next()
            a = BinOp(op, a, self._unary())
        return a

    def _unary(self):
        if self.peek() == "-":
            self.next()
            inner = self._unary()
            if isinstance(inner, Lit) and isinstance(inner.value, int) and not isinstance(inner.value, bool):
                return Lit(-inner.value)
            return UnOp("-", inner)
        return self._postfix()

    def _postfix(self):
        a = self._atom()
        while self.peek() == "[":
            self.next()
            k = self.expr()
            if self.peek() == "->":
                self.next()
                v = self.expr()
                self.expect("]")
                a = Store(a, k, v)
            else:
                self.expect("]")
                a = Index(a, k)
        return a

    def _atom(self):
        t = self.peek()
        if t is None:
            raise ParseError("unexpected end of input in expression")
        if t == "(":
            self.next()
            e = self.expr()
            self.expect(")")
            return e
        if t == "[":
            self.next()
            items = self._expr_list("]")
            return ListLit(items)
        if t == "{":
            self.next()
            items = self._expr_list("}")
            return SetLit(items)
        if t.isdigit():
            self.next()
            return Lit(int(t))
        if t == "true":
            self.next()
            return Lit(True)
        if t == "false":
            self.next()
            return Lit(False)
        if t == "nil":
            self.next()
            return ListLit(())
        if re.match(r"[A-Za-z_]", t):
            self.next()
            if self.peek() == "(" and t not in ("if", "while"):
                self.next()
                args = self._expr_list(")")
                return Call(t, args)
            if t in _KEYWORDS:
                raise ParseError("keyword %r used as variable" % t, self.i)
            return VarE(parse_var(t))
        raise ParseError("unexpected token %r in expression" % t, self.i)

    def _expr_list(self, close):
        items = []
        if self.peek() == close:
            self.next()
            return items
        items.append(self.expr())
        while self.peek() == ",":
            self.next()
            items.append(self.expr())
        self.expect(close)
        return items

    # -- distributions -----------------------------------------------------

    def dist(self):
        t = self.peek()
        if t == "uniform":
            self.next()
            self.expect("(")
            e = self.expr()
            self.expect(")")
            return Uniform(e)
        if t == "dirac":
            self.next()
            self.expect("(")
            e = self.expr()
            self.expect(")")
            return Dirac(e)
        if t == "id_coupling":
            self.next()
            self.expect("(")
            d1 = self.dist()
            d2 = None
            if self.peek() == ",":
                self.next()
                d2 = self.dist()
            self.expect(")")
            return Coupled(CouplingSpec("id", d1, d2))
        if t == "bij_coupling":
            self.next()
            self.expect("(")
            fn = self.next()
            self.expect(",")
            d1 = self.dist()
            d2 = None
            if self.peek() == ",":
                self.next()
                d2 = self.dist()
            self.expect(")")
            return Coupled(CouplingSpec("bij", d1, d2, fn=fn))
        if t == "prod_coupling":
            self.next()
            self.expect("(")
            d1 = self.dist()
            self.expect(",")
            d2 = self.dist()
            self.expect(")")
            return Coupled(CouplingSpec("prod", d1, d2))
        if t == "table_coupling":
            self.next()
            self.expect("(")
            name = self.next()
            self.expect(",")
            d1 = self.dist()
            self.expect(",")
            d2 = self.dist()
            self.expect(")")
            return Coupled(CouplingSpec("table", d1, d2, table=name))
        if t is not None and re.match(r"[A-Za-z_]", t) and t not in _KEYWORDS:
            # named primitive distribution
            name = self.next()
            args = []
            if self.peek() == "(":
                self.next()
                args = self._expr_list(")")
            return NamedDist(name, args)
        raise ParseError("expected a distribution, got %r" % t, self.i)

    # -- commands ----------------------------------------------------------

    def block(self):
        self.expect("{")
        c = self.program(stop="}")
        self.expect("}")
        return c

    def stmt(self):
        t = self.peek()
        if t == "skip":
            self.next()
            return Skip()
        if t == "abort":
            self.next()
            return Abort()
        if t == "if":
            self.next()
            g = self.expr()
            self.expect("then")
            then = self.block()
            els = Skip()
            if self.peek() == "else":
                self.next()
                els = self.block()
            return Cond(g, then, els)
        if t == "while":
            self.next()
            g = self.expr()
            self.expect("do")
            body = self.block()
            return While(g, body)
        if t == "(":
            self.next()
            v1 = parse_var(self.next())
            self.expect(",")
            v2 = parse_var(self.next())
            self.expect(")")
            self.expect("<$")
            return Sample((v1, v2), self.dist())
        # assignment or sample
        name = self.next()
        if not re.match(r"[A-Za-z_]", name) or name in _KEYWORDS:
            raise ParseError("expected a statement, got %r" % name, self.i)
        op = self.next()
        if op == "<-":
            return Assign(parse_var(name), self.expr())
        if op == "<$":
            return Sample(parse_var(name), self.dist())
        raise ParseError("expected <- or <$ after %r, got %r" % (name, op), self.i)

    def program(self, stop=None):
        stmts = [self.stmt()]
        while self.peek() == ";":
            self.next()
            if self.peek() == stop or self.peek() is None:
                break
            stmts.append(self.stmt())
        return seq(*stmts)


def parse_program(text):
    p = _Parser(tokenize(text))
    c = p.program()
    if not p.at_end():
        raise ParseError("trailing input starting at %r" % p.peek(), p.i)
    return c


def parse_expr(text):
    p = _Parser(tokenize(text))
    e = p.expr()
    if not p.at_end():
        raise ParseError("trailing input starting at %r" % p.peek(), p.i)
    return e


def parse_dist(text):
    p = _Parser(tokenize(text))
    d = p.dist()
    if not p.at_end():
        raise ParseError("trailing input starting at %r" % p.peek(), p.i)
    return d
