"""Core language: values, variables, expressions, distributions, commands.

Programs are written in a small imperative while-language with exact
integer/boolean/list values.  Variables carry an optional side tag; a
tagged variable ``x`` on the left renders as ``x_1`` and on the right as
``x_2``.  Relational assertions are ordinary boolean expressions over a
paired memory, so they reuse the same expression type.
"""

LEFT = "l"
RIGHT = "r"

_SIDE_SUFFIX = {LEFT: "_1", RIGHT: "_2"}


class LangError(Exception):
    pass


class Var:
    """A program variable with an optional side tag (None, 'l' or 'r')."""

    __slots__ = ("name", "tag", "_hash")

    def __init__(self, name, tag=None):
        if tag not in (None, LEFT, RIGHT):
            raise LangError("bad side tag %r" % (tag,))
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "tag", tag)
        object.__setattr__(self, "_hash", hash((name, tag)))

    def __setattr__(self, *a):
        raise AttributeError("Var is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, Var)
            and self.name == other.name
            and self.tag == other.tag
        )

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return (self.name, self.tag or "") < (other.name, other.tag or "")

    def __repr__(self):
        return "Var(%s)" % str(self)

    def __str__(self):
        if self.tag is None:
            return self.name
        return self.name + _SIDE_SUFFIX[self.tag]

    def tagged(self, side):
        if self.tag is not None:
            raise LangError("variable %s is already tagged" % self)
        return Var(self.name, side)


def parse_var(text):
    """Turn a rendered name back into a Var: a trailing _1/_2 is a side tag."""
    if text.endswith("_1"):
        return Var(text[:-2], LEFT)
    if text.endswith("_2"):
        return Var(text[:-2], RIGHT)
    return Var(text)


# ---------------------------------------------------------------------------
# Expressions


class Expr:
    __slots__ = ()


class Lit(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value

    def __eq__(self, o):
        return type(o) is Lit and o.value == self.value and type(o.value) is type(self.value)

    def __hash__(self):
        return hash(("Lit", type(self.value).__name__, self.value))

    def __repr__(self):
        return "Lit(%r)" % (self.value,)


class VarE(Expr):
    __slots__ = ("var",)

    def __init__(self, var):
        self.var = var

    def __eq__(self, o):
        return type(o) is VarE and o.var == self.var

    def __hash__(self):
        return hash(("VarE", self.var))

    def __repr__(self):
        return "VarE(%s)" % self.var


class UnOp(Expr):
    __slots__ = ("op", "a")

    def __init__(self, op, a):
        self.op = op
        self.a = a

    def __eq__(self, o):
        return type(o) is UnOp and o.op == self.op and o.a == self.a

    def __hash__(self):
        return hash(("UnOp", self.op, self.a))

    def __repr__(self):
        return "UnOp(%s, %r)" % (self.op, self.a)


class BinOp(Expr):
    __slots__ = ("op", "a", "b")

    def __init__(self, op, a, b):
        self.op = op
        self.a = a
        self.b = b

    def __eq__(self, o):
        return type(o) is BinOp and o.op == self.op and o.a == self.a and o.b == self.b

    def __hash__(self):
        return hash(("BinOp", self.op, self.a, self.b))

    def __repr__(self):
        return "BinOp(%s, %r, %r)" % (self.op, self.a, self.b)


class Call(Expr):
    """Application of a named pure function (builtin or host-supplied)."""

    __slots__ = ("fn", "args")

    def __init__(self, fn, args):
        self.fn = fn
        self.args = tuple(args)

    def __eq__(self, o):
        return type(o) is Call and o.fn == self.fn and o.args == self.args

    def __hash__(self):
        return hash(("Call", self.fn, self.args))

    def __repr__(self):
        return "Call(%s, %r)" % (self.fn, list(self.args))


class ListLit(Expr):
    __slots__ = ("items",)

    def __init__(self, items):
        self.items = tuple(items)

    def __eq__(self, o):
        return type(o) is ListLit and o.items == self.items

    def __hash__(self):
        return hash(("ListLit", self.items))

    def __repr__(self):
        return "ListLit(%r)" % (list(self.items),)


class SetLit(Expr):
    __slots__ = ("items",)

    def __init__(self, items):
        self.items = tuple(items)

    def __eq__(self, o):
        return type(o) is SetLit and o.items == self.items

    def __hash__(self):
        return hash(("SetLit", self.items))

    def __repr__(self):
        return "SetLit(%r)" % (list(self.items),)


class Index(Expr):
    """Read a position of a finite map (a list indexed from 0)."""

    __slots__ = ("map", "key")

    def __init__(self, map, key):
        self.map = map
        self.key = key

    def __eq__(self, o):
        return type(o) is Index and o.map == self.map and o.key == self.key

    def __hash__(self):
        return hash(("Index", self.map, self.key))

    def __repr__(self):
        return "Index(%r, %r)" % (self.map, self.key)


class Store(Expr):
    """Functional update of a finite map: w[v -> c]."""

    __slots__ = ("map", "key", "val")

    def __init__(self, map, key, val):
        self.map = map
        self.key = key
        self.val = val

    def __eq__(self, o):
        return (
            type(o) is Store and o.map == self.map and o.key == self.key and o.val == self.val
        )

    def __hash__(self):
        return hash(("Store", self.map, self.key, self.val))

    def __repr__(self):
        return "Store(%r, %r, %r)" % (self.map, self.key, self.val)


TRUE = Lit(True)
FALSE = Lit(False)


def lit(v):
    return Lit(v)


def ve(name, tag=None):
    if isinstance(name, Var):
        return VarE(name)
    return VarE(parse_var(name) if tag is None else Var(name, tag))


def conj(*parts):
    """Left-folded conjunction; drops literal-true conjuncts."""
    parts = [p for p in parts if p != TRUE]
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = BinOp("and", out, p)
    return out


def neg(e):
    return UnOp("not", e)


# ---------------------------------------------------------------------------
# Distribution expressions


class DistExpr:
    __slots__ = ()


class Uniform(DistExpr):
    __slots__ = ("set",)

    def __init__(self, set):
        self.set = set

    def __eq__(self, o):
        return type(o) is Uniform and o.set == self.set

    def __hash__(self):
        return hash(("Uniform", self.set))

    def __repr__(self):
        return "Uniform(%r)" % (self.set,)


class Dirac(DistExpr):
    __slots__ = ("expr",)

    def __init__(self, expr):
        self.expr = expr

    def __eq__(self, o):
        return type(o) is Dirac and o.expr == self.expr

    def __hash__(self):
        return hash(("Dirac", self.expr))

    def __repr__(self):
        return "Dirac(%r)" % (self.expr,)


class NamedDist(DistExpr):
    __slots__ = ("name", "args")

    def __init__(self, name, args=()):
        self.name = name
        self.args = tuple(args)

    def __eq__(self, o):
        return type(o) is NamedDist and o.name == self.name and o.args == self.args

    def __hash__(self):
        return hash(("NamedDist", self.name, self.args))

    def __repr__(self):
        return "NamedDist(%s, %r)" % (self.name, list(self.args))


class CouplingSpec:
    """Recipe for a joint distribution over pairs with prescribed marginals.

    kind is one of 'id', 'bij', 'prod', 'table'.  ``fn`` names a host
    bijection (with its inverse) for 'bij'; ``table`` names a host joint
    generator for 'table'.
    """

    __slots__ = ("kind", "left", "right", "fn", "table")

    def __init__(self, kind, left, right=None, fn=None, table=None):
        if kind not in ("id", "bij", "prod", "table"):
            raise LangError("bad coupling kind %r" % kind)
        self.kind = kind
        self.left = left
        self.right = left if right is None else right
        self.fn = fn
        self.table = table

    def __eq__(self, o):
        return (
            type(o) is CouplingSpec
            and o.kind == self.kind
            and o.left == self.left
            and o.right == self.right
            and o.fn == self.fn
            and o.table == self.table
        )

    def __hash__(self):
        return hash(("CouplingSpec", self.kind, self.left, self.right, self.fn, self.table))

    def __repr__(self):
        return "CouplingSpec(%s, %r, %r, fn=%r, table=%r)" % (
            self.kind,
            self.left,
            self.right,
            self.fn,
            self.table,
        )


class Coupled(DistExpr):
    __slots__ = ("spec",)

    def __init__(self, spec):
        self.spec = spec

    def __eq__(self, o):
        return type(o) is Coupled and o.spec == self.spec

    def __hash__(self):
        return hash(("Coupled", self.spec))

    def __repr__(self):
        return "Coupled(%r)" % (self.spec,)


# ---------------------------------------------------------------------------
# Commands


class Command:
    __slots__ = ()


class Skip(Command):
    __slots__ = ()

    def __eq__(self, o):
        return type(o) is Skip

    def __hash__(self):
        return hash("Skip")

    def __repr__(self):
        return "Skip()"


class Abort(Command):
    __slots__ = ()

    def __eq__(self, o):
        return type(o) is Abort

    def __hash__(self):
        return hash("Abort")

    def __repr__(self):
        return "Abort()"


class Assign(Command):
    __slots__ = ("var", "expr")

    def __init__(self, var, expr):
        self.var = var
        self.expr = expr

    def __eq__(self, o):
        return type(o) is Assign and o.var == self.var and o.expr == self.expr

    def __hash__(self):
        return hash(("Assign", self.var, self.expr))

    def __repr__(self):
        return "Assign(%s, %r)" % (self.var, self.expr)


class Sample(Command):
    """x <$ d, or (x, y) <$ d when sampling a coupled pair."""

    __slots__ = ("target", "dist")

    def __init__(self, target, dist):
        # target: Var, or tuple (Var, Var) for a pair sample
        self.target = target
        self.dist = dist

    @property
    def is_pair(self):
        return isinstance(self.target, tuple)

    def __eq__(self, o):
        return type(o) is Sample and o.target == self.target and o.dist == self.dist

    def __hash__(self):
        return hash(("Sample", self.target, self.dist))

    def __repr__(self):
        return "Sample(%r, %r)" % (self.target, self.dist)


class Seq(Command):
    __slots__ = ("first", "second")

    def __init__(self, first, second):
        self.first = first
        self.second = second

    def __eq__(self, o):
        return type(o) is Seq and o.first == self.first and o.second == self.second

    def __hash__(self):
        return hash(("Seq", self.first, self.second))

    def __repr__(self):
        return "Seq(%r, %r)" % (self.first, self.second)


class Cond(Command):
    __slots__ = ("guard", "then", "els")

    def __init__(self, guard, then, els=None):
        self.guard = guard
        self.then = then
        self.els = els if els is not None else Skip()

    def __eq__(self, o):
        return (
            type(o) is Cond and o.guard == self.guard and o.then == self.then and o.els == self.els
        )

    def __hash__(self):
        return hash(("Cond", self.guard, self.then, self.els))

    def __repr__(self):
        return "Cond(%r, %r, %r)" % (self.guard, self.then, self.els)


class While(Command):
    __slots__ = ("guard", "body")

    def __init__(self, guard, body):
        self.guard = guard
        self.body = body

    def __eq__(self, o):
        return type(o) is While and o.guard == self.guard and o.body == self.body

    def __hash__(self):
        return hash(("While", self.guard, self.body))

    def __repr__(self):
        return "While(%r, %r)" % (self.guard, self.body)


def seq(*cmds):
    """Right-nested sequence of the given commands, dropping skips."""
    cmds = [c for c in cmds if not isinstance(c, Skip)]
    if not cmds:
        return Skip()
    out = cmds[-1]
    for c in reversed(cmds[:-1]):
        out = Seq(c, out)
    return out


def flatten(cmd):
    """Flatten nested Seq into a list of atomic statements, dropping skips."""
    out = []
    stack = [cmd]
    while stack:
        c = stack.pop()
        if isinstance(c, Seq):
            stack.append(c.second)
            stack.append(c.first)
        elif isinstance(c, Skip):
            pass
        else:
            out.append(c)
    return out


def normalize(cmd):
    """Canonical form: right-nested sequences, skips dropped, recursively."""
    if isinstance(cmd, Seq) or isinstance(cmd, Skip):
        parts = [normalize(c) for c in flatten(cmd)]
        return seq(*parts)
    if isinstance(cmd, Cond):
        return Cond(cmd.guard, normalize(cmd.then), normalize(cmd.els))
    if isinstance(cmd, While):
        return While(cmd.guard, normalize(cmd.body))
    return cmd


def cmd_equal(a, b):
    return normalize(a) == normalize(b)


# ---------------------------------------------------------------------------
# Variable collection


def expr_vars(e, acc=None):
    if acc is None:
        acc = set()
    t = type(e)
    if t is VarE:
        acc.add(e.var)
    elif t is Lit:
        pass
    elif t is UnOp:
        expr_vars(e.a, acc)
    elif t is BinOp:
        expr_vars(e.a, acc)
        expr_vars(e.b, acc)
    elif t is Call:
        for a in e.args:
            expr_vars(a, acc)
    elif t in (ListLit, SetLit):
        for a in e.items:
            expr_vars(a, acc)
    elif t is Index:
        expr_vars(e.map, acc)
        expr_vars(e.key, acc)
    elif t is Store:
        expr_vars(e.map, acc)
        expr_vars(e.key, acc)
        expr_vars(e.val, acc)
    else:
        raise LangError("unknown expr %r" % (e,))
    return acc


def dist_vars(d, acc=None):
    if acc is None:
        acc = set()
    t = type(d)
    if t is Uniform:
        expr_vars(d.set, acc)
    elif t is Dirac:
        expr_vars(d.expr, acc)
    elif t is NamedDist:
        for a in d.args:
            expr_vars(a, acc)
    elif t is Coupled:
        dist_vars(d.spec.left, acc)
        dist_vars(d.spec.right, acc)
    else:
        raise LangError("unknown dist %r" % (d,))
    return acc


def cmd_vars(c, acc=None):
    """All variables read or written by a command."""
    if acc is None:
        acc = set()
    t = type(c)
    if t in (Skip, Abort):
        pass
    elif t is Assign:
        acc.add(c.var)
        expr_vars(c.expr, acc)
    elif t is Sample:
        if c.is_pair:
            acc.add(c.target[0])
            acc.add(c.target[1])
        else:
            acc.add(c.target)
        dist_vars(c.dist, acc)
    elif t is Seq:
        cmd_vars(c.first, acc)
        cmd_vars(c.second, acc)
    elif t is Cond:
        expr_vars(c.guard, acc)
        cmd_vars(c.then, acc)
        cmd_vars(c.els, acc)
    elif t is While:
        expr_vars(c.guard, acc)
        cmd_vars(c.body, acc)
    else:
        raise LangError("unknown command %r" % (c,))
    return acc


def written_vars(c, acc=None):
    if acc is None:
        acc = set()
    t = type(c)
    if t is Assign:
        acc.add(c.var)
    elif t is Sample:
        if c.is_pair:
            acc.add(c.target[0])
            acc.add(c.target[1])
        else:
            acc.add(c.target)
    elif t is Seq:
        written_vars(c.first, acc)
        written_vars(c.second, acc)
    elif t is Cond:
        written_vars(c.then, acc)
        written_vars(c.els, acc)
    elif t is While:
        written_vars(c.body, acc)
    return acc


def read_vars(c):
    return cmd_vars(c) - (written_vars(c) - _read_only(c))


def _read_only(c):
    # variables that are also read somewhere
    acc = set()

    def go(c):
        t = type(c)
        if t is Assign:
            expr_vars(c.expr, acc)
        elif t is Sample:
            dist_vars(c.dist, acc)
        elif t is Seq:
            go(c.first)
            go(c.second)
        elif t is Cond:
            expr_vars(c.guard, acc)
            go(c.then)
            go(c.els)
        elif t is While:
            expr_vars(c.guard, acc)
            go(c.body)

    go(c)
    return acc


# ---------------------------------------------------------------------------
# Side tagging


def _map_expr_vars(e, f):
    t = type(e)
    if t is VarE:
        return VarE(f(e.var))
    if t is Lit:
        return e
    if t is UnOp:
        return UnOp(e.op, _map_expr_vars(e.a, f))
    if t is BinOp:
        return BinOp(e.op, _map_expr_vars(e.a, f), _map_expr_vars(e.b, f))
    if t is Call:
        return Call(e.fn, [_map_expr_vars(a, f) for a in e.args])
    if t is ListLit:
        return ListLit([_map_expr_vars(a, f) for a in e.items])
    if t is SetLit:
        return SetLit([_map_expr_vars(a, f) for a in e.items])
    if t is Index:
        return Index(_map_expr_vars(e.map, f), _map_expr_vars(e.key, f))
    if t is Store:
        return Store(
            _map_expr_vars(e.map, f), _map_expr_vars(e.key, f), _map_expr_vars(e.val, f)
        )
    raise LangError("unknown expr %r" % (e,))


def _map_dist_vars(d, f):
    t = type(d)
    if t is Uniform:
        return Uniform(_map_expr_vars(d.set, f))
    if t is Dirac:
        return Dirac(_map_expr_vars(d.expr, f))
    if t is NamedDist:
        return NamedDist(d.name, [_map_expr_vars(a, f) for a in d.args])
    if t is Coupled:
        s = d.spec
        return Coupled(
            CouplingSpec(s.kind, _map_dist_vars(s.left, f), _map_dist_vars(s.right, f), s.fn, s.table)
        )
    raise LangError("unknown dist %r" % (d,))


def map_cmd_vars(c, f):
    t = type(c)
    if t in (Skip, Abort):
        return c
    if t is Assign:
        return Assign(f(c.var), _map_expr_vars(c.expr, f))
    if t is Sample:
        if c.is_pair:
            tgt = (f(c.target[0]), f(c.target[1]))
        else:
            tgt = f(c.target)
        return Sample(tgt, _map_dist_vars(c.dist, f))
    if t is Seq:
        return Seq(map_cmd_vars(c.first, f), map_cmd_vars(c.second, f))
    if t is Cond:
        return Cond(_map_expr_vars(c.guard, f), map_cmd_vars(c.then, f), map_cmd_vars(c.els, f))
    if t is While:
        return While(_map_expr_vars(c.guard, f), map_cmd_vars(c.body, f))
    raise LangError("unknown command %r" % (c,))


def tag_side(c, side):
    """Tag every variable of a command with the given side.

    Fails if any variable is already tagged; tagging the two sides of a
    judgment with distinct tags is what makes them separable.
    """
    if side not in (LEFT, RIGHT):
        raise LangError("side must be 'l' or 'r'")
    return map_cmd_vars(c, lambda v: v.tagged(side))


def tag_expr(e, side):
    return _map_expr_vars(e, lambda v: v.tagged(side))


# ---------------------------------------------------------------------------
# Substitution (expressions have no binders, so this is purely structural)


def subst_expr(e, mapping):
    """Substitute expressions for variables: mapping is {Var: Expr}."""

    def f(e):
        t = type(e)
        if t is VarE:
            return mapping.get(e.var, e)
        if t is Lit:
            return e
        if t is UnOp:
            return UnOp(e.op, f(e.a))
        if t is BinOp:
            return BinOp(e.op, f(e.a), f(e.b))
        if t is Call:
            return Call(e.fn, [f(a) for a in e.args])
        if t is ListLit:
            return ListLit([f(a) for a in e.items])
        if t is SetLit:
            return SetLit([f(a) for a in e.items])
        if t is Index:
            return Index(f(e.map), f(e.key))
        if t is Store:
            return Store(f(e.map), f(e.key), f(e.val))
        raise LangError("unknown expr %r" % (e,))

    return f(e)


# ---------------------------------------------------------------------------
# Loop transformations


def fresh_counter(depth, side):
    """Deterministic fresh counter for the bounded-for construction."""
    return Var("__for%d" % depth, side)


def desugar_bounded_for(body, guard, count, counter):
    """c bounded by (e, k):  ctr := 0; while (ctr < k && e) { c; ctr := ctr+1 }.

    ``count`` is an expression; ``counter`` must be fresh for the body.
    """
    if counter in cmd_vars(body) or counter in expr_vars(guard) or counter in expr_vars(count):
        raise LangError("counter %s is not fresh" % counter)
    return seq(
        Assign(counter, Lit(0)),
        While(
            BinOp("and", BinOp("<", VarE(counter), count), guard),
            seq(body, Assign(counter, BinOp("+", VarE(counter), Lit(1)))),
        ),
    )


def truncate_loop(body, guard, n):
    """n-step truncation of while guard body:
    n copies of (if guard then body), then (if guard then abort)."""
    if n < 0:
        raise LangError("negative truncation depth")
    parts = [Cond(guard, body, Skip()) for _ in range(n)]
    parts.append(Cond(guard, Abort(), Skip()))
    return seq(*parts)


# ---------------------------------------------------------------------------
# Pretty printing (inverse of the parser, see parser.py)

_PREC = {
    "=>": 1,
    "or": 2,
    "and": 3,
    "not": 4,
    "=": 5, "!=": 5, "<": 5, "<=": 5, ">": 5, ">=": 5, "in": 5,
    "+": 6, "-": 6,
    "*": 7, "/": 7, "%": 7,
    "neg": 8,
}


def _fmt_value(v):
    if v is True:
        return "true"
    if v is False:
        return "false"
    if isinstance(v, tuple):
        return "[" + ", ".join(_fmt_value(x) for x in v) + "]"
    return str(v)


def fmt_expr(e, prec=0):
    t = type(e)
    if t is Lit:
        return _fmt_value(e.value)
    if t is VarE:
        return str(e.var)
    if t is UnOp:
        if e.op == "not":
            s = "not " + fmt_expr(e.a, _PREC["not"])
            return "(" + s + ")" if prec >= _PREC["not"] else s
        if e.op == "-":
            s = "-" + fmt_expr(e.a, _PREC["neg"])
            return "(" + s + ")" if prec >= _PREC["neg"] else s
        raise LangError("unknown unop %s" % e.op)
    if t is BinOp:
        p = _PREC[e.op]
        # => is right associative, comparisons do not chain, the rest
        # associate to the left
        if e.op == "=>":
            s = "%s => %s" % (fmt_expr(e.a, p), fmt_expr(e.b, p - 1))
        elif p == _PREC["="]:
            s = "%s %s %s" % (fmt_expr(e.a, p), e.op, fmt_expr(e.b, p))
        else:
            s = "%s %s %s" % (fmt_expr(e.a, p - 1), e.op, fmt_expr(e.b, p))
        return "(" + s + ")" if prec >= p else s
    if t is Call:
        return "%s(%s)" % (e.fn, ", ".join(fmt_expr(a) for a in e.args))
    if t is ListLit:
        return "[" + ", ".join(fmt_expr(a) for a in e.items) + "]"
    if t is SetLit:
        return "{" + ", ".join(fmt_expr(a) for a in e.items) + "}"
    if t is Index:
        return "%s[%s]" % (fmt_expr(e.map, _PREC["neg"]), fmt_expr(e.key))
    if t is Store:
        return "%s[%s -> %s]" % (fmt_expr(e.map, _PREC["neg"]), fmt_expr(e.key), fmt_expr(e.val))
    raise LangError("cannot print %r" % (e,))


def fmt_dist(d):
    t = type(d)
    if t is Uniform:
        return "uniform(%s)" % fmt_expr(d.set)
    if t is Dirac:
        return "dirac(%s)" % fmt_expr(d.expr)
    if t is NamedDist:
        if d.args:
            return "%s(%s)" % (d.name, ", ".join(fmt_expr(a) for a in d.args))
        return "%s()" % d.name
    if t is Coupled:
        s = d.spec
        if s.kind == "id":
            if s.left == s.right:
                return "id_coupling(%s)" % fmt_dist(s.left)
            return "id_coupling(%s, %s)" % (fmt_dist(s.left), fmt_dist(s.right))
        if s.kind == "bij":
            if s.left == s.right:
                return "bij_coupling(%s, %s)" % (s.fn, fmt_dist(s.left))
            return "bij_coupling(%s, %s, %s)" % (s.fn, fmt_dist(s.left), fmt_dist(s.right))
        if s.kind == "prod":
            return "prod_coupling(%s, %s)" % (fmt_dist(s.left), fmt_dist(s.right))
        if s.kind == "table":
            return "table_coupling(%s, %s, %s)" % (s.table, fmt_dist(s.left), fmt_dist(s.right))
    raise LangError("cannot print %r" % (d,))


def fmt_cmd(c, indent=0):
    pad = "  " * indent
    t = type(c)
    if t is Skip:
        return pad + "skip"
    if t is Abort:
        return pad + "abort"
    if t is Assign:
        return "%s%s <- %s" % (pad, c.var, fmt_expr(c.expr))
    if t is Sample:
        if c.is_pair:
            tgt = "(%s, %s)" % (c.target[0], c.target[1])
        else:
            tgt = str(c.target)
        return "%s%s <$ %s" % (pad, tgt, fmt_dist(c.dist))
    if t is Seq:
        return ";\n".join(fmt_cmd(s, indent) for s in flatten(c)) or (pad + "skip")
    if t is Cond:
        out = "%sif %s then {\n%s\n%s}" % (pad, fmt_expr(c.guard), fmt_cmd(c.then, indent + 1), pad)
        if not isinstance(c.els, Skip):
            out += " else {\n%s\n%s}" % (fmt_cmd(c.els, indent + 1), pad)
        return out
    if t is While:
        return "%swhile %s do {\n%s\n%s}" % (
            pad,
            fmt_expr(c.guard),
            fmt_cmd(c.body, indent + 1),
            pad,
        )
    raise LangError("cannot print %r" % (c,))
