"""Host environment: named pure functions available to programs/assertions.

Graphs live here as adjacency structures; vertices, colors and particles
are plain ints, colorings/placements are tuples indexed by vertex/particle.
A HostEnv bundles the function table with named bijections (for bijection
couplings), named joint tables (for table couplings) and named state
enumerators/generators used by state spaces and the path-coupling checker.
"""

from fractions import Fraction


class HostError(Exception):
    pass


class Graph:
    def __init__(self, n, edges, name=None):
        self.n = n
        self.name = name
        self.edges = [tuple(e) for e in edges]
        self.adj = [set() for _ in range(n)]
        for a, b in self.edges:
            self.adj[a].add(b)
            self.adj[b].add(a)

    @property
    def max_degree(self):
        return max((len(a) for a in self.adj), default=0)


def cycle_graph(n, name=None):
    return Graph(n, [(i, (i + 1) % n) for i in range(n)], name or ("c%d" % n))


def path_graph(n, name=None):
    return Graph(n, [(i, i + 1) for i in range(n - 1)], name or ("p%d" % n))


# -- builtin pure functions (environment independent) -----------------------

def _psum(t):
    out = []
    acc = 0
    for x in t:
        acc += x
        out.append(acc)
    return tuple(out)


def _inter(a, b):
    bs = set(b)
    return tuple(x for x in a if x in bs)


BUILTINS = {
    "cons": lambda h, t: (h,) + t,
    "rev": lambda t: t[::-1],
    "sum": lambda t: sum(t),
    "len": lambda t: len(t),
    "psum": _psum,
    "inter": _inter,
    "nonempty": lambda t: len(t) > 0,
    "intv": lambda a, b: tuple(range(a, b + 1)),
    "abs": lambda a: abs(a),
    "min": lambda a, b: min(a, b),
    "max": lambda a, b: max(a, b),
}


def _hamming(w1, w2):
    if len(w1) != len(w2):
        raise HostError("hamming distance needs equal-length maps")
    return sum(1 for a, b in zip(w1, w2) if a != b)


def _diff_index(w1, w2):
    for i, (a, b) in enumerate(zip(w1, w2)):
        if a != b:
            return i
    return -1


class HostEnv:
    """Named functions, bijections, joint tables and state generators."""

    def __init__(self, funcs=None, bijections=None, tables=None, generators=None,
                 graph=None, colors=None, particles=None):
        self.graph = graph
        self.colors = colors
        self.particles = particles
        self.funcs = dict(BUILTINS)
        if graph is not None:
            self.funcs.update(self._graph_funcs())
        if funcs:
            self.funcs.update(funcs)
        # name -> (forward, inverse, arg var-names): f(v, *args) must be a
        # bijection on the support for every fixed tuple of args
        self.bijections = dict(bijections or {})
        self.bijections.setdefault("opp", (lambda v: -v, lambda v: -v, ()))
        # name -> generator(memory, env) -> iterable of ((v1, v2), Fraction)
        self.tables = dict(tables or {})
        # name -> generator(env) -> iterable of memories / states
        self.generators = dict(generators or {})

    def _graph_funcs(self):
        g = self.graph

        def valid_coloring(w):
            return all(w[a] != w[b] for a, b in g.edges)

        def safe_placement(w):
            # particles at distinct, non-adjacent vertices
            for i in range(len(w)):
                for j in range(i + 1, len(w)):
                    if w[i] == w[j] or w[j] in g.adj[w[i]]:
                        return False
            return True

        funcs = {
            "vertices": lambda: tuple(range(g.n)),
            "nbr": lambda v: tuple(sorted(g.adj[v])),
            "is_nbr": lambda a, b: b in g.adj[a],
            "valid_G": valid_coloring,
            "safe_G": safe_placement,
            "hamming": _hamming,
            "diff_index": _diff_index,
            # is the sampled vertex adjacent to the (unique) disagreement?
            "nbr_of_diff": lambda w1, w2, v: _diff_index(w1, w2) >= 0
            and v in g.adj[_diff_index(w1, w2)],
        }
        if self.colors is not None:
            funcs["colors"] = lambda k=self.colors: tuple(range(1, k + 1))
        return funcs

    def call(self, name, args):
        fn = self.funcs.get(name)
        if fn is None:
            raise HostError("unknown host function %r" % name)
        return fn(*args)

    def bijection(self, name):
        entry = self.bijections.get(name)
        if entry is None:
            raise HostError("unknown bijection %r" % name)
        return entry

    def table(self, name):
        gen = self.tables.get(name)
        if gen is None:
            raise HostError("unknown joint table %r" % name)
        return gen

    def generator(self, name):
        gen = self.generators.get(name)
        if gen is None:
            raise HostError("unknown state generator %r" % name)
        return gen


def transpose_diff_bijection():
    """Color coupling for a single-disagreement pair of colorings: swap the
    two colors that the sides disagree on at the differing vertex."""

    def fwd(c, w1, w2):
        i = _diff_index(w1, w2)
        if i < 0:
            return c
        a, b = w1[i], w2[i]
        if c == a:
            return b
        if c == b:
            return a
        return c

    # the transposition is an involution
    return (fwd, fwd, ("w_1", "w_2"))


def load_table_entries(entries):
    """Parse table-coupling entries [{'left':v,'right':v,'num':n,'den':d}]."""
    out = []
    for e in entries:
        out.append(((_load_value(e["left"]), _load_value(e["right"])),
                    Fraction(e["num"], e["den"])))
    return out


def _load_value(v):
    if isinstance(v, list):
        return tuple(_load_value(x) for x in v)
    return v
