"""Host environments for the shipped case studies.

Each environment is built lazily and cached by name; fixtures refer to
environments by these names so that derivation files stay declarative.
"""

import itertools
import random

from ..hostfuncs import (
    HostEnv, cycle_graph, path_graph, transpose_diff_bijection,
)
from ..lang import parse_var
from ..semantics import Memory


def _factors(n):
    return tuple(d for d in range(1, n + 1) if n % d == 0)


def _uniform_dist(*values):
    """A primitive distribution for programs: uniform over fixed values."""
    from fractions import Fraction
    from ..semantics import SubDist

    vals = list(dict.fromkeys(values))
    p = Fraction(1, len(vals))
    dist = SubDist({v: p for v in vals})

    def prim():
        return dist

    return prim


def _mem(pairs):
    return Memory({parse_var(k): v for k, v in pairs.items()})


# -- state generators --------------------------------------------------------

def _colorings(graph, k):
    return list(itertools.product(range(1, k + 1), repeat=graph.n))


def _valid_colorings(graph, k):
    valid = []
    for w in _colorings(graph, k):
        if all(w[a] != w[b] for a, b in graph.edges):
            valid.append(w)
    return valid


def _adjacent_valid_pairs(graph, k):
    """Unordered pairs of proper colorings at Hamming distance one."""
    valid = set(_valid_colorings(graph, k))
    pairs = []
    for w in valid:
        for v in range(graph.n):
            for c in range(1, k + 1):
                if c <= w[v]:
                    continue  # unordered: only recolor upward
                w2 = w[:v] + (c,) + w[v + 1:]
                if w2 in valid:
                    pairs.append((w, w2))
    return pairs


def _safe_placements(graph, s):
    safe = []
    for w in itertools.product(range(graph.n), repeat=s):
        ok = True
        for i in range(s):
            for j in range(i + 1, s):
                if w[i] == w[j] or w[j] in graph.adj[w[i]]:
                    ok = False
        if ok:
            safe.append(w)
    return safe


def _adjacent_safe_pairs(graph, s):
    safe = set(_safe_placements(graph, s))
    pairs = []
    for w in safe:
        for p in range(s):
            for v in range(graph.n):
                if v <= w[p]:
                    continue
                w2 = w[:p] + (v,) + w[p + 1:]
                if w2 in safe:
                    pairs.append((w, w2))
    return pairs


def _glauber_check_states(graph, k, samples=3000, seed=0xC0FFEE):
    """Sampled joint states for discharging the one-step derivation's
    obligations: adjacent proper pair, synced vertex draw, colors related by
    the transposition or equal, and each side's possible outputs."""
    rng = random.Random(seed)
    pairs = _adjacent_valid_pairs(graph, k)

    def gen(env):
        for _ in range(samples):
            w1, w2 = pairs[rng.randrange(len(pairs))]
            if rng.random() < 0.5:
                w1, w2 = w2, w1
            v = rng.randrange(graph.n)
            c1 = rng.randrange(1, k + 1)
            i = next(j for j in range(graph.n) if w1[j] != w2[j])
            a, b = w1[i], w2[i]
            c2 = {a: b, b: a}.get(c1, c1) if rng.random() < 0.5 else c1
            w1p = w1[:v] + (c1,) + w1[v + 1:] if rng.random() < 0.5 else w1
            w2p = w2[:v] + (c2,) + w2[v + 1:] if rng.random() < 0.5 else w2
            yield _mem({"w_1": w1, "w_2": w2, "v_1": v, "v_2": v,
                        "c_1": c1, "c_2": c2, "w'_1": w1p, "w'_2": w2p})

    return gen


def _chlg_check_states(graph, s, samples=3000, seed=0xC0FFEE):
    rng = random.Random(seed)
    pairs = _adjacent_safe_pairs(graph, s)

    def gen(env):
        for _ in range(samples):
            w1, w2 = pairs[rng.randrange(len(pairs))]
            if rng.random() < 0.5:
                w1, w2 = w2, w1
            p = rng.randrange(s)
            v = rng.randrange(graph.n)
            w1p = w1[:p] + (v,) + w1[p + 1:] if rng.random() < 0.5 else w1
            w2p = w2[:p] + (v,) + w2[p + 1:] if rng.random() < 0.5 else w2
            yield _mem({"w_1": w1, "w_2": w2, "p_1": p, "p_2": p,
                        "v_1": v, "v_2": v, "w'_1": w1p, "w'_2": w2p})

    return gen


def _pair_states(pairs, names=("w_1", "w_2")):
    def gen(env):
        for a, b in pairs:
            yield _mem({names[0]: a, names[1]: b})

    return gen


def _stripmine_states(N=2, M=2, samples=4000, seed=0xC0FFEE):
    """Sampled joint states for the nested-vs-flat loop derivation.  Mostly
    coherent (counters aligned, flat index matching the nested pair) with
    deliberate perturbations so refutable obligations still get exercised."""
    rng = random.Random(seed)

    def gen(env):
        for _ in range(samples):
            i = rng.randrange(0, N + 1)
            j = rng.randrange(0, M + 1)
            ctr = j if rng.random() < 0.8 else rng.randrange(0, M + 1)
            l2 = i * M + j if rng.random() < 0.8 else rng.randrange(0, N * M + 1)
            l1 = l2 if rng.random() < 0.8 else rng.randrange(0, N * M + 1)
            x1 = rng.randrange(5)
            x2 = x1 if rng.random() < 0.8 else rng.randrange(5)
            yield _mem({"N_1": N, "N_2": N, "M_1": M, "M_2": M,
                        "i_1": i, "j_1": j, "__for1_2": ctr,
                        "l_1": l1, "l_2": l2, "x_1": x1, "x_2": x2,
                        "r_1": rng.randrange(2), "r_2": rng.randrange(2)})

    return gen


# -- registry ----------------------------------------------------------------

def _anti_table(m, env):
    """Joint table for a pair of fair bits that always disagree."""
    from fractions import Fraction

    half = Fraction(1, 2)
    return (((0, 1), half), ((1, 0), half))


def _env_basic():
    return HostEnv(bijections={"flip": (lambda v: 1 - v, lambda v: 1 - v, ())},
                   tables={"anti": _anti_table})


def _env_rwalk():
    return _env_basic()


def _env_dynkin():
    return HostEnv()


def _env_glauber_c5():
    g = cycle_graph(5)
    k = 6
    return HostEnv(
        graph=g, colors=k,
        bijections={"transpose_diff": transpose_diff_bijection()},
        generators={
            "colorings": lambda env: iter(_colorings(g, k)),
            "valid_colorings": lambda env: iter(_valid_colorings(g, k)),
            "adjacent_valid_pairs": lambda env: iter(_adjacent_valid_pairs(g, k)),
            "adjacent_pair_states": _pair_states(_adjacent_valid_pairs(g, k)),
            "check_states": _glauber_check_states(g, k),
        })


def _env_glauber_p4():
    g = path_graph(4)
    k = 5
    return HostEnv(
        graph=g, colors=k,
        bijections={"transpose_diff": transpose_diff_bijection()},
        generators={
            "valid_colorings": lambda env: iter(_valid_colorings(g, k)),
            "adjacent_valid_pairs": lambda env: iter(_adjacent_valid_pairs(g, k)),
            "adjacent_pair_states": _pair_states(_adjacent_valid_pairs(g, k)),
            "check_states": _glauber_check_states(g, k),
        })


def _env_chlg_c12():
    g = cycle_graph(12)
    s = 2
    return HostEnv(
        graph=g, particles=s,
        funcs={"particles": lambda: tuple(range(s))},
        generators={
            "safe_placements": lambda env: iter(_safe_placements(g, s)),
            "adjacent_safe_pairs": lambda env: iter(_adjacent_safe_pairs(g, s)),
            "adjacent_pair_states": _pair_states(_adjacent_safe_pairs(g, s)),
            "check_states": _chlg_check_states(g, s),
        })


def _env_loops():
    return HostEnv(funcs={
        "f": lambda l, x, r: (x + 2 * r + l) % 5,
        "factors": _factors,
        "dist$mu": _uniform_dist(0, 1),
    }, generators={
        "stripmine_states": _stripmine_states(),
    })


_BUILDERS = {
    "basic": _env_basic,
    "rwalk": _env_rwalk,
    "dynkin": _env_dynkin,
    "glauber_c5": _env_glauber_c5,
    "glauber_p4": _env_glauber_p4,
    "chlg_c12": _env_chlg_c12,
    "loops": _env_loops,
}

_CACHE = {}


def get_env(name):
    if name not in _CACHE:
        builder = _BUILDERS.get(name)
        if builder is None:
            raise KeyError("unknown host environment %r" % name)
        _CACHE[name] = builder()
    return _CACHE[name]


def list_envs():
    return sorted(_BUILDERS)
