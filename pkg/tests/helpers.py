"""Shared test utilities: random instances and independent brute-force oracles."""

import itertools
from collections import Counter

from linkage_lab.digraph import Digraph, Label
from linkage_lab.reduction_vertex import LinkageInstance, TerminalPair


def plain(i):
    return Label("plain", (i,))


def random_dag(rng, max_vertices=10, arc_prob=0.35):
    n = rng.randint(2, max_vertices)
    vs = [plain(i) for i in range(1, n + 1)]
    arcs = [
        (vs[i], vs[j])
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < arc_prob
    ]
    return Digraph(vs, arcs)


def random_vertex_instance(rng, max_vertices=10, max_pairs=3, max_total=4):
    """Random DAG instance with at most max_pairs pairs and max_total occurrences."""
    graph = random_dag(rng, max_vertices)
    g = rng.choice([1, 2])
    n_pairs = rng.randint(1, max_pairs)
    terminals = []
    total = 0
    for _ in range(n_pairs):
        s, t = rng.sample(list(graph.vertices), 2)
        if s > t:
            s, t = t, s
        mult = 1
        if g == 2 and total + 2 <= max_total and rng.random() < 0.3:
            mult = 2
        if total + mult > max_total:
            break
        total += mult
        terminals.append(TerminalPair(s, t, mult))
    if not terminals:
        terminals.append(TerminalPair(*rng.sample(list(graph.vertices), 2), 1))
    return LinkageInstance(graph, tuple(terminals), g, "vertex")


def all_simple_paths(graph, s, t):
    out = []

    def rec(v, acc):
        if v == t:
            out.append(tuple(acc))
            return
        for w in graph.out_neighbors(v):
            acc.append(w)
            rec(w, acc)
            acc.pop()

    if s == t:
        return [(s,)]
    rec(s, [s])
    return out


def _brute_force(inst, congestion_items):
    """Exhaustive path-tuple enumeration; congestion_items maps a path to the
    countable items (vertices or arcs)."""
    per_pair = []
    for pair in inst.terminals:
        paths = all_simple_paths(inst.digraph, pair.source, pair.target)
        if not paths:
            return False
        per_pair.append((paths, pair.multiplicity))

    def rec(i, counts):
        if i == len(per_pair):
            return True
        paths, mult = per_pair[i]
        for combo in itertools.combinations_with_replacement(paths, mult):
            delta = Counter()
            for path in combo:
                for item in congestion_items(path):
                    delta[item] += 1
            if any(counts[item] + extra > inst.g for item, extra in delta.items()):
                continue
            for item, extra in delta.items():
                counts[item] += extra
            if rec(i + 1, counts):
                return True
            for item, extra in delta.items():
                counts[item] -= extra
        return False

    return rec(0, Counter())


def brute_force_vertex_feasible(inst):
    return _brute_force(inst, lambda path: path)


def brute_force_edge_feasible(inst):
    return _brute_force(inst, lambda path: list(zip(path, path[1:])))


def replay_sweep(inst, linkage):
    """Replay a linkage through the minimal-head sweep; returns the per-vertex
    maximum simultaneous head multiplicity (the trace always parks everyone)."""
    order = inst.digraph.topological_order()
    rank = {v: i for i, v in enumerate(order)}
    paths = [list(a.path) for a in linkage.assignments]
    pos = [0] * len(paths)
    parked = [False] * len(paths)
    max_seen = Counter()

    def record():
        counts = Counter()
        for i, p in enumerate(paths):
            if not parked[i]:
                counts[p[pos[i]]] += 1
        for v, c in counts.items():
            max_seen[v] = max(max_seen[v], c)

    record()
    while not all(parked):
        mover = min(
            (rank[paths[i][pos[i]]], i) for i in range(len(paths)) if not parked[i]
        )[1]
        if pos[mover] == len(paths[mover]) - 1:
            parked[mover] = True
        else:
            pos[mover] += 1
        record()
    return dict(max_seen)
