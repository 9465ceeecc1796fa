"""Butterfly-minor and weak-immersion models: validators and exhaustive searchers.

A butterfly model maps every pattern vertex to an in-tree/out-tree union
meeting exactly at a common root and every pattern arc to a host path from
the tail's out-tree to the head's in-tree, with the disjointness rules
checked here.  The searcher enumerates, for DAG hosts, the normal form in
which each tree is exactly the union of branches actually used by arc paths;
any model can be trimmed to that form, so exhausting it is exhaustive over
all models.  Anchor (tree-root) assignments are pruned by reachability
closure: along a pattern arc the tail's root always reaches the head's root.
"""

from __future__ import annotations

from dataclasses import dataclass

from .._util import ensure_recursion_capacity
from ..digraph import Arc, Digraph, Label, Walk, is_path, walk_arcs
from ..reduction_vertex import ValidationReport

STATUS_FOUND = "found"
STATUS_NONE = "none"
STATUS_TIMEOUT = "timeout"


@dataclass
class SearchStats:
    nodes: int = 0
    max_depth: int = 0

    def to_json(self) -> dict:
        return {"nodes": self.nodes, "max_depth": self.max_depth}


@dataclass
class ButterflyModel:
    vertex_sets: dict[Label, frozenset[Label]]
    vertex_arcs: dict[Label, frozenset[Arc]]
    centers: dict[Label, Label]
    arc_paths: dict[Arc, Walk]


@dataclass
class ImmersionModel:
    vertex_map: dict[Label, Label]
    arc_paths: dict[Arc, Walk]


@dataclass
class MinorSearchResult:
    status: str
    model: ButterflyModel | None
    stats: SearchStats


@dataclass
class ImmersionSearchResult:
    status: str
    model: ImmersionModel | None
    stats: SearchStats


class _SearchBudget(Exception):
    pass


# ---------------------------------------------------------------------------
# Butterfly model validation


def compute_center(subgraph: Digraph) -> Label | None:
    """Earliest vertex (in topological order) reachable from every source of
    the subgraph; None when no vertex is reached by all sources."""
    topo = subgraph.topological_order()
    common: set[Label] | None = None
    for s in subgraph.sources():
        reach = subgraph.reachable_from(s)
        common = reach if common is None else common & reach
    if not common:
        return None
    for x in topo:
        if x in common:
            return x
    return None


def _feasible_roots(
    sub: Digraph,
    out_starts: list[Label],
    in_ends: list[Label],
) -> list[Label]:
    """Roots r for which sub decomposes into an in-tree and an out-tree meeting
    exactly at r, with all incident arc-path endpoints on the correct side."""
    vertices = set(sub.vertices)
    roots = []
    reach_from = {v: sub.reachable_from(v) for v in vertices}
    for r in sub.vertices:
        t2 = reach_from[r]
        t1 = {x for x in vertices if r in reach_from[x]}
        if t1 | t2 != vertices or t1 & t2 != {r}:
            continue
        if any(sub.out_degree(x) != 1 for x in t1 if x != r):
            continue
        if any(sub.in_degree(x) != 1 for x in t2 if x != r):
            continue
        if any(s not in t2 for s in out_starts) or any(e not in t1 for e in in_ends):
            continue
        roots.append(r)
    return roots


def validate_butterfly_model(
    pattern: Digraph, host: Digraph, model: ButterflyModel
) -> ValidationReport:
    """Mechanical check of the model conditions plus the center property."""
    problems: list[str] = []

    for v in pattern.vertices:
        if v not in model.vertex_sets or v not in model.vertex_arcs or v not in model.centers:
            problems.append(f"pattern vertex {v} is unmapped")
    for e in pattern.arcs:
        if e not in model.arc_paths:
            problems.append(f"pattern arc ({e[0]}, {e[1]}) is unmapped")
    if problems:
        return ValidationReport(False, tuple(problems))

    subs: dict[Label, Digraph] = {}
    for v in pattern.vertices:
        vs, ars = model.vertex_sets[v], model.vertex_arcs[v]
        if not vs:
            problems.append(f"image of {v} is empty")
            continue
        if any(x not in host for x in vs):
            problems.append(f"image of {v} uses vertices outside the host")
            continue
        if any(arc not in set(host.arcs) for arc in ars) or any(
            x not in vs or y not in vs for x, y in ars
        ):
            problems.append(f"image of {v} uses arcs outside the host or its own vertex set")
            continue
        sub = Digraph(vs, ars)
        if not sub.is_dag():
            problems.append(f"image of {v} is cyclic")
            continue
        subs[v] = sub
    if problems:
        return ValidationReport(False, tuple(problems))

    items = sorted(model.vertex_sets.items())
    for i, (u, su) in enumerate(items):
        for v, sv in items[i + 1 :]:
            shared = su & sv
            if shared:
                problems.append(f"images of {u} and {v} share vertex {min(shared)}")

    for e, path in sorted(model.arc_paths.items()):
        if not path or not is_path(host, path):
            problems.append(f"arc ({e[0]}, {e[1]}) is not mapped to a path of the host")
            continue
        for v in pattern.vertices:
            if v in e:
                continue
            shared = model.vertex_sets[v] & set(path)
            if shared:
                problems.append(
                    f"path of arc ({e[0]}, {e[1]}) meets the image of non-incident {v} at {min(shared)}"
                )
    if problems:
        return ValidationReport(False, tuple(problems))

    for v in pattern.vertices:
        out_starts = [model.arc_paths[e][0] for e in pattern.arcs if e[0] == v]
        in_ends = [model.arc_paths[e][-1] for e in pattern.arcs if e[1] == v]
        if not _feasible_roots(subs[v], out_starts, in_ends):
            problems.append(
                f"image of {v} does not decompose into an in-tree and out-tree "
                f"meeting at one root consistent with its arc paths"
            )
            continue
        expected = compute_center(subs[v])
        if expected is None or model.centers[v] != expected:
            problems.append(
                f"center of {v} is {model.centers[v]}, expected {expected}"
            )

    return ValidationReport(not problems, tuple(problems))


def identity_butterfly_model(pattern: Digraph) -> ButterflyModel:
    """The model of a digraph in itself: singleton images, arcs mapped to themselves."""
    return ButterflyModel(
        vertex_sets={v: frozenset({v}) for v in pattern.vertices},
        vertex_arcs={v: frozenset() for v in pattern.vertices},
        centers={v: v for v in pattern.vertices},
        arc_paths={(u, w): (u, w) for u, w in pattern.arcs},
    )


# ---------------------------------------------------------------------------
# Weak immersion validation


def validate_weak_immersion(
    pattern: Digraph, host: Digraph, model: ImmersionModel
) -> ValidationReport:
    problems: list[str] = []
    for v in pattern.vertices:
        if v not in model.vertex_map:
            problems.append(f"pattern vertex {v} is unmapped")
        elif model.vertex_map[v] not in host:
            problems.append(f"image of {v} is not a host vertex")
    if problems:
        return ValidationReport(False, tuple(problems))
    images: dict[Label, Label] = {}
    for v in sorted(pattern.vertices):
        img = model.vertex_map[v]
        if img in images:
            problems.append(f"{v} and {images[img]} map to the same host vertex {img}")
        images[img] = v
    used: dict[Arc, Arc] = {}
    for e in pattern.arcs:
        path = model.arc_paths.get(e)
        if path is None:
            problems.append(f"pattern arc ({e[0]}, {e[1]}) is unmapped")
            continue
        if not is_path(host, path) or len(path) < 2:
            problems.append(f"arc ({e[0]}, {e[1]}) is not mapped to a nontrivial host path")
            continue
        if path[0] != model.vertex_map[e[0]] or path[-1] != model.vertex_map[e[1]]:
            problems.append(f"path of arc ({e[0]}, {e[1]}) has wrong endpoints")
        for arc in walk_arcs(path):
            if arc in used and used[arc] != e:
                problems.append(
                    f"host arc ({arc[0]}, {arc[1]}) is used by two pattern arcs"
                )
            used[arc] = e
    return ValidationReport(not problems, tuple(problems))


def identity_immersion_model(pattern: Digraph) -> ImmersionModel:
    return ImmersionModel(
        vertex_map={v: v for v in pattern.vertices},
        arc_paths={(u, w): (u, w) for u, w in pattern.arcs},
    )


# ---------------------------------------------------------------------------
# Shared search scaffolding


class _HostIndex:
    def __init__(self, host: Digraph):
        order = host.topological_order()
        self.labels = order
        self.index = {v: i for i, v in enumerate(order)}
        self.n = len(order)
        self.succ = [
            tuple(sorted(self.index[w] for w in host.out_neighbors(v))) for v in order
        ]
        reach = [1 << i for i in range(self.n)]
        for i in range(self.n - 1, -1, -1):
            acc = 1 << i
            for w in self.succ[i]:
                acc |= reach[w]
            reach[i] = acc
        self.reach = reach


def _assignment_order(pattern: Digraph) -> list[Label]:
    """Pattern vertices ordered for assignment: highest connectivity to the
    already-placed prefix first, so arc routing starts early."""
    degree = {
        v: pattern.in_degree(v) + pattern.out_degree(v) for v in pattern.vertices
    }
    order: list[Label] = []
    placed: set[Label] = set()
    remaining = sorted(pattern.vertices)
    while remaining:
        def score(v: Label) -> tuple[int, int]:
            attached = sum(1 for w in pattern.out_neighbors(v) if w in placed)
            attached += sum(1 for w in pattern.in_neighbors(v) if w in placed)
            return (attached, degree[v])

        pick = max(remaining, key=score)
        order.append(pick)
        placed.add(pick)
        remaining.remove(pick)
    return order


def _work_items(pattern: Digraph, order: list[Label], staged: bool = False) -> list[tuple]:
    """Work plan: vertex assignments plus arc-routing items.

    Interleaved (default), each arc is routed as soon as both endpoints are
    placed; staged, all assignments come first (useful when assignment-level
    pruning is strong and routing variants are many).  Each route item
    carries whether a later item still leaves the same tail (or enters the
    same head): only then may routing grow a fresh out-tree (in-tree)
    branch.  A tree branch no later arc shares can always be reclassified as
    free middle vertices of its own arc path, so restricting growth this way
    loses no models.
    """
    placed: set[Label] = set()
    items: list[tuple] = []
    routes: list[Arc] = []
    for v in order:
        items.append(("assign", v))
        placed.add(v)
        ready = [
            e for e in pattern.arcs if v in e and e[0] in placed and e[1] in placed
        ]
        for e in sorted(ready):
            if staged:
                routes.append(e)
            else:
                items.append(("route", e))
    items.extend(("route", e) for e in routes)
    route_slots = [(i, item[1]) for i, item in enumerate(items) if item[0] == "route"]
    final: list[tuple] = list(items)
    for i, e in route_slots:
        grow_out = any(j > i and f[0] == e[0] for j, f in route_slots)
        grow_in = any(j > i and f[1] == e[1] for j, f in route_slots)
        final[i] = ("route", e, grow_out, grow_in)
    return final


# ---------------------------------------------------------------------------
# Butterfly-minor search


def find_butterfly_minor(
    pattern: Digraph,
    host: Digraph,
    budget: int | None = None,
    prune_reachability: bool = True,
    restrict_tree_growth: bool = True,
) -> MinorSearchResult:
    """Exhaustive butterfly-minor search on DAG hosts.

    Backtracks over injective anchor assignments, pruned (unless disabled) by
    reachability closure and by the requirement that every pattern arc have a
    host path between its endpoint anchors avoiding all other anchors; then
    routes each pattern arc exhaustively as out-tree branch, free middle
    section, and in-tree branch.  Found models are validated before being
    returned; exceeding the budget reports a timeout, never "none".
    """
    pattern.topological_order()
    hx = _HostIndex(host)
    stats = SearchStats()
    pverts = list(pattern.vertices)
    pord = {v: i for i, v in enumerate(pverts)}
    preach = {v: pattern.reachable_from(v) for v in pverts}

    order = _assignment_order(pattern)
    items = _work_items(pattern, order, staged=prune_reachability)
    ensure_recursion_capacity((len(items) + 1) * (hx.n + 3))

    n = hx.n
    if n == 0 or len(pverts) > n:
        return MinorSearchResult(STATUS_NONE, None, stats)

    in_of = [-1] * n
    out_of = [-1] * n
    in_next = [-1] * n
    out_parent = [-1] * n
    beta_cnt = [0] * n
    root = [-1] * len(pverts)
    assigned: list[Label] = []
    arc_routes: dict[Arc, tuple[list[int], int, int]] = {}

    def bump() -> None:
        stats.nodes += 1
        if budget is not None and stats.nodes > budget:
            raise _SearchBudget

    def roots_admit_avoiding_paths(candidate: Label) -> bool:
        """Every pattern arc among assigned vertices needs a host path between
        its endpoint roots avoiding all other assigned roots (arc paths and
        tree branches never touch another vertex's image)."""
        placed = set(assigned) | {candidate}
        taken = {root[pord[u]] for u in placed}
        for a, b in pattern.arcs:
            if a not in placed or b not in placed:
                continue
            src, dst = root[pord[a]], root[pord[b]]
            blocked = taken - {src, dst}
            if src in blocked or dst in blocked:
                return False
            seen = 1 << src
            stack = [src]
            found = src == dst
            while stack and not found:
                cur = stack.pop()
                for w in hx.succ[cur]:
                    if w == dst:
                        found = True
                        break
                    if not (seen >> w) & 1 and w not in blocked and (hx.reach[w] >> dst) & 1:
                        seen |= 1 << w
                        stack.append(w)
            if not found:
                return False
        return True

    def assign(v: Label, item_idx: int) -> bool:
        p = pord[v]
        for x in range(n):
            bump()
            if in_of[x] != -1 or out_of[x] != -1 or beta_cnt[x] != 0:
                continue
            if prune_reachability:
                ok = True
                for u in assigned:
                    q = pord[u]
                    if v in preach[u] and not (hx.reach[root[q]] >> x) & 1:
                        ok = False
                        break
                    if u in preach[v] and not (hx.reach[x] >> root[q]) & 1:
                        ok = False
                        break
                if not ok:
                    continue
            root[p] = x
            assigned.append(v)
            if not prune_reachability or roots_admit_avoiding_paths(v):
                in_of[x] = out_of[x] = p
                if solve(item_idx + 1):
                    return True
                in_of[x] = out_of[x] = -1
            assigned.pop()
            root[p] = -1
        return False

    def route(e: Arc, item_idx: int, may_grow_out: bool, may_grow_in: bool) -> bool:
        u, v = pord[e[0]], pord[e[1]]
        ru, rv = root[u], root[v]
        grow_out = may_grow_out or not restrict_tree_growth
        grow_in = may_grow_in or not restrict_tree_growth
        rho: list[int] = [ru]
        # Phases: 0 = inside u's out-tree, 1 = free middle, 2 = fresh in-tree chain.
        PH_OUT, PH_MID, PH_IN = 0, 1, 2

        def finish(s_idx: int, y_idx: int) -> bool:
            arc_routes[e] = (list(rho), s_idx, y_idx)
            if solve(item_idx + 1):
                return True
            del arc_routes[e]
            return False

        def extend(cur: int, phase: int, s_idx: int, y_idx: int) -> bool:
            bump()
            for w in hx.succ[cur]:
                if not (hx.reach[w] >> rv) & 1:
                    continue
                rho.append(w)
                widx = len(rho) - 1
                if in_of[w] == v:
                    # Arrived in the head's committed in-tree; the route ends.
                    if phase == PH_IN:
                        in_next[cur] = w
                        if finish(s_idx, y_idx):
                            return True
                        in_next[cur] = -1
                    elif finish(s_idx if phase == PH_MID else widx - 1, widx):
                        return True
                    rho.pop()
                    continue
                free = in_of[w] == -1 and out_of[w] == -1
                if phase == PH_OUT:
                    if out_of[w] == u and out_parent[w] == cur:
                        if extend(w, PH_OUT, s_idx, -1):
                            return True
                    elif free:
                        if beta_cnt[w] == 0:
                            if grow_out:
                                out_of[w] = u
                                out_parent[w] = cur
                                if extend(w, PH_OUT, s_idx, -1):
                                    return True
                                out_parent[w] = -1
                                out_of[w] = -1
                            if grow_in:
                                in_of[w] = v
                                if extend(w, PH_IN, widx - 1, widx):
                                    return True
                                in_of[w] = -1
                        beta_cnt[w] += 1
                        if extend(w, PH_MID, widx - 1, -1):
                            return True
                        beta_cnt[w] -= 1
                elif phase == PH_MID:
                    if free:
                        if beta_cnt[w] == 0 and grow_in:
                            in_of[w] = v
                            if extend(w, PH_IN, s_idx, widx):
                                return True
                            in_of[w] = -1
                        beta_cnt[w] += 1
                        if extend(w, PH_MID, s_idx, -1):
                            return True
                        beta_cnt[w] -= 1
                else:  # PH_IN
                    if free and beta_cnt[w] == 0:
                        in_of[w] = v
                        in_next[cur] = w
                        if extend(w, PH_IN, s_idx, y_idx):
                            return True
                        in_next[cur] = -1
                        in_of[w] = -1
                rho.pop()
            return False

        return extend(ru, PH_OUT, 0, -1)

    def solve(item_idx: int) -> bool:
        stats.max_depth = max(stats.max_depth, item_idx)
        if item_idx == len(items):
            return True
        item = items[item_idx]
        if item[0] == "assign":
            return assign(item[1], item_idx)
        return route(item[1], item_idx, item[2], item[3])

    try:
        found = solve(0)
    except _SearchBudget:
        return MinorSearchResult(STATUS_TIMEOUT, None, stats)

    if not found:
        return MinorSearchResult(STATUS_NONE, None, stats)

    model = _extract_butterfly_model(
        hx, pverts, in_of, out_of, in_next, out_parent, arc_routes
    )
    report = validate_butterfly_model(pattern, host, model)
    if not report.ok:
        raise AssertionError(f"search produced an invalid model: {report.problems[:3]}")
    return MinorSearchResult(STATUS_FOUND, model, stats)


def _extract_butterfly_model(
    hx: _HostIndex,
    pverts: list[Label],
    in_of: list[int],
    out_of: list[int],
    in_next: list[int],
    out_parent: list[int],
    arc_routes: dict[Arc, tuple[list[int], int, int]],
) -> ButterflyModel:
    vertex_sets: dict[Label, frozenset[Label]] = {}
    vertex_arcs: dict[Label, frozenset[Arc]] = {}
    centers: dict[Label, Label] = {}
    for p, pv in enumerate(pverts):
        members = [x for x in range(hx.n) if in_of[x] == p or out_of[x] == p]
        arcs: list[Arc] = []
        for x in members:
            if in_of[x] == p and in_next[x] != -1:
                arcs.append((hx.labels[x], hx.labels[in_next[x]]))
            if out_of[x] == p and out_parent[x] != -1:
                arcs.append((hx.labels[out_parent[x]], hx.labels[x]))
        vs = frozenset(hx.labels[x] for x in members)
        vertex_sets[pv] = vs
        vertex_arcs[pv] = frozenset(arcs)
        centers[pv] = compute_center(Digraph(vs, arcs))
    arc_paths = {
        e: tuple(hx.labels[x] for x in rho[s : y + 1])
        for e, (rho, s, y) in arc_routes.items()
    }
    return ButterflyModel(vertex_sets, vertex_arcs, centers, arc_paths)


# ---------------------------------------------------------------------------
# Weak-immersion search


def find_weak_immersion(
    pattern: Digraph,
    host: Digraph,
    budget: int | None = None,
    prune_reachability: bool = True,
) -> ImmersionSearchResult:
    """Exhaustive weak-immersion search: injective vertex images (pruned by
    reachability closure) plus arc routing under a global used-arc set."""
    pattern.topological_order()
    hx = _HostIndex(host)
    stats = SearchStats()
    pverts = list(pattern.vertices)
    pord = {v: i for i, v in enumerate(pverts)}
    preach = {v: pattern.reachable_from(v) for v in pverts}
    order = _assignment_order(pattern)
    items = _work_items(pattern, order)
    ensure_recursion_capacity((len(items) + 1) * (hx.n + 3))
    n = hx.n
    if n == 0 or len(pverts) > n:
        return ImmersionSearchResult(STATUS_NONE, None, stats)

    image = [-1] * len(pverts)
    taken = [False] * n
    used_arcs: set[tuple[int, int]] = set()
    assigned: list[Label] = []
    arc_routes: dict[Arc, list[int]] = {}

    def bump() -> None:
        stats.nodes += 1
        if budget is not None and stats.nodes > budget:
            raise _SearchBudget

    def assign(v: Label, item_idx: int) -> bool:
        p = pord[v]
        for x in range(n):
            bump()
            if taken[x]:
                continue
            if prune_reachability:
                ok = True
                for u in assigned:
                    q = pord[u]
                    if v in preach[u] and not (hx.reach[image[q]] >> x) & 1:
                        ok = False
                        break
                    if u in preach[v] and not (hx.reach[x] >> image[q]) & 1:
                        ok = False
                        break
                if not ok:
                    continue
            taken[x] = True
            image[p] = x
            assigned.append(v)
            if solve(item_idx + 1):
                return True
            assigned.pop()
            image[p] = -1
            taken[x] = False
        return False

    def route(e: Arc, item_idx: int) -> bool:
        src, dst = image[pord[e[0]]], image[pord[e[1]]]
        path = [src]
        on_path = {src}

        def extend(cur: int) -> bool:
            bump()
            for w in hx.succ[cur]:
                if (cur, w) in used_arcs or w in on_path:
                    continue
                if not (hx.reach[w] >> dst) & 1:
                    continue
                used_arcs.add((cur, w))
                path.append(w)
                if w == dst:
                    arc_routes[e] = list(path)
                    if solve(item_idx + 1):
                        return True
                    del arc_routes[e]
                else:
                    on_path.add(w)
                    if extend(w):
                        return True
                    on_path.discard(w)
                path.pop()
                used_arcs.discard((cur, w))
            return False

        return extend(src)

    def solve(item_idx: int) -> bool:
        stats.max_depth = max(stats.max_depth, item_idx)
        if item_idx == len(items):
            return True
        item = items[item_idx]
        if item[0] == "assign":
            return assign(item[1], item_idx)
        return route(item[1], item_idx)

    try:
        found = solve(0)
    except _SearchBudget:
        return ImmersionSearchResult(STATUS_TIMEOUT, None, stats)
    if not found:
        return ImmersionSearchResult(STATUS_NONE, None, stats)

    model = ImmersionModel(
        vertex_map={pv: hx.labels[image[pord[pv]]] for pv in pverts},
        arc_paths={e: tuple(hx.labels[x] for x in rho) for e, rho in arc_routes.items()},
    )
    report = validate_weak_immersion(pattern, host, model)
    if not report.ok:
        raise AssertionError(f"search produced an invalid immersion: {report.problems[:3]}")
    return ImmersionSearchResult(STATUS_FOUND, model, stats)
