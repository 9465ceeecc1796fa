"""Exact solvers for vertex- and edge-congestion disjoint paths on DAGs.

Two engines: a topological-sweep dynamic program that is exhaustive over
reachable sweep states (suitable for a handful of pair occurrences), and a
pruned backtracking solver that routes one pair occurrence at a time and
scales to the reduced gadget instances.  Both are deterministic; yes-answers
are validated before being returned, and budget exhaustion is reported as a
timeout, never as "no".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from ._util import ensure_recursion_capacity
from .digraph import ROLE_MID, Digraph, Label
from .errors import TooManyPairsError
from .reduction_vertex import (
    Linkage,
    LinkageInstance,
    MODE_EDGE,
    MODE_VERTEX,
    PathAssignment,
    validate_linkage,
)

ANSWER_YES = "yes"
ANSWER_NO = "no"
ANSWER_TIMEOUT = "timeout"

_SATURATE = 1 << 62


@dataclass(frozen=True)
class CapacityMap:
    """Per-vertex path capacities: a default plus per-label overrides."""

    default: int
    overrides: Mapping[Label, int] = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.overrides is None:
            object.__setattr__(self, "overrides", {})
        if self.default < 1 or any(c < 1 for c in self.overrides.values()):
            raise ValueError("capacities must be >= 1")

    def cap(self, v: Label) -> int:
        return self.overrides.get(v, self.default)


@dataclass
class SolveStats:
    nodes: int = 0
    max_frontier: int = 0

    def to_json(self) -> dict:
        return {"nodes": self.nodes, "max_frontier": self.max_frontier}


@dataclass
class SolveResult:
    answer: str
    linkage: Linkage | None
    stats: SolveStats


class _BudgetExceeded(Exception):
    pass


class _Indexed:
    """Topologically relabelled view of an instance: vertex ids are topo ranks."""

    def __init__(self, inst: LinkageInstance, caps: CapacityMap | None):
        order = inst.digraph.topological_order()
        self.labels = order
        self.index = {v: i for i, v in enumerate(order)}
        n = len(order)
        self.succ: list[tuple[int, ...]] = [
            tuple(sorted(self.index[w] for w in inst.digraph.out_neighbors(v))) for v in order
        ]
        self.pred: list[tuple[int, ...]] = [
            tuple(sorted(self.index[u] for u in inst.digraph.in_neighbors(v))) for v in order
        ]
        caps = caps if caps is not None else CapacityMap(inst.g)
        self.cap = [caps.cap(v) for v in order]
        self.occs: list[tuple[int, int, int, int]] = []  # (src, tgt, pair, copy)
        for pair_index, pair in enumerate(inst.terminals):
            s, t = self.index[pair.source], self.index[pair.target]
            for copy in range(pair.multiplicity):
                self.occs.append((s, t, pair_index, copy))
        self.n = n


def _to_linkage(idx: _Indexed, paths: list[list[int]], occ_ids: list[tuple[int, int]]) -> Linkage:
    assignments = [
        PathAssignment(pair, copy, tuple(idx.labels[v] for v in walk))
        for (pair, copy), walk in sorted(zip(occ_ids, paths))
    ]
    return Linkage(tuple(assignments))


# ---------------------------------------------------------------------------
# Topological-sweep dynamic program


def solve_vertex_dpc_dp(
    inst: LinkageInstance,
    caps: CapacityMap | None = None,
    max_total_pairs: int = 4,
) -> SolveResult:
    """Exhaustive sweep DP.  The only nondeterminism per state is which out-arc
    the unique minimal head takes (or parking when it sits on its target), so
    the reachable state space is a subset of n^k_tot and the answer is exact.
    """
    if inst.mode != MODE_VERTEX:
        raise ValueError("solve_vertex_dpc_dp expects a vertex-mode instance")
    idx = _Indexed(inst, caps)
    k_tot = len(idx.occs)
    if k_tot > max_total_pairs:
        raise TooManyPairsError(
            f"{k_tot} pair occurrences exceed the sweep limit of {max_total_pairs}"
        )
    stats = SolveStats()
    if k_tot == 0:
        return SolveResult(ANSWER_YES, Linkage(()), stats)
    ensure_recursion_capacity((k_tot + 1) * (idx.n + 3))

    parked = idx.n
    pos = [occ[0] for occ in idx.occs]
    tgt = [occ[1] for occ in idx.occs]
    counts = [0] * idx.n
    for p in pos:
        counts[p] += 1
    if any(counts[v] > idx.cap[v] for v in set(pos)):
        return SolveResult(ANSWER_NO, None, stats)

    pair_groups: dict[int, list[int]] = {}
    for oi, occ in enumerate(idx.occs):
        pair_groups.setdefault(occ[2], []).append(oi)
    groups = [pair_groups[p] for p in sorted(pair_groups)]

    walks: list[list[int]] = [[p] for p in pos]
    failed: set[tuple] = set()

    def state_key() -> tuple:
        return tuple(tuple(sorted(pos[oi] for oi in group)) for group in groups)

    def dfs(depth: int) -> bool:
        stats.nodes += 1
        stats.max_frontier = max(stats.max_frontier, depth)
        mover = -1
        for oi in range(k_tot):
            if pos[oi] != parked and (mover < 0 or pos[oi] < pos[mover]):
                mover = oi
        if mover < 0:
            return True
        key = state_key()
        if key in failed:
            return False
        v = pos[mover]
        if v == tgt[mover]:
            counts[v] -= 1
            pos[mover] = parked
            if dfs(depth + 1):
                return True
            pos[mover] = v
            counts[v] += 1
        else:
            for w in idx.succ[v]:
                if counts[w] + 1 > idx.cap[w]:
                    continue
                counts[v] -= 1
                counts[w] += 1
                pos[mover] = w
                walks[mover].append(w)
                if dfs(depth + 1):
                    return True
                walks[mover].pop()
                pos[mover] = v
                counts[w] -= 1
                counts[v] += 1
        failed.add(key)
        return False

    if dfs(0):
        occ_ids = [(occ[2], occ[3]) for occ in idx.occs]
        linkage = _to_linkage(idx, walks, occ_ids)
        if caps is None:
            report = validate_linkage(inst, linkage)
            if not report.ok:
                raise AssertionError(f"sweep produced an invalid linkage: {report.problems[:3]}")
        return SolveResult(ANSWER_YES, linkage, stats)
    return SolveResult(ANSWER_NO, None, stats)


# ---------------------------------------------------------------------------
# Backtracking solver


def _saturating_path_counts(idx: _Indexed, src: int) -> list[int]:
    ways = [0] * idx.n
    ways[src] = 1
    for v in range(src, idx.n):
        wv = ways[v]
        if not wv:
            continue
        for w in idx.succ[v]:
            ways[w] = min(ways[w] + wv, _SATURATE)
    return ways


def solve_vertex_dpc_backtracking(
    inst: LinkageInstance,
    caps: CapacityMap | None = None,
    budget: int | None = None,
) -> SolveResult:
    """Depth-first routing of pair occurrences under residual capacities.

    Pruning: (i) fail-fast residual reachability for every unrouted pair,
    (ii) incremental residual capacities, (iii) static most-constrained-first
    ordering by saturating DAG path counts, plus lexicographic symmetry
    breaking between copies of the same pair.  Exact when it finishes within
    budget; budget exhaustion returns a timeout.
    """
    if inst.mode != MODE_VERTEX:
        raise ValueError("solve_vertex_dpc_backtracking expects a vertex-mode instance")
    idx = _Indexed(inst, caps)
    stats = SolveStats()
    if not idx.occs:
        return SolveResult(ANSWER_YES, Linkage(()), stats)
    ensure_recursion_capacity((len(idx.occs) + 1) * (idx.n + 3))

    counts_cache: dict[int, list[int]] = {}
    for s, _t, _p, _c in idx.occs:
        if s not in counts_cache:
            counts_cache[s] = _saturating_path_counts(idx, s)
    order = sorted(
        range(len(idx.occs)),
        key=lambda oi: (counts_cache[idx.occs[oi][0]][idx.occs[oi][1]], idx.occs[oi][2], idx.occs[oi][3]),
    )
    residual = list(idx.cap)
    routed: list[list[int] | None] = [None] * len(order)

    def bump() -> None:
        stats.nodes += 1
        if budget is not None and stats.nodes > budget:
            raise _BudgetExceeded

    def unrouted_feasible(depth: int) -> bool:
        needed: dict[int, list[int]] = {}
        for slot in range(depth, len(order)):
            s, t, _p, _c = idx.occs[order[slot]]
            needed.setdefault(s, []).append(t)
        for s, targets in needed.items():
            if residual[s] <= 0:
                return False
            seen = bytearray(idx.n)
            seen[s] = 1
            stack = [s]
            while stack:
                v = stack.pop()
                for w in idx.succ[v]:
                    if not seen[w] and residual[w] > 0:
                        seen[w] = 1
                        stack.append(w)
            if any(not seen[t] for t in targets):
                return False
        return True

    def reaches_target(t: int) -> bytearray:
        seen = bytearray(idx.n)
        seen[t] = 1
        stack = [t]
        while stack:
            v = stack.pop()
            for u in idx.pred[v]:
                if not seen[u] and residual[u] > 0:
                    seen[u] = 1
                    stack.append(u)
        return seen

    def route(depth: int) -> bool:
        bump()
        stats.max_frontier = max(stats.max_frontier, depth)
        if depth == len(order):
            return True
        if not unrouted_feasible(depth):
            return False
        oi = order[depth]
        s, t, pair, copy = idx.occs[oi]
        bound: list[int] | None = None
        if copy > 0:
            prev = order[depth - 1]
            if idx.occs[prev][2] == pair and idx.occs[prev][3] == copy - 1:
                bound = routed[depth - 1]
        seen_t = reaches_target(t)
        if not seen_t[s]:
            return False
        path = [s]

        def extend(v: int, tied: bool) -> bool:
            bump()
            if v == t:
                if tied and bound is not None and len(path) < len(bound):
                    return False
                for x in path:
                    residual[x] -= 1
                routed[depth] = list(path)
                if route(depth + 1):
                    return True
                routed[depth] = None
                for x in path:
                    residual[x] += 1
                return False
            floor = bound[len(path)] if (tied and bound is not None and len(path) < len(bound)) else -1
            for w in idx.succ[v]:
                if w < floor or not seen_t[w] or residual[w] <= 0:
                    continue
                path.append(w)
                if extend(w, tied and w == floor):
                    return True
                path.pop()
            return False

        start_tied = bound is not None and bound[0] == s
        return extend(s, start_tied)

    try:
        found = route(0)
    except _BudgetExceeded:
        return SolveResult(ANSWER_TIMEOUT, None, stats)

    if not found:
        return SolveResult(ANSWER_NO, None, stats)
    occ_ids = [(idx.occs[order[d]][2], idx.occs[order[d]][3]) for d in range(len(order))]
    linkage = _to_linkage(idx, [list(p) for p in routed], occ_ids)  # type: ignore[arg-type]
    if caps is None:
        report = validate_linkage(inst, linkage)
        if not report.ok:
            raise AssertionError(f"backtracking produced an invalid linkage: {report.problems[:3]}")
    return SolveResult(ANSWER_YES, linkage, stats)


# ---------------------------------------------------------------------------
# Edge-congestion solver via arc subdivision


def solve_edge_dpc(
    inst: LinkageInstance,
    budget: int | None = None,
    engine: str = "auto",
    max_total_pairs_dp: int = 4,
) -> SolveResult:
    """Solve an edge-mode instance by subdividing every arc through a fresh
    capacity-g vertex and running a vertex solver; original vertices become
    effectively uncapacitated."""
    if inst.mode != MODE_EDGE:
        raise ValueError("solve_edge_dpc expects an edge-mode instance")
    if engine not in ("auto", "dp", "backtrack"):
        raise ValueError(f"unknown engine {engine!r}")
    k_tot = inst.total_occurrences
    mids: dict[tuple[Label, Label], Label] = {
        arc: Label(ROLE_MID, (i,)) for i, arc in enumerate(inst.digraph.arcs)
    }
    vertices = list(inst.digraph.vertices) + list(mids.values())
    arcs: list[tuple[Label, Label]] = []
    for (u, w), mid in mids.items():
        arcs.append((u, mid))
        arcs.append((mid, w))
    loose = max(k_tot, 1)
    sub = LinkageInstance(Digraph(vertices, arcs), inst.terminals, loose, MODE_VERTEX)
    caps = CapacityMap(loose, {mid: inst.g for mid in mids.values()})

    use_dp = engine == "dp" or (engine == "auto" and k_tot <= max_total_pairs_dp)
    if use_dp:
        result = solve_vertex_dpc_dp(sub, caps, max_total_pairs=max_total_pairs_dp)
    else:
        result = solve_vertex_dpc_backtracking(sub, caps, budget)

    if result.answer != ANSWER_YES:
        return result
    assignments = [
        PathAssignment(a.pair_index, a.copy_index, tuple(v for v in a.path if v.role != ROLE_MID))
        for a in result.linkage.assignments
    ]
    linkage = Linkage(tuple(assignments))
    from .reduction_edge import validate_edge_linkage

    report = validate_edge_linkage(inst, linkage)
    if not report.ok:
        raise AssertionError(f"edge solver produced an invalid linkage: {report.problems[:3]}")
    return SolveResult(ANSWER_YES, linkage, result.stats)


def verdict_to_json(result: SolveResult) -> dict:
    from .reduction_vertex import linkage_to_json

    return {
        "answer": result.answer,
        "witness": linkage_to_json(result.linkage) if result.linkage is not None else None,
        "stats": result.stats.to_json(),
    }
