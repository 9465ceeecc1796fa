"""Maximal ears, identifying sequences, and ear anonymity on DAGs.

On a DAG every maximal ear is a source-to-sink path (cycles cannot occur),
so enumeration is a depth-first walk.  A sequence of arcs on an ear P
identifies P when every ear containing those arcs in that order is a
subgraph of P; the checker searches exhaustively for a counterexample ear
that uses at least one arc outside P.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from .._util import ensure_recursion_capacity
from ..digraph import (
    ROLE_A,
    ROLE_B,
    ROLE_P,
    ROLE_Q,
    ROLE_SOURCE,
    ROLE_TARGET,
    Arc,
    Digraph,
    Label,
    Walk,
    is_path,
    walk_arcs,
)
from ..errors import (
    AnonymityCapExceededError,
    ArcNotLiftableError,
    EarEnumerationOverflowError,
    UnlabeledInstanceError,
)
from ..reduction_edge import EdgeInstanceMap, project_path
from ..reduction_vertex import LinkageInstance


@dataclass(frozen=True)
class IdentifyingSequence:
    ear: Walk
    arcs: tuple[Arc, ...]


def enumerate_maximal_ears(graph: Digraph, cap: int | None = None) -> Iterator[Walk]:
    """Stream every source-to-sink path in deterministic order; raises
    EarEnumerationOverflowError after more than `cap` ears."""
    graph.topological_order()  # reject cyclic input
    ensure_recursion_capacity(2 * len(graph.vertices))
    count = 0

    def walk(path: list[Label]) -> Iterator[Walk]:
        nonlocal count
        succ = graph.out_neighbors(path[-1])
        if not succ:
            count += 1
            if cap is not None and count > cap:
                raise EarEnumerationOverflowError(
                    f"more than {cap} maximal ears; raise the cap to enumerate them"
                )
            yield tuple(path)
            return
        for w in succ:
            path.append(w)
            yield from walk(path)
            path.pop()

    for s in graph.sources():
        yield from walk([s])


def is_identifying_sequence(graph: Digraph, ear: Walk, arcs: tuple[Arc, ...]) -> bool:
    """True iff every ear of the host containing `arcs` in this order is a
    subgraph of `ear`.  Requires the arcs to lie on `ear` in order."""
    graph.topological_order()  # reject cyclic input
    ensure_recursion_capacity(3 * len(graph.vertices))
    if not is_path(graph, ear):
        raise ValueError("the designated ear is not a path of the host")
    if not arcs:
        raise ValueError("identifying sequences have length >= 1")
    ear_arcs = list(walk_arcs(ear))
    positions = []
    cursor = 0
    for arc in arcs:
        while cursor < len(ear_arcs) and ear_arcs[cursor] != arc:
            cursor += 1
        if cursor == len(ear_arcs):
            raise ValueError("sequence arcs must lie on the ear in order")
        positions.append(cursor)
        cursor += 1

    on_ear = set(ear_arcs)
    visited = set()
    for u, w in arcs:
        visited.add(u)
        visited.add(w)
    middles = [(arcs[i][1], arcs[i + 1][0]) for i in range(len(arcs) - 1)]

    # Exhaustive counterexample search: assemble middle connectors, then a
    # backward prefix and forward suffix, under one global visited set, and
    # succeed once the assembled ear uses an arc outside the designated one.
    def try_middles(stage: int, off: bool) -> bool:
        if stage == len(middles):
            return try_prefix(off)
        start, goal = middles[stage]
        if start == goal:
            return try_middles(stage + 1, off)

        def dfs(cur: Label, off2: bool) -> bool:
            for nxt in graph.out_neighbors(cur):
                step_off = off2 or ((cur, nxt) not in on_ear)
                if nxt == goal:
                    if try_middles(stage + 1, step_off):
                        return True
                elif nxt not in visited:
                    visited.add(nxt)
                    if dfs(nxt, step_off):
                        return True
                    visited.discard(nxt)
            return False

        return dfs(start, off)

    def try_prefix(off: bool) -> bool:
        def back(cur: Label, off2: bool) -> bool:
            if try_suffix(off2):
                return True
            for prev in graph.in_neighbors(cur):
                if prev not in visited:
                    step_off = off2 or ((prev, cur) not in on_ear)
                    visited.add(prev)
                    if back(prev, step_off):
                        return True
                    visited.discard(prev)
            return False

        return back(arcs[0][0], off)

    def try_suffix(off: bool) -> bool:
        def forward(cur: Label, off2: bool) -> bool:
            if off2:
                return True
            for nxt in graph.out_neighbors(cur):
                if nxt not in visited:
                    step_off = off2 or ((cur, nxt) not in on_ear)
                    visited.add(nxt)
                    if forward(nxt, step_off):
                        return True
                    visited.discard(nxt)
            return False

        return forward(arcs[-1][1], off)

    return not try_middles(0, False)


def ear_anonymity_of_ear(
    graph: Digraph, ear: Walk, max_len: int = 5
) -> int:
    """Length of the shortest identifying sequence for one maximal ear
    (0 for a zero-arc ear), found by increasing-length exhaustive search."""
    arcs = walk_arcs(ear)
    if not arcs:
        return 0
    for length in range(1, min(len(arcs), max_len) + 1):
        for combo in itertools.combinations(arcs, length):
            if is_identifying_sequence(graph, ear, combo):
                return length
    raise AnonymityCapExceededError(
        f"no identifying sequence of length <= {max_len} for an ear of length {len(arcs)}"
    )


def ear_anonymity(graph: Digraph, cap: int | None = None, max_len: int = 5) -> int:
    """Maximum, over all maximal ears, of the shortest identifying sequence length."""
    best = 0
    for ear in enumerate_maximal_ears(graph, cap):
        best = max(best, ear_anonymity_of_ear(graph, ear, max_len))
    return best


# ---------------------------------------------------------------------------
# Identifying sequences on reduced instances

_SPINE_ROLES = {ROLE_P, ROLE_Q, ROLE_A, ROLE_B}
_GADGET_ROLES = _SPINE_ROLES | {ROLE_SOURCE, ROLE_TARGET}


def spine_of(v: Label) -> tuple | None:
    """Which gadget spine a vertex lies on; None for sources and targets."""
    if v.role in (ROLE_P, ROLE_Q):
        return (v.role, v.side, v.indices[0])
    if v.role in (ROLE_A, ROLE_B):
        return (v.role, v.indices[0], v.indices[1])
    return None


def build_identifying_sequence_reduced(
    inst: LinkageInstance, ear: Walk
) -> IdentifyingSequence:
    """First arc, every spine-to-spine transition arc, last arc.

    A maximal ear of a reduced instance changes spine at most three times, so
    the sequence has length at most 5; duplicates (the first or last arc being
    itself a transition) collapse.
    """
    if len(ear) < 2:
        raise ValueError("zero-arc ears have no identifying sequence")
    if not is_path(inst.digraph, ear):
        raise ValueError("the designated ear is not a path of the instance")
    for v in ear:
        if v.role not in _GADGET_ROLES:
            raise UnlabeledInstanceError(f"vertex {v} does not carry a gadget label")
    arcs = walk_arcs(ear)
    transitions = [
        (u, w)
        for u, w in arcs
        if spine_of(u) is not None
        and spine_of(w) is not None
        and spine_of(u) != spine_of(w)
    ]
    sequence = tuple(dict.fromkeys([arcs[0], *transitions, arcs[-1]]))
    return IdentifyingSequence(ear, sequence)


def lift_identifying_sequence_edge(
    emap: EdgeInstanceMap, ear: Walk, arcs: tuple[Arc, ...]
) -> IdentifyingSequence:
    """Lift an identifying sequence of the projected ear to the edge instance:
    each source arc maps to its unique connector arc between the two zones."""
    projected = project_path(emap, ear)
    projected_arcs = set(walk_arcs(projected))
    lifted = []
    for arc in arcs:
        if arc not in emap.arc_map:
            raise ArcNotLiftableError(f"arc ({arc[0]}, {arc[1]}) is not part of the transform")
        if arc not in projected_arcs:
            raise ArcNotLiftableError(
                f"arc ({arc[0]}, {arc[1]}) does not lie on the projection of the ear"
            )
        lifted.append(emap.arc_map[arc])
    return IdentifyingSequence(ear, tuple(lifted))
