"""Wall immersions in edge transforms and the wall-to-grid transformation.

The edge transform of an acyclic (p,p)-grid hosts the acyclic (p,p)-wall as
a weak immersion in a canonical way: each split wall vertex rides on the
grid vertex's own split pair, and the transformation back recovers a
butterfly model of the inner acyclic (p-2,p-2)-grid in the source grid by
contracting zones.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..digraph import (
    Arc,
    Digraph,
    Label,
    Walk,
    WallResult,
    gen_acyclic_grid,
    gen_acyclic_wall,
    grid_vertex,
)
from ..errors import DegreeBoundError, InvalidImmersionError
from ..reduction_edge import EdgeInstanceMap, build_edge_instance, check_degree_bound, project_path
from ..reduction_vertex import LinkageInstance, MODE_VERTEX
from .models import (
    ButterflyModel,
    ImmersionModel,
    validate_butterfly_model,
    validate_weak_immersion,
)


@dataclass
class CanonicalWallImmersion:
    source: Digraph  # the acyclic (p,p)-grid
    emap: EdgeInstanceMap  # its edge transform
    wall: WallResult  # the acyclic (p,p)-wall pattern
    model: ImmersionModel


def canonical_wall_immersion(p: int) -> CanonicalWallImmersion:
    """The natural weak immersion of the acyclic (p,p)-wall in the edge
    transform of the acyclic (p,p)-grid.

    Split wall vertices map onto the matching grid split pair; an unsplit
    wall vertex maps to the in-half when its grid indegree is 2 (so at most
    one incident wall arc crosses its split arc) and to the out-half
    otherwise.
    """
    if p < 3:
        raise ValueError("p must be >= 3")
    grid = gen_acyclic_grid(p, p)
    emap = build_edge_instance(LinkageInstance(grid, (), 1, MODE_VERTEX))
    wall = gen_acyclic_wall(p, p)
    split_of = {pair.original: pair for pair in wall.split_pairs}

    vertex_map: dict[Label, Label] = {}
    for pair in wall.split_pairs:
        rec = emap.records[pair.original]
        vertex_map[pair.v_in] = rec.v_in
        vertex_map[pair.v_out] = rec.v_out
    for v in wall.graph.vertices:
        if v in vertex_map:
            continue
        rec = emap.records[v]
        vertex_map[v] = rec.v_in if grid.in_degree(v) == 2 else rec.v_out

    out_half_of = {pair.v_out: pair.original for pair in wall.split_pairs}
    in_half_of = {pair.v_in: pair.original for pair in wall.split_pairs}

    def tail_info(x: Label) -> tuple[Label, bool]:
        """Original grid vertex and whether the host path must start at its in-half."""
        if x in out_half_of:
            return out_half_of[x], False
        return x, vertex_map[x] == emap.records[x].v_in

    def head_info(y: Label) -> tuple[Label, bool]:
        if y in in_half_of:
            return in_half_of[y], False
        return y, vertex_map[y] == emap.records[y].v_out

    arc_paths: dict[Arc, Walk] = {}
    split_arcs = {(pair.v_in, pair.v_out) for pair in wall.split_pairs}
    for x, y in wall.graph.arcs:
        if (x, y) in split_arcs:
            rec = emap.records[in_half_of[x]]
            arc_paths[(x, y)] = (rec.v_in, rec.v_out)
            continue
        u, through_u = tail_info(x)
        w, through_w = head_info(y)
        tail_rec, head_rec = emap.records[u], emap.records[w]
        path: list[Label] = []
        if through_u:
            path.append(tail_rec.v_in)
        path.append(tail_rec.v_out)
        path.append(head_rec.v_in)
        if through_w:
            path.append(head_rec.v_out)
        arc_paths[(x, y)] = tuple(path)

    model = ImmersionModel(vertex_map, arc_paths)
    report = validate_weak_immersion(wall.graph, emap.instance.digraph, model)
    if not report.ok:
        raise AssertionError(f"canonical immersion is invalid: {report.problems[:3]}")
    return CanonicalWallImmersion(grid, emap, wall, model)


def wall_to_grid_minor(
    emap: EdgeInstanceMap, wall: WallResult, model: ImmersionModel
) -> tuple[Digraph, ButterflyModel]:
    """Turn a weak immersion of an acyclic (p,p)-wall in an edge transform into
    a butterfly model of the acyclic (p-2,p-2)-grid in the source digraph.

    Each inner wall split pair contributes the zone contraction of its split
    path as the grid vertex's image; each inner wall arc contributes the
    contraction of its connecting path.  Requires the edge instance to have
    total degree at most 3 so arc-disjoint paths are internally
    vertex-disjoint.
    """
    report = validate_weak_immersion(wall.graph, emap.instance.digraph, model)
    if not report.ok:
        raise InvalidImmersionError(report.problems[0])
    degree_violations = check_degree_bound(emap.instance.digraph)
    if degree_violations:
        raise DegreeBoundError(degree_violations[0])

    p = max(v.indices[0] for v in wall.graph.vertices)
    if p < 3:
        raise ValueError("wall too small to contain an inner grid")
    split_of = {pair.original: pair for pair in wall.split_pairs}

    inner = gen_acyclic_grid(p - 2, p - 2)
    vertex_sets: dict[Label, frozenset[Label]] = {}
    vertex_arcs: dict[Label, frozenset[Arc]] = {}
    centers: dict[Label, Label] = {}
    arc_paths: dict[Arc, Walk] = {}

    def wall_pair(pattern_vertex: Label) -> tuple[Label, Label]:
        r, c = pattern_vertex.indices
        pair = split_of[grid_vertex(r + 1, c + 1)]
        return pair.v_in, pair.v_out

    for pv in inner.vertices:
        w_in, w_out = wall_pair(pv)
        projected = project_path(emap, model.arc_paths[(w_in, w_out)])
        vertex_sets[pv] = frozenset(projected)
        vertex_arcs[pv] = frozenset(zip(projected, projected[1:]))
        centers[pv] = projected[0]

    for pu, pw in inner.arcs:
        _, u_out = wall_pair(pu)
        w_in, _ = wall_pair(pw)
        arc_paths[(pu, pw)] = project_path(emap, model.arc_paths[(u_out, w_in)])

    return inner, ButterflyModel(vertex_sets, vertex_arcs, centers, arc_paths)


def validated_wall_to_grid_minor(
    emap: EdgeInstanceMap, wall: WallResult, model: ImmersionModel
) -> tuple[Digraph, ButterflyModel]:
    inner, butterfly = wall_to_grid_minor(emap, wall, model)
    report = validate_butterfly_model(inner, emap.source.digraph, butterfly)
    if not report.ok:
        raise AssertionError(f"transformation produced an invalid model: {report.problems[:3]}")
    return inner, butterfly
