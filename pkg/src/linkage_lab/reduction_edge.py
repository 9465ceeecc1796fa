"""Vertex-congestion to edge-congestion transform.

Every vertex v of the source digraph is split into v_in -> v_out; where the
original in- or out-degree is 3 or more, a balanced binary in-/out-tree
caps the degree, with original neighbours assigned to leaves in topological
order.  The result has total degree at most 3 everywhere, and paths map back
and forth by zone contraction: every host vertex belongs to exactly one
original vertex's zone.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .digraph import (
    ROLE_SPLIT_IN,
    ROLE_SPLIT_OUT,
    ROLE_TREE_IN,
    ROLE_TREE_OUT,
    Arc,
    Digraph,
    Label,
    Walk,
    dumps,
)
from .errors import (
    ArcNotLiftableError,
    MalformedDocumentError,
    ZoneProjectionError,
)
from .reduction_vertex import (
    Linkage,
    LinkageInstance,
    MODE_EDGE,
    MODE_VERTEX,
    PathAssignment,
    TerminalPair,
    ValidationReport,
    _check_coverage_and_paths,
    instance_from_json,
    instance_to_json,
)


@dataclass(frozen=True)
class SplitRecord:
    """Bookkeeping for one original vertex: split pair, tree nodes, leaf tables."""

    original: Label
    v_in: Label
    v_out: Label
    in_tree_nodes: tuple[Label, ...]
    out_tree_nodes: tuple[Label, ...]
    in_leaf_for: dict[Label, Label]  # original in-neighbour -> leaf (or v_in)
    out_leaf_for: dict[Label, Label]  # original out-neighbour -> leaf (or v_out)
    in_leaf_path: dict[Label, tuple[Label, ...]]  # leaf -> (leaf .. root)
    out_leaf_path: dict[Label, tuple[Label, ...]]  # leaf -> (root .. leaf)

    def entry_segment(self, connector: Label) -> tuple[Label, ...]:
        """Host vertices from the entry connector through v_in."""
        if connector == self.v_in:
            return (self.v_in,)
        return self.in_leaf_path[connector] + (self.v_in,)

    def exit_segment(self, connector: Label) -> tuple[Label, ...]:
        """Host vertices after v_out down to the exit connector."""
        if connector == self.v_out:
            return ()
        return self.out_leaf_path[connector]


@dataclass
class EdgeInstanceMap:
    instance: LinkageInstance  # mode=edge
    source: LinkageInstance  # mode=vertex
    records: dict[Label, SplitRecord]
    zone_of: dict[Label, Label] = field(default_factory=dict)
    arc_map: dict[Arc, Arc] = field(default_factory=dict)


def _build_tree(
    leaves: list[Label], pos: int, role: str, next_id: int
) -> tuple[Label, list[Label], list[tuple[Label, Label]]]:
    """Balanced binary tree over the ordered leaves (left-heavy on odd splits).

    Returns (root, internal nodes, child->parent arcs); callers orient arcs.
    """
    internal: list[Label] = []
    arcs: list[tuple[Label, Label]] = []
    counter = [next_id]

    def build(lo: int, hi: int) -> Label:
        if hi - lo == 1:
            return leaves[lo]
        mid = lo + (hi - lo + 1) // 2
        left = build(lo, mid)
        right = build(mid, hi)
        node = Label(role, (pos, counter[0]))
        counter[0] += 1
        internal.append(node)
        arcs.append((left, node))
        arcs.append((right, node))
        return node

    root = build(0, len(leaves))
    return root, internal, arcs


def build_edge_instance(inst: LinkageInstance) -> EdgeInstanceMap:
    """Transform a vertex-mode instance into the degree-3 edge-mode instance."""
    if inst.mode != MODE_VERTEX:
        raise ValueError("build_edge_instance expects a vertex-mode instance")
    graph = inst.digraph
    order = graph.topological_order()  # raises on cyclic input
    pos = {v: i for i, v in enumerate(order)}

    vertices: list[Label] = []
    arcs: list[Arc] = []
    records: dict[Label, SplitRecord] = {}
    zone_of: dict[Label, Label] = {}

    for v in order:
        p = pos[v]
        v_in = Label(ROLE_SPLIT_IN, (p,))
        v_out = Label(ROLE_SPLIT_OUT, (p,))
        vertices.extend([v_in, v_out])
        arcs.append((v_in, v_out))

        in_neighbors = sorted(graph.in_neighbors(v), key=lambda u: pos[u])
        out_neighbors = sorted(graph.out_neighbors(v), key=lambda u: pos[u])

        in_nodes: list[Label] = []
        in_leaf_for: dict[Label, Label] = {}
        in_leaf_path: dict[Label, tuple[Label, ...]] = {}
        if len(in_neighbors) >= 3:
            leaves = [Label(ROLE_TREE_IN, (p, t)) for t in range(len(in_neighbors))]
            root, internal, tree_arcs = _build_tree(leaves, p, ROLE_TREE_IN, len(leaves))
            in_nodes = leaves + internal
            vertices.extend(in_nodes)
            arcs.extend(tree_arcs)
            arcs.append((root, v_in))
            parent = {child: par for child, par in tree_arcs}
            for u, leaf in zip(in_neighbors, leaves):
                in_leaf_for[u] = leaf
                chain = [leaf]
                while chain[-1] != root:
                    chain.append(parent[chain[-1]])
                in_leaf_path[leaf] = tuple(chain)
        else:
            for u in in_neighbors:
                in_leaf_for[u] = v_in

        out_nodes: list[Label] = []
        out_leaf_for: dict[Label, Label] = {}
        out_leaf_path: dict[Label, tuple[Label, ...]] = {}
        if len(out_neighbors) >= 3:
            leaves = [Label(ROLE_TREE_OUT, (p, t)) for t in range(len(out_neighbors))]
            root, internal, tree_arcs = _build_tree(leaves, p, ROLE_TREE_OUT, len(leaves))
            out_nodes = leaves + internal
            vertices.extend(out_nodes)
            arcs.extend((par, child) for child, par in tree_arcs)
            arcs.append((v_out, root))
            parent = {child: par for child, par in tree_arcs}
            for w, leaf in zip(out_neighbors, leaves):
                out_leaf_for[w] = leaf
                chain = [leaf]
                while chain[-1] != root:
                    chain.append(parent[chain[-1]])
                out_leaf_path[leaf] = tuple(reversed(chain))
        else:
            for w in out_neighbors:
                out_leaf_for[w] = v_out

        record = SplitRecord(
            v, v_in, v_out, tuple(in_nodes), tuple(out_nodes),
            in_leaf_for, out_leaf_for, in_leaf_path, out_leaf_path,
        )
        records[v] = record
        for host in (v_in, v_out, *in_nodes, *out_nodes):
            zone_of[host] = v

    arc_map: dict[Arc, Arc] = {}
    for u, w in graph.arcs:
        tail = records[u].out_leaf_for[w]
        head = records[w].in_leaf_for[u]
        arcs.append((tail, head))
        arc_map[(u, w)] = (tail, head)

    terminals = tuple(
        TerminalPair(records[p.source].v_in, records[p.target].v_out, p.multiplicity)
        for p in inst.terminals
    )
    edge_instance = LinkageInstance(Digraph(vertices, arcs), terminals, inst.g, MODE_EDGE)
    return EdgeInstanceMap(edge_instance, inst, records, zone_of, arc_map)


def check_degree_bound(graph: Digraph, bound: int = 3) -> tuple[str, ...]:
    """Total-degree scan; returns violations (empty = OK)."""
    return tuple(
        f"vertex {v} has total degree {graph.in_degree(v) + graph.out_degree(v)}"
        for v in graph.vertices
        if graph.in_degree(v) + graph.out_degree(v) > bound
    )


# ---------------------------------------------------------------------------
# Path mapping


def lift_path(emap: EdgeInstanceMap, path: Walk) -> Walk:
    """Lift a source-digraph path into the edge instance, entering each zone at
    the leaf serving the predecessor and leaving at the leaf serving the successor."""
    if not path:
        return ()
    host: list[Label] = []
    for i, v in enumerate(path):
        rec = emap.records.get(v)
        if rec is None:
            raise ArcNotLiftableError(f"vertex {v} is not part of the transform")
        if i == 0:
            host.append(rec.v_in)
        else:
            u = path[i - 1]
            if (u, v) not in emap.arc_map:
                raise ArcNotLiftableError(f"arc ({u}, {v}) is not part of the transform")
            host.extend(rec.entry_segment(emap.arc_map[(u, v)][1]))
        host.append(rec.v_out)
        if i + 1 < len(path):
            w = path[i + 1]
            if (v, w) not in emap.arc_map:
                raise ArcNotLiftableError(f"arc ({v}, {w}) is not part of the transform")
            host.extend(rec.exit_segment(emap.arc_map[(v, w)][0]))
    return tuple(host)


def project_path(emap: EdgeInstanceMap, path: Walk) -> Walk:
    """Contract each maximal per-zone segment of a host path to its original vertex."""
    zones: list[Label] = []
    for x in path:
        zone = emap.zone_of.get(x)
        if zone is None:
            raise ZoneProjectionError(f"host vertex {x} belongs to no zone")
        if not zones or zones[-1] != zone:
            zones.append(zone)
    if len(set(zones)) != len(zones):
        raise ZoneProjectionError("path re-enters a zone it already left")
    for u, w in zip(zones, zones[1:]):
        if not emap.source.digraph.has_arc(u, w):
            raise ZoneProjectionError(f"zone transition ({u}, {w}) is not a source arc")
    return tuple(zones)


def lift_linkage(emap: EdgeInstanceMap, linkage: Linkage) -> Linkage:
    return Linkage(
        tuple(
            PathAssignment(a.pair_index, a.copy_index, lift_path(emap, a.path))
            for a in linkage.assignments
        )
    )


def project_linkage(emap: EdgeInstanceMap, linkage: Linkage) -> Linkage:
    return Linkage(
        tuple(
            PathAssignment(a.pair_index, a.copy_index, project_path(emap, a.path))
            for a in linkage.assignments
        )
    )


def validate_edge_linkage(inst: LinkageInstance, linkage: Linkage) -> ValidationReport:
    """Endpoint, coverage, and arc-congestion validation with diagnostics."""
    problems: list[str] = []
    _check_coverage_and_paths(inst, linkage, problems)
    congestion: Counter[Arc] = Counter()
    for assignment in linkage.assignments:
        for arc in zip(assignment.path, assignment.path[1:]):
            congestion[arc] += 1
    for (u, w), count in sorted(congestion.items()):
        if count > inst.g:
            problems.append(f"arc ({u}, {w}) lies on {count} paths, congestion bound is {inst.g}")
    return ValidationReport(not problems, tuple(problems))


# ---------------------------------------------------------------------------
# JSON


def edge_map_to_json(emap: EdgeInstanceMap) -> dict:
    vertices = {}
    for v, rec in sorted(emap.records.items()):
        vertices[str(v)] = {
            "in": str(rec.v_in),
            "out": str(rec.v_out),
            "tree_in": [str(x) for x in rec.in_tree_nodes],
            "tree_out": [str(x) for x in rec.out_tree_nodes],
            "in_leaves": {str(u): str(leaf) for u, leaf in sorted(rec.in_leaf_for.items())},
            "out_leaves": {str(w): str(leaf) for w, leaf in sorted(rec.out_leaf_for.items())},
        }
    return {
        "instance": instance_to_json(emap.instance),
        "source": instance_to_json(emap.source),
        "vertices": vertices,
    }


def edge_map_from_json(doc: dict) -> EdgeInstanceMap:
    """Rebuild the transform from the serialized source and check it matches."""
    try:
        source = instance_from_json(doc["source"])
        serialized = instance_from_json(doc["instance"])
    except KeyError as exc:
        raise MalformedDocumentError(f"bad edge-map document: missing {exc}") from exc
    emap = build_edge_instance(source)
    if emap.instance != serialized:
        raise MalformedDocumentError("serialized edge instance does not match its source transform")
    return emap


def edge_map_dumps(emap: EdgeInstanceMap) -> str:
    return dumps(edge_map_to_json(emap))
