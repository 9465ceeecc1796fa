"""Grid-tiling to vertex-congestion linkage reduction.

The built digraph consists of a row selector and a column selector per index
in [k] and one verifier per (row, column) cell.  A selector encodes the
choice of a value in [n] through a unique "skip arc" between its two spines;
a verifier checks set membership through "jump arcs" that exist only for
members of S_{i,j}.  Witness mappers translate solutions in both directions.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from .digraph import (
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
    dumps,
    digraph_from_json,
    digraph_to_json,
    is_path,
)
from .errors import (
    InvalidSolutionError,
    MalformedDocumentError,
    MalformedLinkageError,
    UnlabeledInstanceError,
)
from .grid_tiling import GridTilingInstance, GridTilingSolution, validate_solution

MODE_VERTEX = "vertex"
MODE_EDGE = "edge"


@dataclass(frozen=True)
class TerminalPair:
    source: Label
    target: Label
    multiplicity: int


@dataclass(frozen=True)
class LinkageInstance:
    digraph: Digraph
    terminals: tuple[TerminalPair, ...]
    g: int
    mode: str

    def __post_init__(self) -> None:
        if self.g < 1:
            raise ValueError("congestion bound g must be >= 1")
        if self.mode not in (MODE_VERTEX, MODE_EDGE):
            raise ValueError(f"unknown mode {self.mode!r}")
        for pair in self.terminals:
            if pair.multiplicity < 1:
                raise ValueError("terminal multiplicities must be >= 1")
            if pair.source not in self.digraph or pair.target not in self.digraph:
                raise ValueError(f"terminal pair ({pair.source}, {pair.target}) not in digraph")

    @property
    def total_occurrences(self) -> int:
        return sum(p.multiplicity for p in self.terminals)


@dataclass(frozen=True)
class PathAssignment:
    pair_index: int
    copy_index: int
    path: Walk


@dataclass(frozen=True)
class Linkage:
    assignments: tuple[PathAssignment, ...]


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    problems: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.ok


# ---------------------------------------------------------------------------
# Label scheme


def src_r(i: int, j: int) -> Label:
    return Label(ROLE_SOURCE, (i, j), "r")


def src_c(i: int, j: int) -> Label:
    """Source feeding verifier row i from column selector j."""
    return Label(ROLE_SOURCE, (i, j), "c")


def p_vertex(side: str, i: int, ell: int, j: int) -> Label:
    return Label(ROLE_P, (i, ell, j), side)


def q_vertex(side: str, i: int, ell: int, j: int) -> Label:
    return Label(ROLE_Q, (i, ell, j), side)


def a_vertex(side: str, i: int, j: int, d: tuple[int, int]) -> Label:
    return Label(ROLE_A, (i, j, d[0], d[1]), side)


def b_vertex(side: str, i: int, j: int, d: tuple[int, int]) -> Label:
    return Label(ROLE_B, (i, j, d[0], d[1]), side)


def tgt(side: str, i: int, j: int) -> Label:
    return Label(ROLE_TARGET, (i, j), side)


def row_major_cells(n: int) -> list[tuple[int, int]]:
    return [(x, y) for x in range(1, n + 1) for y in range(1, n + 1)]


def p_spine(side: str, i: int, n: int, k: int) -> tuple[Label, ...]:
    return tuple(p_vertex(side, i, ell, j) for ell in range(1, n + 1) for j in range(0, k + 1))


def q_spine(side: str, i: int, n: int, k: int) -> tuple[Label, ...]:
    return tuple(q_vertex(side, i, ell, j) for ell in range(1, n + 1) for j in range(1, k + 2))


def a_spine(i: int, j: int, n: int) -> tuple[Label, ...]:
    return tuple(
        a_vertex(side, i, j, d) for d in row_major_cells(n) for side in ("", "r", "c")
    )


def b_spine(i: int, j: int, n: int) -> tuple[Label, ...]:
    return tuple(
        b_vertex(side, i, j, d) for d in row_major_cells(n) for side in ("r", "c", "")
    )


# ---------------------------------------------------------------------------
# Instance construction


def build_linkage_instance(instance: GridTilingInstance, g: int) -> LinkageInstance:
    """Build the vertex-congestion instance for a grid-tiling instance."""
    if g < 1:
        raise ValueError("g must be >= 1")
    n, k = instance.n, instance.k
    vertices: list[Label] = []
    arcs: list[Arc] = []

    def add_spine(labels: Iterable[Label]) -> None:
        labels = list(labels)
        vertices.extend(labels)
        arcs.extend(zip(labels, labels[1:]))

    for side in ("r", "c"):
        for i in range(1, k + 1):
            sources = [
                (src_r(i, j) if side == "r" else src_c(j, i)) for j in range(1, k + 1)
            ]
            vertices.extend(sources)
            add_spine(p_spine(side, i, n, k))
            add_spine(q_spine(side, i, n, k))
            for ell in range(1, n + 1):
                for j in range(1, k + 1):
                    arcs.append((sources[j - 1], p_vertex(side, i, ell, j)))
                    arcs.append((p_vertex(side, i, ell, j), q_vertex(side, i, ell, j)))
                arcs.append((p_vertex(side, i, ell, 0), q_vertex(side, i, ell, k + 1)))

    for i in range(1, k + 1):
        for j in range(1, k + 1):
            vertices.extend([tgt("r", i, j), tgt("c", i, j)])
            add_spine(a_spine(i, j, n))
            add_spine(b_spine(i, j, n))
            for d in sorted(instance.members(i, j)):
                arcs.append((a_vertex("", i, j, d), b_vertex("", i, j, d)))
                arcs.append((a_vertex("r", i, j, d), b_vertex("r", i, j, d)))
                arcs.append((a_vertex("c", i, j, d), b_vertex("c", i, j, d)))
                arcs.append((b_vertex("r", i, j, d), tgt("r", i, j)))
                arcs.append((b_vertex("c", i, j, d), tgt("c", i, j)))

    # Selector-to-verifier arcs.
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            for ell in range(1, n + 1):
                for x in range(1, n + 1):
                    arcs.append((q_vertex("r", i, ell, j), a_vertex("r", i, j, (ell, x))))
                    arcs.append((q_vertex("c", j, ell, i), a_vertex("c", i, j, (x, ell))))

    terminals: list[TerminalPair] = []
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            terminals.append(TerminalPair(src_r(i, j), tgt("r", i, j), 1))
            terminals.append(TerminalPair(src_c(i, j), tgt("c", i, j), 1))
            terminals.append(
                TerminalPair(a_vertex("", i, j, (1, 1)), b_vertex("", i, j, (n, n)), 1)
            )
    for i in range(1, k + 1):
        terminals.append(TerminalPair(p_vertex("r", i, 1, 0), q_vertex("r", i, n, k + 1), 1))
        terminals.append(TerminalPair(p_vertex("c", i, 1, 0), q_vertex("c", i, n, k + 1), 1))
    if g > 1:
        for i in range(1, k + 1):
            for side in ("r", "c"):
                terminals.append(
                    TerminalPair(p_vertex(side, i, 1, 0), p_vertex(side, i, n, k), g - 1)
                )
                terminals.append(
                    TerminalPair(q_vertex(side, i, 1, 1), q_vertex(side, i, n, k + 1), g - 1)
                )
        for i in range(1, k + 1):
            for j in range(1, k + 1):
                terminals.append(
                    TerminalPair(
                        a_vertex("", i, j, (1, 1)), a_vertex("c", i, j, (n, n)), g - 1
                    )
                )
                terminals.append(
                    TerminalPair(
                        b_vertex("r", i, j, (1, 1)), b_vertex("", i, j, (n, n)), g - 1
                    )
                )

    return LinkageInstance(Digraph(vertices, arcs), tuple(terminals), g, MODE_VERTEX)


def terminal_count(k: int, g: int) -> int:
    """Cardinality (sum of multiplicities) of the assembled terminal multiset."""
    if k < 1 or g < 1:
        raise ValueError("k and g must be >= 1")
    return 3 * k * k + 2 * k + (g - 1) * (2 * k * k + 4 * k)


def terminal_count_per_gadget(k: int, g: int) -> int:
    """Same count derived gadget-wise: 2k selectors with k + 2g - 1 pair starts
    each, k^2 verifiers with 2g - 1 each."""
    return 2 * k * (k + 2 * g - 1) + k * k * (2 * g - 1)


def infer_parameters(inst: LinkageInstance) -> tuple[int, int]:
    """Recover (n, k) from the gadget labels of a built instance."""
    n = k = 0
    for v in inst.digraph.vertices:
        if v.role == ROLE_P:
            k = max(k, v.indices[0], v.indices[2])
            n = max(n, v.indices[1])
    if n == 0 or k == 0:
        raise UnlabeledInstanceError("instance does not carry selector labels")
    return n, k


# ---------------------------------------------------------------------------
# Witness mappers


def forward_witness(
    instance: GridTilingInstance, solution: GridTilingSolution, g: int
) -> Linkage:
    """Turn a grid-tiling solution into a linkage of the built instance."""
    return witness_for_instance(build_linkage_instance(instance, g), instance, solution)


def witness_for_instance(
    inst: LinkageInstance, instance: GridTilingInstance, solution: GridTilingSolution
) -> Linkage:
    """The explicit solution linkage on an already-built instance."""
    if not validate_solution(instance, solution):
        raise InvalidSolutionError("solution fails the membership condition")
    n, k, g = instance.n, instance.k, inst.g
    a, b = solution.a, solution.b

    paths: dict[tuple[Label, Label, int], Walk] = {}

    def cell_pos(d: tuple[int, int]) -> int:
        return (d[0] - 1) * n + (d[1] - 1)

    for i in range(1, k + 1):
        for j in range(1, k + 1):
            d = (a[i - 1], b[j - 1])
            paths[(src_r(i, j), tgt("r", i, j), 1)] = (
                src_r(i, j),
                p_vertex("r", i, d[0], j),
                q_vertex("r", i, d[0], j),
                a_vertex("r", i, j, d),
                b_vertex("r", i, j, d),
                tgt("r", i, j),
            )
            paths[(src_c(i, j), tgt("c", i, j), 1)] = (
                src_c(i, j),
                p_vertex("c", j, d[1], i),
                q_vertex("c", j, d[1], i),
                a_vertex("c", i, j, d),
                b_vertex("c", i, j, d),
                tgt("c", i, j),
            )
            aa, bb = a_spine(i, j, n), b_spine(i, j, n)
            cut = cell_pos(d)
            paths[(a_vertex("", i, j, (1, 1)), b_vertex("", i, j, (n, n)), 1)] = (
                aa[: 3 * cut + 1] + bb[3 * cut + 2 :]
            )
            paths[(a_vertex("", i, j, (1, 1)), a_vertex("c", i, j, (n, n)), g - 1)] = aa
            paths[(b_vertex("r", i, j, (1, 1)), b_vertex("", i, j, (n, n)), g - 1)] = bb

    for i in range(1, k + 1):
        for side, value in (("r", a[i - 1]), ("c", b[i - 1])):
            pp, qq = p_spine(side, i, n, k), q_spine(side, i, n, k)
            skip_from = (value - 1) * (k + 1)
            skip_to = (value - 1) * (k + 1) + k
            paths[(p_vertex(side, i, 1, 0), q_vertex(side, i, n, k + 1), 1)] = (
                pp[: skip_from + 1] + qq[skip_to:]
            )
            paths[(p_vertex(side, i, 1, 0), p_vertex(side, i, n, k), g - 1)] = pp
            paths[(q_vertex(side, i, 1, 1), q_vertex(side, i, n, k + 1), g - 1)] = qq

    assignments = []
    for pair_index, pair in enumerate(inst.terminals):
        path = paths[(pair.source, pair.target, pair.multiplicity)]
        for copy in range(pair.multiplicity):
            assignments.append(PathAssignment(pair_index, copy, path))
    return Linkage(tuple(assignments))


def extract_solution(inst: LinkageInstance, linkage: Linkage) -> GridTilingSolution:
    """Read the selected row/column values off the skip arcs of a valid linkage."""
    n, k = infer_parameters(inst)
    by_pair: dict[int, list[PathAssignment]] = {}
    for assignment in linkage.assignments:
        by_pair.setdefault(assignment.pair_index, []).append(assignment)

    def skip_value(side: str, i: int) -> int:
        source = p_vertex(side, i, 1, 0)
        target = q_vertex(side, i, n, k + 1)
        for pair_index, pair in enumerate(inst.terminals):
            if pair.source == source and pair.target == target and pair.multiplicity == 1:
                candidates = by_pair.get(pair_index, [])
                if len(candidates) != 1:
                    raise MalformedLinkageError(
                        f"expected one path for pair ({source}, {target})"
                    )
                path = candidates[0].path
                for u, w in zip(path, path[1:]):
                    if (
                        u.role == ROLE_P
                        and w.role == ROLE_Q
                        and u.indices[2] == 0
                        and w.indices[2] == k + 1
                        and u.indices[1] == w.indices[1]
                    ):
                        return u.indices[1]
                raise MalformedLinkageError(
                    f"no skip arc on the path for pair ({source}, {target})"
                )
        raise MalformedLinkageError(f"instance has no skip pair for selector {side}:{i}")

    a = tuple(skip_value("r", i) for i in range(1, k + 1))
    b = tuple(skip_value("c", j) for j in range(1, k + 1))
    return GridTilingSolution(a, b)


# ---------------------------------------------------------------------------
# Validation


def _check_coverage_and_paths(
    inst: LinkageInstance, linkage: Linkage, problems: list[str]
) -> None:
    counts: Counter[tuple[int, int]] = Counter()
    for assignment in linkage.assignments:
        if not 0 <= assignment.pair_index < len(inst.terminals):
            problems.append(f"assignment references unknown pair index {assignment.pair_index}")
            continue
        counts[(assignment.pair_index, assignment.copy_index)] += 1
        pair = inst.terminals[assignment.pair_index]
        path = assignment.path
        if not path:
            problems.append(f"pair {assignment.pair_index} copy {assignment.copy_index}: empty path")
            continue
        if not is_path(inst.digraph, path):
            problems.append(
                f"pair {assignment.pair_index} copy {assignment.copy_index}: not a path of the digraph"
            )
            continue
        if path[0] != pair.source or path[-1] != pair.target:
            problems.append(
                f"pair {assignment.pair_index} copy {assignment.copy_index}: endpoints "
                f"({path[0]}, {path[-1]}) do not match ({pair.source}, {pair.target})"
            )
    for pair_index, pair in enumerate(inst.terminals):
        for copy in range(pair.multiplicity):
            got = counts.get((pair_index, copy), 0)
            if got != 1:
                problems.append(
                    f"pair {pair_index} ({pair.source}, {pair.target}) copy {copy}: "
                    f"assigned {got} paths, expected 1"
                )
    for (pair_index, copy), got in sorted(counts.items()):
        if 0 <= pair_index < len(inst.terminals):
            if copy >= inst.terminals[pair_index].multiplicity:
                problems.append(
                    f"pair {pair_index} copy {copy} exceeds multiplicity "
                    f"{inst.terminals[pair_index].multiplicity}"
                )


def validate_linkage(inst: LinkageInstance, linkage: Linkage) -> ValidationReport:
    """Endpoint, coverage, and vertex-congestion validation with diagnostics."""
    problems: list[str] = []
    _check_coverage_and_paths(inst, linkage, problems)
    congestion: Counter[Label] = Counter()
    for assignment in linkage.assignments:
        for v in assignment.path:
            congestion[v] += 1
    for v, count in sorted(congestion.items()):
        if count > inst.g:
            problems.append(f"vertex {v} lies on {count} paths, congestion bound is {inst.g}")
    return ValidationReport(not problems, tuple(problems))


def linkage_congestion(linkage: Linkage) -> dict[Label, int]:
    congestion: Counter[Label] = Counter()
    for assignment in linkage.assignments:
        for v in assignment.path:
            congestion[v] += 1
    return dict(congestion)


# ---------------------------------------------------------------------------
# Gadget structure checks


def gadget_zone(v: Label) -> tuple | None:
    """Which gadget a labelled vertex belongs to: ('sel', side, i) or ('ver', i, j)."""
    if v.role == ROLE_SOURCE:
        return ("sel", v.side, v.indices[0] if v.side == "r" else v.indices[1])
    if v.role in (ROLE_P, ROLE_Q):
        return ("sel", v.side, v.indices[0])
    if v.role in (ROLE_A, ROLE_B, ROLE_TARGET):
        return ("ver", v.indices[0], v.indices[1])
    return None


def check_gadget_connectivity(inst: LinkageInstance) -> tuple[str, ...]:
    """Arc-scan of the inter-gadget structure; returns violations (empty = OK).

    Verifiers have no outgoing arcs, selectors no incoming arcs, and arcs from
    a selector enter only verifiers with the matching row/column index.
    """
    violations: list[str] = []
    for u, w in inst.digraph.arcs:
        zu, zw = gadget_zone(u), gadget_zone(w)
        if zu is None or zw is None:
            violations.append(f"arc ({u}, {w}) touches an unlabelled vertex")
            continue
        if zu == zw:
            continue
        if zu[0] == "ver":
            violations.append(f"arc ({u}, {w}) leaves verifier {zu[1:]}")
        if zw[0] == "sel":
            violations.append(f"arc ({u}, {w}) enters selector {zw[1:]}")
        if zu[0] == "sel" and zw[0] == "ver":
            side, sel_index = zu[1], zu[2]
            i, j = zw[1], zw[2]
            if side == "r" and sel_index != i:
                violations.append(f"arc ({u}, {w}): row selector {sel_index} enters verifier {(i, j)}")
            if side == "c" and sel_index != j:
                violations.append(
                    f"arc ({u}, {w}): column selector {sel_index} enters verifier {(i, j)}"
                )
    return tuple(violations)


def check_membership_arcs(
    inst: LinkageInstance, instance: GridTilingInstance
) -> tuple[str, ...]:
    """Verify jump arcs exist for exactly the members of each S_{i,j}."""
    violations: list[str] = []
    n, k = instance.n, instance.k
    graph = inst.digraph
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            members = instance.members(i, j)
            for d in row_major_cells(n):
                expected = d in members
                probes = [
                    (a_vertex("", i, j, d), b_vertex("", i, j, d)),
                    (a_vertex("r", i, j, d), b_vertex("r", i, j, d)),
                    (a_vertex("c", i, j, d), b_vertex("c", i, j, d)),
                    (b_vertex("r", i, j, d), tgt("r", i, j)),
                    (b_vertex("c", i, j, d), tgt("c", i, j)),
                ]
                for u, w in probes:
                    if graph.has_arc(u, w) != expected:
                        state = "missing" if expected else "spurious"
                        violations.append(f"{state} membership arc ({u}, {w}) for cell {d}")
    return tuple(violations)


def selector_subgraph(inst: LinkageInstance, side: str, i: int) -> Digraph:
    keep = [v for v in inst.digraph.vertices if gadget_zone(v) == ("sel", side, i)]
    return inst.digraph.induced(keep)


def verifier_subgraph(inst: LinkageInstance, i: int, j: int) -> Digraph:
    keep = [v for v in inst.digraph.vertices if gadget_zone(v) == ("ver", i, j)]
    return inst.digraph.induced(keep)


# ---------------------------------------------------------------------------
# JSON


def instance_to_json(inst: LinkageInstance) -> dict:
    return {
        "digraph": digraph_to_json(inst.digraph),
        "terminals": [
            {"s": str(p.source), "t": str(p.target), "mult": p.multiplicity}
            for p in inst.terminals
        ],
        "g": inst.g,
        "mode": inst.mode,
    }


def instance_from_json(doc: dict) -> LinkageInstance:
    try:
        graph = digraph_from_json(doc["digraph"])
        terminals = tuple(
            TerminalPair(Label.parse(t["s"]), Label.parse(t["t"]), int(t["mult"]))
            for t in doc["terminals"]
        )
        return LinkageInstance(graph, terminals, int(doc["g"]), doc["mode"])
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedDocumentError(f"bad linkage-instance document: {exc}") from exc


def instance_dumps(inst: LinkageInstance) -> str:
    return dumps(instance_to_json(inst))


def linkage_to_json(linkage: Linkage) -> list:
    return [
        {"pair": a.pair_index, "copy": a.copy_index, "path": [str(v) for v in a.path]}
        for a in linkage.assignments
    ]


def linkage_from_json(doc: list) -> Linkage:
    try:
        return Linkage(
            tuple(
                PathAssignment(
                    int(entry["pair"]),
                    int(entry["copy"]),
                    tuple(Label.parse(v) for v in entry["path"]),
                )
                for entry in doc
            )
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedDocumentError(f"bad linkage document: {exc}") from exc
