"""Loop-free digraphs with structured vertex labels, walk machinery, the split
operation, canonical pattern generators, and JSON/DOT serialization.

Digraphs are immutable after construction and safe to share; every iteration
order is deterministic (lexicographic on labels).
"""

from __future__ import annotations

import heapq
import json
import re
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .errors import (
    CyclicDigraphError,
    DuplicateLabelError,
    LoopArcError,
    MalformedDocumentError,
    MissingBridgeArcError,
    UnknownVertexError,
)

# Role tags used by the instance builders.  The set is open: any token
# matching _ROLE_RE is a valid role.
ROLE_SOURCE = "src"
ROLE_P = "p"
ROLE_Q = "q"
ROLE_A = "a"
ROLE_B = "b"
ROLE_TARGET = "tgt"
ROLE_PLAIN = "plain"
ROLE_SPLIT_IN = "split-in"
ROLE_SPLIT_OUT = "split-out"
ROLE_TREE_IN = "tree-in"
ROLE_TREE_OUT = "tree-out"
ROLE_MID = "mid"

_ROLE_RE = re.compile(r"^[a-z][a-z0-9_-]*$")
_LABEL_RE = re.compile(r"^([a-z][a-z0-9_-]*)(?:\[([rc])\])?(?::([0-9]+(?:,[0-9]+)*))?$")

SIDE_NONE = ""
SIDES = (SIDE_NONE, "r", "c")


@dataclass(frozen=True, order=True)
class Label:
    """Structured vertex label: role tag, integer coordinates, optional side marker."""

    role: str
    indices: tuple[int, ...] = ()
    side: str = SIDE_NONE

    def __post_init__(self) -> None:
        if not _ROLE_RE.match(self.role):
            raise ValueError(f"invalid role tag: {self.role!r}")
        if self.side not in SIDES:
            raise ValueError(f"invalid side marker: {self.side!r}")
        if not isinstance(self.indices, tuple):
            object.__setattr__(self, "indices", tuple(self.indices))
        for ix in self.indices:
            if not isinstance(ix, int) or ix < 0:
                raise ValueError(f"indices must be non-negative ints, got {self.indices!r}")

    def __str__(self) -> str:
        text = self.role
        if self.side:
            text += f"[{self.side}]"
        if self.indices:
            text += ":" + ",".join(str(ix) for ix in self.indices)
        return text

    def __repr__(self) -> str:
        return f"Label({str(self)!r})"

    @classmethod
    def parse(cls, text: str) -> "Label":
        m = _LABEL_RE.match(text)
        if m is None:
            raise MalformedDocumentError(f"unparseable label text: {text!r}")
        role, side, raw = m.groups()
        indices = tuple(int(part) for part in raw.split(",")) if raw else ()
        return cls(role, indices, side or SIDE_NONE)

    def to_json(self) -> dict:
        return {"role": self.role, "indices": list(self.indices), "side": self.side}

    @classmethod
    def from_json(cls, doc: dict) -> "Label":
        try:
            return cls(doc["role"], tuple(int(ix) for ix in doc["indices"]), doc["side"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedDocumentError(f"bad label document: {doc!r}") from exc


Arc = tuple[Label, Label]
Walk = tuple[Label, ...]


class Digraph:
    """Loop-free directed graph over `Label` vertices.

    Adjacency is stored in both directions; all neighbour tuples are sorted.
    Instances are immutable, hashable, and compare by (vertex set, arc set).
    """

    __slots__ = ("_vertices", "_arcs", "_succ", "_pred", "_topo", "_hash")

    def __init__(self, vertices: Iterable[Label], arcs: Iterable[Arc]):
        vlist = list(vertices)
        vset = set(vlist)
        if len(vset) != len(vlist):
            seen: set[Label] = set()
            for v in vlist:
                if v in seen:
                    raise DuplicateLabelError(f"label declared twice: {v}")
                seen.add(v)
        aset = set()
        for u, w in arcs:
            if u == w:
                raise LoopArcError(f"loop arc on {u}")
            if u not in vset or w not in vset:
                raise UnknownVertexError(f"arc ({u}, {w}) uses an undeclared vertex")
            aset.add((u, w))
        self._vertices: tuple[Label, ...] = tuple(sorted(vset))
        self._arcs: tuple[Arc, ...] = tuple(sorted(aset))
        succ: dict[Label, list[Label]] = {v: [] for v in self._vertices}
        pred: dict[Label, list[Label]] = {v: [] for v in self._vertices}
        for u, w in self._arcs:
            succ[u].append(w)
            pred[w].append(u)
        self._succ = {v: tuple(ws) for v, ws in succ.items()}
        self._pred = {v: tuple(us) for v, us in pred.items()}
        self._topo: tuple[Label, ...] | None = None
        self._hash: int | None = None

    @property
    def vertices(self) -> tuple[Label, ...]:
        return self._vertices

    @property
    def arcs(self) -> tuple[Arc, ...]:
        return self._arcs

    def __contains__(self, v: Label) -> bool:
        return v in self._succ

    def __len__(self) -> int:
        return len(self._vertices)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Digraph):
            return NotImplemented
        return self._vertices == other._vertices and self._arcs == other._arcs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._vertices, self._arcs))
        return self._hash

    def __repr__(self) -> str:
        return f"Digraph(|V|={len(self._vertices)}, |A|={len(self._arcs)})"

    def _require(self, v: Label) -> None:
        if v not in self._succ:
            raise UnknownVertexError(f"not a vertex: {v}")

    def out_neighbors(self, v: Label) -> tuple[Label, ...]:
        self._require(v)
        return self._succ[v]

    def in_neighbors(self, v: Label) -> tuple[Label, ...]:
        self._require(v)
        return self._pred[v]

    def out_degree(self, v: Label) -> int:
        return len(self.out_neighbors(v))

    def in_degree(self, v: Label) -> int:
        return len(self.in_neighbors(v))

    def has_arc(self, u: Label, w: Label) -> bool:
        self._require(u)
        self._require(w)
        return w in self._succ[u]

    def sources(self) -> tuple[Label, ...]:
        return tuple(v for v in self._vertices if not self._pred[v])

    def sinks(self) -> tuple[Label, ...]:
        return tuple(v for v in self._vertices if not self._succ[v])

    def induced(self, keep: Iterable[Label]) -> "Digraph":
        kept = set(keep)
        for v in kept:
            self._require(v)
        return Digraph(kept, ((u, w) for u, w in self._arcs if u in kept and w in kept))

    def reachable_from(self, v: Label) -> frozenset[Label]:
        """All vertices reachable from v, including v itself."""
        self._require(v)
        seen = {v}
        stack = [v]
        while stack:
            x = stack.pop()
            for w in self._succ[x]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return frozenset(seen)

    def topological_order(self) -> tuple[Label, ...]:
        """Deterministic topological ordering; raises CyclicDigraphError with a witness."""
        if self._topo is not None:
            return self._topo
        indeg = {v: len(self._pred[v]) for v in self._vertices}
        heap = [v for v in self._vertices if indeg[v] == 0]
        heapq.heapify(heap)
        order: list[Label] = []
        while heap:
            v = heapq.heappop(heap)
            order.append(v)
            for w in self._succ[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    heapq.heappush(heap, w)
        if len(order) != len(self._vertices):
            raise CyclicDigraphError(self._find_cycle({v for v, d in indeg.items() if d > 0}))
        self._topo = tuple(order)
        return self._topo

    def _find_cycle(self, remaining: set[Label]) -> tuple[Label, ...]:
        # Every remaining vertex has an in-arc from the remaining set, so a
        # walk inside it must repeat a vertex.
        start = min(remaining)
        walk = [start]
        positions = {start: 0}
        cur = start
        while True:
            cur = min(w for w in self._succ[cur] if w in remaining)
            if cur in positions:
                return tuple(walk[positions[cur]:]) + (cur,)
            positions[cur] = len(walk)
            walk.append(cur)

    def is_dag(self) -> bool:
        try:
            self.topological_order()
        except CyclicDigraphError:
            return False
        return True


# ---------------------------------------------------------------------------
# Walks and paths


def is_walk(graph: Digraph, walk: Walk) -> bool:
    """True iff consecutive entries are joined by arcs of the host (empty walk is valid)."""
    for v in walk:
        if v not in graph:
            return False
    return all(graph.has_arc(u, w) for u, w in zip(walk, walk[1:]))


def is_path(graph: Digraph, walk: Walk) -> bool:
    return is_walk(graph, walk) and len(set(walk)) == len(walk)


def concat_walks(graph: Digraph, first: Walk, second: Walk) -> Walk:
    """Concatenate two walks: shared endpoints merge, empty walks are identities,
    and differing endpoints are joined through the bridging arc (which must exist)."""
    first, second = tuple(first), tuple(second)
    if not is_walk(graph, first) or not is_walk(graph, second):
        raise ValueError("concat_walks requires walks of the host digraph")
    if not first:
        return second
    if not second:
        return first
    if first[-1] == second[0]:
        return first + second[1:]
    if not graph.has_arc(first[-1], second[0]):
        raise MissingBridgeArcError(f"no arc ({first[-1]}, {second[0]}) to bridge the walks")
    return first + second


def walk_arcs(walk: Walk) -> tuple[Arc, ...]:
    return tuple(zip(walk, walk[1:]))


# ---------------------------------------------------------------------------
# Split operation


def split_labels(v: Label) -> tuple[Label, Label]:
    """Labels of the two halves produced by splitting v."""
    return (Label(ROLE_SPLIT_IN, v.indices, v.side), Label(ROLE_SPLIT_OUT, v.indices, v.side))


def split_vertex(graph: Digraph, v: Label) -> Digraph:
    """Replace v by v_in -> v_out, rewiring in-neighbours to v_in and
    out-neighbours from v_out.  Raises DuplicateLabelError if the derived
    labels collide with existing vertices."""
    if v not in graph:
        raise UnknownVertexError(f"cannot split unknown vertex {v}")
    v_in, v_out = split_labels(v)
    vertices = [x for x in graph.vertices if x != v] + [v_in, v_out]
    arcs: list[Arc] = [(v_in, v_out)]
    for u, w in graph.arcs:
        if u == v and w == v:  # impossible (loop-free), kept for clarity
            continue
        if w == v:
            arcs.append((u, v_in))
        elif u == v:
            arcs.append((v_out, w))
        else:
            arcs.append((u, w))
    return Digraph(vertices, arcs)


# ---------------------------------------------------------------------------
# Canonical pattern generators


def gen_transitive_tournament(k: int) -> Digraph:
    """Transitive tournament on k vertices v_1..v_k with arcs (v_i, v_j) for i < j."""
    if k < 1:
        raise ValueError("k must be >= 1")
    vs = [Label(ROLE_PLAIN, (i,)) for i in range(1, k + 1)]
    return Digraph(vs, ((vs[i], vs[j]) for i in range(k) for j in range(i + 1, k)))


def grid_vertex(r: int, c: int) -> Label:
    return Label(ROLE_PLAIN, (r, c))


def gen_acyclic_grid(p: int, q: int) -> Digraph:
    """Acyclic (p,q)-grid: arcs point down and right."""
    if p < 1 or q < 1:
        raise ValueError("p and q must be >= 1")
    vs = [grid_vertex(r, c) for r in range(1, p + 1) for c in range(1, q + 1)]
    arcs: list[Arc] = []
    for r in range(1, p + 1):
        for c in range(1, q + 1):
            if r < p:
                arcs.append((grid_vertex(r, c), grid_vertex(r + 1, c)))
            if c < q:
                arcs.append((grid_vertex(r, c), grid_vertex(r, c + 1)))
    return Digraph(vs, arcs)


@dataclass(frozen=True)
class SplitPair:
    original: Label
    v_in: Label
    v_out: Label


class WallResult(NamedTuple):
    graph: Digraph
    split_pairs: tuple[SplitPair, ...]


def gen_acyclic_wall(p: int, q: int) -> WallResult:
    """Acyclic (p,q)-wall: the grid with every indegree-2/outdegree-2 vertex split.

    Returns the wall together with the (v_in, v_out) bookkeeping for each split vertex.
    """
    graph = gen_acyclic_grid(p, q)
    to_split = [v for v in graph.vertices if graph.in_degree(v) == 2 and graph.out_degree(v) == 2]
    pairs = []
    for v in to_split:
        graph = split_vertex(graph, v)
        v_in, v_out = split_labels(v)
        pairs.append(SplitPair(v, v_in, v_out))
    return WallResult(graph, tuple(pairs))


# ---------------------------------------------------------------------------
# Serialization

SCHEMA_VERSION = "1"


def digraph_to_json(graph: Digraph) -> dict:
    return {
        "vertices": [v.to_json() for v in graph.vertices],
        "arcs": [[str(u), str(w)] for u, w in graph.arcs],
    }


def digraph_from_json(doc: dict) -> Digraph:
    if not isinstance(doc, dict) or "vertices" not in doc or "arcs" not in doc:
        raise MalformedDocumentError("digraph document needs 'vertices' and 'arcs'")
    vertices = [Label.from_json(entry) for entry in doc["vertices"]]
    try:
        arcs = [(Label.parse(u), Label.parse(w)) for u, w in doc["arcs"]]
    except (TypeError, ValueError) as exc:
        raise MalformedDocumentError("bad arc list") from exc
    try:
        return Digraph(vertices, arcs)
    except (LoopArcError, UnknownVertexError, DuplicateLabelError) as exc:
        raise MalformedDocumentError(str(exc)) from exc


def dumps(doc: dict) -> str:
    """Canonical compact JSON used across the toolkit."""
    return json.dumps(doc, separators=(",", ":"), sort_keys=False)


def digraph_dumps(graph: Digraph) -> str:
    return dumps(digraph_to_json(graph))


def digraph_loads(text: str) -> Digraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocumentError(f"invalid JSON: {exc}") from exc
    return digraph_from_json(doc)


def export_dot(graph: Digraph) -> str:
    """Deterministic DOT rendering (vertices and arcs sorted by label)."""
    lines = ["digraph {"]
    for v in graph.vertices:
        lines.append(f'  "{v}";')
    for u, w in graph.arcs:
        lines.append(f'  "{u}" -> "{w}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
