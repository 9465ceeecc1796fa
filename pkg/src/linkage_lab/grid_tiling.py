"""Grid-tiling instances: model, brute-force oracle, and seeded generators.

An instance asks for row values a_1..a_k and column values b_1..b_k in [n]
such that (a_i, b_j) lies in the cell set S_{i,j} for every i, j.  The brute
force enumerates all n^(2k) assignments and is the oracle everything else is
checked against.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .digraph import dumps
from .errors import MalformedDocumentError

Cell = tuple[int, int]


@dataclass(frozen=True)
class GridTilingInstance:
    n: int
    k: int
    cells: tuple[tuple[frozenset[Cell], ...], ...]  # cells[i-1][j-1] = S_{i,j}

    def __post_init__(self) -> None:
        if self.n < 1 or self.k < 1:
            raise ValueError("n and k must be >= 1")
        if len(self.cells) != self.k or any(len(row) != self.k for row in self.cells):
            raise ValueError("cells must be a k x k array")
        for row in self.cells:
            for cell in row:
                for x, y in cell:
                    if not (1 <= x <= self.n and 1 <= y <= self.n):
                        raise ValueError(f"cell member {(x, y)} outside [n] x [n]")

    def members(self, i: int, j: int) -> frozenset[Cell]:
        """S_{i,j}, 1-based."""
        return self.cells[i - 1][j - 1]


@dataclass(frozen=True)
class GridTilingSolution:
    a: tuple[int, ...]
    b: tuple[int, ...]


def validate_solution(instance: GridTilingInstance, solution: GridTilingSolution) -> bool:
    """True iff (a_i, b_j) is in S_{i,j} for all i, j."""
    n, k = instance.n, instance.k
    if len(solution.a) != k or len(solution.b) != k:
        return False
    if any(not (1 <= v <= n) for v in solution.a + solution.b):
        return False
    return all(
        (solution.a[i - 1], solution.b[j - 1]) in instance.members(i, j)
        for i in range(1, k + 1)
        for j in range(1, k + 1)
    )


def solve_grid_tiling(instance: GridTilingInstance) -> GridTilingSolution | None:
    """Lexicographically first valid assignment (a_1..a_k, b_1..b_k), or None."""
    n, k = instance.n, instance.k
    for assignment in itertools.product(range(1, n + 1), repeat=2 * k):
        candidate = GridTilingSolution(assignment[:k], assignment[k:])
        if validate_solution(instance, candidate):
            return candidate
    return None


def gen_random_instance(n: int, k: int, density: float, seed: int) -> GridTilingInstance:
    """Each (x, y) joins each S_{i,j} independently with probability `density`."""
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    rng = random.Random(seed)
    rows = []
    for _i in range(k):
        row = []
        for _j in range(k):
            row.append(
                frozenset(
                    (x, y)
                    for x in range(1, n + 1)
                    for y in range(1, n + 1)
                    if rng.random() < density
                )
            )
        rows.append(tuple(row))
    return GridTilingInstance(n, k, tuple(rows))


def gen_planted_yes_instance(
    n: int, k: int, density: float, seed: int
) -> tuple[GridTilingInstance, GridTilingSolution]:
    """Random instance that additionally contains a random planted solution."""
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    rng = random.Random(seed)
    a = tuple(rng.randint(1, n) for _ in range(k))
    b = tuple(rng.randint(1, n) for _ in range(k))
    rows = []
    for i in range(1, k + 1):
        row = []
        for j in range(1, k + 1):
            forced = (a[i - 1], b[j - 1])
            row.append(
                frozenset(
                    (x, y)
                    for x in range(1, n + 1)
                    for y in range(1, n + 1)
                    if (x, y) == forced or rng.random() < density
                )
            )
        rows.append(tuple(row))
    solution = GridTilingSolution(a, b)
    instance = GridTilingInstance(n, k, tuple(rows))
    assert validate_solution(instance, solution)
    return instance, solution


# ---------------------------------------------------------------------------
# JSON: {"n": int, "k": int, "S": [[[x, y], ...] ...]} in row-major (i, j) order.


def instance_to_json(instance: GridTilingInstance) -> dict:
    return {
        "n": instance.n,
        "k": instance.k,
        "S": [[[list(m) for m in sorted(cell)] for cell in row] for row in instance.cells],
    }


def instance_from_json(doc: dict) -> GridTilingInstance:
    try:
        n, k = int(doc["n"]), int(doc["k"])
        rows = tuple(
            tuple(frozenset((int(x), int(y)) for x, y in cell) for cell in row)
            for row in doc["S"]
        )
        return GridTilingInstance(n, k, rows)
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedDocumentError(f"bad grid-tiling document: {exc}") from exc


def instance_dumps(instance: GridTilingInstance) -> str:
    return dumps(instance_to_json(instance))


def solution_to_json(solution: GridTilingSolution) -> dict:
    return {"a": list(solution.a), "b": list(solution.b)}


def solution_from_json(doc: dict) -> GridTilingSolution:
    try:
        return GridTilingSolution(tuple(int(v) for v in doc["a"]), tuple(int(v) for v in doc["b"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedDocumentError(f"bad solution document: {exc}") from exc


def all_cells_full(n: int, k: int) -> GridTilingInstance:
    """Instance with every S_{i,j} = [n] x [n] (always a yes-instance)."""
    full = frozenset((x, y) for x in range(1, n + 1) for y in range(1, n + 1))
    return GridTilingInstance(n, k, tuple(tuple(full for _ in range(k)) for _ in range(k)))
