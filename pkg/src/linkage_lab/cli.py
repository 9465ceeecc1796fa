"""Batch command-line surface: generate, reduce, solve, validate, audit.

Subcommands read JSON from a positional input file or standard input, write
JSON to standard output, and compose through pipes.  Exit codes: 0 yes /
found / valid, 1 no / none / invalid, 2 timeout, 4 error (error details go
to standard error as JSON).  LINKAGE_LAB_BUDGET sets the default search and
solve budgets.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys

from . import __version__
from .audit import run_audit
from .digraph import (
    SCHEMA_VERSION,
    Digraph,
    digraph_from_json,
    dumps,
    export_dot,
    gen_acyclic_grid,
    gen_acyclic_wall,
    gen_transitive_tournament,
)
from .dpc_solver import (
    ANSWER_NO,
    ANSWER_TIMEOUT,
    ANSWER_YES,
    solve_edge_dpc,
    solve_vertex_dpc_backtracking,
    solve_vertex_dpc_dp,
    verdict_to_json,
)
from .errors import LinkageLabError, MalformedDocumentError
from .grid_tiling import (
    gen_planted_yes_instance,
    gen_random_instance,
    instance_from_json as gt_from_json,
    instance_to_json as gt_to_json,
    solution_to_json,
)
from .reduction_edge import build_edge_instance, edge_map_from_json, edge_map_to_json
from .reduction_edge import validate_edge_linkage
from .reduction_vertex import (
    MODE_EDGE,
    build_linkage_instance,
    instance_from_json,
    instance_to_json,
    linkage_from_json,
    validate_linkage,
)
from .structure import (
    STATUS_FOUND,
    STATUS_NONE,
    STATUS_TIMEOUT,
    build_identifying_sequence_reduced,
    ear_anonymity,
    enumerate_maximal_ears,
    find_butterfly_minor,
    find_weak_immersion,
    is_identifying_sequence,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_TIMEOUT = 2
EXIT_ERROR = 4


def _read_document(path: str | None):
    text = sys.stdin.read() if path in (None, "-") else open(path, "r", encoding="utf-8").read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocumentError(f"invalid JSON input: {exc}") from exc


def _emit(doc) -> None:
    sys.stdout.write(dumps(doc) + "\n")


def _load_instance(doc):
    """Accept a bare linkage instance or an edge-map wrapper document."""
    if "digraph" in doc and "terminals" in doc:
        return instance_from_json(doc), None
    if "instance" in doc and "source" in doc:
        emap = edge_map_from_json(doc)
        return emap.instance, emap
    raise MalformedDocumentError("expected a linkage instance or edge transform document")

def _load_digraph(doc) -> Digraph:
    if "vertices" in doc and "arcs" in doc:
        return digraph_from_json(doc)
    if "digraph" in doc:
        return digraph_from_json(doc["digraph"])
    if "instance" in doc:
        return digraph_from_json(doc["instance"]["digraph"])
    raise MalformedDocumentError("expected a digraph or instance document")


def _default_budget(args_budget: int | None) -> int | None:
    if args_budget is not None:
        return args_budget
    env = os.environ.get("LINKAGE_LAB_BUDGET")
    return int(env) if env else None


def _parse_pattern(text: str) -> Digraph:
    kind, _, rest = text.partition(":")
    try:
        if kind == "tt":
            return gen_transitive_tournament(int(rest))
        if kind in ("grid", "wall"):
            p_text, _, q_text = rest.partition("x")
            p, q = int(p_text), int(q_text)
            return gen_acyclic_grid(p, q) if kind == "grid" else gen_acyclic_wall(p, q).graph
    except ValueError as exc:
        raise MalformedDocumentError(f"bad pattern {text!r}") from exc
    raise MalformedDocumentError(f"unknown pattern kind {kind!r} (use tt:K, grid:PxQ, wall:PxQ)")


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_gen_gt(args) -> int:
    if args.planted:
        instance, solution = gen_planted_yes_instance(args.n, args.k, args.density, args.seed)
        if args.witness_out:
            with open(args.witness_out, "w", encoding="utf-8") as handle:
                handle.write(dumps(solution_to_json(solution)) + "\n")
    else:
        instance = gen_random_instance(args.n, args.k, args.density, args.seed)
    _emit(gt_to_json(instance))
    return EXIT_OK


def _cmd_reduce(args) -> int:
    doc = _read_document(args.input)
    if args.target == "vertex":
        instance = build_linkage_instance(gt_from_json(doc), args.g)
        _emit(instance_to_json(instance))
    else:
        inst, _ = _load_instance(doc)
        emap = build_edge_instance(inst)
        _emit(edge_map_to_json(emap))
    return EXIT_OK


def _cmd_solve(args) -> int:
    inst, _emap = _load_instance(_read_document(args.input))
    budget = _default_budget(args.budget)
    if inst.mode == MODE_EDGE:
        result = solve_edge_dpc(inst, budget=budget, engine=args.engine)
    elif args.engine == "dp":
        result = solve_vertex_dpc_dp(inst)
    elif args.engine == "backtrack":
        result = solve_vertex_dpc_backtracking(inst, budget=budget)
    else:
        try:
            result = solve_vertex_dpc_dp(inst)
        except LinkageLabError:
            result = solve_vertex_dpc_backtracking(inst, budget=budget)
    _emit(verdict_to_json(result))
    return {ANSWER_YES: EXIT_OK, ANSWER_NO: EXIT_NEGATIVE, ANSWER_TIMEOUT: EXIT_TIMEOUT}[
        result.answer
    ]


def _cmd_validate(args) -> int:
    doc = _read_document(args.input)
    if "linkage" not in doc or "instance" not in doc:
        raise MalformedDocumentError('expected {"instance": ..., "linkage": [...]}')
    inst, _ = _load_instance(doc["instance"])
    linkage = linkage_from_json(doc["linkage"])
    report = (
        validate_edge_linkage(inst, linkage)
        if inst.mode == MODE_EDGE
        else validate_linkage(inst, linkage)
    )
    _emit({"ok": report.ok, "problems": list(report.problems)})
    return EXIT_OK if report.ok else EXIT_NEGATIVE


def _butterfly_model_json(model) -> dict:
    return {
        "vertices": {
            str(v): {
                "vertices": [str(x) for x in sorted(model.vertex_sets[v])],
                "arcs": [[str(a), str(b)] for a, b in sorted(model.vertex_arcs[v])],
                "center": str(model.centers[v]),
            }
            for v in sorted(model.vertex_sets)
        },
        "arcs": [
            {"u": str(u), "v": str(w), "path": [str(x) for x in path]}
            for (u, w), path in sorted(model.arc_paths.items())
        ],
    }


def _immersion_model_json(model) -> dict:
    return {
        "vertices": {str(v): str(x) for v, x in sorted(model.vertex_map.items())},
        "arcs": [
            {"u": str(u), "v": str(w), "path": [str(x) for x in path]}
            for (u, w), path in sorted(model.arc_paths.items())
        ],
    }


def _cmd_structure(args) -> int:
    host = _load_digraph(_read_document(args.input))
    pattern = _parse_pattern(args.pattern)
    budget = _default_budget(args.budget)
    if args.relation == "minor":
        result = find_butterfly_minor(pattern, host, budget=budget)
        model_json = _butterfly_model_json(result.model) if result.model else None
    else:
        result = find_weak_immersion(pattern, host, budget=budget)
        model_json = _immersion_model_json(result.model) if result.model else None
    doc = {"result": result.status, "stats": result.stats.to_json()}
    if result.status == STATUS_FOUND:
        doc["model"] = model_json
    if result.status == STATUS_NONE:
        doc["exhaustive"] = True
    _emit(doc)
    return {STATUS_FOUND: EXIT_OK, STATUS_NONE: EXIT_NEGATIVE, STATUS_TIMEOUT: EXIT_TIMEOUT}[
        result.status
    ]


def _cmd_ear_anon(args) -> int:
    graph = _load_digraph(_read_document(args.input))
    value = ear_anonymity(graph, cap=args.cap, max_len=args.max_len)
    _emit({"ear_anonymity": value})
    return EXIT_OK


def _cmd_identify_seq(args) -> int:
    inst, _ = _load_instance(_read_document(args.input))
    rng = random.Random(args.seed)
    sample: list = []
    total = 0
    for ear in enumerate_maximal_ears(inst.digraph, cap=args.cap):
        if len(ear) < 2:  # zero-arc ears have no identifying sequence
            continue
        total += 1
        if args.sample is None or len(sample) < args.sample:
            sample.append(ear)
        else:
            j = rng.randint(0, total - 1)
            if j < args.sample:
                sample[j] = ear
    entries = []
    all_ok = True
    for ear in sample:
        seq = build_identifying_sequence_reduced(inst, ear)
        ok = is_identifying_sequence(inst.digraph, ear, seq.arcs)
        all_ok = all_ok and ok and len(seq.arcs) <= 5
        entries.append(
            {
                "ear": [str(v) for v in ear],
                "arcs": [[str(a), str(b)] for a, b in seq.arcs],
                "length": len(seq.arcs),
                "identifying": ok,
            }
        )
    _emit({"total_ears": total, "checked": len(entries), "all_ok": all_ok, "sequences": entries})
    return EXIT_OK if all_ok else EXIT_NEGATIVE


def _cmd_audit(args) -> int:
    report = run_audit(
        n=args.n,
        k=args.k,
        g=args.g,
        samples=args.samples,
        seed=args.seed,
        budget=_default_budget(args.budget) or 10**7,
        exclusions=args.exclusions,
        exclusion_budget=args.exclusion_budget,
    )
    _emit(report.to_json())
    return EXIT_OK if report.summary["all_consistent"] else EXIT_NEGATIVE


def _cmd_export_dot(args) -> int:
    graph = _load_digraph(_read_document(args.input))
    sys.stdout.write(export_dot(graph))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linkage-lab",
        description="Gadget generators, exact congestion-path solvers, and structural checkers.",
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"linkage-lab {__version__} (schema {SCHEMA_VERSION})",
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=1,
        help="reserved for parallel solver modes; solvers are single-threaded deterministic",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-gt", help="generate a grid-tiling instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--planted", action="store_true", help="force a planted solution")
    p.add_argument("--witness-out", help="write the planted witness JSON to this file")
    p.set_defaults(func=_cmd_gen_gt)

    p = sub.add_parser("reduce", help="reduce between problem worlds")
    p.add_argument("target", choices=["vertex", "edge"])
    p.add_argument("--g", type=int, default=1, help="congestion bound (vertex reduction)")
    p.add_argument("input", nargs="?", help="input JSON file (default: stdin)")
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("solve", help="solve a linkage instance")
    p.add_argument("--engine", choices=["auto", "dp", "backtrack"], default="auto")
    p.add_argument("--budget", type=int, default=None, help="node budget")
    p.add_argument("input", nargs="?")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("validate", help="validate a linkage against an instance")
    p.add_argument("input", nargs="?")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("structure", help="search for a pattern as minor or immersion")
    p.add_argument("relation", choices=["minor", "immersion"])
    p.add_argument("--pattern", required=True, help="tt:K, grid:PxQ, or wall:PxQ")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("input", nargs="?")
    p.set_defaults(func=_cmd_structure)

    p = sub.add_parser("ear-anon", help="compute ear anonymity of a DAG")
    p.add_argument("--cap", type=int, default=None, help="maximal-ear enumeration cap")
    p.add_argument("--max-len", type=int, default=5)
    p.add_argument("input", nargs="?")
    p.set_defaults(func=_cmd_ear_anon)

    p = sub.add_parser("identify-seq", help="build identifying sequences on a reduced instance")
    p.add_argument("--sample", type=int, default=None, help="reservoir-sample this many ears")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=1_000_000)
    p.add_argument("input", nargs="?")
    p.set_defaults(func=_cmd_identify_seq)

    p = sub.add_parser("audit", help="end-to-end consistency experiment")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--g", type=int, default=1)
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--exclusions", choices=["first", "none"], default="first")
    p.add_argument("--exclusion-budget", type=int, default=10**7)
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("export-dot", help="render a digraph as DOT text")
    p.add_argument("input", nargs="?")
    p.set_defaults(func=_cmd_export_dot)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (LinkageLabError, ValueError, OSError) as exc:
        sys.stderr.write(dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
