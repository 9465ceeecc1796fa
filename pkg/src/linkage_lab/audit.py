"""End-to-end consistency experiment over seeded random instances.

Each sample draws a grid-tiling instance, solves it three ways (brute force,
vertex-congestion reduction, edge-congestion transform), checks the verdicts
agree, round-trips witnesses, and scans the structural invariants.  Records
are flagged FAIL on any mismatch; gadget exclusion searches run once per
audit on the first sample's gadgets.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from .digraph import gen_acyclic_grid, gen_transitive_tournament
from .dpc_solver import (
    ANSWER_NO,
    ANSWER_YES,
    solve_edge_dpc,
    solve_vertex_dpc_backtracking,
)
from .grid_tiling import gen_random_instance, solve_grid_tiling
from .reduction_edge import (
    build_edge_instance,
    check_degree_bound,
    lift_linkage,
    project_linkage,
    validate_edge_linkage,
)
from .reduction_vertex import (
    build_linkage_instance,
    check_gadget_connectivity,
    check_membership_arcs,
    extract_solution,
    selector_subgraph,
    terminal_count,
    terminal_count_per_gadget,
    validate_linkage,
    verifier_subgraph,
    witness_for_instance,
)
from .structure import STATUS_FOUND, find_butterfly_minor


def simplified_variant_count(k: int, g: int) -> int:
    """A simplified closed form sometimes quoted for this terminal family; it
    disagrees with the assembled multiset (the per-gadget count is correct)."""
    return 2 * g * (k * k + k) + k * k - 2 * k


@dataclass
class AuditRecord:
    index: int
    density: float
    gt_answer: str
    vertex_answer: str
    edge_answer: str
    consistent: bool
    witness_round_trip: bool | None
    structural_ok: bool
    failures: list[str] = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "density": round(self.density, 4),
            "gt_answer": self.gt_answer,
            "vertex_answer": self.vertex_answer,
            "edge_answer": self.edge_answer,
            "consistent": self.consistent,
            "witness_round_trip": self.witness_round_trip,
            "structural_ok": self.structural_ok,
            "status": "FAIL" if self.failures else "OK",
            "failures": self.failures,
            "timings": {name: round(t, 4) for name, t in self.timings.items()},
        }


@dataclass
class AuditReport:
    params: dict
    records: list[AuditRecord]
    terminal_count_audit: dict
    gadget_exclusions: list[dict]
    summary: dict

    def to_json(self) -> dict:
        return {
            "params": self.params,
            "records": [r.to_json() for r in self.records],
            "terminal_count_audit": self.terminal_count_audit,
            "gadget_exclusions": self.gadget_exclusions,
            "summary": self.summary,
        }


def _terminal_count_audit(k: int, g: int) -> dict:
    assembled = terminal_count(k, g)
    variant = simplified_variant_count(k, g)
    return {
        "k": k,
        "g": g,
        "assembled": assembled,
        "per_gadget_formula": terminal_count_per_gadget(k, g),
        "simplified_variant": variant,
        "simplified_variant_agrees": variant == assembled,
    }


def _run_exclusions(inst, budget: int) -> list[dict]:
    hosts = [
        ("selector r 1", selector_subgraph(inst, "r", 1)),
        ("selector c 1", selector_subgraph(inst, "c", 1)),
        ("verifier 1 1", verifier_subgraph(inst, 1, 1)),
    ]
    patterns = [("grid:3x3", gen_acyclic_grid(3, 3)), ("tt:6", gen_transitive_tournament(6))]
    results = []
    for host_name, host in hosts:
        for pattern_name, pattern in patterns:
            start = time.perf_counter()
            found = find_butterfly_minor(pattern, host, budget=budget)
            results.append(
                {
                    "host": host_name,
                    "pattern": pattern_name,
                    "status": found.status,
                    "nodes": found.stats.nodes,
                    "seconds": round(time.perf_counter() - start, 3),
                    "budget": budget,
                }
            )
    return results


def run_audit(
    n: int,
    k: int,
    g: int,
    samples: int,
    seed: int,
    budget: int = 10**7,
    exclusions: str = "first",
    exclusion_budget: int = 10**7,
) -> AuditReport:
    rng = random.Random(seed)
    records: list[AuditRecord] = []
    exclusion_results: list[dict] = []

    for index in range(samples):
        density = rng.uniform(0.05, 0.95)
        sample_seed = rng.randrange(2**31)
        failures: list[str] = []
        timings: dict = {}

        gt = gen_random_instance(n, k, density, sample_seed)

        start = time.perf_counter()
        gt_sol = solve_grid_tiling(gt)
        timings["grid_tiling"] = time.perf_counter() - start
        gt_answer = ANSWER_YES if gt_sol is not None else ANSWER_NO

        inst = build_linkage_instance(gt, g)
        start = time.perf_counter()
        vertex_result = solve_vertex_dpc_backtracking(inst, budget=budget)
        timings["vertex_solve"] = time.perf_counter() - start

        emap = build_edge_instance(inst)
        start = time.perf_counter()
        edge_result = solve_edge_dpc(emap.instance, budget=budget, engine="backtrack")
        timings["edge_solve"] = time.perf_counter() - start

        consistent = gt_answer == vertex_result.answer == edge_result.answer
        if not consistent:
            failures.append(
                f"verdicts disagree: grid-tiling={gt_answer} "
                f"vertex={vertex_result.answer} edge={edge_result.answer}"
            )

        witness_round_trip: bool | None = None
        if gt_sol is not None:
            witness_round_trip = True
            witness = witness_for_instance(inst, gt, gt_sol)
            if not validate_linkage(inst, witness).ok:
                witness_round_trip = False
                failures.append("forward witness fails validation")
            if extract_solution(inst, witness) != gt_sol:
                witness_round_trip = False
                failures.append("witness extraction does not round-trip")
            lifted = lift_linkage(emap, witness)
            if not validate_edge_linkage(emap.instance, lifted).ok:
                witness_round_trip = False
                failures.append("lifted witness fails edge validation")
            if edge_result.answer == ANSWER_YES:
                projected = project_linkage(emap, edge_result.linkage)
                if not validate_linkage(inst, projected).ok:
                    witness_round_trip = False
                    failures.append("projected edge solution fails vertex validation")

        structural_ok = True
        for problem in check_gadget_connectivity(inst):
            structural_ok = False
            failures.append(f"connectivity: {problem}")
        for problem in check_membership_arcs(inst, gt):
            structural_ok = False
            failures.append(f"membership: {problem}")
        for problem in check_degree_bound(emap.instance.digraph):
            structural_ok = False
            failures.append(f"degree: {problem}")
        if inst.total_occurrences != terminal_count(k, g):
            structural_ok = False
            failures.append("terminal count mismatch")

        if exclusions == "first" and index == 0:
            exclusion_results = _run_exclusions(inst, exclusion_budget)
            for entry in exclusion_results:
                if entry["status"] == STATUS_FOUND:
                    failures.append(
                        f"unexpected {entry['pattern']} model inside {entry['host']}"
                    )

        records.append(
            AuditRecord(
                index=index,
                density=density,
                gt_answer=gt_answer,
                vertex_answer=vertex_result.answer,
                edge_answer=edge_result.answer,
                consistent=consistent,
                witness_round_trip=witness_round_trip,
                structural_ok=structural_ok,
                failures=failures,
                timings=timings,
            )
        )

    failure_count = sum(1 for r in records if r.failures)
    report = AuditReport(
        params={
            "n": n,
            "k": k,
            "g": g,
            "samples": samples,
            "seed": seed,
            "budget": budget,
            "exclusions": exclusions,
            "exclusion_budget": exclusion_budget,
        },
        records=records,
        terminal_count_audit=_terminal_count_audit(k, g),
        gadget_exclusions=exclusion_results,
        summary={
            "samples": samples,
            "failures": failure_count,
            "all_consistent": failure_count == 0,
        },
    )
    return report
