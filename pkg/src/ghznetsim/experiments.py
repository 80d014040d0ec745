"""Experiment sweeps, matched protocol comparisons and result files.

A sweep runs one experiment cell per (protocol, generation probability,
cutoff, grid size) combination, all from one root seed so that every
protocol sees identical user sets. Results are written as a CSV of per-set
and pooled rows, a JSON summary, and optionally JSON-lines trial records.
All floating-point output uses 17 significant digits so files round-trip
exactly and re-runs are byte-identical.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

from . import engine, topology
from .engine import AggregateMetrics, SimConfig

CSV_HEADER = ("protocol,p,Qc,M,user_set,dr,dr_lo,dr_hi,mean_fidelity,"
              "mean_r_size,mean_age,successes,timeouts")

# desk scale resolves the trends in minutes; full scale mirrors the
# 100-set, 300-success, 1e6-slot setting used for the headline figures
SCALES = {
    "desk": dict(user_sets=20, target_successes=100, max_set_timeslots=50_000),
    "full": dict(user_sets=100, target_successes=300, max_set_timeslots=1_000_000),
}


def fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


@dataclass(frozen=True)
class SweepSpec:
    """Axes and base parameters for a sweep of experiment cells."""

    protocols: tuple[str, ...] = ("mp-t", "mp-s", "sp-t", "sp-s")
    qc_values: tuple[int, ...] = tuple(range(1, 21))
    p_values: tuple[float, ...] = (0.1,)
    grid_sizes: tuple[int, ...] = (6,)
    w0: float = 0.987
    delta: float = 0.99
    users: tuple[int, ...] | None = None     # explicit set; None samples
    n_users: int = 4
    corners: bool = False                    # users at the grid corners
    user_sets: int = 20
    target_successes: int = 100
    max_trial_timeslots: int | None = None
    max_set_timeslots: int = 50_000
    min_total_successes: int | None = None
    seed: int = 2024


@dataclass(frozen=True)
class CellResult:
    protocol: str
    p: float
    q_c: int
    m: int
    metrics: AggregateMetrics


def cell_config(spec: SweepSpec, protocol: str, p: float, q_c: int, m: int) -> SimConfig:
    graph = topology.make_grid(m, p, spec.w0)
    users = spec.users
    user_sets = spec.user_sets
    if spec.corners:
        users = (0, m - 1, m * (m - 1), m * m - 1)
    if users is not None:
        user_sets = 1
    return SimConfig(
        graph=graph, protocol=protocol, delta=spec.delta, q_c=q_c,
        users=users, n_users=spec.n_users, user_sets=user_sets,
        target_successes=spec.target_successes,
        max_trial_timeslots=spec.max_trial_timeslots or spec.max_set_timeslots,
        max_set_timeslots=spec.max_set_timeslots,
        min_total_successes=spec.min_total_successes, seed=spec.seed)


def run_sweep(spec: SweepSpec, workers: int | None = None,
              keep_trials: bool = True, progress=None) -> list[CellResult]:
    cells = []
    for m in spec.grid_sizes:
        for p in spec.p_values:
            for protocol in spec.protocols:
                for q_c in spec.qc_values:
                    config = cell_config(spec, protocol, p, q_c, m)
                    metrics = engine.run_experiment(config, workers=workers,
                                                    keep_trials=keep_trials)
                    cells.append(CellResult(protocol, p, q_c, m, metrics))
                    if progress is not None:
                        progress(cells[-1])
    return cells


def csv_rows(cells: list[CellResult]) -> list[str]:
    rows = [CSV_HEADER]
    for cell in cells:
        met = cell.metrics
        for i, s in enumerate(met.sets):
            rows.append(",".join(fmt(v) for v in (
                cell.protocol, cell.p, cell.q_c, cell.m, i,
                s.dr, s.dr_ci[0], s.dr_ci[1], s.mean_fidelity,
                s.mean_r_size, s.mean_age, s.successes, s.timeouts)))
        rows.append(",".join(fmt(v) for v in (
            cell.protocol, cell.p, cell.q_c, cell.m, "pooled",
            met.dr, met.dr_ci[0], met.dr_ci[1], met.mean_fidelity,
            met.mean_r_size, met.mean_age, met.successes, met.timeouts)))
    return rows


def write_csv(cells: list[CellResult], path) -> None:
    with open(path, "w") as fh:
        fh.write("\n".join(csv_rows(cells)) + "\n")


def write_trials_jsonl(cells: list[CellResult], path, which: str = "successes") -> None:
    """Per-trial records, one JSON object per line.

    ``which`` chooses "successes", "all" or "none".
    """
    if which == "none":
        return
    with open(path, "w") as fh:
        for cell in cells:
            for set_idx, s in enumerate(cell.metrics.sets):
                for trial_idx, t in enumerate(s.trials):
                    if which == "successes" and not t.success:
                        continue
                    record = {
                        "protocol": cell.protocol, "p": cell.p, "Qc": cell.q_c,
                        "M": cell.m, "user_set": set_idx, "trial": trial_idx,
                        "status": t.status, "T": t.timeslots,
                        "fidelity": t.fidelity, "r_size": t.r_size,
                        "mean_age": t.mean_age, "werner_product": t.werner_product,
                        "branch_fidelity_product": t.branch_fidelity_product,
                        "fidelity_floor": t.fidelity_floor,
                        "center": t.center, "edges": [list(e) for e in t.edges],
                    }
                    fh.write(json.dumps(record, sort_keys=True) + "\n")


def summary_dict(cells: list[CellResult]) -> dict:
    out = []
    for cell in cells:
        met = cell.metrics
        out.append({
            "protocol": cell.protocol, "p": cell.p, "Qc": cell.q_c, "M": cell.m,
            "dr": met.dr, "dr_ci": list(met.dr_ci),
            "mean_fidelity": met.mean_fidelity, "mean_r_size": met.mean_r_size,
            "mean_age": met.mean_age, "successes": met.successes,
            "timeouts": met.timeouts, "total_timeslots": met.total_timeslots,
            "valid": met.valid, "omit_reason": met.omit_reason,
        })
    return {"cells": out}


def write_summary(cells: list[CellResult], path, extra: dict | None = None) -> None:
    payload = summary_dict(cells)
    if extra:
        payload.update(extra)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# matched protocol comparisons

@dataclass(frozen=True)
class Point:
    q_c: int
    dr: float
    fidelity: float


def valid_points(cells: list[CellResult], protocol: str,
                 p: float | None = None, m: int | None = None) -> list[Point]:
    pts = []
    for cell in cells:
        if cell.protocol != protocol:
            continue
        if p is not None and cell.p != p:
            continue
        if m is not None and cell.m != m:
            continue
        if cell.metrics.valid:
            pts.append(Point(cell.q_c, cell.metrics.dr, cell.metrics.mean_fidelity))
    return pts


def pareto_frontier(points: list[Point]) -> list[Point]:
    """Points not weakly dominated (rate and fidelity) by any other point."""
    frontier = []
    for a in points:
        dominated = any(
            (b.dr >= a.dr and b.fidelity >= a.fidelity) and
            (b.dr > a.dr or b.fidelity > a.fidelity)
            for b in points if b is not a)
        if not dominated:
            frontier.append(a)
    return sorted(frontier, key=lambda pt: pt.q_c)


def frontier_dominates(better: list[Point], worse: list[Point]) -> bool:
    """True if every point of ``worse`` is weakly dominated by some ``better`` point."""
    return all(
        any(b.dr >= w.dr and b.fidelity >= w.fidelity for b in better)
        for w in worse)


def max_rate_speedup(fast: list[Point], slow: list[Point]) -> float:
    """Largest rate ratio between point pairs where the fast protocol's
    fidelity is at least as good as the slow one's."""
    best = math.nan
    for a in fast:
        for b in slow:
            if a.fidelity >= b.fidelity and b.dr > 0:
                ratio = a.dr / b.dr
                if math.isnan(best) or ratio > best:
                    best = ratio
    return best


def max_fidelity_gain(better: list[Point], base: list[Point]) -> float:
    """Largest relative fidelity gain between point pairs where the improved
    protocol's rate is at least as good as the baseline's."""
    best = math.nan
    for a in better:
        for b in base:
            if a.dr >= b.dr and b.fidelity > 0:
                gain = a.fidelity / b.fidelity - 1.0
                if math.isnan(best) or gain > best:
                    best = gain
    return best


def comparison_stats(cells: list[CellResult], p: float | None = None,
                     m: int | None = None) -> dict:
    """Tree and star matched comparisons plus per-protocol frontiers."""
    pts = {proto: valid_points(cells, proto, p=p, m=m)
           for proto in ("mp-t", "sp-t", "mp-s", "sp-s")}
    stats = {
        "points": {proto: [vars(pt) for pt in series] for proto, series in pts.items()},
        "frontier": {proto: [vars(pt) for pt in pareto_frontier(series)]
                     for proto, series in pts.items()},
    }
    if pts["mp-t"] and pts["sp-t"]:
        stats["tree_speedup"] = max_rate_speedup(pts["mp-t"], pts["sp-t"])
        stats["tree_fidelity_gain"] = max_fidelity_gain(pts["mp-t"], pts["sp-t"])
        stats["tree_dominates"] = frontier_dominates(pts["mp-t"], pts["sp-t"])
    if pts["mp-s"] and pts["sp-s"]:
        stats["star_speedup"] = max_rate_speedup(pts["mp-s"], pts["sp-s"])
        stats["star_fidelity_gain"] = max_fidelity_gain(pts["mp-s"], pts["sp-s"])
        stats["star_dominates"] = frontier_dominates(pts["mp-s"], pts["sp-s"])
    return stats


# ---------------------------------------------------------------------------
# distance experiment: corner users, cutoff optimised under a fidelity floor

@dataclass(frozen=True)
class DistanceRow:
    protocol: str
    m: int
    steiner_distance: int
    best_qc: int | None
    dr: float
    dr_ci: tuple[float, float]
    mean_fidelity: float
    feasible: bool


def distance_experiment(spec: SweepSpec, fidelity_floor: float = 2.0 / 3.0,
                        workers: int | None = None, progress=None) -> list[DistanceRow]:
    """For each protocol and grid size, the cutoff maximising the rate while
    the mean fidelity stays at or above the floor."""
    rows = []
    corner_spec = replace(spec, corners=True)
    for m in spec.grid_sizes:
        corners = (0, m - 1, m * (m - 1), m * m - 1)
        dist = 3 * (m - 1)
        for protocol in spec.protocols:
            best: CellResult | None = None
            for q_c in spec.qc_values:
                config = cell_config(corner_spec, protocol, spec.p_values[0], q_c, m)
                met = engine.run_experiment(config, workers=workers, keep_trials=False)
                cell = CellResult(protocol, spec.p_values[0], q_c, m, met)
                if progress is not None:
                    progress(cell)
                if not met.valid or math.isnan(met.mean_fidelity):
                    continue
                if met.mean_fidelity < fidelity_floor:
                    continue
                if best is None or met.dr > best.metrics.dr:
                    best = cell
            if best is None:
                rows.append(DistanceRow(protocol, m, dist, None, 0.0, (0.0, 0.0),
                                        math.nan, False))
            else:
                met = best.metrics
                rows.append(DistanceRow(protocol, m, dist, best.q_c, met.dr,
                                        met.dr_ci, met.mean_fidelity, True))
    return rows


def write_distance_csv(rows: list[DistanceRow], path) -> None:
    header = "protocol,M,steiner_distance,best_Qc,dr,dr_lo,dr_hi,mean_fidelity,feasible"
    lines = [header]
    for r in rows:
        lines.append(",".join(fmt(v) for v in (
            r.protocol, r.m, r.steiner_distance,
            r.best_qc if r.best_qc is not None else -1,
            r.dr, r.dr_ci[0], r.dr_ci[1], r.mean_fidelity, int(r.feasible))))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
