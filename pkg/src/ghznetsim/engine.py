"""Discrete-timeslot Monte Carlo engine.

Each timeslot runs three phases: live links age by one and anything at the
cutoff is discarded, every free tracked edge makes one Bernoulli generation
attempt, and the protocol then checks whether a GHZ state can be realized.
A link generated in slot t is usable in slot t at age 0, so a cutoff of 1
means links are discarded at the end of the slot they were created in.

Randomness is derived from one root seed with ``spawn_key`` streams per
(user set, trial), so results are independent of execution order and
experiments parallelise across user sets without losing reproducibility.
Aggregation always merges results in user-set index order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.stats import chi2

from . import protocols
from .routing import NoRouteError
from .topology import NetworkGraph


class ConfigError(ValueError):
    """Invalid simulation configuration."""


@dataclass(frozen=True)
class SimConfig:
    """One experiment cell: a protocol on a graph at fixed noise and cutoff."""

    graph: NetworkGraph
    protocol: str
    delta: float
    q_c: int
    users: tuple[int, ...] | None = None   # explicit user set, or None to sample
    n_users: int = 4
    user_sets: int = 1
    target_successes: int = 100
    max_trial_timeslots: int = 100_000
    max_set_timeslots: int = 100_000
    min_total_successes: int | None = None
    seed: int = 0
    # a first user set with zero successes already dooms the datapoint under
    # the omission rule, so later sets can be skipped without changing any
    # reported (valid) result; disable to force every set to run
    early_omit: bool = True

    def __post_init__(self):
        if self.q_c < 1:
            raise ConfigError(f"cutoff {self.q_c} must be at least 1")
        if not 0.0 < self.delta <= 1.0:
            raise ConfigError(f"delta {self.delta} outside (0, 1]")
        if self.target_successes < 1:
            raise ConfigError("target_successes must be positive")
        if self.max_trial_timeslots < 1 or self.max_set_timeslots < 1:
            raise ConfigError("timeslot budgets must be positive")
        if self.users is not None and len(self.users) < 2:
            raise ConfigError("need at least two users")
        if self.users is None and self.n_users < 2:
            raise ConfigError("need at least two users")
        try:
            protocols.Protocol(self.protocol)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


class LinkState:
    """Live entanglement links: one slot per edge, age -1 meaning empty."""

    def __init__(self, graph: NetworkGraph, q_c: int):
        self.graph = graph
        self.q_c = int(q_c)
        self.ages = np.full(graph.n_edges, -1, dtype=np.int64)
        self._w0 = np.asarray(graph.w0)
        self._p = np.asarray(graph.gen_prob)
        self._p_uniform = float(self._p[0]) if len(set(graph.gen_prob)) == 1 else None

    def live_count(self) -> int:
        return int((self.ages >= 0).sum())

    def live_edges(self) -> list[tuple[int, int]]:
        return [self.graph.edges[i] for i in np.nonzero(self.ages >= 0)[0]]

    def current_werner(self, delta: float, idx: np.ndarray) -> np.ndarray:
        """Decohered Werner parameters of the live links at ``idx``."""
        return self._w0[idx] * delta ** self.ages[idx]

    def set_link(self, edge: tuple[int, int], age: int = 0) -> None:
        """Place a link by hand (tests and demos)."""
        self.ages[self.graph.edge_index[edge]] = age


def step(links: LinkState, state: protocols.ProtocolState,
         rng: np.random.Generator) -> None:
    """Advance one timeslot: age and discard, then generate on free tracked edges.

    Draws exactly one uniform per free tracked edge, in ascending edge order;
    occupied edges consume no randomness. Edges discarded at the cutoff are
    free again within the same slot.
    """
    ages = links.ages
    ages += ages >= 0
    ages[ages >= links.q_c] = -1
    if state.tracked_all:
        free_idx = np.nonzero(ages < 0)[0]
    else:
        tracked = state.tracked
        free_idx = tracked[ages[tracked] < 0]
    if free_idx.size:
        p = links._p_uniform
        hits = rng.random(free_idx.size) < (p if p is not None else links._p[free_idx])
        ages[free_idx[hits]] = 0


@dataclass(frozen=True)
class TrialResult:
    """One independent run until a GHZ state is distributed or time runs out."""

    status: str                 # "success" or "timeout"
    timeslots: int
    fidelity: float = math.nan
    r_size: int = 0
    mean_age: float = math.nan
    werner_product: float = math.nan
    branch_fidelity_product: float = math.nan
    fidelity_floor: float = math.nan
    center: int | None = None
    edges: tuple[tuple[int, int], ...] = ()

    @property
    def success(self) -> bool:
        return self.status == "success"


def run_trial(graph: NetworkGraph, state: protocols.ProtocolState, delta: float,
              q_c: int, max_timeslots: int, rng: np.random.Generator) -> TrialResult:
    """Loop step and completion checks until one GHZ state is realized."""
    links = LinkState(graph, q_c)
    for t in range(1, max_timeslots + 1):
        step(links, state, rng)
        solution = protocols.try_complete(state, links, delta)
        if solution is not None:
            realized = protocols.realize_ghz(solution, links, delta, state.users)
            return TrialResult(
                status="success", timeslots=t, fidelity=realized.fidelity,
                r_size=realized.r_size, mean_age=realized.mean_age,
                werner_product=realized.werner_product,
                branch_fidelity_product=realized.branch_fidelity_product,
                fidelity_floor=realized.fidelity_floor,
                center=solution.center, edges=solution.edges)
    return TrialResult(status="timeout", timeslots=max_timeslots)


@dataclass(frozen=True)
class SetMetrics:
    """Aggregated outcomes for one user set."""

    users: tuple[int, ...]
    status: str                 # "ok" or "infeasible" (no static route exists)
    successes: int
    timeouts: int
    total_timeslots: int
    dr: float
    dr_ci: tuple[float, float]
    mean_fidelity: float
    mean_r_size: float
    mean_age: float
    trials: tuple[TrialResult, ...] = field(repr=False, default=())


def run_user_set(config: SimConfig, users: tuple[int, ...], set_idx: int,
                 keep_trials: bool = True) -> SetMetrics:
    """All trials for one user set, stopping at the success target or budget."""
    try:
        state = protocols.initialize(config.protocol, config.graph, users)
    except NoRouteError:
        return SetMetrics(users=users, status="infeasible", successes=0, timeouts=0,
                          total_timeslots=0, dr=0.0, dr_ci=(0.0, 0.0),
                          mean_fidelity=math.nan, mean_r_size=math.nan,
                          mean_age=math.nan)
    consumed = 0
    trials: list[TrialResult] = []
    successes = 0
    timeouts = 0
    fid_sum = 0.0
    rs_sum = 0.0
    age_sum = 0.0
    trial_idx = 0
    while successes < config.target_successes and consumed < config.max_set_timeslots:
        cap = min(config.max_trial_timeslots, config.max_set_timeslots - consumed)
        seq = np.random.SeedSequence(config.seed, spawn_key=(0, set_idx, trial_idx))
        rng = np.random.Generator(np.random.PCG64(seq))
        result = run_trial(config.graph, state, config.delta, config.q_c, cap, rng)
        consumed += result.timeslots
        if result.success:
            successes += 1
            fid_sum += result.fidelity
            rs_sum += result.r_size
            age_sum += result.mean_age
        else:
            timeouts += 1
        if keep_trials:
            trials.append(result)
        trial_idx += 1
    dr = successes / consumed if consumed else 0.0
    ci = dr_confidence_interval(successes, consumed) if consumed else (0.0, 0.0)
    return SetMetrics(
        users=users, status="ok", successes=successes, timeouts=timeouts,
        total_timeslots=consumed, dr=dr, dr_ci=ci,
        mean_fidelity=fid_sum / successes if successes else math.nan,
        mean_r_size=rs_sum / successes if successes else math.nan,
        mean_age=age_sum / successes if successes else math.nan,
        trials=tuple(trials))


@dataclass(frozen=True)
class AggregateMetrics:
    """Pooled outcomes over all user sets of one experiment cell."""

    protocol: str
    q_c: int
    sets: tuple[SetMetrics, ...]
    dr: float
    dr_ci: tuple[float, float]
    mean_fidelity: float
    mean_r_size: float
    mean_age: float
    successes: int
    timeouts: int
    total_timeslots: int
    valid: bool                 # datapoint survives the omission rule
    omit_reason: str = ""


def sample_user_sets(config: SimConfig) -> list[tuple[int, ...]]:
    """The experiment's user sets: explicit, or sampled from the root seed."""
    if config.users is not None:
        return [tuple(sorted(int(u) for u in config.users))] * max(1, config.user_sets)
    seq = np.random.SeedSequence(config.seed, spawn_key=(1,))
    rng = np.random.Generator(np.random.PCG64(seq))
    sets = []
    for _ in range(config.user_sets):
        picks = rng.choice(config.graph.n_nodes, size=config.n_users, replace=False)
        sets.append(tuple(sorted(int(u) for u in picks)))
    return sets


def _worker(args) -> SetMetrics:
    config, users, set_idx, keep_trials = args
    return run_user_set(config, users, set_idx, keep_trials)


def resolve_workers(workers: int | None = None) -> int:
    """Worker count for parallel user sets, capped by GHZNETSIM_THREADS."""
    cap = os.environ.get("GHZNETSIM_THREADS")
    cap = int(cap) if cap else (os.cpu_count() or 1)
    if workers is None:
        workers = cap
    return max(1, min(workers, cap))


def run_experiment(config: SimConfig, workers: int | None = None,
                   keep_trials: bool = True) -> AggregateMetrics:
    """Run every user set and pool the results (merged in index order).

    The first user set always runs alone so the early-omit decision is
    identical whether or not the remaining sets run in parallel.
    """
    user_sets = sample_user_sets(config)
    jobs = [(config, users, i, keep_trials) for i, users in enumerate(user_sets)]
    first = _worker(jobs[0])
    if config.early_omit and len(jobs) > 1 and \
            (first.successes == 0 or first.status == "infeasible"):
        skipped = tuple(
            SetMetrics(users=users, status="skipped", successes=0, timeouts=0,
                       total_timeslots=0, dr=0.0, dr_ci=(0.0, 0.0),
                       mean_fidelity=math.nan, mean_r_size=math.nan,
                       mean_age=math.nan)
            for _, users, _, _ in jobs[1:])
        return aggregate(config, (first,) + skipped)
    rest = jobs[1:]
    n_workers = resolve_workers(workers)
    if n_workers > 1 and len(rest) > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            sets = [first] + list(pool.map(_worker, rest))
    else:
        sets = [first] + [_worker(job) for job in rest]
    return aggregate(config, tuple(sets))


def aggregate(config: SimConfig, sets: tuple[SetMetrics, ...]) -> AggregateMetrics:
    """Average per-set metrics and apply the omission rule.

    A datapoint is marked invalid when any user set recorded zero successes
    (including infeasible static routes) or the total success count falls
    below the configured minimum.
    """
    computed = [s for s in sets if s.status != "skipped"]
    successes = sum(s.successes for s in computed)
    timeouts = sum(s.timeouts for s in computed)
    slots = sum(s.total_timeslots for s in computed)
    ok = [s for s in computed if s.successes > 0]
    min_total = config.min_total_successes
    if min_total is None:
        min_total = 2 * len(sets)
    valid = (len(computed) == len(sets)
             and all(s.successes > 0 for s in computed)
             and successes >= min_total)
    reason = ""
    if not valid:
        if any(s.status == "infeasible" for s in computed):
            reason = "infeasible user set"
        elif any(s.status == "skipped" for s in sets):
            reason = "stopped early: first user set had zero successes"
        elif any(s.successes == 0 for s in computed):
            reason = "user set with zero successes"
        else:
            reason = f"only {successes} successes (minimum {min_total})"
    dr = float(np.mean([s.dr for s in computed])) if computed else 0.0
    ci = dr_confidence_interval(successes, slots) if slots else (0.0, 0.0)
    return AggregateMetrics(
        protocol=config.protocol, q_c=config.q_c, sets=sets, dr=dr, dr_ci=ci,
        mean_fidelity=float(np.mean([s.mean_fidelity for s in ok])) if ok else math.nan,
        mean_r_size=float(np.mean([s.mean_r_size for s in ok])) if ok else math.nan,
        mean_age=float(np.mean([s.mean_age for s in ok])) if ok else math.nan,
        successes=successes, timeouts=timeouts, total_timeslots=slots,
        valid=valid, omit_reason=reason)


def dr_confidence_interval(successes: int, timeslots: int,
                           level: float = 0.999) -> tuple[float, float]:
    """Likelihood-ratio confidence interval for a per-timeslot success rate.

    Contains every rate q whose log-likelihood is within the chi-square
    quantile of the maximum: 2 * (l(q_hat) - l(q)) <= chi2_1(level).
    """
    if timeslots <= 0:
        raise ConfigError("need at least one timeslot")
    if not 0 <= successes <= timeslots:
        raise ConfigError("successes outside [0, timeslots]")
    crit = float(chi2.ppf(level, df=1))
    s, n = successes, timeslots
    if s == 0:
        return 0.0, 1.0 - math.exp(-crit / (2.0 * n))
    if s == n:
        return math.exp(-crit / (2.0 * n)), 1.0

    q_hat = s / n
    peak = s * math.log(q_hat) + (n - s) * math.log1p(-q_hat)

    def gap(q: float) -> float:
        return 2.0 * (peak - s * math.log(q) - (n - s) * math.log1p(-q)) - crit

    lo = brentq(gap, 1e-18, q_hat, xtol=1e-15, rtol=1e-14)
    hi = brentq(gap, q_hat, 1.0 - 1e-16, xtol=1e-15, rtol=1e-14)
    return float(lo), float(hi)
