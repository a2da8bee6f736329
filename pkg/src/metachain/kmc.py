"""Kinetic Monte Carlo simulation and transition-census checks.

The simulator draws exponential holding times with rate ``-L_ii`` and picks
the next state proportionally to the outgoing rates, so trajectories are
exact samples of the chain at the given epsilon.  Census helpers count
which arcs the jumps used inside a time window; comparing those counts
against a transition graph's arc set quantifies how strongly the dynamics
concentrates on the predicted transitions.

Randomness comes from numpy's PCG64 via ``default_rng``; ensembles derive
one 64-bit seed per trajectory from a single ``SeedSequence`` root, and
every census records the seeds and the generator name.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from .chain import Arc, ChainGraph, GraphError, State, generator_matrix

__all__ = [
    "GENERATOR_NAME",
    "Trajectory",
    "TransitionCensus",
    "CoverageReport",
    "simulate",
    "simulate_ensemble",
    "census",
    "census_vs_tgraph",
    "mean_occupancy",
    "exponential_ks",
]

GENERATOR_NAME = "numpy-PCG64"

# Asymptotic Kolmogorov-Smirnov critical value at significance 0.01.
KS_CRITICAL_1PCT = 1.628


def _jstate(s: State):
    return s if isinstance(s, int) else str(s)


@dataclass(frozen=True)
class Trajectory:
    initial: State
    jumps: tuple
    horizon: float
    seed: int
    epsilon: float
    absorbed: bool
    truncated: bool
    generator_name: str = GENERATOR_NAME

    @property
    def n_jumps(self) -> int:
        return len(self.jumps)

    def states_visited(self) -> list:
        out = [self.initial]
        out.extend(arc.head for _t, arc in self.jumps)
        return out

    def end_time(self) -> float:
        # A truncated trajectory carries no information past its last jump.
        if self.truncated and self.jumps:
            return self.jumps[-1][0]
        return self.horizon

    def holding_times(self) -> dict:
        """Completed holding times per state (the final unfinished one is dropped)."""
        out: dict = {}
        t_prev = 0.0
        state = self.initial
        for t, arc in self.jumps:
            out.setdefault(state, []).append(t - t_prev)
            t_prev = t
            state = arc.head
        return out

    def occupancy(self) -> dict:
        """Fraction of time spent in each visited state over [0, end_time]."""
        end = self.end_time()
        if end <= 0:
            raise GraphError("trajectory has no elapsed time to measure")
        time_in: dict = {}
        t_prev = 0.0
        state = self.initial
        for t, arc in self.jumps:
            time_in[state] = time_in.get(state, 0.0) + (t - t_prev)
            t_prev = t
            state = arc.head
        if end > t_prev:
            time_in[state] = time_in.get(state, 0.0) + (end - t_prev)
        return {s: dt / end for s, dt in time_in.items()}


def simulate(
    g: ChainGraph,
    epsilon: float,
    x0: State,
    horizon: float,
    seed: int,
    max_events: int = 10**6,
) -> Trajectory:
    """Sample one trajectory from x0 over [0, horizon], deterministic in seed.

    Ends early when an absorbing state is reached (flagged ``absorbed``) or
    when the event cap trips (flagged ``truncated``, never silent).
    """
    if x0 not in set(g.states):
        raise GraphError(f"unknown start state {x0!r}")
    if not (horizon > 0):
        raise GraphError(f"horizon must be positive, got {horizon!r}")
    gm = generator_matrix(g, epsilon)  # validates epsilon
    idx = gm.index
    L = gm.matrix

    arcs_of: dict = {s: g.out_arcs(s) for s in g.states}
    cum_of: dict = {}
    total_of: dict = {}
    for s in g.states:
        arcs = arcs_of[s]
        if not arcs:
            continue
        rates = np.array([L[idx[s], idx[a.head]] for a in arcs], dtype=float)
        cum_of[s] = np.cumsum(rates)
        total_of[s] = float(cum_of[s][-1])

    rng = np.random.default_rng(seed)
    t = 0.0
    state = x0
    jumps: list = []
    absorbed = False
    truncated = False
    while True:
        arcs = arcs_of[state]
        if not arcs:
            absorbed = True
            break
        total = total_of[state]
        t_next = t + rng.exponential(1.0 / total)
        if t_next > horizon:
            break
        u = rng.random() * total
        j = int(np.searchsorted(cum_of[state], u, side="right"))
        j = min(j, len(arcs) - 1)
        arc = arcs[j]
        jumps.append((t_next, arc))
        t = t_next
        state = arc.head
        if len(jumps) >= max_events:
            truncated = True
            break
    return Trajectory(
        initial=x0,
        jumps=tuple(jumps),
        horizon=float(horizon),
        seed=int(seed),
        epsilon=float(epsilon),
        absorbed=absorbed,
        truncated=truncated,
    )


def simulate_ensemble(
    g: ChainGraph,
    epsilon: float,
    x0: State,
    horizon: float,
    n: int,
    seed: int,
    max_events: int = 10**6,
) -> tuple:
    """n independent trajectories; per-trajectory seeds spawn from one root."""
    if n <= 0:
        raise GraphError(f"ensemble size must be positive, got {n}")
    child_seeds = np.random.SeedSequence(seed).generate_state(n, dtype=np.uint64)
    return tuple(
        simulate(g, epsilon, x0, horizon, int(s), max_events=max_events)
        for s in child_seeds
    )


@dataclass(frozen=True)
class TransitionCensus:
    counts: dict
    n_trajectories: int
    epsilon: float
    window: tuple
    seeds: tuple
    generator_name: str
    per_trajectory: tuple

    @property
    def total_jumps(self) -> int:
        return sum(self.counts.values())

    def to_csv(self) -> str:
        lo, hi = self.window
        lines = ["arc,window,count,frequency"]
        total = self.total_jumps
        for pair in sorted(self.counts, key=lambda p: (str(p[0]), str(p[1]))):
            c = self.counts[pair]
            freq = c / total if total else 0.0
            lines.append(f"{_jstate(pair[0])}->{_jstate(pair[1])},({lo};{hi}],{c},{freq:.6g}")
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "kind": "transition-census",
            "epsilon": self.epsilon,
            "window": list(self.window),
            "n_trajectories": self.n_trajectories,
            "total_jumps": self.total_jumps,
            "generator": self.generator_name,
            "seeds": [int(s) for s in self.seeds],
            "counts": {
                f"{_jstate(t)}->{_jstate(h)}": c
                for (t, h), c in sorted(
                    self.counts.items(), key=lambda kv: (str(kv[0][0]), str(kv[0][1]))
                )
            },
        }


def census(trajectories: Sequence[Trajectory], window: tuple) -> TransitionCensus:
    """Count per-arc jumps with jump time in (t_lo, t_hi], per trajectory set."""
    lo, hi = window
    if not (hi > lo >= 0):
        raise GraphError(f"window must satisfy 0 <= t_lo < t_hi, got {window!r}")
    if not trajectories:
        raise GraphError("census needs at least one trajectory")
    eps = trajectories[0].epsilon
    counts: dict = {}
    per_traj: list = []
    for traj in trajectories:
        if traj.epsilon != eps:
            raise GraphError("all trajectories in one census must share epsilon")
        k = 0
        for t, arc in traj.jumps:
            if lo < t <= hi:
                counts[arc.pair()] = counts.get(arc.pair(), 0) + 1
                k += 1
        per_traj.append(k)
    return TransitionCensus(
        counts=counts,
        n_trajectories=len(trajectories),
        epsilon=eps,
        window=(float(lo), float(hi)),
        seeds=tuple(t.seed for t in trajectories),
        generator_name=GENERATOR_NAME,
        per_trajectory=tuple(per_traj),
    )


@dataclass(frozen=True)
class CoverageReport:
    census: TransitionCensus
    coverage: float
    stderr: float
    on_count: int
    off_count: int
    off_arcs: dict

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "kind": "coverage-report",
            "coverage": self.coverage,
            "stderr": self.stderr,
            "on_count": self.on_count,
            "off_count": self.off_count,
            "off_arcs": {
                f"{_jstate(t)}->{_jstate(h)}": c
                for (t, h), c in sorted(
                    self.off_arcs.items(), key=lambda kv: (str(kv[0][0]), str(kv[0][1]))
                )
            },
            "census": self.census.to_json_dict(),
        }


def census_vs_tgraph(
    trajectories: Sequence[Trajectory], tgraph, window: tuple
) -> CoverageReport:
    """Fraction of in-window jumps that run along the transition graph's arcs.

    The standard error is cluster-robust over trajectories (jumps within a
    trajectory are correlated, so per-jump binomial errors would overstate
    the precision).
    """
    cen = census(trajectories, window)
    if cen.total_jumps == 0:
        raise GraphError("no jumps observed in the window; census is empty")
    pairs = tgraph.pairs()
    on = sum(c for p, c in cen.counts.items() if p in pairs)
    off_arcs = {p: c for p, c in cen.counts.items() if p not in pairs}
    total = cen.total_jumps
    coverage = on / total

    lo, hi = cen.window
    on_per: list = []
    for traj, tot_c in zip(trajectories, cen.per_trajectory):
        k = sum(1 for t, arc in traj.jumps if lo < t <= hi and arc.pair() in pairs)
        on_per.append((k, tot_c))
    resid_sq = sum((k - coverage * tot) ** 2 for k, tot in on_per)
    stderr = float(np.sqrt(resid_sq)) / total if total else float("nan")

    return CoverageReport(
        census=cen,
        coverage=coverage,
        stderr=stderr,
        on_count=on,
        off_count=total - on,
        off_arcs=off_arcs,
    )


def mean_occupancy(trajectories: Sequence[Trajectory], state: State) -> tuple:
    """Mean and standard error of the per-trajectory time fraction in a state."""
    fracs = np.array([t.occupancy().get(state, 0.0) for t in trajectories])
    if len(fracs) < 2:
        raise GraphError("need at least two trajectories for a standard error")
    return float(fracs.mean()), float(fracs.std(ddof=1) / np.sqrt(len(fracs)))


class KSResult(NamedTuple):
    statistic: float
    n_samples: int
    critical_value: float
    passed: bool


def exponential_ks(samples: Iterable[float], rate: float) -> KSResult:
    """Kolmogorov-Smirnov test of samples against Exp(rate), significance 0.01."""
    xs = np.sort(np.asarray(list(samples), dtype=float))
    n = len(xs)
    if n == 0:
        raise GraphError("KS test needs at least one sample")
    cdf = 1.0 - np.exp(-rate * xs)
    upper = np.max(np.arange(1, n + 1) / n - cdf)
    lower = np.max(cdf - np.arange(0, n) / n)
    d = float(max(upper, lower)) * np.sqrt(n)
    crit = KS_CRITICAL_1PCT
    return KSResult(statistic=d, n_samples=n, critical_value=crit, passed=d <= crit)
