"""Asynchronous token-exchange dynamics.

Each node emits tokens as a Poisson process with its own rate and hands every
token to the neighbor that has so far returned the most tokens per token it
was given. Counters are integers; floats appear only in the reported trace.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import MissingReference
from .market import MarketGraph

RNG_ALGORITHM = "numpy.random.PCG64"


@dataclass(frozen=True)
class SimConfig:
    tokens: int = 100_000
    seed: int = 0
    sample_every: int = 100
    time_limit: float | None = None

    def __post_init__(self):
        if self.tokens <= 0:
            raise ValueError("tokens must be positive")
        if self.sample_every <= 0:
            raise ValueError("sample_every must be positive")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive")

    def to_dict(self):
        return {
            "tokens": self.tokens,
            "seed": self.seed,
            "sample_every": self.sample_every,
            "time_limit": self.time_limit,
            "rng": RNG_ALGORITHM,
        }


class SimState:
    """Token counters. ``given[i][j]`` counts tokens i handed to j."""

    def __init__(self, market: MarketGraph):
        self.market = market
        self.given = [{j: 0 for j in nb} for nb in market.neighbors]
        self.generated = [0] * market.n
        self.clock = 0.0
        self.events = 0

    def received(self, i, j) -> int:
        """Tokens node i got from neighbor j."""
        return self.given[j][i]

    def total_given(self, i) -> int:
        return sum(self.given[i].values())

    def total_received(self, i) -> int:
        return sum(self.given[j][i] for j in self.market.neighbors[i])

    def ratios(self) -> list:
        out = []
        for i in range(self.market.n):
            g = self.total_given(i)
            out.append(self.total_received(i) / g if g else float("nan"))
        return out


def _pick(given, neighbors, i):
    best, back_best, given_best = None, 0, 0
    for j in neighbors:
        g = given[i][j]
        back = given[j][i]
        if best is None:
            best, back_best, given_best = j, back, g
        elif given_best == 0:
            continue
        elif g == 0:
            best, back_best, given_best = j, back, g
        else:
            lhs, rhs = back * given_best, back_best * g
            if lhs > rhs or (lhs == rhs and g < given_best):
                best, back_best, given_best = j, back, g
    return best


def choose_recipient(state: SimState, i: int) -> int:
    """Neighbor with the best return per token; never-served neighbors first.

    Ties go to the neighbor served least so far, then to the lowest index.
    Scores are compared by integer cross-multiplication.
    """
    return _pick(state.given, state.market.neighbors[i], i)


def step(state: SimState, rates, rng: np.random.Generator, active=None) -> SimState:
    """Advance one token event in place and return the state."""
    if active is None:
        active = [i for i in range(state.market.n) if state.market.neighbors[i]]
    lam = np.asarray([rates[i] for i in active], dtype=float)
    total = lam.sum()
    state.clock += rng.exponential(1.0 / total)
    i = active[int(rng.choice(len(active), p=lam / total))]
    j = choose_recipient(state, i)
    state.given[i][j] += 1
    state.generated[i] += 1
    state.events += 1
    return state


@dataclass
class SimTrace:
    ids: tuple
    times: list = field(default_factory=list)
    events: list = field(default_factory=list)
    ratios: list = field(default_factory=list)  # one row of floats per sample
    generated: list = field(default_factory=list)
    clock: float = 0.0
    state: object = field(default=None, repr=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["time", "node", "ratio"])
        for t, row in zip(self.times, self.ratios):
            for nid, value in zip(self.ids, row):
                writer.writerow([repr(t), nid, repr(value)])
        return buf.getvalue()

    def final(self) -> dict:
        return dict(zip(self.ids, self.ratios[-1]))


def simulate(market: MarketGraph, config: SimConfig, rates=None) -> SimTrace:
    """Run the dynamics with ``rates`` (default: the market endowments).

    Arrivals are generated as one merged Poisson stream: exponential gaps at
    the total rate, the emitting node drawn in proportion to its rate.
    Random draws are batched for speed; the sequence is fixed by the seed.
    """
    rates = list(market.endowments if rates is None else rates)
    active = [i for i in range(market.n) if market.neighbors[i]]
    if not active:
        raise ValueError("market has no edges")
    if any(float(rates[i]) <= 0 for i in active):
        raise ValueError("rates must be positive")
    rng = np.random.Generator(np.random.PCG64(config.seed))
    lam = np.asarray([float(rates[i]) for i in active])
    total = lam.sum()
    gaps = rng.exponential(1.0 / total, size=config.tokens)
    emitters = rng.choice(len(active), size=config.tokens, p=lam / total)

    state = SimState(market)
    trace = SimTrace(market.ids)
    neighbors = market.neighbors
    given = state.given
    sent = [0] * market.n
    got = [0] * market.n
    clock = 0.0

    def sample():
        trace.times.append(clock)
        trace.events.append(state.events)
        trace.ratios.append([got[i] / sent[i] if sent[i] else float("nan") for i in range(market.n)])
        trace.generated.append(list(state.generated))

    for k in range(config.tokens):
        clock += float(gaps[k])
        if config.time_limit is not None and clock > config.time_limit:
            clock -= float(gaps[k])
            break
        i = active[emitters[k]]
        best = _pick(given, neighbors[i], i)
        given[i][best] += 1
        sent[i] += 1
        got[best] += 1
        state.generated[i] += 1
        state.events += 1
        if state.events % config.sample_every == 0:
            sample()
    state.clock = clock
    if not trace.events or trace.events[-1] != state.events:
        sample()
    trace.clock = clock
    trace.state = state
    return trace


@dataclass
class ConvergenceReport:
    passed: bool
    tolerance: float
    deviations: dict
    window_means: dict
    targets: dict

    def to_dict(self):
        return {
            "pass": self.passed,
            "tolerance": self.tolerance,
            "max_deviation": max(self.deviations.values()) if self.deviations else 0.0,
            "deviations": self.deviations,
            "window_means": self.window_means,
            "targets": self.targets,
        }


def convergence_report(trace: SimTrace, reference, tolerance: float = 0.05, window: float = 0.1) -> ConvergenceReport:
    """Relative gap between trailing-window mean ratios and the reference levels.

    ``window`` is the trailing fraction of samples averaged (at least one).
    Nodes without a finite ratio in the window count as failures.
    """
    if reference is None:
        raise MissingReference("a lex-optimal reference solution is required")
    rows = np.asarray(trace.ratios, dtype=float)
    take = max(1, int(round(len(rows) * window)))
    tail = rows[-take:]
    deviations, means, targets = {}, {}, {}
    for k, nid in enumerate(trace.ids):
        if k in reference.market.isolated:
            continue
        target = float(reference.ratios[k])
        col = tail[:, k]
        mean = float(np.mean(col)) if np.all(np.isfinite(col)) else float("nan")
        dev = abs(mean - target) / target if np.isfinite(mean) else float("inf")
        deviations[nid], means[nid], targets[nid] = dev, mean, target
    passed = all(d <= tolerance for d in deviations.values())
    return ConvergenceReport(passed, tolerance, deviations, means, targets)
