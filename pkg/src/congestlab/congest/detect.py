"""Color-coded 2k-cycle detection in CONGEST: light trials, heavy iterations, and
their exact fast-forward.

A light trial or heavy iteration can only emit a witness when one of a
known family of *events* holds (a correctly colored 2k-cycle, or a sampled
node on or next to one). With that family in hand, runs in which no event
holds are skipped and charged their fixed schedule; the remaining runs are
drawn by thinning, which reproduces the exact distribution of the first
detecting run. Every run that may detect goes through the round engine.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from congestlab import rng
from congestlab.congest import thresholds as th
from congestlab.congest.programs import ColorBfs, MinFlood, SelfCheckBfs, color_bfs_schedule
from congestlab.engine import InvariantFault, PreconditionViolation, RunMetrics, Topology, run
from congestlab.graph import CycleWitness, Graph, validate_witness
from congestlab.oracles import enumerate_cycles

CYCLE_LIMIT = 200_000
MAX_DIRECT_RUNS = 20_000


class SampleMode(enum.Enum):
    GOD = "god"
    PRIORITY = "priority"


class SimulationBudgetExceeded(RuntimeError):
    """Fast-forward is unavailable and direct simulation would exceed its cap."""


@dataclass
class DetectionReport:
    witness: CycleWitness | None
    found_by: str | None
    rounds: int
    simulated: int
    skipped: int
    metrics: RunMetrics = field(default_factory=RunMetrics)

    @property
    def found(self) -> bool:
        return self.witness is not None

    def merge(self, other: "DetectionReport") -> "DetectionReport":
        m = RunMetrics()
        m.absorb(self.metrics)
        m.absorb(other.metrics)
        return DetectionReport(
            other.witness,
            other.found_by,
            self.rounds + other.rounds,
            self.simulated + other.simulated,
            self.skipped + other.skipped,
            m,
        )


# ---------------------------------------------------------------- single runs


def _trace(programs, origin: int, start: int) -> list[int]:
    path = [start]
    while path[-1] != origin:
        path.append(programs[path[-1]].pred[origin])
        if len(path) > len(programs):
            raise InvariantFault("predecessor chain does not reach its origin")
    return path


def _color_bfs(g: Graph, k: int, colors, initiators, forwarders, caps, light_bound, windows):
    programs = [
        ColorBfs(
            k,
            int(colors[v]),
            initiator=bool(initiators[v]),
            forwarder=bool(forwarders[v]),
            caps=caps,
            light_bound=light_bound if forwarders[v] and light_bound is not None else None,
        )
        for v in range(g.n)
    ]
    sched = color_bfs_schedule(windows)
    outputs, metrics = run(Topology.congest(g), programs, sum(sched) + 1, schedule=lambda t: sched[t])
    hits = sorted((v, out) for v, out in enumerate(outputs) if out is not None)
    if not hits:
        return None, metrics
    v, (origin, w_asc, w_desc) = hits[0]
    asc = _trace(programs, origin, w_asc)
    desc = _trace(programs, origin, w_desc)
    cycle = list(reversed(asc)) + [v] + desc[:-1]
    witness = CycleWitness(tuple(cycle))
    if not validate_witness(g, witness, 2 * k):
        raise InvariantFault(f"color-BFS produced an invalid witness {cycle}")
    return witness, metrics


def light_nodes(g: Graph, k: int) -> np.ndarray:
    return np.array([th.is_light(g.degree(v), g.n, k) for v in range(g.n)], dtype=bool)


def run_light_trial(g: Graph, k: int, colors) -> tuple[CycleWitness | None, RunMetrics]:
    """One light trial with the given colors (values in [2k])."""
    th.check_k(k)
    light = light_nodes(g, k)
    initiators = light & (np.asarray(colors) == 0)
    bound = [th.light_window(g.n, k, i) for i in range(1, k)]
    return _color_bfs(g, k, colors, initiators, light, None, bound, th.light_schedule(g.n, k))


def run_phase_b(g: Graph, k: int, ns: np.ndarray, colors) -> tuple[CycleWitness | None, RunMetrics]:
    """Capped color-BFS started by the 0-colored neighbours of the sampled node(s)."""
    th.check_k(k)
    initiators = ns & (np.asarray(colors) == 0)
    forwarders = np.ones(g.n, dtype=bool)
    return _color_bfs(g, k, colors, initiators, forwarders, th.THRESHOLDS[k], None, th.heavy_schedule(k))


def run_self_check(g: Graph, k: int, sources: np.ndarray, colors) -> tuple[CycleWitness | None, RunMetrics]:
    """One +1-color-BFS run from each sampled node."""
    th.check_k(k)
    programs = [SelfCheckBfs(k, int(colors[v]), bool(sources[v])) for v in range(g.n)]
    width = max(1, int(np.count_nonzero(sources)))
    sched = [1] + [width] * (2 * k) + [0]
    outputs, metrics = run(Topology.congest(g), programs, sum(sched) + 1, schedule=lambda t: sched[t])
    for s in range(g.n):
        last = outputs[s]
        if sources[s] and last is not None:
            path = _trace(programs, s, last)
            witness = CycleWitness(tuple(reversed(path)))
            if not validate_witness(g, witness, 2 * k):
                raise InvariantFault(f"self-check produced an invalid witness {path}")
            return witness, metrics
    return None, metrics


@dataclass
class Sample:
    sources: np.ndarray
    neighbours: np.ndarray
    metrics: RunMetrics


def sample_god(g: Graph, priorities: np.ndarray) -> Sample:
    s = int(np.argmin(priorities))
    src = np.zeros(g.n, dtype=bool)
    src[s] = True
    ns = np.zeros(g.n, dtype=bool)
    ns[list(g.adj[s])] = True
    return Sample(src, ns, RunMetrics())


def sample_priority(g: Graph, priorities: np.ndarray, horizon: int) -> Sample:
    """Flood the minimum priority for ``horizon`` rounds; local minima self-select."""
    programs = [MinFlood(int(p), horizon) for p in priorities]
    outputs, metrics = run(Topology.congest(g), programs, horizon + 2)
    src = np.array([o[1] for o in outputs], dtype=bool)
    ns = np.array([o[2] for o in outputs], dtype=bool)
    return Sample(src, ns, metrics)


def draw_priorities(n: int, seed: int, iteration: int) -> np.ndarray:
    return rng.stream(seed, rng.PRIORITY, iteration).integers(0, n**3, n)


def _colors(n: int, k: int, *key: int) -> np.ndarray:
    return rng.stream(*key).integers(0, 2 * k, n)


# ---------------------------------------------------------------- event families


def _orderings(cycle: tuple[int, ...]) -> list[tuple[int, ...]]:
    L = len(cycle)
    out = []
    for r in range(L):
        fwd = tuple(cycle[(r + i) % L] for i in range(L))
        out.append(fwd)
        out.append((fwd[0],) + tuple(reversed(fwd[1:])))
    return out


def _satisfied(colors: np.ndarray, events: np.ndarray, offset=None) -> int:
    """Number of ordered cycles e with colors[e_i] == i (+ offset) mod 2k."""
    if len(events) == 0:
        return 0
    L = events.shape[1]
    want = np.arange(L)
    got = colors[events]
    if offset is not None:
        got = (got - got[:, :1]) % L
    return int(np.count_nonzero((got == want).all(axis=1)))


class _Cycles:
    """Lazily enumerated 2k-cycles of a graph (canonical and ordered)."""

    def __init__(self, g: Graph, k: int, limit: int = CYCLE_LIMIT):
        self.g, self.k = g, k
        canon = enumerate_cycles(g, 2 * k, limit + 1)
        self.overflow = len(canon) > limit
        self.canonical = canon[:limit]
        ordered = [o for c in self.canonical for o in _orderings(c)]
        self.ordered = np.array(ordered, dtype=np.int64).reshape(-1, 2 * k)
        self.on_cycle = np.zeros(g.n, dtype=bool)
        for c in self.canonical:
            self.on_cycle[list(c)] = True

    @cached_property
    def components(self) -> np.ndarray:
        return self.g.components()

    def through(self, s: int) -> np.ndarray:
        """Ordered cycles starting at s (both orientations)."""
        if len(self.ordered) == 0:
            return self.ordered
        return self.ordered[self.ordered[:, 0] == s]


# ---------------------------------------------------------------- light detector


def detect_light_c2k(
    g: Graph,
    k: int,
    trials: int | None = None,
    seed: int = 0,
    fast_forward: bool = True,
) -> DetectionReport:
    """Repeat light trials; stop at the first witness."""
    th.check_k(k)
    R = th.light_trials(k) if trials is None else trials
    per_trial = sum(th.light_schedule(g.n, k))
    two_k = 2 * k
    light = light_nodes(g, k)
    events = np.zeros((0, two_k), dtype=np.int64)
    overflow = False
    if fast_forward:
        cyc = _Cycles(g, k)
        overflow = cyc.overflow
        if len(cyc.ordered):
            # every node except the color-k receiver must be light
            mask = np.delete(light[cyc.ordered], k, axis=1).all(axis=1)
            events = cyc.ordered[mask]
    rho = float(two_k) ** (-two_k)
    lam = len(events) * rho
    report = DetectionReport(None, None, 0, 0, 0)
    if not fast_forward or overflow or lam >= 1:
        if fast_forward and R > MAX_DIRECT_RUNS and lam < 1:
            raise SimulationBudgetExceeded("too many 2k-cycles to fast-forward light trials")
        for trial in range(R):
            colors = _colors(g.n, k, seed, rng.COLOR, 0, trial)
            w, m = run_light_trial(g, k, colors)
            report.metrics.absorb(m)
            report.simulated += 1
            report.rounds += m.rounds
            if w is not None:
                report.witness, report.found_by = w, "light"
                return report
            if fast_forward and report.simulated >= MAX_DIRECT_RUNS:
                raise SimulationBudgetExceeded("light trials exceeded the direct-simulation cap")
        return report
    if lam == 0:
        report.skipped = R
        report.rounds = R * per_trial
        return report
    gen = rng.stream(seed, rng.THINNING, 0)
    trial = -1
    while True:
        trial += int(gen.geometric(lam))
        if trial >= R:
            break
        e = events[int(gen.integers(len(events)))]
        colors = gen.integers(0, two_k, g.n)
        colors[e] = np.arange(two_k)
        if gen.random() * _satisfied(colors, events) >= 1:
            continue
        w, m = run_light_trial(g, k, colors)
        if w is None:
            raise InvariantFault("light trial missed a correctly colored light cycle")
        report.metrics.absorb(m)
        report.simulated += 1
        report.skipped = trial
        report.rounds = trial * per_trial + m.rounds
        report.witness, report.found_by = w, "light"
        return report
    report.skipped = R
    report.rounds = R * per_trial
    return report


# ---------------------------------------------------------------- heavy detector


def _self_check_series(
    g: Graph, k: int, sources: np.ndarray, R: int, seed: int, it: int, cyc: _Cycles | None
) -> tuple[CycleWitness | None, int, RunMetrics, int, int]:
    """R self-check runs; returns (witness, rounds, metrics, simulated, skipped)."""
    two_k = 2 * k
    srcs = np.flatnonzero(sources)
    # run_self_check widens each hop to one slot per source
    per_run = 1 + two_k * max(1, len(srcs))
    metrics = RunMetrics()
    events = None
    if cyc is not None and not cyc.overflow and len(np.unique(cyc.components[srcs])) == len(srcs):
        # sources in distinct components never interact, so events through each add up
        events = np.concatenate([cyc.through(int(s)) for s in srcs]) if len(srcs) else cyc.ordered[:0]
    rho = float(two_k) ** (-(two_k - 1))
    if events is not None and len(events) * rho < 1:
        if len(events) == 0:
            return None, R * per_run, metrics, 0, R
        lam = len(events) * rho
        gen = rng.stream(seed, rng.THINNING, 2, it)
        r = -1
        while True:
            r += int(gen.geometric(lam))
            if r >= R:
                return None, R * per_run, metrics, 0, R
            e = events[int(gen.integers(len(events)))]
            colors = gen.integers(0, two_k, g.n)
            colors[e] = (colors[e[0]] + np.arange(two_k)) % two_k
            if gen.random() * _satisfied(colors, events, offset=True) >= 1:
                continue
            w, m = run_self_check(g, k, sources, colors)
            if w is None:
                raise InvariantFault("self-check missed a correctly colored cycle through s")
            metrics.absorb(m)
            return w, r * per_run + m.rounds, metrics, 1, r
    rounds = 0
    for r in range(R):
        if r >= MAX_DIRECT_RUNS and cyc is not None:
            raise SimulationBudgetExceeded("self-check runs exceeded the direct-simulation cap")
        colors = _colors(g.n, k, seed, rng.SELF_CHECK, it, r)
        w, m = run_self_check(g, k, sources, colors)
        metrics.absorb(m)
        rounds += m.rounds
        if w is not None:
            return w, rounds, metrics, r + 1, 0
    return None, rounds, metrics, R, 0


def _iteration_cost(g: Graph, k: int, R: int, iterations: int, mode: SampleMode) -> int:
    cost = R * th.self_check_rounds(k) + sum(th.heavy_schedule(k))
    if mode is SampleMode.PRIORITY:
        cost += th.priority_rounds(k, iterations)
    return cost


def run_heavy_iteration(
    g: Graph,
    k: int,
    it: int,
    seed: int,
    mode: SampleMode,
    R: int,
    iterations: int,
    priorities: np.ndarray | None = None,
    colors_b: np.ndarray | None = None,
    cyc: _Cycles | None = None,
) -> DetectionReport:
    """One heavy iteration: sample, R self-check runs, then the capped phase b."""
    if priorities is None:
        priorities = draw_priorities(g.n, seed, it)
    if mode is SampleMode.GOD:
        sample = sample_god(g, priorities)
    else:
        sample = sample_priority(g, priorities, th.priority_rounds(k, iterations) - 1)
    rep = DetectionReport(None, None, sample.metrics.rounds, 0, 0)
    rep.metrics.absorb(sample.metrics)
    w, rounds, m, sim, skip = _self_check_series(g, k, sample.sources, R, seed, it, cyc)
    rep.rounds += rounds
    rep.metrics.absorb(m)
    rep.simulated += sim
    rep.skipped += skip
    if w is not None:
        rep.witness, rep.found_by = w, "self-check"
        return rep
    if colors_b is None:
        colors_b = _colors(g.n, k, seed, rng.HEAVY, it)
    w, m = run_phase_b(g, k, sample.neighbours, colors_b)
    rep.rounds += m.rounds
    rep.metrics.absorb(m)
    rep.simulated += 1
    if w is not None:
        rep.witness, rep.found_by = w, "heavy"
    return rep


def _conditioned_priorities(n: int, s: int, gen: np.random.Generator) -> np.ndarray:
    """Priorities drawn iid, then permuted so the minimum sits at s."""
    p = gen.integers(0, n**3, n)
    j = int(np.argmin(p))
    p[j], p[s] = p[s], p[j]
    return p


def detect_heavy_c2k(
    g: Graph,
    k: int,
    iterations: int | None = None,
    mode: SampleMode | str = SampleMode.GOD,
    seed: int = 0,
    trials: int | None = None,
    fast_forward: bool = True,
) -> DetectionReport:
    """R' heavy iterations; stop at the first witness."""
    th.check_k(k)
    mode = SampleMode(mode)
    n = g.n
    two_k = 2 * k
    R = th.light_trials(k) if trials is None else trials
    Rp = th.heavy_iterations(n, k) if iterations is None else iterations
    cost = _iteration_cost(g, k, R, Rp, mode)
    report = DetectionReport(None, None, 0, 0, 0)
    if n == 0:
        return report
    cyc = _Cycles(g, k) if fast_forward else None
    usable = cyc is not None and not cyc.overflow
    if usable and not cyc.on_cycle.any():
        # no 2k-cycle at all: no iteration can report, in either sampling mode
        report.skipped = Rp
        report.rounds = Rp * cost
        return report
    if usable and mode is SampleMode.PRIORITY and not g.is_connected():
        usable = False  # other components would self-select their own sources
    if usable:
        assert cyc is not None
        on_cycle = np.flatnonzero(cyc.on_cycle)
        ordered = cyc.ordered
        weights = np.array([g.degree(int(u)) for u in ordered[:, 0]], dtype=float)
        rho = float(two_k) ** (-two_k)
        mass_a = len(on_cycle) / n
        mass_b = float(weights.sum()) * rho / n
        lam = mass_a + mass_b
        if lam < 1:
            return _heavy_thinned(g, k, R, Rp, mode, seed, cyc, on_cycle, weights, mass_a, lam, cost)
    # direct iterations (the self-check still thins when it can)
    for it in range(Rp):
        if fast_forward and it >= MAX_DIRECT_RUNS:
            raise SimulationBudgetExceeded("heavy iterations exceeded the direct-simulation cap")
        rep = run_heavy_iteration(g, k, it, seed, mode, R, Rp, cyc=None if cyc is None or cyc.overflow else cyc)
        report = report.merge(rep)
        if rep.found:
            return report
    return report


def _heavy_thinned(g, k, R, Rp, mode, seed, cyc, on_cycle, weights, mass_a, lam, cost) -> DetectionReport:
    n, two_k = g.n, 2 * k
    ordered = cyc.ordered
    gen = rng.stream(seed, rng.THINNING, 1)
    probs_b = weights / weights.sum() if weights.sum() > 0 else None
    report = DetectionReport(None, None, 0, 0, 0)
    it = -1
    done = 0
    while True:
        it += int(gen.geometric(lam))
        if it >= Rp:
            break
        colors = gen.integers(0, two_k, n)
        if probs_b is None or gen.random() * lam < mass_a:
            s = int(on_cycle[int(gen.integers(len(on_cycle)))])
        else:
            e = ordered[int(gen.choice(len(ordered), p=probs_b))]
            nbrs = g.adj[int(e[0])]
            s = int(nbrs[int(gen.integers(len(nbrs)))])
            colors[e] = np.arange(two_k)
        # N(omega): the A event plus every satisfied B event with this s
        adjacent = np.isin(ordered[:, 0], g.adj[s]) if len(ordered) else np.zeros(0, dtype=bool)
        count = int(cyc.on_cycle[s]) + _satisfied(colors, ordered[adjacent])
        if gen.random() * count >= 1:
            continue
        priorities = _conditioned_priorities(n, s, gen)
        report.skipped += it - done
        report.rounds += (it - done) * cost
        done = it + 1
        rep = run_heavy_iteration(
            g, k, it, seed, mode, R, Rp, priorities=priorities, colors_b=colors, cyc=cyc
        )
        report = report.merge(rep)
        if rep.found:
            return report
    report.skipped += Rp - done
    report.rounds += (Rp - done) * cost
    return report


def detect_c2k_congest(
    g: Graph,
    k: int,
    seed: int = 0,
    mode: SampleMode | str = SampleMode.GOD,
    fast_forward: bool = True,
    trials: int | None = None,
    iterations: int | None = None,
) -> DetectionReport:
    """Light detector, then heavy detector, with the default budgets."""
    light = detect_light_c2k(g, k, trials=trials, seed=seed, fast_forward=fast_forward)
    if light.found:
        return light
    heavy = detect_heavy_c2k(
        g, k, iterations=iterations, mode=mode, seed=seed, trials=trials, fast_forward=fast_forward
    )
    return light.merge(heavy)


def check_sampling_agreement(g: Graph, k: int, seed: int, iteration: int, iterations: int) -> tuple[set[int], set[int]]:
    """Sampled node sets under GodSample and PrioritySample for one iteration."""
    p = draw_priorities(g.n, seed, iteration)
    god = sample_god(g, p)
    pri = sample_priority(g, p, th.priority_rounds(k, iterations) - 1)
    if len(set(p.tolist())) != g.n:
        raise PreconditionViolation("priorities collide; the two samplers need not agree")
    return set(np.flatnonzero(god.sources).tolist()), set(np.flatnonzero(pri.sources).tolist())
