"""Round-synchronous execution engine for the Congested Clique and CONGEST models.

Protocols are written as :class:`NodeProgram` subclasses and executed in
logical steps. Everything a node enqueues on one link during a step drains
FIFO at one Word per round, so a step costs as many rounds as its longest
queue (or a fixed window, when the protocol runs on a fixed schedule).

Clique protocols may instead use :class:`CliqueNetwork`, whose routing
primitives validate their preconditions and charge rounds by the
load-balanced routing cost model.
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from congestlab import rng
from congestlab.graph import Graph

Word = tuple[int, ...]
Inbox = Mapping[int, Sequence[Word]]
Outbox = Mapping[int, Sequence[Word]]

WORD_FACTOR = 4
C_ROUTE = 2
C_INPUT = 16


class InvariantFault(RuntimeError):
    """A protocol or engine invariant failed; signals a bug, never a valid outcome."""


class BandwidthFault(InvariantFault):
    pass


class PreconditionViolation(InvariantFault):
    pass


class TopologyError(InvariantFault):
    pass


class TopologyKind(enum.Enum):
    CLIQUE = "clique"
    CONGEST = "congest"


@dataclass(frozen=True)
class Topology:
    kind: TopologyKind
    graph: Graph

    @classmethod
    def clique(cls, graph: Graph) -> "Topology":
        return cls(TopologyKind.CLIQUE, graph)

    @classmethod
    def congest(cls, graph: Graph) -> "Topology":
        return cls(TopologyKind.CONGEST, graph)

    @property
    def n(self) -> int:
        return self.graph.n

    def links(self, v: int) -> Sequence[int]:
        if self.kind is TopologyKind.CONGEST:
            return self.graph.adj[v]
        return [u for u in range(self.n) if u != v]

    def is_link(self, u: int, v: int) -> bool:
        if u == v:
            return False
        if self.kind is TopologyKind.CONGEST:
            return self.graph.has_edge(u, v)
        return 0 <= u < self.n and 0 <= v < self.n

    @property
    def link_count(self) -> int:
        if self.kind is TopologyKind.CONGEST:
            return 2 * self.graph.m
        return self.n * (self.n - 1)


def log2_ceil(n: int) -> int:
    return max(1, math.ceil(math.log2(max(n, 2))))


def word_budget(n: int) -> int:
    """Bits per Word: WORD_FACTOR * ceil(log2 n)."""
    return WORD_FACTOR * log2_ceil(n)


def word_bits(word: Word) -> int:
    return sum(max(1, int(x).bit_length()) for x in word)


def check_word(word: Word, budget: int) -> None:
    if not isinstance(word, tuple):
        raise BandwidthFault(f"word must be a tuple of ints, got {type(word).__name__}")
    for x in word:
        if int(x) < 0:
            raise BandwidthFault(f"word fields must be nonnegative: {word}")
    if word_bits(word) > budget:
        raise BandwidthFault(f"word {word} needs {word_bits(word)} bits > budget {budget}")


@dataclass
class RunMetrics:
    rounds: int = 0
    words_total: int = 0
    peak_link_load: int = 0
    charged_routing_rounds: int = 0
    routing_calls: int = 0
    broadcast_calls: int = 0

    def absorb(self, other: "RunMetrics") -> None:
        self.rounds += other.rounds
        self.words_total += other.words_total
        self.peak_link_load = max(self.peak_link_load, other.peak_link_load)
        self.charged_routing_rounds += other.charged_routing_rounds
        self.routing_calls += other.routing_calls
        self.broadcast_calls += other.broadcast_calls

    def as_dict(self) -> dict[str, int]:
        return asdict(self)


class RoundLimitExceeded(Exception):
    """Raised when a run hits its round limit; carries partial results."""

    def __init__(self, metrics: RunMetrics, outputs: list):
        super().__init__(f"round limit exceeded after {metrics.rounds} rounds")
        self.metrics = metrics
        self.outputs = outputs


class NodeProgram:
    """Per-node protocol. Subclasses implement :meth:`step`.

    ``step(t, inbox)`` receives the words delivered since the previous step,
    keyed by sender, and returns an outbox mapping each neighbor to the words
    to enqueue on that link. A node ends by calling :meth:`halt`.
    """

    node: int = -1
    n: int = 0
    links: Sequence[int] = ()
    seed: int = 0
    halted: bool = False
    _output: object = None

    def bind(self, node: int, topology: Topology, seed: int) -> None:
        self.node = node
        self.n = topology.n
        self.links = topology.links(node)
        self.seed = seed
        self.halted = False
        self._output = None

    @property
    def output(self) -> object:
        return self._output

    def halt(self, output: object = None) -> None:
        if self.halted:
            raise InvariantFault(f"node {self.node} halted twice")
        self._output = output
        self.halted = True

    def random(self, t: int, *key: int) -> np.random.Generator:
        """Per-node, per-step random stream."""
        return rng.stream(self.seed, 100, self.node, t, *key)

    def wake_at(self, t: int) -> int | None:
        """Earliest future step this node needs to run when nothing arrives.

        None means every step. Used to fast-forward silent stretches.
        """
        return None

    def step(self, t: int, inbox: Inbox) -> Outbox | None:  # pragma: no cover - abstract
        raise NotImplementedError


Schedule = Callable[[int], int]


def run(
    topology: Topology,
    programs: Sequence[NodeProgram],
    round_limit: int,
    seed: int = 0,
    schedule: Schedule | None = None,
) -> tuple[list, RunMetrics]:
    """Execute ``programs`` in lockstep until all halt.

    Returns per-node outputs and metrics. With ``schedule``, step ``t``
    occupies exactly ``schedule(t)`` rounds and its queues must fit.
    """
    n = topology.n
    if len(programs) != n:
        raise InvariantFault(f"expected {n} programs, got {len(programs)}")
    for v, prog in enumerate(programs):
        prog.bind(v, topology, seed)
    budget = word_budget(n)
    metrics = RunMetrics()
    inbox: list[dict[int, list[Word]]] = [{} for _ in range(n)]
    t = 0

    def outputs() -> list:
        return [p.output for p in programs]

    while True:
        live = [v for v in range(n) if not programs[v].halted]
        if not live:
            break
        queues: dict[tuple[int, int], list[Word]] = {}
        for v in live:
            out = programs[v].step(t, inbox[v])
            if not out:
                continue
            for dst, words in out.items():
                if not words:
                    continue
                if not topology.is_link(v, dst):
                    raise TopologyError(f"node {v} has no link to {dst}")
                for w in words:
                    check_word(w, budget)
                queues.setdefault((v, dst), []).extend(words)
        inbox = [{} for _ in range(n)]
        qmax = max((len(q) for q in queues.values()), default=0)
        window = schedule(t) if schedule is not None else 0
        if qmax > window and schedule is not None:
            raise BandwidthFault(f"step {t}: queue of {qmax} words exceeds window {window}")
        still_live = any(not programs[v].halted for v in live)
        step_rounds = max(qmax, window)
        if step_rounds == 0 and still_live:
            step_rounds = 1
        # FIFO drain: the r-th word on a link arrives in round r + 1 of this step
        per_round = [0] * step_rounds if step_rounds else []
        for (src, dst), q in queues.items():
            for r, w in enumerate(q):
                if r >= step_rounds:
                    raise BandwidthFault(f"link {src}->{dst} overran its drain")
                per_round[r] += 1
                if not programs[dst].halted:
                    inbox[dst].setdefault(src, []).append(w)
        # capacity: at most one word per directed link per round
        if per_round and max(per_round) > len(queues):
            raise BandwidthFault("more words in a round than active links")
        metrics.words_total += sum(per_round)
        metrics.peak_link_load = max(metrics.peak_link_load, qmax)
        metrics.rounds += step_rounds
        t += 1
        if not still_live:
            break
        if metrics.rounds > round_limit or (metrics.rounds == round_limit and still_live):
            raise RoundLimitExceeded(metrics, outputs())
        if not queues and schedule is None:
            wakes = [programs[v].wake_at(t) for v in range(n) if not programs[v].halted]
            if wakes and all(w is not None for w in wakes):
                target = min(wakes)  # type: ignore[type-var]
                if target > t:
                    skip = target - t
                    if metrics.rounds + skip > round_limit:
                        metrics.rounds = round_limit
                        raise RoundLimitExceeded(metrics, outputs())
                    metrics.rounds += skip
                    t = target
    return outputs(), metrics


class CliqueNetwork:
    """Charged-mode Congested Clique: broadcast and load-balanced routing."""

    def __init__(self, topology: Topology, c_route: int = C_ROUTE):
        if topology.kind is not TopologyKind.CLIQUE:
            raise TopologyError("clique primitives require a CLIQUE topology")
        self.topology = topology
        self.n = topology.n
        self.c_route = c_route
        self.budget = word_budget(self.n)
        self.metrics = RunMetrics()

    @property
    def input_bit_limit(self) -> int:
        return C_INPUT * self.n * log2_ceil(self.n)

    def broadcast_all(self, values: Sequence[Word]) -> list[Word]:
        """Every node sends one Word to every other node; one round."""
        if len(values) != self.n:
            raise PreconditionViolation("broadcast_all needs one word per node")
        for w in values:
            check_word(w, self.budget)
        if self.n > 1:
            self.metrics.rounds += 1
            self.metrics.words_total += self.n * (self.n - 1)
            self.metrics.peak_link_load = max(self.metrics.peak_link_load, 1)
        self.metrics.broadcast_calls += 1
        return list(values)

    def route_load_balanced(
        self,
        requests: Iterable[tuple[int, int, Word]],
        input_bits_per_source: int,
        max_load: int | None = None,
    ) -> list[list[tuple[int, Word]]]:
        """Deliver (source, target, word) requests; returns per-target inboxes.

        Charges ``c_route * ceil(load / n)`` rounds, where load is the larger of
        the maximum per-source and per-target word counts. ``max_load``,
        when given, is the declared per-target bound in units of n words.
        """
        n = self.n
        if input_bits_per_source > self.input_bit_limit:
            raise PreconditionViolation(
                f"sources derive messages from {input_bits_per_source} bits > {self.input_bit_limit}"
            )
        delivered: list[list[tuple[int, Word]]] = [[] for _ in range(n)]
        sent = [0] * n
        total = 0
        for src, dst, w in requests:
            if not (0 <= src < n and 0 <= dst < n):
                raise PreconditionViolation(f"request ({src}, {dst}) out of range")
            check_word(w, self.budget)
            delivered[dst].append((src, w))
            sent[src] += 1
            total += 1
        self.metrics.routing_calls += 1
        if total == 0:
            return delivered
        load = max(max(len(d) for d in delivered), max(sent))
        if max_load is not None and load > max_load * n:
            raise PreconditionViolation(f"target load {load} exceeds declared bound {max_load}*n")
        charged = self.c_route * math.ceil(load / n)
        if total > n * n * charged // self.c_route:
            raise InvariantFault("charged-routing consistency violated")
        self.metrics.rounds += charged
        self.metrics.charged_routing_rounds += charged
        self.metrics.words_total += total
        return delivered

    def gather_all(
        self,
        items: Sequence[Sequence[Word]],
        input_bits_per_source: int,
        max_load: int | None = None,
    ) -> list[Word]:
        """Route every source's items to every node (a routing call whose
        per-target load is the total item count)."""
        n = self.n
        if len(items) != n:
            raise PreconditionViolation("gather_all needs one item list per node")
        if input_bits_per_source > self.input_bit_limit:
            raise PreconditionViolation(
                f"sources derive messages from {input_bits_per_source} bits > {self.input_bit_limit}"
            )
        flat = [w for src in items for w in src]
        for w in flat:
            check_word(w, self.budget)
        self.metrics.routing_calls += 1
        load = len(flat)
        if load == 0:
            return flat
        if max_load is not None and load > max_load * n:
            raise PreconditionViolation(f"target load {load} exceeds declared bound {max_load}*n")
        charged = self.c_route * math.ceil(load / n)
        self.metrics.rounds += charged
        self.metrics.charged_routing_rounds += charged
        self.metrics.words_total += load * n
        return flat

    def local_round(self, rounds: int = 1) -> None:
        """Charge plain rounds spent on point-to-point messages of at most one word per link."""
        self.metrics.rounds += rounds


def broadcast_all(topology: Topology, values: Sequence[Word]) -> tuple[list[Word], RunMetrics]:
    """Stand-alone broadcast; fails under CONGEST."""
    net = CliqueNetwork(topology)
    return net.broadcast_all(values), net.metrics


def route_load_balanced(
    topology: Topology,
    requests: Iterable[tuple[int, int, Word]],
    input_bits_per_source: int,
    max_load: int | None = None,
) -> tuple[list[list[tuple[int, Word]]], RunMetrics]:
    net = CliqueNetwork(topology)
    return net.route_load_balanced(requests, input_bits_per_source, max_load), net.metrics
