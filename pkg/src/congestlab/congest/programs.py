"""CONGEST node programs used by the cycle detectors and the exact girth phases.

Every program exchanges Words of a few ids/counters and runs on a fixed
per-step schedule, so the engine's strict per-link drain is enforced.
Predecessor links of first receipts are kept on the program objects; the
drivers read them afterwards to back-trace witnesses.
"""
from __future__ import annotations

from typing import Sequence

from congestlab.engine import InvariantFault, NodeProgram

Detection = tuple[int, int, int]  # (origin, predecessor on one side, predecessor on the other)


class ColorBfs(NodeProgram):
    """One color-coded BFS trial toward color k from both sides.

    Step 0 exchanges colors. Step 1: initiators (color 0) send their id to
    neighbours colored +1 and -1. Step i+1: a node colored +-i forwards all
    tokens it holds to neighbours colored +-(i+1), unless it is not a
    forwarder or holds more than ``cap(i)`` tokens. At step k+1 a node
    colored k that got the same origin from both sides records a detection.
    """

    def __init__(
        self,
        k: int,
        color: int,
        initiator: bool,
        forwarder: bool,
        caps: Sequence[int] | None,
        light_bound: Sequence[int] | None = None,
    ):
        self.k = k
        self.color = color
        self.initiator = initiator
        self.forwarder = forwarder
        self.caps = caps  # caps[i-1] for distance i; None forwards everything
        self.light_bound = light_bound
        self.nbr_color: dict[int, int] = {}
        self.pred: dict[int, int] = {}
        self.asc: dict[int, int] = {}
        self.desc: dict[int, int] = {}
        self.forwarded = 0

    def _side(self) -> tuple[int, int]:
        """(distance i, direction) of this node's color; direction 0 for k or 0."""
        two_k = 2 * self.k
        c = self.color
        if c == 0 or c == self.k:
            return 0, 0
        if c < self.k:
            return c, 1
        return two_k - c, -1

    def step(self, t, inbox):
        k, two_k = self.k, 2 * self.k
        if t == 0:
            return {u: [(self.color,)] for u in self.links}
        if t == 1:
            for u, words in inbox.items():
                self.nbr_color[u] = words[0][0]
            if self.initiator and self.color == 0:
                targets = [u for u in self.links if self.nbr_color[u] in (1, two_k - 1)]
                return {u: [(self.node,)] for u in targets}
            return None
        # tokens sent at step t-1 arrive now; a node colored +-i hears them at step i+1
        dist, direction = self._side()
        for u, words in sorted(inbox.items()):
            cu = self.nbr_color[u]
            for (origin,) in words:
                if self.color == k:
                    if cu == k - 1:
                        self.asc.setdefault(origin, u)
                    elif cu == k + 1:
                        self.desc.setdefault(origin, u)
                    else:
                        raise InvariantFault(f"token from color {cu} at a color-k node")
                else:
                    expected = (self.color - direction) % two_k
                    if cu != expected:
                        raise InvariantFault(f"token from color {cu}, expected {expected}")
                    self.pred.setdefault(origin, u)
        if self.color == k and t == k + 1:
            both = sorted(set(self.asc) & set(self.desc))
            if both:
                o = both[0]
                self.halt((o, self.asc[o], self.desc[o]))
            else:
                self.halt(None)
            return None
        if t == k + 1:
            self.halt(None)
            return None
        if dist == t - 1 and dist >= 1 and self.pred:
            tokens = sorted(self.pred)
            if self.light_bound is not None and len(tokens) > self.light_bound[dist - 1]:
                raise InvariantFault(
                    f"light congestion: {len(tokens)} tokens at distance {dist} > {self.light_bound[dist - 1]}"
                )
            if not self.forwarder:
                return None
            if self.caps is not None and len(tokens) > self.caps[dist - 1]:
                return None
            nxt = (self.color + direction) % two_k
            targets = [u for u in self.links if self.nbr_color[u] == nxt]
            if targets:
                self.forwarded = len(tokens)
                if self.caps is not None and self.forwarded > self.caps[dist - 1]:
                    raise InvariantFault("token cap exceeded")
                return {u: [(o,) for o in tokens] for u in targets}
        return None


def color_bfs_schedule(windows: Sequence[int]) -> list[int]:
    """Fixed rounds per step; the final (halting) step costs nothing."""
    return list(windows) + [0]


class SelfCheckBfs(NodeProgram):
    """Color-BFS from each sampled node that may only cross edges to color c+1 (mod 2k).

    A token visits color c(s)+i at step i+1 and can only come back to s
    after exactly 2k hops, closing a 2k-cycle through s. Several sources
    (possible under priority sampling) run side by side, one token each.
    """

    def __init__(self, k: int, color: int, is_source: bool):
        self.k = k
        self.color = color
        self.is_source = is_source
        self.nbr_color: dict[int, int] = {}
        self.pred: dict[int, int] = {}
        self.returned_from: int | None = None

    def step(self, t, inbox):
        two_k = 2 * self.k
        nxt = (self.color + 1) % two_k
        if t == 0:
            return {u: [(self.color,)] for u in self.links}
        if t == 1:
            for u, words in inbox.items():
                self.nbr_color[u] = words[0][0]
            if self.is_source:
                return {u: [(self.node,)] for u in self.links if self.nbr_color[u] == nxt}
            return None
        fresh = []
        for u in sorted(inbox):
            for (origin,) in inbox[u]:
                if origin == self.node:
                    if t == two_k + 1 and self.returned_from is None:
                        self.returned_from = u
                elif origin not in self.pred:
                    self.pred[origin] = u
                    fresh.append(origin)
        if t == two_k + 1:
            self.halt(self.returned_from)
            return None
        if not fresh:
            return None
        words = [(o,) for o in sorted(fresh)]
        return {u: words for u in self.links if self.nbr_color[u] == nxt}


class MinFlood(NodeProgram):
    """Flood the minimum priority for ``horizon`` rounds, then S informs N(S).

    Output: (pmin, is_sampled, neighbour_of_sampled).
    """

    def __init__(self, priority: int, horizon: int):
        self.priority = priority
        self.pmin = priority
        self.horizon = horizon
        self.dirty = True
        self.is_s = False
        self.is_ns = False

    def wake_at(self, t):
        if self.dirty:
            return None
        return self.horizon if t <= self.horizon else None

    def step(self, t, inbox):
        if t < self.horizon:
            for words in inbox.values():
                for (p,) in words:
                    if p < self.pmin:
                        self.pmin = p
                        self.dirty = True
            if self.dirty:
                self.dirty = False
                return {u: [(self.pmin,)] for u in self.links}
            return None
        if t == self.horizon:
            for words in inbox.values():
                for (p,) in words:
                    self.pmin = min(self.pmin, p)
            self.dirty = True
            if self.pmin == self.priority:
                self.is_s = True
                return {u: [(1,)] for u in self.links}
            return None
        self.is_ns = bool(inbox)
        self.halt((self.pmin, self.is_s, self.is_ns))
        return None


class _Receipts:
    """Per-origin receipt log for the floor/ceil double-receipt rule."""

    def __init__(self, k: int):
        self.lo, self.hi = k // 2, (k + 1) // 2
        self.log: dict[int, list[tuple[int, int]]] = {}
        self.detection: Detection | None = None

    def add(self, origin: int, hops: int, sender: int) -> None:
        entries = self.log.setdefault(origin, [])
        if self.detection is None:
            for h, w in entries:
                if w != sender and sorted((h, hops)) == [self.lo, self.hi]:
                    a, b = (w, sender) if h == self.lo else (sender, w)
                    self.detection = (origin, a, b)
                    break
        if len(entries) < 4:
            entries.append((hops, sender))


class GirthLightBfs(NodeProgram):
    """Depth-ceil(k/2) BFS from every participating (low-degree) node.

    Tokens are (origin, hops). A participant forwards each origin once, at
    first receipt, to every neighbour it did not hear that origin from.
    """

    def __init__(self, k: int, participant: bool, window_bound: Sequence[int]):
        self.k = k
        self.depth = (k + 1) // 2
        self.participant = participant
        self.window_bound = window_bound
        self.receipts = _Receipts(k)
        self.pred: dict[int, int] = {}

    def step(self, t, inbox):
        if t == 0:
            if self.participant:
                return {u: [(self.node, 1)] for u in self.links}
            return None
        fresh: dict[int, tuple[int, list[int]]] = {}
        for u, words in sorted(inbox.items()):
            for origin, hops in words:
                if origin == self.node:
                    continue
                self.receipts.add(origin, hops, u)
                if origin not in self.pred:
                    fresh.setdefault(origin, (hops, []))[1].append(u)
        for origin, (_, senders) in fresh.items():
            self.pred[origin] = senders[0]
        if self.receipts.detection is not None or t >= self.depth:
            self.halt(self.receipts.detection)
            return None
        if not self.participant or not fresh:
            return None
        if len(fresh) > self.window_bound[t]:
            raise InvariantFault(f"girth light step {t}: {len(fresh)} tokens > window {self.window_bound[t]}")
        out: dict[int, list[tuple[int, int]]] = {}
        for origin in sorted(fresh):
            hops, senders = fresh[origin]
            for u in self.links:
                if u not in senders:
                    out.setdefault(u, []).append((origin, hops + 1))
        return out


class GirthSelfBfs(NodeProgram):
    """k-round BFS from s. A node hearing s's token from a second neighbour with
    first-receipt distance a and second hop count b, a + b <= k, echoes back
    along its predecessor chain; s halts on an echo or on its own token."""

    def __init__(self, k: int, is_source: bool):
        self.k = k
        self.is_source = is_source
        self.dist: int | None = 0 if is_source else None
        self.pred: int | None = None
        self.closing: tuple[int, int] | None = None  # (second sender, its hop count)
        self.echoed = False
        self.detected: int | None = None

    def step(self, t, inbox):
        k = self.k
        if t == 0:
            if self.is_source:
                return {u: [(0, 1)] for u in self.links}
            return None
        out: dict[int, list[tuple[int, int]]] = {}
        tokens = sorted((w[1], u) for u, words in inbox.items() for w in words if w[0] == 0)
        echo = any(w[0] == 1 for words in inbox.values() for w in words)
        if self.is_source:
            if tokens and self.detected is None:
                self.detected = tokens[0][1]
                self.closing = (tokens[0][1], tokens[0][0])
            if echo and self.detected is None:
                self.detected = -1
            if self.detected is not None or t >= k:
                self.halt(self.detected)
            return None
        if echo and not self.echoed and self.pred is not None:
            self.echoed = True
            out.setdefault(self.pred, []).append((1, 0))
        if tokens:
            if self.dist is None:
                hops, first = tokens[0]
                self.dist, self.pred = hops, first
                senders = {u for _, u in tokens}
                if hops + 1 <= k - 1:
                    for u in self.links:
                        if u not in senders:
                            out.setdefault(u, []).append((0, hops + 1))
                rest = [(h, u) for h, u in tokens if u != first]
            else:
                rest = [(h, u) for h, u in tokens if u != self.pred]
            for hops, u in rest:
                if self.closing is None and self.dist + hops <= k:
                    self.closing = (u, hops)
                    if not self.echoed:
                        self.echoed = True
                        out.setdefault(self.pred, []).append((1, 0))
        if t >= k:
            self.halt(None)
            return None
        return out or None


class GirthNeighborBfs(NodeProgram):
    """Depth-ceil(k/2) BFS from every neighbour of s; each node forwards one token."""

    def __init__(self, k: int, initiator: bool):
        self.k = k
        self.depth = (k + 1) // 2
        self.initiator = initiator
        self.spent = initiator
        self.receipts = _Receipts(k)
        self.pred: dict[int, int] = {}

    def step(self, t, inbox):
        if t == 0:
            if self.initiator:
                return {u: [(self.node, 1)] for u in self.links}
            return None
        arrivals: list[tuple[int, int, int]] = []
        for u, words in sorted(inbox.items()):
            for origin, hops in words:
                if origin == self.node:
                    continue
                self.receipts.add(origin, hops, u)
                self.pred.setdefault(origin, u)
                arrivals.append((origin, hops, u))
        if self.receipts.detection is not None or t >= self.depth:
            self.halt(self.receipts.detection)
            return None
        if self.spent or not arrivals:
            return None
        self.spent = True
        origin, hops, _ = min(arrivals)
        senders = {u for o, _, u in arrivals if o == origin}
        return {u: [(origin, hops + 1)] for u in self.links if u not in senders}


class TriangleExchange(NodeProgram):
    """Each node streams its neighbour list to every neighbour, then checks
    for a common neighbour. Output: (v, w) closing a triangle, or None."""

    def step(self, t, inbox):
        if t == 0:
            words = [(u,) for u in self.links]
            return {u: words for u in self.links}
        mine = set(self.links)
        found = None
        for v in sorted(inbox):
            for (w,) in inbox[v]:
                if w != self.node and w in mine:
                    found = (v, w)
                    break
            if found:
                break
        self.halt(found)
        return None


__all__ = [
    "ColorBfs",
    "SelfCheckBfs",
    "MinFlood",
    "GirthLightBfs",
    "GirthSelfBfs",
    "GirthNeighborBfs",
    "TriangleExchange",
    "color_bfs_schedule",
]
