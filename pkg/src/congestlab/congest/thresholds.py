"""Token caps, step windows and repetition budgets for the CONGEST detectors."""
from __future__ import annotations

import math


K_RANGE = (2, 3, 4, 5)

# T_k(i) for i = 1..k-1: the most tokens a node at color distance i may forward.
# T_5 follows the disjoint-path recurrence T(i) = (p_i + 1) * sum_{j<i} T(j)
# with path bounds p = (100, 10, 4) for i = 2, 3, 4.
THRESHOLDS: dict[int, tuple[int, ...]] = {
    2: (1,),
    3: (3, 3),
    4: (5, 30, 36),
    5: (101, 10201, 113322, 618120),
}

T5_PATH_BOUNDS = (100, 10, 4)

R_FACTOR = 3


def check_k(k: int) -> None:
    if k not in K_RANGE:
        raise ValueError(f"k must be one of {K_RANGE}, got {k}")


def threshold(k: int, i: int) -> int:
    """T_k(|i|) for a node whose color is +-i."""
    check_k(k)
    i = abs(i)
    if not 1 <= i <= k - 1:
        raise ValueError(f"threshold index {i} outside 1..{k - 1}")
    return THRESHOLDS[k][i - 1]


def derive_t5(first: int = 101, bounds: tuple[int, ...] = T5_PATH_BOUNDS) -> tuple[int, ...]:
    out = [first]
    for p in bounds:
        out.append((p + 1) * sum(out))
    return tuple(out)


def iroot_ceil(n: int, num: int, den: int) -> int:
    """ceil(n^(num/den)) computed exactly: the least w with w^den >= n^num."""
    if num == 0:
        return 1
    target = n**num
    w = max(1, int(round(target ** (1.0 / den))))
    while w**den < target:
        w += 1
    while w > 1 and (w - 1) ** den >= target:
        w -= 1
    return w


def is_light(deg: int, n: int, k: int) -> bool:
    """deg <= n^(1/k), i.e. deg^k <= n."""
    return deg**k <= n


def light_window(n: int, k: int, i: int) -> int:
    """Rounds for the light color-BFS step where colors +-i forward: ceil(n^(i/k))."""
    return iroot_ceil(n, i, k)


def light_trials(k: int) -> int:
    """R = 3 (2k)^(2k) light trials (also the self-check repetitions)."""
    return R_FACTOR * (2 * k) ** (2 * k)


def heavy_iterations(n: int, k: int) -> int:
    """R' = 3 (2k)^(2k) ceil(n^(1-1/k)) heavy iterations."""
    return R_FACTOR * (2 * k) ** (2 * k) * iroot_ceil(n, k - 1, k)


def light_schedule(n: int, k: int) -> list[int]:
    """Rounds per logical step of one light trial: color exchange, then k BFS steps."""
    return [1] + [light_window(n, k, i) for i in range(k)]


def heavy_schedule(k: int) -> list[int]:
    """Color exchange, emission from N(s), then capped forwarding at distances 1..k-1."""
    return [1, 1] + [threshold(k, i) for i in range(1, k)]


def self_check_rounds(k: int) -> int:
    """One color-BFS run from s: color exchange plus 2k hops."""
    return 1 + 2 * k


def priority_rounds(k: int, iterations: int) -> int:
    """Flooding horizon 2 R R' plus the round in which S informs its neighbours."""
    return 2 * light_trials(k) * iterations + 1


def girth_delta(k: int) -> tuple[int, int]:
    """delta_k = 1 / floor(k/2) as a (num, den) pair."""
    return 1, k // 2


def girth_light_degree_ok(deg: int, n: int, k: int) -> bool:
    num, den = girth_delta(k)
    return deg**den <= n**num


def girth_light_window(n: int, k: int, h: int) -> int:
    """Rounds for girth light-BFS step h (tokens already h-1 hops old)."""
    num, den = girth_delta(k)
    return min(n, iroot_ceil(n, num * (h - 1), den))


def girth_heavy_samples(n: int, k: int) -> int:
    """ceil(n^(1 - delta_k) * log2 n)."""
    num, den = girth_delta(k)
    return math.ceil(n ** (1 - num / den) * math.log2(max(n, 2)))
