"""Turan-type edge bounds, evaluated exactly in integer arithmetic."""
from __future__ import annotations

import math
from typing import Literal

SPARSE: Literal["sparse"] = "sparse"


def turan_c2k_bound_exceeded(n: int, m: int, k: int) -> bool:
    """m > 17 k n^{1+1/k}, i.e. m^k > (17k)^k n^{k+1} (both sides nonnegative)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if n <= 0:
        return m > 0
    return m**k > (17 * k) ** k * n ** (k + 1)


def turan_c2k_gate(n: int, m: int, k: int) -> bool:
    """True iff m exceeds 17 k n^{1+1/k}; a true answer guarantees a 2k-cycle."""
    return turan_c2k_bound_exceeded(n, m, k)


def girth_bound_holds(n: int, m: int, k: int) -> bool:
    """m <= n^{1+1/k} + n, i.e. (m - n)^k <= n^{k+1}."""
    if m <= n:
        return True
    return (m - n) ** k <= n ** (k + 1)


def girth_turan_k(n: int, m: int) -> int | Literal["sparse"]:
    """Largest k with m <= n^{1+1/k} + n, or ``SPARSE`` once k exceeds log2(n)/2.

    Graphs with m <= n have every k satisfying the bound; they are sparse.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    half_log = math.log2(n) / 2
    if m <= n:
        return SPARSE
    # the bound is monotone decreasing in k, so scan upward until it fails
    cap = max(2, math.ceil(math.log2(n)) + 2)
    k = 0
    for cand in range(1, cap + 1):
        if girth_bound_holds(n, m, cand):
            k = cand
        else:
            break
    else:
        return SPARSE
    if k > half_log:
        return SPARSE
    return k
