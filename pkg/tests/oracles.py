"""Independent reference implementations used only by the tests."""

from __future__ import annotations

import math
from itertools import combinations

import mpmath
import numpy as np
from scipy.sparse.csgraph import dijkstra


def levy_sigma_oracle(beta: float) -> float:
    mpmath.mp.dps = 50
    b = mpmath.mpf(beta)
    num = mpmath.gamma(1 + b) * mpmath.sin(mpmath.pi * b / 2)
    den = mpmath.gamma((1 + b) / 2) * b * mpmath.power(2, (b - 1) / 2)
    return float(mpmath.power(num / den, 1 / b))


def ranksum_exact_pvalue(a, b) -> float:
    """Two-sided p-value by enumerating every split of the pooled ranks."""
    pooled = np.concatenate([a, b])
    order = np.argsort(pooled, kind="mergesort")
    ranks = np.empty(len(pooled))
    ranks[order] = np.arange(1, len(pooled) + 1)
    # average ranks for ties
    for v in np.unique(pooled):
        m = pooled == v
        ranks[m] = ranks[m].mean()
    n = len(a)
    observed = ranks[:n].sum()
    mean = n * (len(pooled) + 1) / 2.0
    dev = abs(observed - mean)
    total = extreme = 0
    for idx in combinations(range(len(pooled)), n):
        s = ranks[list(idx)].sum()
        total += 1
        if abs(s - mean) >= dev - 1e-9:
            extreme += 1
    return extreme / total


def sampled_segment_distance(p, a, b, samples: int = 1000) -> float:
    """Distance from p to the segment a-b by dense sampling plus a local refinement."""
    p, a, b = (np.asarray(v, float) for v in (p, a, b))
    t = np.linspace(0.0, 1.0, samples)
    pts = a + t[:, None] * (b - a)
    d = np.linalg.norm(pts - p, axis=1)
    i = int(np.argmin(d))
    # golden-section on the bracketing interval
    lo, hi = t[max(i - 1, 0)], t[min(i + 1, samples - 1)]
    f = lambda s: float(np.linalg.norm(a + s * (b - a) - p))
    g = (math.sqrt(5) - 1) / 2
    for _ in range(80):
        c, d_ = hi - g * (hi - lo), lo + g * (hi - lo)
        if f(c) < f(d_):
            hi = d_
        else:
            lo = c
    return min(f(0.5 * (lo + hi)), float(d[i]))


def shortest_clear_route(start, goal, centers, radii, samples: int = 180) -> float:
    """Length of the shortest planar route from start to goal that keeps
    strictly outside every disc, via a visibility graph on points sampled
    just outside each circle."""
    start, goal = np.asarray(start, float)[:2], np.asarray(goal, float)[:2]
    centers = np.asarray(centers, float).reshape(-1, 2)
    radii = np.asarray(radii, float)
    nodes = [start, goal]
    ang = np.linspace(0, 2 * np.pi, samples, endpoint=False)
    for c, r in zip(centers, radii):
        rr = r / math.cos(math.pi / samples) + 1e-6
        nodes.extend(c + rr * np.stack([np.cos(ang), np.sin(ang)], axis=1))
    nodes = np.array(nodes)
    m = len(nodes)
    a = nodes[:, None, None, :]
    b = nodes[None, :, None, :]
    p = centers[None, None, :, :]
    ab = b - a
    denom = np.sum(ab * ab, axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.clip(np.sum((p - a) * ab, axis=-1) / denom, 0, 1)
    t = np.nan_to_num(t)
    d = np.linalg.norm(a + t[..., None] * ab - p, axis=-1)
    clear = np.all(d > radii, axis=-1)
    w = np.linalg.norm(nodes[:, None] - nodes[None], axis=-1)
    graph = np.where(clear, w, 0.0)
    np.fill_diagonal(graph, 0.0)
    dist = dijkstra(graph, directed=False, indices=0)
    return float(dist[1])


def ranksum_exact_pvalue_untied(a, b) -> float:
    """Exact two-sided p-value for tie-free samples.

    Counts the n-subsets of ranks {1..N} by their sum (subset-sum dynamic
    programme), which is the same enumeration as above without listing every
    subset.
    """
    a, b = np.asarray(a, float), np.asarray(b, float)
    pooled = np.concatenate([a, b])
    if len(np.unique(pooled)) != len(pooled):
        raise ValueError("samples contain ties")
    n, total = len(a), len(pooled)
    ranks = np.empty(total, dtype=int)
    ranks[np.argsort(pooled)] = np.arange(1, total + 1)
    observed = int(ranks[:n].sum())
    max_sum = total * (total + 1) // 2
    # ways[k][s]: subsets of size k with rank sum s
    ways = [[0] * (max_sum + 1) for _ in range(n + 1)]
    ways[0][0] = 1
    for r in range(1, total + 1):
        for k in range(min(n, r), 0, -1):
            prev, cur = ways[k - 1], ways[k]
            for s in range(max_sum, r - 1, -1):
                if prev[s - r]:
                    cur[s] += prev[s - r]
    counts = ways[n]
    twice_mean = n * (total + 1)
    dev = abs(2 * observed - twice_mean)
    extreme = sum(c for s, c in enumerate(counts) if c and abs(2 * s - twice_mean) >= dev)
    return extreme / math.comb(total, n)


def sampled_segment_distances(P, A, B, samples: int = 1000, refine: int = 60) -> np.ndarray:
    """Batch version of :func:`sampled_segment_distance`: 1000 evenly spaced
    samples per segment, then golden-section refinement inside the best
    bracket so the result is not limited by the sample spacing."""
    P, A, B = (np.asarray(v, float) for v in (P, A, B))
    t = np.linspace(0.0, 1.0, samples)
    AB = B - A
    pts = A[:, None, :] + t[None, :, None] * AB[:, None, :]
    d = np.linalg.norm(pts - P[:, None, :], axis=-1)
    i = np.argmin(d, axis=1)
    coarse = d[np.arange(len(P)), i]
    lo = t[np.maximum(i - 1, 0)]
    hi = t[np.minimum(i + 1, samples - 1)]

    def f(s):
        return np.linalg.norm(A + s[:, None] * AB - P, axis=-1)

    g = (math.sqrt(5) - 1) / 2
    for _ in range(refine):
        c, e = hi - g * (hi - lo), lo + g * (hi - lo)
        left = f(c) < f(e)
        hi = np.where(left, e, hi)
        lo = np.where(left, lo, c)
    return np.minimum(f(0.5 * (lo + hi)), coarse)
