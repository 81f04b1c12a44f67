"""Independent reference implementations used as test oracles.

Everything here deliberately avoids the package's own code paths: direct
dense formulas, exhaustive enumeration, and scipy for the statistical
references.
"""

from __future__ import annotations

import numpy as np
import scipy.stats


def set_partitions(items):
    """Every set partition of ``items`` (Bell-number enumeration)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def direct_modularity(nodes, edges, blocks, gamma=1.0):
    """Q from the dense double-loop definition over ordered node pairs."""
    w = {}
    deg = {n: 0.0 for n in nodes}
    m = 0.0
    for a, b, wt in edges:
        w[(a, b)] = w.get((a, b), 0.0) + wt
        w[(b, a)] = w.get((b, a), 0.0) + wt
        deg[a] += wt
        deg[b] += wt
        m += wt
    com = {}
    for i, block in enumerate(blocks):
        for n in block:
            com[n] = i
    q = 0.0
    for i in nodes:
        for j in nodes:
            if com[i] != com[j]:
                continue
            a_ij = w.get((i, j), 0.0) if i != j else 0.0
            q += a_ij - gamma * deg[i] * deg[j] / (2.0 * m)
    return q / (2.0 * m)


def best_partition_by_enumeration(nodes, edges, gamma=1.0):
    best_q, best_blocks = None, None
    for blocks in set_partitions(list(nodes)):
        q = direct_modularity(nodes, edges, blocks, gamma)
        if best_q is None or q > best_q:
            best_q, best_blocks = q, blocks
    return best_q, sorted(tuple(sorted(b)) for b in best_blocks)


def kruskal_reference(groups):
    res = scipy.stats.kruskal(*groups)
    return float(res.statistic), float(res.pvalue)


def dunn_reference(groups):
    """Dunn z and two-sided p per pair, built on scipy primitives."""
    pooled = np.concatenate([np.asarray(g, dtype=float) for g in groups])
    n = pooled.size
    ranks = scipy.stats.rankdata(pooled)
    _, counts = np.unique(pooled, return_counts=True)
    tie_term = float(np.sum(counts**3 - counts))
    base_var = n * (n + 1) / 12.0 - tie_term / (12.0 * (n - 1))
    mean_ranks = []
    start = 0
    for g in groups:
        k = len(g)
        mean_ranks.append(float(ranks[start : start + k].mean()))
        start += k
    out = {}
    for i in range(len(groups)):
        for j in range(i + 1, len(groups)):
            var = base_var * (1.0 / len(groups[i]) + 1.0 / len(groups[j]))
            z = (mean_ranks[i] - mean_ranks[j]) / np.sqrt(var) if var > 0 else 0.0
            p = min(1.0, 2.0 * float(scipy.stats.norm.sf(abs(z))))
            out[(i, j)] = (float(z), p)
    return out


def categorize_reference(count_russia, count_notsure, count_ukraine, threshold=0.2):
    """Rule reimplementation with explicit fraction comparisons."""
    from fractions import Fraction

    total = count_russia + count_notsure + count_ukraine
    if total <= 1:
        return "Unclassified"
    f_r = Fraction(count_russia, total)
    f_u = Fraction(count_ukraine, total)
    thr = Fraction(threshold).limit_denominator(10**6)
    r_hit = f_r >= thr
    u_hit = f_u >= thr
    if r_hit and u_hit:
        return "Bipartisan"
    if r_hit:
        return "ProRussiaPartisan"
    if u_hit:
        return "ProUkrainePartisan"
    return "NotSure"


def mean_reference(values):
    return float(np.asarray(values, dtype=float).mean())
