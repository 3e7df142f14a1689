"""Exact evaluation of combinatorial support penalties.

Every penalty here depends on a vector only through its support (indices
with magnitude above ``ZERO_TOL``).  Values are nonnegative floats;
``math.inf`` is the dedicated marker for structurally infeasible supports
(never an arbitrary large number).  NP-hard pieces (set cover) are solved
exactly by enumeration, which is what the size caps protect.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterable, Sequence

import numpy as np

from .groups import GroupStructure, TreeStructure
from .intmat import IntMatrix

ZERO_TOL = 1e-12
COVER_CAP = 20            # max number of groups for exact set-cover search
SUPPORT_CAP = 24          # max support size for the cover bitmask DP
ENUMERATION_CAP = 1 << 22


def support_set(x) -> frozenset[int]:
    """1-based indices of entries with |x_i| > ZERO_TOL."""
    arr = np.asarray(x, dtype=float).ravel()
    return frozenset(int(i) + 1 for i in np.nonzero(np.abs(arr) > ZERO_TOL)[0])


def support_indicator(x) -> np.ndarray:
    """0/1 vector marking the support of x."""
    arr = np.asarray(x, dtype=float).ravel()
    return (np.abs(arr) > ZERO_TOL).astype(float)


def num_nonzeros(x) -> int:
    return len(support_set(x))


def group_intersection_penalty(x, g: GroupStructure) -> float:
    """Total weight of the groups whose members intersect the support."""
    supp = support_set(x)
    return float(sum(w for grp, w in zip(g.member_sets(), g.weights)
                     if grp & supp))


def _min_weight_cover(supp: frozenset[int], sets: Sequence[frozenset[int]],
                      weights: Sequence[float]) -> float:
    """Exact minimum-weight set cover of ``supp`` (inf when uncoverable)."""
    if not supp:
        return 0.0
    useful = [(s & supp, w) for s, w in zip(sets, weights) if s & supp]
    if not useful or frozenset().union(*(s for s, _ in useful)) != supp:
        return math.inf
    if len(supp) > SUPPORT_CAP:
        raise ValueError(f"support too large for exact cover (> {SUPPORT_CAP})")
    order = {idx: bit for bit, idx in enumerate(sorted(supp))}
    full = (1 << len(supp)) - 1
    group_masks = []
    for s, w in useful:
        mask = 0
        for idx in s:
            mask |= 1 << order[idx]
        group_masks.append((mask, w))
    best = np.full(full + 1, np.inf)
    best[0] = 0.0
    for mask in range(full + 1):
        if not np.isfinite(best[mask]):
            continue
        for gmask, w in group_masks:
            nxt = mask | gmask
            if best[mask] + w < best[nxt]:
                best[nxt] = best[mask] + w
    return float(best[full])


def group_cover_penalty(x, g: GroupStructure) -> float:
    """Weight of the minimal weighted cover of the support by groups.

    Exact (exhaustive over covers); requires at most COVER_CAP groups.
    Returns inf when some supported index belongs to no group.
    """
    if g.num_groups > COVER_CAP:
        raise ValueError(f"exact set cover capped at {COVER_CAP} groups")
    return _min_weight_cover(support_set(x), g.member_sets(), g.weights)


def within_group_sparsity_penalty(x, g: GroupStructure,
                                  variant: str = "intersection") -> float:
    """Group penalty where each selected group costs its support count.

    variant="intersection": every group touching the support must be
    selected, so the value is the sum of |support ∩ G| over touching groups.
    variant="cover": groups are chosen to cover the support, each costing
    |support ∩ G|; solved as an exact weighted set cover.
    """
    supp = support_set(x)
    if not supp:
        return 0.0
    sets = g.member_sets()
    costs = [len(s & supp) for s in sets]
    if variant == "intersection":
        return float(sum(c for c in costs if c))
    if variant == "cover":
        if g.num_groups > COVER_CAP:
            raise ValueError(f"exact set cover capped at {COVER_CAP} groups")
        useful_sets = [s for s, c in zip(sets, costs) if c]
        useful_costs = [float(c) for c in costs if c]
        return _min_weight_cover(supp, useful_sets, useful_costs)
    raise ValueError(f"unknown variant {variant!r}")


def min_cover_size(supp: Iterable[int], g: GroupStructure,
                   max_groups: int) -> int | None:
    """Smallest number of groups covering ``supp`` if <= max_groups, else None."""
    supp = frozenset(supp)
    if not supp:
        return 0
    useful = [s & supp for s in g.member_sets() if s & supp]
    if not useful or frozenset().union(*useful) != supp:
        return None
    # drop dominated fragments: keep set-maximal intersections only
    useful = sorted(set(useful), key=len, reverse=True)
    maximal = [s for i, s in enumerate(useful)
               if not any(s < t for t in useful[:i])]
    limit = min(max_groups, len(maximal))
    total = sum(math.comb(len(maximal), k) for k in range(1, limit + 1))
    if total > ENUMERATION_CAP:
        raise ValueError("cover feasibility enumeration too large")
    for k in range(1, limit + 1):
        for combo in itertools.combinations(maximal, k):
            if frozenset().union(*combo) == supp:
                return k
    return None


def sparse_g_cover_penalty(x, g: GroupStructure, num_cover_groups: int) -> float:
    """Support size when the support admits a cover by at most G groups, else inf."""
    if num_cover_groups < 0:
        raise ValueError("group budget must be nonnegative")
    supp = support_set(x)
    if not supp:
        return 0.0
    if num_cover_groups == 0:
        return math.inf
    k = min_cover_size(supp, g, num_cover_groups)
    return float(len(supp)) if k is not None else math.inf


def tree_l0_penalty(x, t: TreeStructure) -> float:
    """Support size when the support is a rooted connected subtree, else inf."""
    supp = support_set(x)
    if any(i > t.p for i in supp):
        raise ValueError("vector longer than the tree")
    for node in supp:
        par = t.parent[node - 1]
        if par != 0 and par not in supp:
            return math.inf
    return float(len(supp))


def knapsack_penalty(x, g: GroupStructure) -> float:
    """0 on the zero vector, 1 when every group holds at most one supported
    index, inf otherwise."""
    supp = support_set(x)
    if not supp:
        return 0.0
    if all(len(s & supp) <= 1 for s in g.member_sets()):
        return 1.0
    return math.inf


def dispersive_l0_penalty(x, bt: IntMatrix) -> float:
    """Support size when every row of B' selects at most one supported index."""
    arr = np.asarray(x, dtype=float).ravel()
    if bt.cols != arr.size:
        raise ValueError(f"budget matrix has {bt.cols} columns, vector has {arr.size}")
    ind = support_indicator(arr)
    if bt.rows and np.max(bt.to_numpy(float) @ ind) > 1 + 1e-9:
        return math.inf
    return float(ind.sum())


def pairwise_dispersive_penalty(x, edges: Iterable[tuple[int, int]]) -> float:
    """Number of graph edges with both endpoints supported (never inf)."""
    supp = support_set(x)
    count = 0
    for i, j in edges:
        if i == j:
            raise ValueError(f"self-loop edge ({i},{j})")
        if i in supp and j in supp:
            count += 1
    return float(count)
