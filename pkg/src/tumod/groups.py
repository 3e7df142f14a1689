"""Group sparsity structures and their matrix / graph encodings.

A group structure is a weighted collection of (possibly overlapping) index
subsets of the ground set {1..p}.  Member indices are 1-based throughout,
matching the file formats and the documentation; only raw coefficient
arrays use Python's 0-based positions.

Derived encodings:

* ``biadjacency``                p x M 0/1 matrix B, B[i,j]=1 iff i+1 in group j
* ``bipartite_incidence``        one row per (group, member) edge over [omega; s]
* ``intersection_constraint_matrix``  rows s_j <= omega_i for j in group i
* ``intersection_graph``         groups as vertices, labelled overlap edges
* ``refractoriness_matrix``      sliding-window interval matrix D
* ``tree_incidence`` / ``hierarchy_groups``  rooted-tree encodings
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .intmat import IntMatrix, int_matrix


@dataclass(frozen=True)
class GroupStructure:
    """Ground set size ``p``, member index tuples (1-based), positive weights."""

    p: int
    groups: tuple[tuple[int, ...], ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("ground set must be nonempty")
        if len(self.weights) != len(self.groups):
            raise ValueError("one weight per group required")
        for grp in self.groups:
            if not grp:
                raise ValueError("groups must be nonempty")
            if any(not 1 <= i <= self.p for i in grp):
                raise ValueError(f"group member outside 1..{self.p}: {grp}")
            if len(set(grp)) != len(grp):
                raise ValueError(f"duplicate member in group: {grp}")
        if any(w <= 0 for w in self.weights):
            raise ValueError("group weights must be strictly positive")

    @property
    def num_groups(self) -> int:
        return len(self.groups)

    def member_sets(self) -> list[frozenset[int]]:
        return [frozenset(g) for g in self.groups]

    def covers(self, indices: Iterable[int]) -> bool:
        """Whether every 1-based index is contained in at least one group."""
        union = set().union(*self.groups)
        return all(i in union for i in indices)


def group_structure(p: int, groups: Iterable[Iterable[int]],
                    weights: Sequence[float] | None = None) -> GroupStructure:
    gs = tuple(tuple(sorted(set(int(i) for i in g))) for g in groups)
    if weights is None:
        weights = (1.0,) * len(gs)
    return GroupStructure(p, gs, tuple(float(w) for w in weights))


@dataclass(frozen=True)
class TreeStructure:
    """Rooted tree on nodes 1..p; parent[i] is the parent of node i+1, 0 at the root."""

    p: int
    parent: tuple[int, ...]

    def __post_init__(self):
        if self.p < 1 or len(self.parent) != self.p:
            raise ValueError("parent pointer required for every node")
        roots = [i + 1 for i, par in enumerate(self.parent) if par == 0]
        if len(roots) != 1:
            raise ValueError(f"expected exactly one root, found {roots}")
        for i, par in enumerate(self.parent):
            if par != 0 and not 1 <= par <= self.p:
                raise ValueError(f"parent of node {i + 1} out of range: {par}")
            if par == i + 1:
                raise ValueError(f"node {i + 1} is its own parent")
        for node in range(1, self.p + 1):
            seen = set()
            cur = node
            while cur != 0:
                if cur in seen:
                    raise ValueError("cycle in parent pointers")
                seen.add(cur)
                cur = self.parent[cur - 1]

    @property
    def root(self) -> int:
        return next(i + 1 for i, par in enumerate(self.parent) if par == 0)

    def children(self, node: int) -> list[int]:
        return [i + 1 for i, par in enumerate(self.parent) if par == node]

    def descendants(self, node: int) -> set[int]:
        out: set[int] = set()
        stack = self.children(node)
        while stack:
            v = stack.pop()
            out.add(v)
            stack.extend(self.children(v))
        return out


def tree_structure(parents: Sequence[int]) -> TreeStructure:
    return TreeStructure(len(parents), tuple(int(v) for v in parents))


@dataclass(frozen=True)
class IntersectionGraph:
    """Groups as vertices (1-based ids); an edge per overlapping pair, labelled
    by the shared member indices."""

    num_vertices: int
    edges: tuple[tuple[int, int, tuple[int, ...]], ...]

    @property
    def is_acyclic(self) -> bool:
        parent = list(range(self.num_vertices + 1))

        def find(v: int) -> int:
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for i, j, _ in self.edges:
            ri, rj = find(i), find(j)
            if ri == rj:
                return False
            parent[ri] = rj
        return True


def biadjacency(g: GroupStructure) -> IntMatrix:
    """p x M matrix with B[i, j] = 1 iff index i+1 belongs to group j."""
    rows = [[0] * g.num_groups for _ in range(g.p)]
    for j, grp in enumerate(g.groups):
        for i in grp:
            rows[i - 1][j] = 1
    return int_matrix(rows, cols=g.num_groups)


def bipartite_incidence(g: GroupStructure) -> IntMatrix:
    """Edge-node incidence of the bipartite (group, member) graph.

    One row per (group i, member j) pair in group-major order, with ones at
    the group column i and the member column M + j - 1, matching the
    [omega; s] variable layout.
    """
    m = g.num_groups
    rows = []
    for i, grp in enumerate(g.groups):
        for j in grp:
            row = [0] * (m + g.p)
            row[i] = 1
            row[m + j - 1] = 1
            rows.append(row)
    return int_matrix(rows, cols=m + g.p)


def intersection_graph(g: GroupStructure) -> IntersectionGraph:
    sets = g.member_sets()
    edges = []
    for i in range(g.num_groups):
        for j in range(i + 1, g.num_groups):
            shared = sets[i] & sets[j]
            if shared:
                edges.append((i + 1, j + 1, tuple(sorted(shared))))
    return IntersectionGraph(g.num_groups, tuple(edges))


def intersection_constraint_matrix(g: GroupStructure) -> IntMatrix:
    """Rows encoding s_j <= omega_i for every group i and member j.

    Shape (sum of group sizes) x (M + p); every row has a -1 at the group
    column and a +1 at the member column, so the two-nonzero row condition
    certifies total unimodularity.
    """
    m = g.num_groups
    rows = []
    for i, grp in enumerate(g.groups):
        for j in grp:
            row = [0] * (m + g.p)
            row[i] = -1
            row[m + j - 1] = 1
            rows.append(row)
    return int_matrix(rows, cols=m + g.p)


def refractoriness_matrix(p: int, delta: int) -> IntMatrix:
    """Sliding-window matrix: row r has ones in columns r .. r+delta-1.

    Shape (p - delta + 1) x p; always an interval matrix, hence TU.  Encodes
    a minimum spacing of ``delta`` between active coefficients when used as
    a budget B' s <= 1.
    """
    if not 1 <= delta <= p:
        raise ValueError(f"delta must be in 1..{p}, got {delta}")
    rows = []
    for r in range(p - delta + 1):
        row = [0] * p
        row[r:r + delta] = [1] * delta
        rows.append(row)
    return int_matrix(rows, cols=p)


def hierarchy_groups(t: TreeStructure) -> GroupStructure:
    """One group per node: the node together with all of its descendants."""
    groups = []
    for node in range(1, t.p + 1):
        groups.append(sorted({node} | t.descendants(node)))
    return group_structure(t.p, groups)


def tree_incidence(t: TreeStructure) -> IntMatrix:
    """Edge-node incidence of the directed tree: +1 at the parent, -1 at the child.

    One row per edge, ordered by child index; (p-1) x p, and 0 x 1 for a
    single-node tree.  Encodes s_parent >= s_child as T s >= 0.
    """
    rows = []
    for child in range(1, t.p + 1):
        par = t.parent[child - 1]
        if par == 0:
            continue
        row = [0] * t.p
        row[par - 1] = 1
        row[child - 1] = -1
        rows.append(row)
    return IntMatrix(tuple(tuple(r) for r in rows), t.p)


APPENDIX_P = 200
APPENDIX_NUM_GROUPS = 29
APPENDIX_GROUP_SIZE = 10
APPENDIX_STRIDE = 7


def appendix_interval_groups() -> GroupStructure:
    """The 29 interval groups of size 10 with overlap 3 on p=200.

    Group k covers 7(k-1)+1 .. 7(k-1)+10; the last group is clamped at 200
    (the stated counts do not otherwise fit), leaving every consecutive
    overlap at exactly 3 indices.  Unit weights.
    """
    groups = []
    for k in range(APPENDIX_NUM_GROUPS):
        start = APPENDIX_STRIDE * k + 1
        end = min(start + APPENDIX_GROUP_SIZE - 1, APPENDIX_P)
        groups.append(range(start, end + 1))
    return group_structure(APPENDIX_P, groups)


def parse_group_file(text: str) -> GroupStructure:
    """Parse the group file format.

    Line 1 is "p M"; each of the next M lines lists the 1-based members of
    one group, optionally followed by a weight.  A trailing token is read
    as a weight only when it is not a plain integer, so weights must be
    written with a decimal point ("2.0", not "2").
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty group file")
    p, m = (int(tok) for tok in lines[0].split())
    if len(lines) - 1 != m:
        raise ValueError(f"expected {m} group lines, found {len(lines) - 1}")
    groups, weights = [], []
    for ln in lines[1:]:
        toks = ln.split()
        weight = 1.0
        try:
            int(toks[-1])
        except ValueError:
            weight = float(toks[-1])
            toks = toks[:-1]
        groups.append([int(tok) for tok in toks])
        weights.append(weight)
    return group_structure(p, groups, weights)


def format_group_file(g: GroupStructure) -> str:
    lines = [f"{g.p} {g.num_groups}"]
    for grp, w in zip(g.groups, g.weights):
        body = " ".join(str(i) for i in grp)
        lines.append(body if w == 1.0 else f"{body} {w!r}")
    return "\n".join(lines) + "\n"


def read_group_file(path) -> GroupStructure:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_group_file(fh.read())


def write_group_file(path, g: GroupStructure) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_group_file(g))
