"""Community detection on the retweet network.

The directed graph is symmetrized by summing the two edge directions, then
partitioned with the classic two-phase local-moving / aggregation scheme.
Modularity carries a resolution parameter gamma that scales the null-model
term:

    Q = (1/2m) * sum_ij [w_ij - gamma * k_i * k_j / (2m)] * delta(c_i, c_j)

Node visit order is shuffled from an explicit seed, so a run is fully
deterministic given (graph, resolution, seed).  Each aggregation level
records the partition's modularity; the sequence is checked nondecreasing.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import DomainError, InvariantError
from .netgraph import RetweetGraph

_Q_TOL = 1e-12


class UndirectedGraph:
    """Weighted undirected graph; self-loop weight stored once per node.

    Weighted degree counts a self-loop twice, matching the adjacency-matrix
    convention where a loop of weight s contributes 2s to the diagonal.
    """

    __slots__ = ("adj",)

    def __init__(self):
        self.adj: dict[str, dict[str, float]] = {}

    def add_node(self, node: str) -> None:
        if node not in self.adj:
            self.adj[node] = {}

    def add_edge(self, a: str, b: str, weight: float) -> None:
        if weight <= 0:
            raise DomainError("undirected edge weight must be positive")
        self.add_node(a)
        self.add_node(b)
        self.adj[a][b] = self.adj[a].get(b, 0.0) + weight
        if a != b:
            self.adj[b][a] = self.adj[b].get(a, 0.0) + weight

    def nodes(self):
        return self.adj.keys()

    @property
    def node_count(self) -> int:
        return len(self.adj)

    def degree(self, node: str) -> float:
        d = 0.0
        for nbr, w in self.adj[node].items():
            d += 2.0 * w if nbr == node else w
        return d

    @property
    def total_weight(self) -> float:
        """m: each undirected edge counted once, self-loops once."""
        m = 0.0
        for node, nbrs in self.adj.items():
            for nbr, w in nbrs.items():
                if nbr == node:
                    m += w
                elif nbr > node:
                    m += w
        return m


def symmetrize(g: RetweetGraph) -> UndirectedGraph:
    """Undirected weight(i,j) = w(i->j) + w(j->i); node set preserved."""
    ug = UndirectedGraph()
    for node in g.nodes():
        ug.add_node(node)
    for src, dst, w in g.iter_edges():
        ug.adj[src][dst] = ug.adj[src].get(dst, 0.0) + float(w)
        ug.adj[dst][src] = ug.adj[dst].get(src, 0.0) + float(w)
    return ug


@dataclass
class CommunityInfo:
    members: frozenset[str]
    size: int
    mean_polarity: float | None = None


@dataclass
class CommunityPartition:
    assignment: dict[str, int]
    communities: dict[int, CommunityInfo]
    modularity: float | None = None
    q_history: list[float] = field(default_factory=list)
    resolution: float = 1.0
    seed: int = 0
    unscored_members: int = 0
    flagged_communities: list[int] = field(default_factory=list)

    @property
    def n_communities(self) -> int:
        return len(self.communities)

    def members_of(self, cid: int) -> frozenset[str]:
        return self.communities[cid].members

    def largest(self) -> int | None:
        if not self.communities:
            return None
        return min(self.communities, key=lambda c: (-self.communities[c].size, c))

    def check_cover(self, nodes: Iterable[str]) -> None:
        nodes = set(nodes)
        if set(self.assignment) != nodes:
            raise InvariantError("partition does not cover the node set exactly")
        total = sum(info.size for info in self.communities.values())
        if total != len(nodes):
            raise InvariantError("community sizes do not sum to the node count")


def modularity(
    ug: UndirectedGraph,
    assignment: Mapping[str, int],
    resolution: float = 1.0,
) -> float:
    """Resolution-scaled modularity of a partition."""
    if resolution <= 0:
        raise DomainError("resolution must be positive")
    for node in ug.nodes():
        if node not in assignment:
            raise DomainError(f"partition does not cover node {node}")
    two_m = 2.0 * ug.total_weight
    if two_m <= 0:
        raise DomainError("modularity undefined on a graph with zero weight")
    inner: dict[int, float] = {}
    tot: dict[int, float] = {}
    for node, nbrs in ug.adj.items():
        c = assignment[node]
        tot[c] = tot.get(c, 0.0) + ug.degree(node)
        for nbr, w in nbrs.items():
            if nbr == node:
                inner[c] = inner.get(c, 0.0) + 2.0 * w
            elif assignment[nbr] == c:
                inner[c] = inner.get(c, 0.0) + w
    q = 0.0
    for c, t in tot.items():
        q += inner.get(c, 0.0) / two_m - resolution * (t / two_m) ** 2
    return q


class _Level:
    """One aggregation level: integer-indexed adjacency plus move state."""

    def __init__(self, adj: list[dict[int, float]], loops: list[float]):
        self.adj = adj
        self.loops = loops
        self.n = len(adj)
        self.k = [
            sum(w for j, w in adj[i].items()) + 2.0 * loops[i] for i in range(self.n)
        ]
        self.node2com = list(range(self.n))
        self.com_tot = list(self.k)
        self.com_in = [2.0 * loops[i] for i in range(self.n)]

    def neighbor_com_weights(self, i: int) -> dict[int, float]:
        out: dict[int, float] = {}
        n2c = self.node2com
        for j, w in self.adj[i].items():
            c = n2c[j]
            out[c] = out.get(c, 0.0) + w
        return out

    def remove(self, i: int, com: int, w_to_com: float) -> None:
        self.com_tot[com] -= self.k[i]
        self.com_in[com] -= 2.0 * (w_to_com + self.loops[i])
        self.node2com[i] = -1

    def insert(self, i: int, com: int, w_to_com: float) -> None:
        self.com_tot[com] += self.k[i]
        self.com_in[com] += 2.0 * (w_to_com + self.loops[i])
        self.node2com[i] = com

    def one_pass(self, order: list[int], gamma: float, two_m: float) -> bool:
        moved = False
        for i in order:
            com = self.node2com[i]
            neigh = self.neighbor_com_weights(i)
            self.remove(i, com, neigh.get(com, 0.0))
            best_com = com
            best_score = neigh.get(com, 0.0) - gamma * self.com_tot[com] * self.k[i] / two_m
            for c in sorted(neigh):
                if c == com:
                    continue
                score = neigh[c] - gamma * self.com_tot[c] * self.k[i] / two_m
                if score > best_score + _Q_TOL:
                    best_score = score
                    best_com = c
            self.insert(i, best_com, neigh.get(best_com, 0.0))
            if best_com != com:
                moved = True
        return moved

    def q(self, gamma: float, two_m: float) -> float:
        q = 0.0
        for c in set(self.node2com):
            q += self.com_in[c] / two_m - gamma * (self.com_tot[c] / two_m) ** 2
        return q

    def aggregate(self) -> tuple["_Level", list[int]]:
        """Collapse communities into nodes; returns (new level, relabel map)."""
        coms = sorted(set(self.node2com))
        relabel = {c: idx for idx, c in enumerate(coms)}
        mapping = [relabel[c] for c in self.node2com]
        n_new = len(coms)
        adj: list[dict[int, float]] = [{} for _ in range(n_new)]
        loops = [0.0] * n_new
        for i in range(self.n):
            ci = mapping[i]
            loops[ci] += self.loops[i]
            for j, w in self.adj[i].items():
                if j < i:
                    continue
                cj = mapping[j]
                if ci == cj:
                    loops[ci] += w
                else:
                    adj[ci][cj] = adj[ci].get(cj, 0.0) + w
                    adj[cj][ci] = adj[cj].get(ci, 0.0) + w
        return _Level(adj, loops), mapping


def louvain(
    ug: UndirectedGraph,
    resolution: float = 0.1,
    seed: int = 0,
) -> CommunityPartition:
    """Two-phase community detection with seeded node order.

    Local moves repeat until a full pass yields none, then communities are
    aggregated into super-nodes and the process repeats.  Every level's
    modularity is recorded in ``q_history``; a decrease raises
    InvariantError since moves are only taken on strict gain.

    Joining two groups with no connecting weight changes Q by a strictly
    negative amount for any resolution > 0, so communities never span
    disconnected components.
    """
    if resolution <= 0:
        raise DomainError("resolution must be positive")
    names = sorted(ug.nodes())
    if not names:
        return CommunityPartition(
            assignment={}, communities={}, modularity=None, resolution=resolution, seed=seed
        )
    index = {name: i for i, name in enumerate(names)}
    adj: list[dict[int, float]] = [{} for _ in names]
    loops = [0.0] * len(names)
    for a, nbrs in ug.adj.items():
        ia = index[a]
        for b, w in nbrs.items():
            if b == a:
                loops[ia] = w
            else:
                adj[ia][index[b]] = w
    two_m = 2.0 * ug.total_weight
    if two_m <= 0:
        # Edgeless graph: every node is its own community.
        assignment = {name: i for i, name in enumerate(names)}
        return _finalize(assignment, None, [], resolution, seed)

    rng = random.Random(seed)
    level = _Level(adj, loops)
    node_maps: list[list[int]] = []
    q_history = [level.q(resolution, two_m)]

    while True:
        order = list(range(level.n))
        rng.shuffle(order)
        moved_any = False
        while level.one_pass(order, resolution, two_m):
            moved_any = True
        q_now = level.q(resolution, two_m)
        if q_now < q_history[-1] - 1e-9:
            raise InvariantError("modularity decreased across a level")
        if not moved_any:
            break
        q_history.append(q_now)
        level, mapping = level.aggregate()
        node_maps.append(mapping)
        if level.n <= 1:
            break

    assignment: dict[str, int] = {}
    for name in names:
        c = index[name]
        for mapping in node_maps:
            c = mapping[c]
        assignment[name] = c
    return _finalize(assignment, q_history[-1], q_history, resolution, seed)


def _finalize(
    assignment: Mapping[str, int],
    q: float | None,
    q_history: list[float],
    resolution: float,
    seed: int,
) -> CommunityPartition:
    """Relabel communities by decreasing size (ties: smallest member id)."""
    groups: dict[int, list[str]] = {}
    for node, c in assignment.items():
        groups.setdefault(c, []).append(node)
    ordered = sorted(groups.values(), key=lambda members: (-len(members), min(members)))
    final_assignment: dict[str, int] = {}
    communities: dict[int, CommunityInfo] = {}
    for cid, members in enumerate(ordered):
        communities[cid] = CommunityInfo(members=frozenset(members), size=len(members))
        for node in members:
            final_assignment[node] = cid
    return CommunityPartition(
        assignment=final_assignment,
        communities=communities,
        modularity=q,
        q_history=list(q_history),
        resolution=resolution,
        seed=seed,
    )


def community_polarity(
    partition: CommunityPartition,
    scores: Mapping[str, float],
) -> CommunityPartition:
    """Fill each community's mean member polarity.

    Members without a score are excluded from the mean and counted in
    ``unscored_members``; a community with no scored member keeps
    ``mean_polarity=None`` and is listed in ``flagged_communities``.
    """
    unscored = 0
    flagged: list[int] = []
    for cid, info in partition.communities.items():
        acc = 0.0
        n = 0
        # Sorted member order keeps float summation identical across
        # processes regardless of hash randomization.
        for member in sorted(info.members):
            s = scores.get(member)
            if s is None:
                unscored += 1
                continue
            acc += s
            n += 1
        info.mean_polarity = acc / n if n else None
        if n == 0:
            flagged.append(cid)
    partition.unscored_members = unscored
    partition.flagged_communities = sorted(flagged)
    return partition


def filter_communities(
    partition: CommunityPartition, min_size: int = 10
) -> CommunityPartition:
    """Keep communities of at least ``min_size`` members."""
    if min_size < 1:
        raise DomainError("min_size must be a positive integer")
    kept = {
        cid: info for cid, info in partition.communities.items() if info.size >= min_size
    }
    assignment = {
        node: cid for node, cid in partition.assignment.items() if cid in kept
    }
    return CommunityPartition(
        assignment=assignment,
        communities=kept,
        modularity=partition.modularity,
        q_history=list(partition.q_history),
        resolution=partition.resolution,
        seed=partition.seed,
        unscored_members=partition.unscored_members,
        flagged_communities=[c for c in partition.flagged_communities if c in kept],
    )


def write_partition(partition: CommunityPartition, assign_path: str, summary_path: str) -> None:
    with open(assign_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["user_id", "community_id"])
        for node in sorted(partition.assignment):
            w.writerow([node, partition.assignment[node]])
    with open(summary_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["community_id", "size", "mean_polarity"])
        for cid in sorted(partition.communities):
            info = partition.communities[cid]
            pol = "" if info.mean_polarity is None else repr(info.mean_polarity)
            w.writerow([cid, info.size, pol])
