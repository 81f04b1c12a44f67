"""Weighted directed retweet network.

Edge direction follows the retweet flow: edge (i -> j) with weight w means
user i was retweeted by user j exactly w times.  Consequently, in-edges of
a node are the retweets that node *made*, and:

* ``predecessors(i)`` - users i retweeted (retweetees),
* ``successors(i)``   - users who retweeted i (retweeters).

The adjacency matrix convention used in formulas is A[i][j] = weight of
edge (j, i), so k_i = sum_j A[i][j] equals the weighted in-degree of i,
the number of retweets i made.  The matrix is documentation only; storage
is adjacency dicts in both directions, sized for millions of edges.
"""

from __future__ import annotations

import csv
import logging
import os
from typing import Iterable, Mapping

from .errors import DomainError, InputError
from .ingest import TweetRecord

logger = logging.getLogger(__name__)


class RetweetGraph:
    """Weighted simple digraph without self-loops.

    Mutable during construction via :meth:`add_edge` / :meth:`add_node`;
    treated as immutable by every query and analysis afterwards.
    """

    __slots__ = ("_out", "_in", "_win", "_wout", "skipped_references", "self_retweets")

    def __init__(self):
        self._out: dict[str, dict[str, int]] = {}
        self._in: dict[str, dict[str, int]] = {}
        self._win: dict[str, int] = {}
        self._wout: dict[str, int] = {}
        self.skipped_references = 0
        self.self_retweets = 0

    # -- construction ------------------------------------------------

    def add_node(self, node: str) -> None:
        if node not in self._out:
            self._out[node] = {}
            self._in[node] = {}
            self._win[node] = 0
            self._wout[node] = 0

    def add_edge(self, src: str, dst: str, weight: int = 1) -> None:
        if src == dst:
            raise DomainError(f"self-loop rejected: {src}")
        if weight < 1:
            raise DomainError(f"edge weight must be >= 1, got {weight}")
        self.add_node(src)
        self.add_node(dst)
        self._out[src][dst] = self._out[src].get(dst, 0) + weight
        self._in[dst][src] = self._in[dst].get(src, 0) + weight
        self._wout[src] += weight
        self._win[dst] += weight

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[str, str, int]]) -> "RetweetGraph":
        g = cls()
        for src, dst, w in edges:
            g.add_edge(src, dst, w)
        return g

    # -- queries -----------------------------------------------------

    def __contains__(self, node: str) -> bool:
        return node in self._out

    def nodes(self):
        return self._out.keys()

    @property
    def node_count(self) -> int:
        return len(self._out)

    @property
    def edge_count(self) -> int:
        return sum(len(d) for d in self._out.values())

    @property
    def total_weight(self) -> int:
        return sum(self._wout.values())

    def _require(self, node: str) -> None:
        if node not in self._out:
            raise DomainError(f"unknown node: {node}")

    def edge_weight(self, src: str, dst: str) -> int:
        return self._out.get(src, {}).get(dst, 0)

    def out_edges(self, node: str) -> Mapping[str, int]:
        self._require(node)
        return self._out[node]

    def in_edges(self, node: str) -> Mapping[str, int]:
        self._require(node)
        return self._in[node]

    def predecessors(self, node: str) -> set[str]:
        """Users this node retweeted."""
        self._require(node)
        return set(self._in[node])

    def successors(self, node: str) -> set[str]:
        """Users who retweeted this node."""
        self._require(node)
        return set(self._out[node])

    def weighted_in_degree(self, node: str) -> int:
        self._require(node)
        return self._win[node]

    def weighted_out_degree(self, node: str) -> int:
        self._require(node)
        return self._wout[node]

    def degrees(self, node: str) -> tuple[int, int, int]:
        """(weighted in, weighted out, unweighted total edge count)."""
        self._require(node)
        return (
            self._win[node],
            self._wout[node],
            len(self._in[node]) + len(self._out[node]),
        )

    def iter_edges(self):
        for src, nbrs in self._out.items():
            for dst, w in nbrs.items():
                yield src, dst, w

    # -- derived graphs ----------------------------------------------

    def induced(self, keep) -> "RetweetGraph":
        """Subgraph on the given node set."""
        keep = set(keep)
        g = RetweetGraph()
        for node in self._out:
            if node in keep:
                g.add_node(node)
        for src, dst, w in self.iter_edges():
            if src in keep and dst in keep:
                g.add_edge(src, dst, w)
        return g

    def without_nodes(self, drop) -> "RetweetGraph":
        drop = set(drop)
        return self.induced(n for n in self._out if n not in drop)

    def check_degree_caches(self) -> None:
        """Recompute degrees from edges and compare with the caches."""
        win = {n: 0 for n in self._out}
        wout = {n: 0 for n in self._out}
        for src, dst, w in self.iter_edges():
            wout[src] += w
            win[dst] += w
        if win != self._win or wout != self._wout:
            from .errors import InvariantError

            raise InvariantError("degree caches diverge from edge recomputation")


def build_graph(
    records: Iterable[TweetRecord],
    tweet_author: Mapping[str, str],
) -> RetweetGraph:
    """Build the retweet network from records.

    Every record's author becomes a node.  Each retweet by user j of a
    tweet authored by i adds 1 to edge (i -> j).  Self-retweets are
    dropped; references that ``tweet_author`` cannot resolve are counted
    on the returned graph as ``skipped_references``.
    """
    g = RetweetGraph()
    for rec in records:
        g.add_node(rec.author_id)
        if rec.referenced_tweet_id is None:
            continue
        src_author = tweet_author.get(rec.referenced_tweet_id)
        if src_author is None:
            g.skipped_references += 1
            continue
        if src_author == rec.author_id:
            g.self_retweets += 1
            continue
        g.add_edge(src_author, rec.author_id, 1)
    if g.skipped_references:
        logger.info("build_graph: %d unresolvable references skipped", g.skipped_references)
    return g


def filter_active(g: RetweetGraph, min_w: int = 2) -> RetweetGraph:
    """Induced subgraph on nodes with weighted in- or out-degree >= min_w.

    Degrees are measured once on the input graph; the filter is not
    iterated.
    """
    if min_w < 1:
        raise DomainError("min_w must be a positive integer")
    keep = [
        n
        for n in g.nodes()
        if g.weighted_in_degree(n) >= min_w or g.weighted_out_degree(n) >= min_w
    ]
    return g.induced(keep)


def neighborhood_polarity(
    g: RetweetGraph,
    scores: Mapping[str, float],
    min_in_neighbors: int = 1,
) -> dict[str, float]:
    """Retweet-weighted mean polarity of the users each node retweeted.

    For node i with weighted in-degree k_i > 0 this is
    (1/k_i) * sum_j w(j->i) * scores[j].  Nodes that made fewer than
    ``min_in_neighbors`` distinct retweets are absent from the result.
    A missing score for a needed neighbor is a domain error naming the
    neighbor.
    """
    if min_in_neighbors < 1:
        raise DomainError("min_in_neighbors must be >= 1")
    out: dict[str, float] = {}
    for node in g.nodes():
        in_edges = g.in_edges(node)
        if len(in_edges) < min_in_neighbors:
            continue
        k = g.weighted_in_degree(node)
        if k == 0:
            continue
        acc = 0.0
        for nbr, w in in_edges.items():
            try:
                acc += w * scores[nbr]
            except KeyError:
                raise DomainError(
                    f"no polarity score for neighbor {nbr} of node {node}"
                ) from None
        out[node] = acc / k
    return out


# -- persistence -----------------------------------------------------


def save_graph(g: RetweetGraph, out_dir: str) -> tuple[str, str]:
    """Write edge and node CSVs (atomically); returns the two paths."""
    os.makedirs(out_dir, exist_ok=True)
    edges_path = os.path.join(out_dir, "edges.csv")
    nodes_path = os.path.join(out_dir, "nodes.csv")
    with open(edges_path + ".tmp", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["src", "dst", "weight"])
        for src in sorted(g.nodes()):
            for dst in sorted(g.out_edges(src)):
                w.writerow([src, dst, g.edge_weight(src, dst)])
    with open(nodes_path + ".tmp", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["node", "weighted_in", "weighted_out", "degree"])
        for node in sorted(g.nodes()):
            win, wout, deg = g.degrees(node)
            w.writerow([node, win, wout, deg])
    os.replace(edges_path + ".tmp", edges_path)
    os.replace(nodes_path + ".tmp", nodes_path)
    return edges_path, nodes_path


def load_graph(graph_dir: str) -> RetweetGraph:
    edges_path = os.path.join(graph_dir, "edges.csv")
    nodes_path = os.path.join(graph_dir, "nodes.csv")
    if not os.path.exists(edges_path):
        raise InputError(f"no edge list at {edges_path}")
    g = RetweetGraph()
    if os.path.exists(nodes_path):
        with open(nodes_path, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                g.add_node(row["node"])
    with open(edges_path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            g.add_edge(row["src"], row["dst"], int(row["weight"]))
    return g
