"""Grouping mirror pairs by shared symmetry axis.

Two pairs agree when reflecting either pair's curve by the *other* pair's
transform still matches that pair's partner normals.  Agreeing pairs form an
unweighted graph whose cliques are the per-axis clusters; cliques are peeled
off one at a time as independent sets of the complement graph, which come
from a vertex cover obtained through the half-integral LP relaxation:

* the LP optimum is computed exactly on the bipartite double cover (its
  value is half the maximum matching there, by Koenig duality);
* variables split into 0 / 1 / one-half classes; the 1-class enters the
  cover, the 0-class never does, and the half-class is resolved by a
  deterministic max-degree greedy cover of the subgraph it induces (plain
  0.5-rounding keeps every half variable, which can leave an empty
  independent set; any subset cover of the half class preserves both
  validity and the 2-approximation bound);
* the resulting independent set is verified to be a clique of the original
  graph, greedily dropping the lowest-degree violating vertex if not.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from symmpix.geometry import reflect_vectors
from symmpix.kernels import hopcroft_karp
from symmpix.pairs import CandidatePair

__all__ = [
    "PairGraph",
    "PairCluster",
    "VertexCoverLP",
    "build_pair_graph",
    "pair_agreement_score",
    "complement_graph",
    "min_vertex_cover_lp",
    "extract_cliques",
    "split_lr",
    "clusters_to_json",
]


@dataclass
class PairGraph:
    """Simple undirected graph over candidate pairs (boolean adjacency)."""

    adjacency: np.ndarray  # (n, n) bool, symmetric, zero diagonal
    pairs: list[CandidatePair] = field(default_factory=list)

    @property
    def n_vertices(self) -> int:
        return self.adjacency.shape[0]

    @property
    def n_edges(self) -> int:
        return int(np.triu(self.adjacency, 1).sum())

    def edge_list(self) -> np.ndarray:
        iu, ju = np.nonzero(np.triu(self.adjacency, 1))
        return np.column_stack([iu, ju]).astype(np.int64)


@dataclass
class PairCluster:
    """Pairs sharing one symmetry axis (a clique of the source graph)."""

    cluster_id: int
    members: list[CandidatePair]
    vertex_ids: np.ndarray


def pair_agreement_score(pi: CandidatePair, pj: CandidatePair) -> float:
    """Cross-agreement of two pairs: reflect pair i's curve with pair j's
    transform and compare against pair i's partner normals, plus the mirror
    term.  2 when both pairs lie on the same axis."""
    if pi.ci is None or pi.cj is None or pj.ci is None or pj.cj is None:
        raise ValueError("pairs must carry their curves")
    ref_i_by_j = reflect_vectors(pj.transform, pi.ci.normals)
    term_i = float(np.mean(np.einsum("ij,ij->i", ref_i_by_j, pi.cj.normals)))
    ref_j_by_i = reflect_vectors(pi.transform, pj.ci.normals)
    term_j = float(np.mean(np.einsum("ij,ij->i", ref_j_by_i, pj.cj.normals)))
    return abs(term_i) + abs(term_j)


def build_pair_graph(pairs: list[CandidatePair], tau: float) -> PairGraph:
    """Edge iff the mutual reflection test exceeds 2*tau.

    Uses the algebraic identity  mean_a (M n(a)) . n'(a) = <M, G>  with
    G = mean_a outer(n(a), n'(a)), so each vertex contributes two numbers
    and the whole graph costs O(n p + n^2).
    """
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must be in (0, 1)")
    n = len(pairs)
    adj = np.zeros((n, n), dtype=bool)
    if n >= 2:
        feats_u = np.empty(n)
        feats_v = np.empty(n)
        c2 = np.empty(n)
        s2 = np.empty(n)
        for k, pr in enumerate(pairs):
            if pr.ci is None or pr.cj is None or pr.ci.normals is None:
                raise ValueError("pairs must carry curves with normals")
            g = pr.ci.normals.T @ pr.cj.normals / len(pr.ci.normals)
            feats_u[k] = g[0, 0] - g[1, 1]
            feats_v[k] = g[0, 1] + g[1, 0]
            c2[k] = np.cos(2.0 * pr.transform.theta)
            s2[k] = np.sin(2.0 * pr.transform.theta)
        # term[i, j] = mean (M_j n_i) . n'_i: vertex i's feature against
        # vertex j's reflection matrix
        term = np.abs(feats_u[:, None] * c2[None, :] + feats_v[:, None] * s2[None, :])
        score = term + term.T
        adj = score > 2.0 * tau
        np.fill_diagonal(adj, False)
    return PairGraph(adjacency=adj, pairs=list(pairs))


def complement_graph(g: PairGraph) -> PairGraph:
    comp = ~g.adjacency
    np.fill_diagonal(comp, False)
    return PairGraph(adjacency=comp, pairs=g.pairs)


@dataclass
class VertexCoverLP:
    """LP relaxation outcome: exact optimum plus a rounded integral cover."""

    cover: np.ndarray  # sorted vertex indices
    lp_objective: float
    x: np.ndarray  # half-integral optimum, values in {0, 0.5, 1}

    def is_valid_cover(self, g: PairGraph) -> bool:
        in_cover = np.zeros(g.n_vertices, dtype=bool)
        in_cover[self.cover] = True
        for u, v in g.edge_list():
            if not (in_cover[u] or in_cover[v]):
                return False
        return True


def _greedy_cover(adj: np.ndarray) -> np.ndarray:
    """Deterministic max-degree greedy vertex cover of a boolean adjacency."""
    work = adj.copy()
    n = work.shape[0]
    cover = np.zeros(n, dtype=bool)
    degrees = work.sum(axis=1)
    while degrees.max(initial=0) > 0:
        v = int(np.argmax(degrees))  # ties: lowest index
        cover[v] = True
        work[v, :] = False
        work[:, v] = False
        degrees = work.sum(axis=1)
    return np.nonzero(cover)[0]


def min_vertex_cover_lp(g: PairGraph) -> VertexCoverLP:
    """Exact LP optimum via the bipartite double cover, then a rounded cover.

    Every returned cover is valid and at most twice the integral optimum;
    the LP objective never exceeds the integral optimum.
    """
    n = g.n_vertices
    edges = g.edge_list()
    if n == 0 or len(edges) == 0:
        return VertexCoverLP(cover=np.empty(0, dtype=np.int64), lp_objective=0.0, x=np.zeros(n))

    # bipartite double cover: each vertex appears on both sides; each edge
    # (u, v) becomes uL-vR and vL-uR
    heads = [[] for _ in range(n)]
    for u, v in edges:
        heads[u].append(v)
        heads[v].append(u)
    indptr = np.zeros(n + 1, dtype=np.int64)
    for u in range(n):
        heads[u].sort()
        indptr[u + 1] = indptr[u] + len(heads[u])
    indices = np.concatenate([np.array(hs, dtype=np.int64) for hs in heads]) if n else np.empty(0, np.int64)

    match_l, match_r = hopcroft_karp(indptr, indices, n, n)
    matching_size = int(np.count_nonzero(match_l >= 0))
    lp_objective = matching_size / 2.0

    # Koenig: alternating reachability from unmatched left vertices
    z_left = np.zeros(n, dtype=bool)
    z_right = np.zeros(n, dtype=bool)
    stack = [u for u in range(n) if match_l[u] == -1]
    for u in stack:
        z_left[u] = True
    while stack:
        u = stack.pop()
        for e in range(indptr[u], indptr[u + 1]):
            v = int(indices[e])
            if match_l[u] == v or z_right[v]:
                continue
            z_right[v] = True
            w = int(match_r[v])
            if w >= 0 and not z_left[w]:
                z_left[w] = True
                stack.append(w)
    cover_l = ~z_left  # L \ Z
    cover_r = z_right  # R intersect Z
    x = (cover_l.astype(np.float64) + cover_r.astype(np.float64)) / 2.0

    ones = np.nonzero(x >= 1.0)[0]
    halves = np.nonzero(x == 0.5)[0]
    half_cover = np.empty(0, dtype=np.int64)
    if len(halves) > 0:
        sub = g.adjacency[np.ix_(halves, halves)]
        half_cover = halves[_greedy_cover(sub)]
    cover = np.unique(np.concatenate([ones, half_cover]))
    return VertexCoverLP(cover=cover, lp_objective=lp_objective, x=x)


def _enforce_clique(adj: np.ndarray, members: np.ndarray) -> np.ndarray:
    """Greedily drop lowest-internal-degree vertices until a true clique."""
    members = np.array(sorted(members), dtype=np.int64)
    while len(members) > 1:
        sub = adj[np.ix_(members, members)]
        internal = sub.sum(axis=1)
        want = len(members) - 1
        bad = internal < want
        if not bad.any():
            break
        candidates = np.nonzero(bad)[0]
        drop = candidates[np.argmin(internal[candidates])]  # ties: lowest index
        members = np.delete(members, drop)
    return members


def extract_cliques(g: PairGraph, k: int) -> list[PairCluster]:
    """Peel up to k dominant cliques: complement -> cover -> independent set,
    verify clique, remove, repeat."""
    if k < 1:
        raise ValueError("k must be >= 1")
    n = g.n_vertices
    alive = np.ones(n, dtype=bool)
    clusters: list[PairCluster] = []
    for cluster_id in range(k):
        alive_idx = np.nonzero(alive)[0]
        if len(alive_idx) == 0:
            break
        sub_adj = g.adjacency[np.ix_(alive_idx, alive_idx)]
        sub = PairGraph(adjacency=sub_adj, pairs=[])
        comp = complement_graph(sub)
        lp = min_vertex_cover_lp(comp)
        in_cover = np.zeros(len(alive_idx), dtype=bool)
        in_cover[lp.cover] = True
        independent = alive_idx[~in_cover]
        if len(independent) == 0:
            independent = alive_idx[:1]
        members = _enforce_clique(g.adjacency, independent)
        clusters.append(
            PairCluster(
                cluster_id=cluster_id,
                members=[g.pairs[int(m)] for m in members],
                vertex_ids=members,
            )
        )
        alive[members] = False
    return clusters


def split_lr(clusters: list[PairCluster]):
    """Split each pair into left/right endpoints with a canonical rule.

    The lexicographically smaller (x, y) pixel goes left.  Pixels reused by
    several pairs are kept only for the first pair encountered so the
    left/right map remains a bijection.  Returns (L, R, links) where links
    holds (left_pixel, right_pixel, transform, cluster_id) per kept pair.
    """
    left: list[tuple[int, int]] = []
    right: list[tuple[int, int]] = []
    links = []
    used: set[tuple[int, int]] = set()
    for cluster in clusters:
        for pr in cluster.members:
            a, b = pr.xi, pr.xj
            if b < a:
                a, b = b, a
            if a in used or b in used or a == b:
                continue
            used.add(a)
            used.add(b)
            left.append(a)
            right.append(b)
            links.append((a, b, pr.transform, cluster.cluster_id))
    l_arr = np.array(left, dtype=np.int64).reshape(-1, 2)
    r_arr = np.array(right, dtype=np.int64).reshape(-1, 2)
    return l_arr, r_arr, links


def clusters_to_json(clusters: list[PairCluster]) -> list[dict]:
    from symmpix.pairs import pairs_to_json

    return [
        {"cluster_id": c.cluster_id, "pairs": pairs_to_json(c.members)}
        for c in clusters
    ]
