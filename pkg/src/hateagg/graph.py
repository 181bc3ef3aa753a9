"""Directed follow-graph with dense integer node indices.

The graph is immutable once built: construction interns external string ids
into dense indices and materializes two CSR adjacency views (followees and
followers). All queries are read-only, so concurrent access needs no locks.

Conventions
-----------
An edge ``u -> v`` means "u follows v". Followees of ``u`` are its
out-neighbors, followers its in-neighbors. Network statistics (clustering
coefficient, power-law exponent, components) use the undirected simple-graph
view: parallel and reciprocal edges collapse to a single undirected link.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import DegenerateDataError, InputError

__all__ = [
    "SocialGraph",
    "GraphStats",
    "ComponentCounts",
    "build_graph",
    "largest_wcc",
    "component_stats",
    "clustering_coefficient",
    "powerlaw_gamma",
    "powerlaw_gamma_mle",
    "graph_stats",
]


def _csr_from_sorted(src: np.ndarray, dst: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """CSR (indptr, indices) from edge arrays; sorts and dedups (src, dst)."""
    if len(src) == 0:
        return np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int32)
    order = np.lexsort((dst, src))
    src = src[order]
    dst = dst[order]
    keep = np.empty(len(src), dtype=bool)
    keep[0] = True
    np.not_equal(src[1:], src[:-1], out=keep[1:])
    keep[1:] |= dst[1:] != dst[:-1]
    src = src[keep]
    dst = dst[keep]
    counts = np.bincount(src, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, dst.astype(np.int32, copy=False)


class SocialGraph:
    """Immutable directed graph over interned string user ids.

    Attributes
    ----------
    ids : list[str]
        Node index -> external user id (the id_map, forward direction).
    id_index : dict[str, int]
        External user id -> node index (the id_map, reverse direction).
    """

    def __init__(self, ids: list[str], src: np.ndarray, dst: np.ndarray):
        n = len(ids)
        self.ids = ids
        self.id_index = {u: i for i, u in enumerate(ids)}
        self.out_indptr, self.out_indices = _csr_from_sorted(src, dst, n)
        self.in_indptr, self.in_indices = _csr_from_sorted(dst, src, n)
        self._und: tuple[np.ndarray, np.ndarray] | None = None
        self._row_ids: dict[str, np.ndarray] = {}

    # -- basic shape -------------------------------------------------------

    @property
    def node_count(self) -> int:
        return len(self.ids)

    @property
    def edge_count(self) -> int:
        return int(len(self.out_indices))

    def out_neighbors(self, i: int) -> np.ndarray:
        """Followees of node i (sorted by node index)."""
        return self.out_indices[self.out_indptr[i] : self.out_indptr[i + 1]]

    def in_neighbors(self, i: int) -> np.ndarray:
        """Followers of node i (sorted by node index)."""
        return self.in_indices[self.in_indptr[i] : self.in_indptr[i + 1]]

    def out_degrees(self) -> np.ndarray:
        return np.diff(self.out_indptr)

    def in_degrees(self) -> np.ndarray:
        return np.diff(self.in_indptr)

    def edges(self) -> Iterator[tuple[str, str]]:
        """Yield directed edges as (follower_id, followee_id), sorted by index."""
        src = np.repeat(np.arange(self.node_count), np.diff(self.out_indptr))
        for u, v in zip(src, self.out_indices):
            yield self.ids[u], self.ids[int(v)]

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Directed edges as (src_indices, dst_indices)."""
        src = np.repeat(
            np.arange(self.node_count, dtype=np.int32), np.diff(self.out_indptr)
        )
        return src, self.out_indices.copy()

    # -- undirected simple view ---------------------------------------------

    def undirected_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """(indptr, indices) of the undirected simple-graph view.

        Built lazily and cached; a benign race at most recomputes the same
        arrays, so no lock is needed.
        """
        if self._und is None:
            src = np.repeat(
                np.arange(self.node_count, dtype=np.int32), np.diff(self.out_indptr)
            )
            dst = self.out_indices
            both_src = np.concatenate([src, dst])
            both_dst = np.concatenate([dst, src])
            self._und = _csr_from_sorted(both_src, both_dst, self.node_count)
        return self._und

    def undirected_degrees(self) -> np.ndarray:
        indptr, _ = self.undirected_csr()
        return np.diff(indptr)

    # -- vectorized neighbor reductions --------------------------------------

    def _rows(self, direction: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(indptr, indices, row_of_entry) for the requested adjacency view."""
        if direction == "out":
            indptr, indices = self.out_indptr, self.out_indices
        elif direction == "in":
            indptr, indices = self.in_indptr, self.in_indices
        elif direction == "undirected":
            indptr, indices = self.undirected_csr()
        else:
            raise InputError(f"unknown direction {direction!r}")
        rows = self._row_ids.get(direction)
        if rows is None:
            rows = np.repeat(
                np.arange(self.node_count, dtype=np.int32), np.diff(indptr)
            )
            self._row_ids[direction] = rows
        return indptr, indices, rows

    def neighbor_sums(self, values: np.ndarray, direction: str) -> np.ndarray:
        """Per-node sum of ``values`` over neighbors in the given direction.

        direction 'out' sums over followees, 'in' over followers,
        'undirected' over the union. Result aligned to node index.
        """
        _, indices, rows = self._rows(direction)
        if len(indices) == 0:
            return np.zeros(self.node_count, dtype=np.float64)
        return np.bincount(
            rows, weights=values[indices], minlength=self.node_count
        )

    def neighbor_delta_sums(self, values: np.ndarray, direction: str) -> np.ndarray:
        """Per-node sum of ``values[v] - values[u]`` over neighbors v of u.

        The subtraction happens per edge, so a constant input yields exact
        zeros rather than accumulated rounding.
        """
        _, indices, rows = self._rows(direction)
        if len(indices) == 0:
            return np.zeros(self.node_count, dtype=np.float64)
        return np.bincount(
            rows, weights=values[indices] - values[rows], minlength=self.node_count
        )


class ComponentCounts(NamedTuple):
    n_components: int
    n_singletons: int


@dataclass
class GraphStats:
    """Network summary in the style of platform dataset reports."""

    n_components: int
    n_singletons: int
    largest_wcc_nodes: int
    largest_wcc_edges: int
    clustering_coefficient: float
    powerlaw_gamma: float

    def to_dict(self) -> dict:
        return {
            "n_components": self.n_components,
            "n_singletons": self.n_singletons,
            "largest_wcc_nodes": self.largest_wcc_nodes,
            "largest_wcc_edges": self.largest_wcc_edges,
            "clustering_coefficient": self.clustering_coefficient,
            "powerlaw_gamma": self.powerlaw_gamma,
        }


def build_graph(
    edge_pairs: Iterable[tuple[str, str]],
    isolated_ids: Iterable[str] = (),
) -> SocialGraph:
    """Intern ids and build the graph from (follower, followee) string pairs.

    Duplicate edges are collapsed. Self-loops and empty ids are rejected with
    the offending pair's position. ``isolated_ids`` registers nodes with no
    edges; they are appended after all edge endpoints, in sorted order so node
    indexing never depends on set iteration order.
    """
    ids: list[str] = []
    index: dict[str, int] = {}
    src_list: list[int] = []
    dst_list: list[int] = []

    def intern(u: str) -> int:
        i = index.get(u)
        if i is None:
            i = len(ids)
            index[u] = i
            ids.append(u)
        return i

    for pos, pair in enumerate(edge_pairs, start=1):
        try:
            u, v = pair
        except (TypeError, ValueError):
            raise InputError(f"edge {pos}: expected a (src, dst) pair, got {pair!r}")
        if not u or not v:
            raise InputError(f"edge {pos}: empty user id in ({u!r}, {v!r})")
        if u == v:
            raise InputError(f"edge {pos}: self-loop on {u!r}")
        src_list.append(intern(u))
        dst_list.append(intern(v))

    for u in sorted(set(isolated_ids)):
        if not u:
            raise InputError("isolated id must be nonempty")
        intern(u)

    src = np.asarray(src_list, dtype=np.int64)
    dst = np.asarray(dst_list, dtype=np.int64)
    return SocialGraph(ids, src, dst)


def _component_labels(g: SocialGraph) -> tuple[int, np.ndarray]:
    if g.node_count == 0:
        return 0, np.zeros(0, dtype=np.int32)
    mat = csr_matrix(
        (np.ones(len(g.out_indices), dtype=np.int8), g.out_indices, g.out_indptr),
        shape=(g.node_count, g.node_count),
    )
    n_comp, labels = connected_components(mat, directed=True, connection="weak")
    return int(n_comp), labels


def largest_wcc(g: SocialGraph) -> SocialGraph:
    """Induced subgraph on the largest weakly connected component.

    Ties between equal-sized components go to the one containing the
    smallest node index. External ids are preserved; surviving nodes are
    re-indexed densely in their original relative order.
    """
    if g.node_count == 0:
        raise InputError("empty graph has no connected components")
    n_comp, labels = _component_labels(g)
    sizes = np.bincount(labels, minlength=n_comp)
    best_size = sizes.max()
    candidates = np.flatnonzero(sizes == best_size)
    # first occurrence of each label while scanning by node index
    _, first_idx = np.unique(labels, return_index=True)
    best_label = candidates[np.argmin(first_idx[candidates])]

    member = labels == best_label
    keep = np.flatnonzero(member)
    remap = np.full(g.node_count, -1, dtype=np.int64)
    remap[keep] = np.arange(len(keep))

    src, dst = g.edge_arrays()
    mask = member[src]  # weak components are edge-closed
    new_ids = [g.ids[int(i)] for i in keep]
    return SocialGraph(new_ids, remap[src[mask]], remap[dst[mask]])


def component_stats(
    g: SocialGraph, isolated_ids: Iterable[str] = ()
) -> ComponentCounts:
    """Weak component and singleton counts.

    ``isolated_ids`` may name users outside the graph; each unknown id counts
    as one extra singleton component. A singleton is a node with no incident
    edges.
    """
    extra = sum(1 for u in set(isolated_ids) if u not in g.id_index)
    n_comp, _ = _component_labels(g)
    deg = g.out_degrees() + g.in_degrees()
    singles = int(np.count_nonzero(deg == 0))
    return ComponentCounts(n_comp + extra, singles + extra)


def clustering_coefficient(g: SocialGraph, chunk: int = 50_000) -> float:
    """Average local clustering coefficient of the undirected simple view.

    Each node contributes (links among its neighbors) / (possible links);
    nodes with degree < 2 contribute 0. Triangle counts come from chunked
    sparse products, so memory stays bounded on large graphs.
    """
    if g.node_count == 0:
        raise InputError("empty graph has no clustering coefficient")
    indptr, indices = g.undirected_csr()
    n = g.node_count
    und = csr_matrix(
        (np.ones(len(indices), dtype=np.float64), indices, indptr), shape=(n, n)
    )
    deg = np.diff(indptr)
    closed_wedges = np.zeros(n, dtype=np.float64)  # 2 * triangles per node
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        block = und[start:stop]
        common = block @ und
        closed_wedges[start:stop] = np.asarray(
            common.multiply(block).sum(axis=1)
        ).ravel()
    wedges = deg.astype(np.float64) * (deg - 1)
    local = np.zeros(n, dtype=np.float64)
    mask = deg >= 2
    local[mask] = closed_wedges[mask] / wedges[mask]
    return float(local.sum() / n)


def powerlaw_gamma_mle(
    degrees: Sequence[int] | np.ndarray,
    k_min: int = 1,
    continuity_correction: bool = True,
) -> float:
    """Continuous maximum-likelihood power-law exponent for a degree sample.

    gamma = 1 + n / sum(ln(k_i / k_ref)) over degrees k_i >= k_min, with
    k_ref = k_min - 1/2 when the continuity correction is on (the discrete
    convention) and k_ref = k_min otherwise. Without the correction a sample
    where every degree equals k_min diverges; +inf is returned for it.
    """
    if k_min < 1:
        raise InputError(f"k_min must be >= 1, got {k_min}")
    deg = np.asarray(degrees, dtype=np.float64)
    deg = deg[deg >= k_min]
    if len(deg) == 0:
        raise DegenerateDataError(
            f"no degrees >= k_min={k_min}; cannot fit a power law"
        )
    k_ref = k_min - 0.5 if continuity_correction else float(k_min)
    denom = float(np.sum(np.log(deg / k_ref)))
    if denom <= 0.0:
        return float("inf")
    return 1.0 + len(deg) / denom


def powerlaw_gamma(
    g: SocialGraph, k_min: int = 1, continuity_correction: bool = True
) -> float:
    """Power-law exponent fitted to the undirected degree distribution."""
    return powerlaw_gamma_mle(
        g.undirected_degrees(), k_min=k_min, continuity_correction=continuity_correction
    )


def graph_stats(
    g: SocialGraph,
    isolated_ids: Iterable[str] = (),
    k_min: int = 1,
    continuity_correction: bool = True,
) -> GraphStats:
    """Full network summary.

    Component and singleton counts cover the whole graph; the clustering
    coefficient and the power-law exponent are computed on the largest weakly
    connected component, the same restriction used for evaluation.
    """
    counts = component_stats(g, isolated_ids)
    wcc = largest_wcc(g)
    stats = GraphStats(
        n_components=counts.n_components,
        n_singletons=counts.n_singletons,
        largest_wcc_nodes=wcc.node_count,
        largest_wcc_edges=wcc.edge_count,
        clustering_coefficient=clustering_coefficient(wcc),
        powerlaw_gamma=powerlaw_gamma(
            wcc, k_min=k_min, continuity_correction=continuity_correction
        ),
    )
    assert stats.largest_wcc_nodes <= g.node_count
    assert stats.n_singletons <= stats.n_components
    return stats
