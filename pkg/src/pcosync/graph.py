"""Directed graphs for pulse-coupled oscillator networks.

Nodes are integers 0..n-1. Edges are directed (src, dst, weight) tuples with
weight > 0; self-loops and duplicate edges are rejected. Includes generators
for Erdos-Renyi digraphs and random geometric graphs on the unit torus, an
edge-list CSV loader/writer, and structural validation (strong connectivity
and aperiodicity).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

Edge = Tuple[int, int, float]


@dataclass
class Graph:
    """Immutable-by-convention directed graph.

    Edges are normalized to (src, dst) lexicographic order on construction so
    that equal edge sets compare equal and serialization is canonical.
    """

    n: int
    edges: Tuple[Edge, ...]
    meta: Optional[dict] = None
    succ: List[List[int]] = field(init=False, repr=False, compare=False)
    succ_weights: List[List[float]] = field(init=False, repr=False, compare=False)
    pred: List[List[int]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"graph needs at least one node, got n={self.n}")
        normalized = []
        for e in self.edges:
            if len(e) == 2:
                src, dst, w = e[0], e[1], 1.0
            else:
                src, dst, w = e
            src, dst, w = int(src), int(dst), float(w)
            if not (0 <= src < self.n and 0 <= dst < self.n):
                raise ValueError(f"edge ({src},{dst}) out of range for n={self.n}")
            if src == dst:
                raise ValueError(f"self-loop at node {src} not allowed")
            if w <= 0:
                raise ValueError(f"edge ({src},{dst}) has non-positive weight {w}")
            normalized.append((src, dst, w))
        normalized.sort(key=lambda e: (e[0], e[1]))
        for a, b in zip(normalized, normalized[1:]):
            if a[0] == b[0] and a[1] == b[1]:
                raise ValueError(f"duplicate edge ({a[0]},{a[1]})")
        object.__setattr__(self, "edges", tuple(normalized))

        succ: List[List[int]] = [[] for _ in range(self.n)]
        succ_w: List[List[float]] = [[] for _ in range(self.n)]
        pred: List[List[int]] = [[] for _ in range(self.n)]
        for src, dst, w in self.edges:
            succ[src].append(dst)
            succ_w[src].append(w)
            pred[dst].append(src)
        self.succ = succ
        self.succ_weights = succ_w
        self.pred = pred
        self._csr_cache = None

    @property
    def m(self) -> int:
        return len(self.edges)

    def indegrees(self) -> List[int]:
        return [len(p) for p in self.pred]

    def outdegrees(self) -> List[int]:
        return [len(s) for s in self.succ]

    def has_unit_weights(self) -> bool:
        return all(w == 1.0 for _, _, w in self.edges)

    def csr(self):
        """Successor structure as numpy CSR arrays (indptr, dst, weight).

        dst indices for each src are ascending, matching the normalized edge
        order, so expanding a sorted src list yields (src, dst) lexicographic
        arrival order.
        """
        if self._csr_cache is None:
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            for src, _, _ in self.edges:
                indptr[src + 1] += 1
            np.cumsum(indptr, out=indptr)
            dst = np.fromiter((d for _, d, _ in self.edges), dtype=np.int64, count=self.m)
            w = np.fromiter((w for _, _, w in self.edges), dtype=np.float64, count=self.m)
            self._csr_cache = (indptr, dst, w)
        return self._csr_cache


@dataclass(frozen=True)
class RggSpec:
    """Random geometric graph spec on the unit torus [0,1)^dim."""

    n: int
    dim: int
    radius: float
    symmetric: bool = True

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        max_r = math.sqrt(self.dim) / 2.0
        if not (0 < self.radius <= max_r):
            raise ValueError(
                f"radius must lie in (0, sqrt(dim)/2 = {max_r:.6g}], got {self.radius}"
            )


@dataclass(frozen=True)
class StructureReport:
    strongly_connected: bool
    aperiodic: bool
    scc_count: int


def complete_graph(n: int) -> Graph:
    edges = tuple((i, j, 1.0) for i in range(n) for j in range(n) if i != j)
    return Graph(n, edges)


def generate_er(n: int, p_hat: float, seed) -> Graph:
    """Directed Erdos-Renyi graph: each ordered pair is an edge with prob p_hat."""
    if not (0.0 <= p_hat <= 1.0):
        raise ValueError(f"p_hat must lie in [0,1], got {p_hat}")
    rng = np.random.default_rng(seed)
    mask = rng.random((n, n)) < p_hat
    np.fill_diagonal(mask, False)
    srcs, dsts = np.nonzero(mask)
    edges = tuple((int(s), int(d), 1.0) for s, d in zip(srcs, dsts))
    return Graph(n, edges, meta={"kind": "er", "n": n, "p_hat": p_hat, "seed": _seed_repr(seed)})


def torus_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Euclidean distance on the unit torus (component-wise min image)."""
    d = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
    d = np.minimum(d, 1.0 - d)
    return float(np.sqrt((d * d).sum()))


def generate_rgg(spec: RggSpec, seed) -> Graph:
    """Sample node positions i.i.d. uniform on the torus; connect pairs within radius.

    With symmetric=True (default) both directions of each close pair are edges.
    With symmetric=False only the src < dst direction is kept. Positions are
    retained in graph.meta for reproducibility.
    """
    rng = np.random.default_rng(seed)
    pos = rng.random((spec.n, spec.dim))
    diff = np.abs(pos[:, None, :] - pos[None, :, :])
    diff = np.minimum(diff, 1.0 - diff)
    dist2 = np.einsum("ijk,ijk->ij", diff, diff)
    mask = dist2 <= spec.radius * spec.radius
    np.fill_diagonal(mask, False)
    if not spec.symmetric:
        mask = np.triu(mask)
    srcs, dsts = np.nonzero(mask)
    edges = tuple((int(s), int(d), 1.0) for s, d in zip(srcs, dsts))
    meta = {
        "kind": "rgg",
        "n": spec.n,
        "dim": spec.dim,
        "r": spec.radius,
        "seed": _seed_repr(seed),
        "positions": pos.tolist(),
    }
    return Graph(spec.n, edges, meta=meta)


def _seed_repr(seed):
    if seed is None or isinstance(seed, int):
        return seed
    return list(seed)


def save_rgg_meta(g: Graph, path: str) -> None:
    """Write the RGG metadata JSON (n, dim, r, seed, positions)."""
    if g.meta is None or g.meta.get("kind") != "rgg":
        raise ValueError("graph has no RGG metadata to save")
    doc = {k: g.meta[k] for k in ("n", "dim", "r", "seed", "positions")}
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True)
        fh.write("\n")


def load_rgg_meta(path: str) -> dict:
    with open(path) as fh:
        doc = json.load(fh)
    for key in ("n", "dim", "r", "positions"):
        if key not in doc:
            raise ValueError(f"{path}: RGG metadata missing key {key!r}")
    return doc


def load_edge_list(path: str) -> Graph:
    """Parse an edge-list CSV: rows ``src,dst[,weight]``.

    An optional comment line ``# n=<count>`` declares the node count (needed
    when trailing nodes are isolated); other ``#`` comment lines and blank
    lines are ignored. Parse errors report 1-based line numbers.
    """
    declared_n = None
    edges = []
    max_node = -1
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("n="):
                    try:
                        declared_n = int(body[2:].strip())
                    except ValueError:
                        raise ValueError(f"{path}:{lineno}: bad node count {body!r}") from None
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) not in (2, 3):
                raise ValueError(
                    f"{path}:{lineno}: expected 'src,dst[,weight]', got {line!r}"
                )
            try:
                src, dst = int(parts[0]), int(parts[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-integer node id in {line!r}") from None
            w = 1.0
            if len(parts) == 3:
                try:
                    w = float(parts[2])
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: bad weight in {line!r}") from None
            edges.append((src, dst, w))
            max_node = max(max_node, src, dst)
    if declared_n is None:
        if max_node < 0:
            raise ValueError(f"{path}: empty edge list and no '# n=' declaration")
        declared_n = max_node + 1
    return Graph(declared_n, tuple(edges))


def save_edge_list(g: Graph, path: str, header_comments: Sequence[str] = ()) -> None:
    """Write the canonical edge-list CSV for a graph.

    Weights equal to 1.0 are omitted (the format's default). Extra comment
    lines (without the leading '#') can be injected after the node count, e.g.
    for embedding a resolved config.
    """
    with open(path, "w") as fh:
        fh.write(f"# n={g.n}\n")
        for comment in header_comments:
            fh.write(f"# {comment}\n")
        for src, dst, w in g.edges:
            if w == 1.0:
                fh.write(f"{src},{dst}\n")
            else:
                fh.write(f"{src},{dst},{w!r}\n")


def _postorder(succ: List[List[int]], n: int) -> List[int]:
    seen = [False] * n
    order = []
    for root in range(n):
        if seen[root]:
            continue
        seen[root] = True
        stack = [(root, iter(succ[root]))]
        while stack:
            node, it = stack[-1]
            pushed = False
            for nxt in it:
                if not seen[nxt]:
                    seen[nxt] = True
                    stack.append((nxt, iter(succ[nxt])))
                    pushed = True
                    break
            if not pushed:
                order.append(node)
                stack.pop()
    return order


def _scc_labels(g: Graph) -> Tuple[List[int], int]:
    """Kosaraju SCC labels (iterative). Returns (label per node, scc count)."""
    order = _postorder(g.succ, g.n)
    label = [-1] * g.n
    count = 0
    for root in reversed(order):
        if label[root] != -1:
            continue
        stack = [root]
        label[root] = count
        while stack:
            node = stack.pop()
            for nxt in g.pred[node]:
                if label[nxt] == -1:
                    label[nxt] = count
                    stack.append(nxt)
        count += 1
    return label, count


def validate_structure(g: Graph) -> StructureReport:
    """Check strong connectivity and aperiodicity.

    Aperiodicity: gcd of directed cycle lengths is 1, computed per SCC via BFS
    level differences (for an intra-SCC edge u->v, level[u]+1-level[v] is a
    multiple of the period; the gcd over all such edges equals the period).
    A graph with no cycles at all reports aperiodic=False.
    """
    label, count = _scc_labels(g)
    strongly_connected = count == 1

    overall = 0
    members: List[List[int]] = [[] for _ in range(count)]
    for node, lab in enumerate(label):
        members[lab].append(node)
    for lab in range(count):
        nodes = members[lab]
        if len(nodes) < 2:
            continue  # no self-loops, so singleton SCCs carry no cycles
        root = nodes[0]
        level = {root: 0}
        frontier = [root]
        g_scc = 0
        while frontier:
            nxt_frontier = []
            for u in frontier:
                for v in g.succ[u]:
                    if label[v] != lab:
                        continue
                    if v not in level:
                        level[v] = level[u] + 1
                        nxt_frontier.append(v)
            frontier = nxt_frontier
        for u in nodes:
            for v in g.succ[u]:
                if label[v] == lab:
                    g_scc = math.gcd(g_scc, level[u] + 1 - level[v])
        overall = math.gcd(overall, g_scc)
    return StructureReport(
        strongly_connected=strongly_connected,
        aperiodic=overall == 1,
        scc_count=count,
    )
