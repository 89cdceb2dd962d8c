"""Simple undirected graphs, their spectra, and the Lovasz theta of the complement."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import GraphValidationError, NoProgress, ParseError
from .matcore import herm_eig


@dataclass(frozen=True)
class Graph:
    p: int
    edges: frozenset  # of (u, v) with u < v

    def __post_init__(self):
        if self.p < 0:
            raise GraphValidationError("vertex count must be nonnegative")
        for u, v in self.edges:
            if not (0 <= u < v < self.p):
                raise GraphValidationError(f"edge ({u}, {v}) is not a normalized pair below {self.p}")

    @classmethod
    def from_edges(cls, p: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        seen = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise GraphValidationError(f"self-loop at vertex {u}")
            if not (0 <= u < p and 0 <= v < p):
                raise GraphValidationError(f"edge ({u}, {v}) has an endpoint outside 0..{p - 1}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphValidationError(f"duplicate edge ({u}, {v})")
            seen.add(key)
        return cls(p, frozenset(seen))

    @classmethod
    def from_adjacency(cls, a) -> "Graph":
        from .channel import validate_adjacency

        a = validate_adjacency(a)
        p = a.shape[0]
        return cls(p, frozenset((i, j) for i in range(p) for j in range(i + 1, p) if a[i, j]))

    @property
    def m(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def degrees(self) -> list[int]:
        deg = [0] * self.p
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.p, self.p))
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1.0
        return a


def adjacency_matrix(g: Graph) -> np.ndarray:
    return g.adjacency()


def parse_graph(text) -> Graph:
    """Parse the edge-list format: ``"p m"`` then ``m`` lines ``"u v"`` (0-based)."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc}") from exc
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise ParseError("empty input", line=1)

    def ints(lineno: int, expected: int) -> list[int]:
        parts = lines[lineno - 1].split()
        if len(parts) != expected:
            raise ParseError(f"expected {expected} integers, got {len(parts)} fields", line=lineno)
        try:
            return [int(x) for x in parts]
        except ValueError:
            raise ParseError(f"non-integer field in {lines[lineno - 1]!r}", line=lineno) from None

    p, m = ints(1, 2)
    if p < 0 or m < 0:
        raise ParseError("vertex and edge counts must be nonnegative", line=1)
    if len(lines) - 1 != m:
        raise ParseError(f"header announces {m} edges, found {len(lines) - 1} lines", line=len(lines))
    edges = [tuple(ints(k, 2)) for k in range(2, m + 2)]
    return Graph.from_edges(p, edges)


def serialize_graph(g: Graph) -> str:
    out = [f"{g.p} {g.m}"]
    out += [f"{u} {v}" for u, v in g.sorted_edges()]
    return "\n".join(out) + "\n"


def complement(g: Graph) -> Graph:
    pairs = itertools.combinations(range(g.p), 2)
    return Graph(g.p, frozenset(e for e in pairs if e not in g.edges))


@dataclass(frozen=True)
class GraphReport:
    lambda_min: float
    lambda_max: float
    max_degree: int
    ordered_edge_count: int
    signless_laplacian: np.ndarray


def graph_report(g: Graph) -> GraphReport:
    a = g.adjacency()
    deg = g.degrees()
    if g.p:
        eig = herm_eig(a)
        lmin, lmax = eig.min, eig.max
    else:
        lmin = lmax = 0.0
    return GraphReport(
        lambda_min=lmin,
        lambda_max=lmax,
        max_degree=max(deg, default=0),
        ordered_edge_count=2 * g.m,
        signless_laplacian=np.diag(np.asarray(deg, dtype=float)) + a,
    )


# -- named families ---------------------------------------------------------

def empty_graph(p: int) -> Graph:
    return Graph(p, frozenset())


def complete_graph(p: int) -> Graph:
    return Graph(p, frozenset(itertools.combinations(range(p), 2)))


def cycle_graph(p: int) -> Graph:
    return Graph.from_edges(p, [(i, (i + 1) % p) for i in range(p)])


def path_graph(p: int) -> Graph:
    return Graph.from_edges(p, [(i, i + 1) for i in range(p - 1)])


def star_graph(k: int) -> Graph:
    """``K_{1,k}`` with centre 0."""
    return Graph.from_edges(k + 1, [(0, i) for i in range(1, k + 1)])


def petersen_graph() -> Graph:
    """Kneser graph K(5, 2): 2-subsets of {0..4}, adjacent when disjoint."""
    subsets = list(itertools.combinations(range(5), 2))
    edges = [(a, b) for a, b in itertools.combinations(range(10), 2)
             if not set(subsets[a]) & set(subsets[b])]
    return Graph.from_edges(10, edges)


def random_graph(p: int, prob: float = 0.5, seed: int = 0, min_edges: int = 0) -> Graph:
    """Erdos-Renyi ``G(p, prob)``; redraws until at least ``min_edges`` edges."""
    rng = np.random.default_rng(seed)
    pairs = list(itertools.combinations(range(p), 2))
    if min_edges > len(pairs):
        raise ValueError("min_edges exceeds the number of vertex pairs")
    while True:
        keep = rng.random(len(pairs)) < prob
        g = Graph(p, frozenset(e for e, k in zip(pairs, keep) if k))
        if g.m >= min_edges:
            return g


# -- Lovasz theta -----------------------------------------------------------

@dataclass(frozen=True)
class ThetaSolution:
    value: float
    H: np.ndarray
    iterations: int
    gap_estimate: float
    history: tuple = ()


def _theta_pattern(g: Graph) -> np.ndarray:
    fixed = np.eye(g.p, dtype=bool)
    for u, v in g.edges:
        fixed[u, v] = fixed[v, u] = True
    return fixed


def lovasz_theta_bar(g: Graph, iters: int = 20000, tol: float = 1e-10, step: float = 1.0,
                     cluster: float = 1e-3) -> ThetaSolution:
    """Upper-bound ``theta(complement(g))`` by minimizing ``lambda_max(H)``.

    ``H`` is real symmetric, pinned to 1 on the diagonal and on the edges of
    ``g``; the remaining entries are free. Each step moves the free entries
    against the average of ``v v^T`` over the eigenvectors whose eigenvalue is
    within ``cluster`` (relative) of the top one, with step ``step / sqrt(k)``.
    The returned ``value`` is ``lambda_max`` of the returned feasible ``H``,
    so it is an upper bound regardless of convergence.

    The loop stops early when the averaged subgradient vanishes (norm below
    ``tol``), which certifies optimality up to the cluster width.
    """
    p = g.p
    fixed = _theta_pattern(g)
    free = ~fixed
    h = fixed.astype(float)
    if p == 0:
        return ThetaSolution(0.0, h.astype(complex), 0, 0.0)
    if not free.any():
        # H = J_p, rank one with eigenvalue p.
        return ThetaSolution(float(p), h.astype(complex), 0, 0.0, (float(p),))

    h0 = h.copy()
    best_val, best_h = math.inf, h.copy()
    initial = None
    history = []
    sum_a = sum_a2 = 0.0
    gnorm = math.inf
    k = 0
    for k in range(1, iters + 1):
        w, vecs = np.linalg.eigh(h)
        top = w[-1]
        if initial is None:
            initial = top
        if top < best_val:
            best_val, best_h = top, h.copy()
        history.append(best_val)
        sel = vecs[:, w >= top - cluster * (1.0 + abs(top))]
        sub = (sel @ sel.T / sel.shape[1]) * free
        gnorm = float(np.linalg.norm(sub))
        if gnorm <= tol:
            break
        a_k = step / math.sqrt(k)
        sum_a += a_k
        sum_a2 += a_k * a_k
        h = h - a_k * sub

    radius = float(np.linalg.norm(best_h - h0))
    gap = 0.0 if gnorm <= tol else (radius ** 2 + sum_a2) / (2.0 * sum_a)
    value = herm_eig(best_h).max
    sol = ThetaSolution(value, best_h.astype(complex), k, gap, tuple(history))
    if best_val >= initial and gnorm > tol:
        raise NoProgress("theta objective never decreased", solution=sol)
    return sol
