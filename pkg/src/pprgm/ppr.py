"""Personalized PageRank: Forward-Push heavy hitters and dense references.

``forward_push`` is the local approximation used by the matcher.  The dense
routines (``exact_ppr``, ``truncated_ppr``, ``first_hit_decomposition``)
iterate the walk recurrence on a sparse transition matrix and serve as
independent references on small graphs.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .graph import Graph

DENSE_LIMIT = 20_000


class IsolatedSourceError(ValueError):
    """Forward-Push was asked to start from a degree-0 vertex."""


@dataclass(frozen=True)
class PPRParams:
    alpha: float = 0.3
    r_max: float = 1e-4

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if not self.r_max > 0.0:
            raise ValueError(f"r_max must be > 0, got {self.r_max}")


@dataclass
class PushResult:
    source: int
    reserves: dict[int, float] = field(default_factory=dict)
    residues: dict[int, float] = field(default_factory=dict)
    push_count: int = 0

    alpha: float = 0.3

    @property
    def heavy_hitters(self) -> list[int]:
        return sorted(self.reserves)

    def settled(self) -> dict[int, float]:
        """``reserve + alpha * residue`` over both supports.

        Each leftover residue is certain to stop at least ``alpha`` of itself
        in place, so this is still a lower bound on the exact PPR.  After a
        single push it assigns ``alpha (1 - alpha) / deg(s)`` to every
        neighbor of the source.
        """
        out = dict(self.reserves)
        a = self.alpha
        for u, r in self.residues.items():
            out[u] = out.get(u, 0.0) + a * r
        return out

    def total_mass(self) -> float:
        return float(np.sum(list(self.reserves.values())) + np.sum(list(self.residues.values())))


def forward_push(g: Graph, source: int, alpha: float = 0.3, r_max: float = 1e-4,
                 debug: bool = False) -> PushResult:
    """Forward-Push from ``source``, always pushing the largest residue/degree.

    A residue is pushed while ``r(u) / deg(u) > r_max`` (strict); the source
    itself is always pushed once, so any threshold yields at least the
    one-step result.  The heap
    holds ``(-r/deg, u)`` entries; an entry is stale once ``r(u)`` has changed,
    and the tuple order breaks ties towards the smaller vertex id.
    """
    PPRParams(alpha, r_max)
    deg = g.degree_list()
    if deg[source] == 0:
        raise IsolatedSourceError(f"isolated source {source}: degree 0")
    adj = g.adjacency_lists()
    reserve: dict[int, float] = {}
    residue: dict[int, float] = {source: 1.0}
    heap = []
    heap.append((-1.0 / deg[source], source))
    keep = 1.0 - alpha
    pushes = 0
    while heap:
        key, u = heapq.heappop(heap)
        r = residue[u]
        du = deg[u]
        if -key != r / du:
            continue
        reserve[u] = reserve.get(u, 0.0) + alpha * r
        residue[u] = 0.0
        share = keep * r / du
        for w in adj[u]:
            nr = residue.get(w, 0.0) + share
            residue[w] = nr
            ratio = nr / deg[w]
            if ratio > r_max:
                heapq.heappush(heap, (-ratio, w))
        pushes += 1
        if debug:
            total = sum(reserve.values()) + sum(residue.values())
            assert abs(total - 1.0) <= 1e-12, f"mass not conserved after push {pushes}: {total}"
    residues = {u: r for u, r in residue.items() if r > 0.0}
    return PushResult(source, reserve, residues, pushes, alpha)


def transition_matrix(g: Graph) -> sp.csr_matrix:
    """Column-stochastic ``P`` with ``P[j, i] = 1/deg(i)``; isolated vertices absorb."""
    deg = g.degrees.astype(float)
    n = g.n
    src = np.repeat(np.arange(n), g.degrees)
    vals = 1.0 / deg[src]
    iso = np.flatnonzero(g.degrees == 0)
    rows = np.concatenate([g.indices, iso])
    cols = np.concatenate([src, iso])
    vals = np.concatenate([vals, np.ones(len(iso))])
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def _guard(g: Graph):
    if g.n > DENSE_LIMIT:
        raise ValueError(f"graph too large for dense PPR ({g.n} > {DENSE_LIMIT} vertices)")


def exact_ppr(g: Graph, source: int, alpha: float = 0.3, tol: float = 1e-14,
              max_iter: int = 100_000) -> np.ndarray:
    """Iterate ``x <- alpha e_s + (1 - alpha) P x`` to a max-norm change below ``tol``."""
    _guard(g)
    P = transition_matrix(g)
    e = np.zeros(g.n)
    e[source] = alpha
    x = e.copy()
    for _ in range(max_iter):
        nxt = e + (1.0 - alpha) * (P @ x)
        done = np.max(np.abs(nxt - x)) < tol
        x = nxt
        if done:
            break
    return x


def walk_distributions(g: Graph, source: int, L: int) -> np.ndarray:
    """Rows ``q^(0) .. q^(L)`` of the non-decaying walk from ``source``."""
    _guard(g)
    P = transition_matrix(g)
    q = np.zeros((L + 1, g.n))
    q[0, source] = 1.0
    for t in range(1, L + 1):
        q[t] = P @ q[t - 1]
    return q


def truncated_ppr(g: Graph, source: int, alpha: float, L: int) -> np.ndarray:
    """``alpha * sum_{t=0..L} (1-alpha)^t q^(t)``."""
    q = walk_distributions(g, source, L)
    w = alpha * (1.0 - alpha) ** np.arange(L + 1)
    return w @ q


def first_hit_decomposition(g: Graph, source: int, target: int, alpha: float = 0.3,
                            eps: float = 1e-15) -> tuple[float, float]:
    """Split ``pi(source, target)`` as ``pi1 * (1 + ls)``.

    ``pi1`` is the mass that stops at ``target`` on its first visit; ``ls`` is
    the discounted return-probability series of ``target``.  Both series are
    cut once the discount ``(1-alpha)^t`` falls below ``eps`` (every walk
    probability is at most 1, so the tail is bounded by the same quantity).
    """
    _guard(g)
    P = transition_matrix(g).tolil()
    lam = 1.0 - alpha
    steps = int(np.ceil(np.log(eps) / np.log(lam))) + 1

    if source == target:
        pi1 = alpha
    else:
        # absorbing target: mass reaching it is recorded once, then removed
        Pa = P.copy()
        Pa[:, target] = 0.0
        Pa = Pa.tocsr()
        x = np.zeros(g.n)
        x[source] = 1.0
        acc = 0.0
        disc = 1.0
        for _ in range(steps):
            x = Pa @ x
            disc *= lam
            hit = x[target]
            acc += disc * hit
            x[target] = 0.0
            if not x.any():
                break
        pi1 = alpha * acc

    Pc = P.tocsr()
    y = np.zeros(g.n)
    y[target] = 1.0
    ls = 0.0
    disc = 1.0
    for _ in range(steps):
        y = Pc @ y
        disc *= lam
        ls += disc * y[target]
    return float(pi1), float(ls)
