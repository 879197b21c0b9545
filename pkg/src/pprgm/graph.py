"""Immutable undirected graphs in compressed sparse row form.

Vertex ids are dense integers ``0..n-1``.  Neighbor slices are strictly
increasing, there are no self-loops and every edge is stored once in each
direction.
"""

from __future__ import annotations

import io
from typing import Iterable, TextIO

import numpy as np


class EdgeListError(ValueError):
    """Raised when an edge-list stream cannot be parsed."""


class Graph:
    """Undirected simple graph backed by ``indptr``/``indices`` arrays."""

    __slots__ = ("n", "indptr", "indices", "_deg", "_adj", "_degl")

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray):
        self.n = int(n)
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        if self.indptr.shape != (self.n + 1,):
            raise ValueError("indptr must have length n + 1")
        self.indptr.flags.writeable = False
        self.indices.flags.writeable = False
        deg = np.diff(self.indptr)
        deg.flags.writeable = False
        self._deg = deg
        self._adj = None
        self._degl = None

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        """Build from an ``(m, 2)`` array of endpoints.

        Duplicates (in either orientation) are collapsed and self-loops dropped.
        """
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise ValueError(f"edge endpoint out of range for n={n}")
        e = e[e[:, 0] != e[:, 1]]
        both = np.concatenate([e, e[:, ::-1]])
        if both.size:
            # unique on the flattened key sorts by (src, dst)
            key = np.unique(both[:, 0] * n + both[:, 1])
            src, dst = np.divmod(key, n)
        else:
            src = dst = np.empty(0, dtype=np.int64)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return cls(n, indptr, dst)

    @classmethod
    def empty(cls, n: int = 0) -> "Graph":
        return cls(n, np.zeros(n + 1, dtype=np.int64), np.empty(0, dtype=np.int64))

    @property
    def vertex_count(self) -> int:
        return self.n

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    @property
    def degrees(self) -> np.ndarray:
        return self._deg

    def degree(self, u: int) -> int:
        self._check(u)
        return int(self._deg[u])

    def neighbors(self, u: int) -> np.ndarray:
        self._check(u)
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def adjacency_lists(self) -> list[list[int]]:
        """Neighbor lists as plain Python lists, cached for tight loops."""
        if self._adj is None:
            ind = self.indices.tolist()
            ptr = self.indptr.tolist()
            self._adj = [ind[ptr[u]:ptr[u + 1]] for u in range(self.n)]
        return self._adj

    def degree_list(self) -> list[int]:
        if self._degl is None:
            self._degl = self._deg.tolist()
        return self._degl

    def edges(self) -> np.ndarray:
        """Each undirected edge once, as rows ``(u, v)`` with ``u < v``."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self._deg)
        keep = src < self.indices
        return np.stack([src[keep], self.indices[keep]], axis=1)

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < len(nb) and nb[i] == v)

    def check(self) -> None:
        """Full scan of the structural invariants; raises AssertionError."""
        for u in range(self.n):
            nb = self.indices[self.indptr[u]:self.indptr[u + 1]]
            assert np.all(np.diff(nb) > 0), f"neighbors of {u} not strictly increasing"
            assert not np.any(nb == u), f"self-loop at {u}"
        assert self._deg.sum() % 2 == 0
        src = np.repeat(np.arange(self.n, dtype=np.int64), self._deg)
        fwd = np.sort(src * max(self.n, 1) + self.indices)
        rev = np.sort(self.indices * max(self.n, 1) + src)
        assert np.array_equal(fwd, rev), "adjacency is not symmetric"

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n == other.n and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.edge_count})"

    def _check(self, u):
        if not 0 <= u < self.n:
            raise IndexError(f"vertex {u} out of range [0, {self.n})")


def load_edge_list(stream: TextIO | Iterable[str]) -> Graph:
    """Parse ``u v`` lines into a Graph.

    Lines starting with ``#`` are comments, except that a ``# vertices: N``
    header (written by :func:`write_edge_list`) fixes the vertex count so
    trailing isolated vertices survive a round trip.
    """
    rows = []
    n_header = None
    for lineno, line in enumerate(stream, 1):
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            body = s[1:].strip()
            if body.startswith("vertices:"):
                try:
                    n_header = int(body.split(":", 1)[1])
                except ValueError:
                    raise EdgeListError(f"line {lineno}: bad vertex-count header {s!r}") from None
            continue
        toks = s.split()
        if len(toks) != 2:
            raise EdgeListError(f"line {lineno}: expected 'u v', got {s!r}")
        try:
            u, v = int(toks[0]), int(toks[1])
        except ValueError:
            raise EdgeListError(f"line {lineno}: non-integer vertex id in {s!r}") from None
        if u < 0 or v < 0:
            raise EdgeListError(f"line {lineno}: negative vertex id in {s!r}")
        rows.append((u, v))
    n = max((max(r) for r in rows), default=-1) + 1
    if n_header is not None:
        if n_header < n:
            raise EdgeListError(f"vertex-count header {n_header} smaller than max id + 1 = {n}")
        n = n_header
    return Graph.from_edges(n, np.array(rows, dtype=np.int64).reshape(-1, 2))


def read_edge_list(path) -> Graph:
    with open(path) as fh:
        return load_edge_list(fh)


def dump_edge_list(g: Graph) -> str:
    buf = io.StringIO()
    buf.write(f"# vertices: {g.n}\n")
    for u, v in g.edges().tolist():
        buf.write(f"{u} {v}\n")
    return buf.getvalue()


def write_edge_list(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(dump_edge_list(g))
