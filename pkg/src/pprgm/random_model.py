"""Erdos-Renyi graphs, correlated G(n,p;p_n,p_e) samples and seed sets.

All randomness comes from ``numpy.random.default_rng(rng_seed)`` (PCG64), so
every function here is a pure function of its arguments.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Graph


class NotEnoughSeedsError(ValueError):
    pass


@dataclass(frozen=True)
class SampleParams:
    n: int
    p: float
    p_n: float = 1.0
    p_e: float = 1.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        for name in ("p", "p_n", "p_e"):
            _check_prob(name, getattr(self, name))


@dataclass
class CorrelatedPair:
    """Two subsamples of one base graph sharing the base vertex-id space.

    Ground truth is the identity: vertex ``v`` of ``g1`` is vertex ``v`` of
    ``g2`` whenever it was kept on both sides.
    """

    g1: Graph
    g2: Graph
    kept1: np.ndarray
    kept2: np.ndarray
    base: Graph | None = None

    @property
    def n(self) -> int:
        return self.g1.n

    @property
    def common(self) -> np.ndarray:
        return self.kept1 & self.kept2

    def truth_pairs(self) -> list[tuple[int, int]]:
        return [(v, v) for v in np.flatnonzero(self.common).tolist()]


@dataclass
class SeedSet:
    pairs: list[tuple[int, int]] = field(default_factory=list)
    correct_count: int = 0
    wrong_count: int = 0

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


def _check_prob(name, x):
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {x}")


def _row_start(i, n):
    return i * (2 * n - i - 1) // 2


def _pair_from_index(k: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    # row-major enumeration of (i, j), i < j
    k = np.asarray(k, dtype=np.int64)
    b = 2 * n - 1
    i = np.floor((b - np.sqrt(b * b - 8.0 * k)) / 2).astype(np.int64)
    # float sqrt can land one row off near boundaries
    i -= _row_start(i, n) > k
    i += _row_start(i + 1, n) <= k
    return i, k - _row_start(i, n) + i + 1


def gen_er(n: int, p: float, rng_seed: int) -> Graph:
    """G(n, p): each of the C(n,2) edges independently with probability p.

    Draws the edge count from Binomial(C(n,2), p) and then a uniform subset of
    that size, which has the same distribution as independent coin flips.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    _check_prob("p", p)
    rng = np.random.default_rng(rng_seed)
    total = n * (n - 1) // 2
    m = int(rng.binomial(total, p)) if total else 0
    if m == 0:
        return Graph.empty(n)
    k = np.sort(rng.choice(total, size=m, replace=False))
    i, j = _pair_from_index(k, n)
    return Graph.from_edges(n, np.stack([i, j], axis=1))


def sample_correlated(base: Graph, p_n: float, p_e: float, rng_seed: int) -> CorrelatedPair:
    """Independent vertex (p_n) and edge (p_e) subsamples of ``base``.

    Dropped vertices stay in the id space as isolated vertices.
    """
    _check_prob("p_n", p_n)
    _check_prob("p_e", p_e)
    rng = np.random.default_rng(rng_seed)
    n = base.n
    kept1 = rng.random(n) < p_n
    kept2 = rng.random(n) < p_n
    e = base.edges()
    keep_e1 = rng.random(len(e)) < p_e
    keep_e2 = rng.random(len(e)) < p_e
    in1 = kept1[e[:, 0]] & kept1[e[:, 1]] & keep_e1
    in2 = kept2[e[:, 0]] & kept2[e[:, 1]] & keep_e2
    return CorrelatedPair(Graph.from_edges(n, e[in1]), Graph.from_edges(n, e[in2]),
                          kept1, kept2, base)


def sample_seeds(cp: CorrelatedPair, n_correct: int, n_wrong: int = 0,
                 min_degree: int = 1, rng_seed: int = 0) -> SeedSet:
    """Correct identity seeds followed by wrong seeds.

    Correct seeds ``[v, v]`` are drawn without replacement from vertices kept
    on both sides with degree >= ``min_degree`` in both graphs.  A wrong seed
    ``[u, v]`` has ``u != v``, ``u`` eligible in ``g1`` and ``v`` eligible in
    ``g2``; no vertex is reused on the same side.
    """
    rng = np.random.default_rng(rng_seed)
    d1, d2 = cp.g1.degrees, cp.g2.degrees
    ok1 = cp.kept1 & (d1 >= min_degree)
    ok2 = cp.kept2 & (d2 >= min_degree)
    common = np.flatnonzero(ok1 & ok2)
    if len(common) < n_correct:
        raise NotEnoughSeedsError(
            f"not enough seeds: need {n_correct} correct, only {len(common)} eligible vertices")
    correct = rng.choice(common, size=n_correct, replace=False).tolist() if n_correct else []
    pairs = [(v, v) for v in correct]

    used1, used2 = set(correct), set(correct)
    left = [u for u in np.flatnonzero(ok1).tolist() if u not in used1]
    right = [v for v in np.flatnonzero(ok2).tolist() if v not in used2]
    if n_wrong:
        avail = rng.permutation(right).tolist()
        for u in rng.permutation(left).tolist():
            if len(pairs) == n_correct + n_wrong:
                break
            # first remaining right vertex that is not u itself
            idx = next((i for i, v in enumerate(avail) if v != u), None)
            if idx is not None:
                pairs.append((u, avail.pop(idx)))
        if len(pairs) < n_correct + n_wrong:
            raise NotEnoughSeedsError(f"not enough seeds: need {n_wrong} wrong pairs")
    return SeedSet(pairs, n_correct, n_wrong)


def seeds_with_wrong_fraction(cp: CorrelatedPair, total: int, wrong_frac: float,
                              min_degree: int = 1, rng_seed: int = 0) -> SeedSet:
    n_wrong = int(round(total * wrong_frac))
    return sample_seeds(cp, total - n_wrong, n_wrong, min_degree, rng_seed)


def sample_instance(params: SampleParams) -> CorrelatedPair:
    """Base ER graph plus correlated pair, using derived sub-seeds."""
    ss = np.random.SeedSequence(params.rng_seed)
    s_base, s_pair = (int(c.generate_state(1, np.uint64)[0]) for c in ss.spawn(2))
    base = gen_er(params.n, params.p, s_base)
    return sample_correlated(base, params.p_n, params.p_e, s_pair)
