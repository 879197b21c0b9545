"""Monte-Carlo checks of the analytical claims behind the matcher.

* ``validate_lemma1``: one mark-percolation round from planted seeds in the
  correlated model, with and without the postponing rule.
* ``distance_signatures`` / ``check_signatures``: whether BFS distance vectors
  to a random seed set separate every vertex of an ER giant component.
* ``discrimination_check``: collisions of truncated PPR values of two
  vertices over random stopping probabilities.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import connected_components, shortest_path

from .graph import Graph
from .ppr import walk_distributions
from .random_model import gen_er

CHUNK = 4096


# --- one-round percolation with planted seeds ---------------------------------

@dataclass(frozen=True)
class Lemma1Params:
    n: int
    p: float
    p_n: float = 1.0
    p_e: float = 1.0
    n_c: int = 40
    n_w: int = 0

    def __post_init__(self):
        for name in ("p", "p_n", "p_e"):
            x = getattr(self, name)
            if not 0.0 <= x <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {x}")
        if self.n_c < 0 or self.n_w < 0:
            raise ValueError("seed counts must be non-negative")
        if self.n_c + 2 * self.n_w + 3 > self.n:
            raise ValueError("n too small for the planted seeds and designated pairs")


def lemma1_closed_forms(prm: Lemma1Params) -> dict[str, float]:
    """Asymptotic per-pair match probabilities for one round."""
    n, p, pn, pe, nc, nw = prm.n, prm.p, prm.p_n, prm.p_e, prm.n_c, prm.n_w
    wrong = (nc + nw) ** 2 * p ** 4 * pe ** 4
    cut = nc ** 2 * p ** 4 * pe ** 4 * (2 * pe ** 4 - pe ** 8 + 2 * pn ** 2 * pe ** 4
                                        - 2 * pn ** 4 * pe ** 4)
    correct = nc ** 2 * p ** 2 * pe ** 4
    return {
        "wrong_plain": wrong,
        "wrong_postponed": wrong - cut,
        "correct_plain": correct,
        "correct_postponed": correct * (1.0 - n * p ** 2),
    }


def _at_least_two(groups) -> float:
    # P(sum of independent Binomial(k, q) terms >= 2)
    p0, p1 = 1.0, 0.0
    for k, q in groups:
        a0 = (1 - q) ** k
        a1 = k * q * (1 - q) ** (k - 1) if k else 0.0
        p0, p1 = p0 * a0, p0 * a1 + p1 * a0
    return 1.0 - p0 - p1


def lemma1_exact_plain(prm: Lemma1Params) -> dict[str, float]:
    """Exact probabilities of the plain rule (score >= 2).

    The designated wrong pair's score is Binomial(n_c + n_w, p^2 p_e^2); the
    correct pair's is Binomial(n_c, p p_e^2) + Binomial(n_w, p^2 p_e^2).
    """
    q2 = prm.p ** 2 * prm.p_e ** 2
    return {
        "wrong_plain": _at_least_two([(prm.n_c + prm.n_w, q2)]),
        "correct_plain": _at_least_two([(prm.n_c, prm.p * prm.p_e ** 2), (prm.n_w, q2)]),
    }


@dataclass
class Lemma1Report:
    params: Lemma1Params
    trials: int
    counts: dict[str, int]
    analytical: dict[str, float]
    exact: dict[str, float]

    @property
    def empirical(self) -> dict[str, float]:
        return {k: c / self.trials for k, c in self.counts.items()}

    def std_error(self, key: str) -> float:
        """Binomial standard error at the analytical probability."""
        q = min(max(self.analytical[key], 0.0), 1.0)
        return math.sqrt(q * (1 - q) / self.trials)

    def z_score(self, key: str) -> float:
        se = self.std_error(key)
        diff = self.empirical[key] - self.analytical[key]
        if se == 0:
            return 0.0 if diff == 0 else math.inf
        return diff / se

    def table(self) -> str:
        lines = [f"{'scenario':<18} {'empirical':>12} {'analytical':>12} {'z':>8}"]
        for k in ("wrong_plain", "wrong_postponed", "correct_plain", "correct_postponed"):
            lines.append(f"{k:<18} {self.empirical[k]:>12.4e} {self.analytical[k]:>12.4e} "
                         f"{self.z_score(k):>8.2f}")
        return "\n".join(lines)


class _Layout:
    # vertex ids: seeds' endpoints first, then v, u (wrong pair) and c (correct vertex)
    def __init__(self, prm: Lemma1Params):
        nc, nw = prm.n_c, prm.n_w
        self.left = np.r_[np.arange(nc), nc + 2 * np.arange(nw)].astype(np.int64)
        self.right = np.r_[np.arange(nc), nc + 2 * np.arange(nw) + 1].astype(np.int64)
        self.w = nc + 2 * nw
        self.v, self.u, self.c = self.w, self.w + 1, self.w + 2
        self.n = prm.n


def _complete_trial(prm, lay, rng, base3, k1_3, k2_3):
    """Sample every seed-incident edge consistent with the stage-one draws.

    ``base3``/``k1_3``/``k2_3`` are (w, 3) arrays for edges from each seed
    endpoint to (v, u, c).  Returns E1 rows of the left endpoints and E2 rows
    of the right endpoints (each (seeds, n) bool) and the two presence masks.
    """
    n, w = lay.n, lay.w
    p, pe, pn = prm.p, prm.p_e, prm.p_n
    base = rng.random((w, n)) < p
    k1 = rng.random((w, n)) < pe
    k2 = rng.random((w, n)) < pe
    # within the seed block the same undirected edge appears twice; mirror it
    iu = np.triu_indices(w, 1)
    for a in (base, k1, k2):
        blk = a[:, :w]
        blk[iu[1], iu[0]] = blk[iu]
        np.fill_diagonal(blk, False)
    tri = [lay.v, lay.u, lay.c]
    base[:, tri], k1[:, tri], k2[:, tri] = base3, k1_3, k2_3

    pres1 = rng.random(n) < pn
    pres2 = rng.random(n) < pn
    pres1[lay.left] = True
    pres2[lay.right] = True
    pres1[[lay.v, lay.c]] = True
    pres2[[lay.u, lay.c]] = True

    e1 = (base & k1 & pres1[None, :])[lay.left]
    e2 = (base & k2 & pres2[None, :])[lay.right]
    return e1, e2, pres1, pres2


def _beats_adversaries(score, x, y, e1, e2, pres1, pres2, lay) -> bool:
    # score >= every adversary score + 1; adversaries are unmatched pairs sharing x or y
    rows = e2[e1[:, x]].sum(axis=0)  # scores of (x, y') for every y'
    ok2 = pres2.copy()
    ok2[lay.right] = False
    ok2[y] = False
    cols = e1[e2[:, y]].sum(axis=0)  # scores of (x', y)
    ok1 = pres1.copy()
    ok1[lay.left] = False
    ok1[x] = False
    best = max(rows[ok2].max(initial=0), cols[ok1].max(initial=0))
    return score >= best + 1


def _lemma1_chunk(prm: Lemma1Params, trials: int, seed_seq) -> np.ndarray:
    rng = np.random.default_rng(seed_seq)
    lay = _Layout(prm)
    w = lay.w
    base = rng.random((trials, w, 3)) < prm.p
    k1 = rng.random((trials, w, 3)) < prm.p_e
    k2 = rng.random((trials, w, 3)) < prm.p_e
    e1 = base & k1
    e2 = base & k2
    # (v, u): E1 edge left_k - v and E2 edge right_k - u
    s_wrong = (e1[:, lay.left, 0] & e2[:, lay.right, 1]).sum(axis=1)
    s_corr = (e1[:, lay.left, 2] & e2[:, lay.right, 2]).sum(axis=1)
    counts = np.zeros(4, dtype=np.int64)
    counts[0] = int((s_wrong >= 2).sum())
    counts[2] = int((s_corr >= 2).sum())
    for t in np.flatnonzero((s_wrong >= 2) | (s_corr >= 2)):
        E1, E2, p1, p2 = _complete_trial(prm, lay, rng, base[t], k1[t], k2[t])
        if s_wrong[t] >= 2 and _beats_adversaries(s_wrong[t], lay.v, lay.u, E1, E2, p1, p2, lay):
            counts[1] += 1
        if s_corr[t] >= 2 and _beats_adversaries(s_corr[t], lay.c, lay.c, E1, E2, p1, p2, lay):
            counts[3] += 1
    return counts


def validate_lemma1(n: int, p: float, p_n: float = 1.0, p_e: float = 1.0, n_c: int = 40,
                    n_w: int = 0, trials: int = 100_000, rng_seed: int = 0,
                    threads: int = 1) -> Lemma1Report:
    """Empirical one-round match probabilities of a designated wrong pair and
    a designated correct pair, against the closed forms.

    Seeds ``[i, i]`` (correct) and ``[l, r]`` with ``l != r`` (wrong) are
    planted; the designated vertices are not seed endpoints and are present
    on the sides they are matched on.  A pair's score is its number of marks
    (seeds ``[s, s']`` with ``s ~ x`` in G1 and ``s' ~ y`` in G2).  The plain
    rule needs score >= 2; the postponed rule also needs score >= every
    adversary's + 1, over pairs whose other endpoint is present and unmatched.

    Trials are split into fixed chunks, each with its own spawned RNG stream,
    so results do not depend on ``threads``.
    """
    prm = Lemma1Params(n, p, p_n, p_e, n_c, n_w)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    analytical = lemma1_closed_forms(prm)
    bad = [k for k, q in analytical.items() if not 0.0 <= q <= 1.0]
    if bad:
        warnings.warn(f"closed forms outside [0, 1] for {bad}; they assume small p", stacklevel=2)
    sizes = [CHUNK] * (trials // CHUNK) + ([trials % CHUNK] if trials % CHUNK else [])
    streams = np.random.SeedSequence(rng_seed).spawn(len(sizes))
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(lambda a: _lemma1_chunk(prm, *a), zip(sizes, streams)))
    else:
        parts = [_lemma1_chunk(prm, s, q) for s, q in zip(sizes, streams)]
    tot = np.sum(parts, axis=0)
    keys = ("wrong_plain", "wrong_postponed", "correct_plain", "correct_postponed")
    counts = dict(zip(keys, map(int, tot)))
    return Lemma1Report(prm, trials, counts, analytical, lemma1_exact_plain(prm))


# --- distance signatures -------------------------------------------------------

@dataclass
class SignatureResult:
    vectors: np.ndarray  # (n, |S|), inf where unreachable
    component: np.ndarray  # bool mask of the giant component
    unique: bool
    collisions: int  # component vertices whose vector is shared


def _adjacency(g: Graph):
    from scipy.sparse import csr_matrix
    return csr_matrix((np.ones(len(g.indices)), g.indices, g.indptr), shape=(g.n, g.n))


def giant_component(g: Graph) -> np.ndarray:
    if g.n == 0:
        return np.zeros(0, dtype=bool)
    _, lab = connected_components(_adjacency(g), directed=False)
    return lab == np.bincount(lab).argmax()


def distance_signatures(g: Graph, seeds) -> SignatureResult:
    """BFS distance vectors ``D(v) = (d(s_1, v), ...)`` and their uniqueness
    over the giant component."""
    seeds = np.asarray(list(seeds), dtype=np.int64)
    comp = giant_component(g)
    if len(seeds):
        d = shortest_path(_adjacency(g), unweighted=True, directed=False, indices=seeds).T
    else:
        d = np.zeros((g.n, 0))
    sub = d[comp]
    _, inv, cnt = np.unique(sub, axis=0, return_inverse=True, return_counts=True)
    shared = int((cnt[inv.ravel()] > 1).sum())
    return SignatureResult(d, comp, shared == 0, shared)


def signature_seed_count(n: int, mean_degree: float, c: float = 2.0) -> int:
    """``ceil(log(n^3) / log(c np / (c np - 1)))``; needs ``c np > 1``."""
    cnp = c * mean_degree
    if cnp <= 1:
        raise ValueError("c * n * p must exceed 1")
    return math.ceil(3 * math.log(n) / math.log(cnp / (cnp - 1)))


@dataclass
class SignatureCheck:
    n: int
    mean_degree: float
    c: float
    seeds: int
    unique: list[bool]
    collisions: list[int]

    @property
    def passed(self) -> int:
        return sum(self.unique)


def check_signatures(n: int = 1000, mean_degree: float = 4.0, c: float = 2.0, trials: int = 10,
                     rng_seed: int = 0, seeds: int | None = None) -> SignatureCheck:
    """ER(n, mean_degree/n) trials with seeds drawn from the giant component."""
    k = signature_seed_count(n, mean_degree, c) if seeds is None else seeds
    ss = np.random.SeedSequence(rng_seed).spawn(trials)
    uniq, coll = [], []
    for child in ss:
        g_seed, s_seed = (int(x.generate_state(1, np.uint64)[0]) for x in child.spawn(2))
        g = gen_er(n, mean_degree / n, g_seed)
        comp = np.flatnonzero(giant_component(g))
        rng = np.random.default_rng(s_seed)
        pick = rng.choice(comp, size=min(k, len(comp)), replace=False)
        res = distance_signatures(g, np.sort(pick))
        uniq.append(res.unique)
        coll.append(res.collisions)
    return SignatureCheck(n, mean_degree, c, k, uniq, coll)


# --- truncated-PPR discrimination ----------------------------------------------

@dataclass
class DiscriminationResult:
    distinguishable: bool
    collisions: int | None
    draws: int


def characteristic_vectors(g: Graph, s: int, u: int, v: int, L: int):
    """Walk probabilities ``q^(0..L)`` at ``u`` and at ``v``."""
    q = walk_distributions(g, s, L)
    return q[:, u], q[:, v]


def discrimination_check(g: Graph, s: int, u: int, v: int, L: int, draws: int = 100,
                         rng_seed: int = 0, tol: float = 1e-12) -> DiscriminationResult:
    """Count uniform alpha draws where the truncated PPR values of ``u`` and
    ``v`` from ``s`` agree within ``tol``."""
    qu, qv = characteristic_vectors(g, s, u, v, L)
    if np.array_equal(qu, qv):
        return DiscriminationResult(False, None, draws)
    alphas = np.random.default_rng(rng_seed).uniform(0.0, 1.0, draws)
    t = np.arange(L + 1)
    w = alphas[:, None] * (1.0 - alphas[:, None]) ** t[None, :]
    diff = np.abs(w @ (qu - qv))
    return DiscriminationResult(True, int((diff < tol).sum()), draws)


# --- local-information trap ----------------------------------------------------

def local_trap_instance(n: int = 24, rng_seed: int = 4):
    """Two graphs where first-order marks favour a wrong pair.

    Both graphs share a connected random graph on ``n`` vertices in which
    vertices 3 and 4 are joined to seeds 0 and 1 only.  ``g1`` adds the edge
    3-2 and ``g2`` adds 4-2, so from seeds ``[0,0], [1,1], [2,2]`` the wrong
    pair ``[3, 4]`` collects 3 marks while ``[3, 3]`` and ``[4, 4]`` collect 2.
    Returns ``(g1, g2, seeds, wrong_pair)``.
    """
    s1, s2, s3, a, b = 0, 1, 2, 3, 4
    h = gen_er(n, 4.0 / n, rng_seed)
    if not giant_component(h).all():
        raise ValueError(f"base graph for rng_seed={rng_seed} is not connected")
    e = {tuple(x) for x in h.edges().tolist()}
    e -= {(min(x, s), max(x, s)) for x in (a, b) for s in (s1, s2, s3)}
    e.discard((a, b))
    e |= {(s1, a), (s2, a), (s1, b), (s2, b)}
    g1 = Graph.from_edges(n, sorted(e | {(s3, a)}))
    g2 = Graph.from_edges(n, sorted(e | {(s3, b)}))
    return g1, g2, [(s1, s1), (s2, s2), (s3, s3)], (a, b)
