import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st

from pprgm.analysis import (Lemma1Params, characteristic_vectors, check_signatures,
                            discrimination_check, distance_signatures, giant_component,
                            lemma1_closed_forms, lemma1_exact_plain, local_trap_instance,
                            signature_seed_count, validate_lemma1)

from conftest import cycle, graphs, path


def test_closed_forms_vanish_for_isomorphic_correct_seeds():
    cf = lemma1_closed_forms(Lemma1Params(2000, 0.002, 1.0, 1.0, 40, 0))
    assert cf["wrong_postponed"] == 0.0
    assert cf["wrong_plain"] > 0


def test_closed_forms_ratio_example():
    cf = lemma1_closed_forms(Lemma1Params(2000, 0.002, 1.0, 0.9, 40, 0))
    assert cf["wrong_postponed"] / cf["wrong_plain"] == pytest.approx((1 - 0.9 ** 4) ** 2)
    assert (1 - 0.9 ** 4) ** 2 == pytest.approx(0.118, abs=1e-3)


def test_zero_edge_probability():
    rep = validate_lemma1(100, 0.0, 1.0, 0.9, 10, 2, trials=2000)
    assert all(v == 0.0 for v in lemma1_closed_forms(rep.params).values())
    assert all(c == 0 for c in rep.counts.values())


def test_isomorphic_wrong_rate_is_zero():
    rep = validate_lemma1(60, 0.1, 1.0, 1.0, 15, 0, trials=20_000, rng_seed=2)
    assert rep.counts["wrong_plain"] > 0
    assert rep.counts["wrong_postponed"] == 0


def _brute_force(prm, trials, rng_seed):
    # full graphs, every pair scored by matrix products
    rng = np.random.default_rng(rng_seed)
    n, nc, nw = prm.n, prm.n_c, prm.n_w
    left = list(range(nc)) + [nc + 2 * j for j in range(nw)]
    right = list(range(nc)) + [nc + 2 * j + 1 for j in range(nw)]
    w = nc + 2 * nw
    v, u, c = w, w + 1, w + 2
    iu = np.triu_indices(n, 1)
    counts = np.zeros(4, int)
    for _ in range(trials):
        a = np.zeros((n, n), bool)
        a[iu] = rng.random(len(iu[0])) < prm.p
        k1 = np.zeros((n, n), bool)
        k1[iu] = rng.random(len(iu[0])) < prm.p_e
        k2 = np.zeros((n, n), bool)
        k2[iu] = rng.random(len(iu[0])) < prm.p_e
        a, k1, k2 = a | a.T, k1 | k1.T, k2 | k2.T
        p1 = rng.random(n) < prm.p_n
        p2 = rng.random(n) < prm.p_n
        p1[left] = p2[right] = True
        p1[[v, c]] = p2[[u, c]] = True
        e1 = a & k1 & np.outer(p1, p1)
        e2 = a & k2 & np.outer(p2, p2)
        S = e1[left].T.astype(int) @ e2[right].astype(int)  # S[x, y] = marks of (x, y)
        free1 = p1.copy()
        free1[left] = False
        free2 = p2.copy()
        free2[right] = False
        for slot, (x, y) in ((0, (v, u)), (2, (c, c))):
            s = S[x, y]
            if s < 2:
                continue
            counts[slot] += 1
            row = S[x][free2 & (np.arange(n) != y)]
            col = S[:, y][free1 & (np.arange(n) != x)]
            if s >= max(row.max(initial=0), col.max(initial=0)) + 1:
                counts[slot + 1] += 1
    return counts


def test_monte_carlo_matches_brute_force():
    prm = Lemma1Params(40, 0.25, 0.8, 0.8, 8, 3)
    trials = 3000
    rep = validate_lemma1(prm.n, prm.p, prm.p_n, prm.p_e, prm.n_c, prm.n_w, trials, rng_seed=1)
    bf = _brute_force(prm, trials, 99)
    keys = ("wrong_plain", "wrong_postponed", "correct_plain", "correct_postponed")
    for i, k in enumerate(keys):
        a, b = rep.counts[k] / trials, bf[i] / trials
        q = (a + b) / 2
        se = math.sqrt(max(q * (1 - q), 1e-12) * 2 / trials)
        assert abs(a - b) < 4 * se, k


@pytest.mark.parametrize("prm", [Lemma1Params(500, 0.02, 1.0, 0.9, 20, 0),
                                 Lemma1Params(300, 0.03, 0.8, 0.9, 10, 5)])
def test_plain_rates_match_exact_binomial(prm):
    for trials in (30_000, 90_000):
        rep = validate_lemma1(prm.n, prm.p, prm.p_n, prm.p_e, prm.n_c, prm.n_w, trials, rng_seed=5)
        for k, q in lemma1_exact_plain(prm).items():
            se = math.sqrt(q * (1 - q) / trials)
            assert abs(rep.empirical[k] - q) < 4 * se, (k, trials)


def test_postponed_never_exceeds_plain():
    rep = validate_lemma1(300, 0.03, 0.8, 0.9, 10, 5, 20_000, rng_seed=3)
    assert rep.counts["wrong_postponed"] <= rep.counts["wrong_plain"]
    assert rep.counts["correct_postponed"] <= rep.counts["correct_plain"]


def test_thread_count_does_not_change_result():
    a = validate_lemma1(300, 0.03, 1.0, 0.9, 10, 2, 10_000, rng_seed=4, threads=1)
    b = validate_lemma1(300, 0.03, 1.0, 0.9, 10, 2, 10_000, rng_seed=4, threads=3)
    assert a.counts == b.counts


def test_out_of_range_closed_form_warns():
    with pytest.warns(UserWarning):
        validate_lemma1(50, 0.9, 1.0, 1.0, 10, 0, trials=10)


def test_signatures_on_path():
    res = distance_signatures(path(3), [0, 2])
    assert res.vectors.tolist() == [[0, 2], [1, 1], [2, 0]]
    assert res.unique


def test_single_seed_on_even_cycle():
    res = distance_signatures(cycle(8), [0])
    assert not res.unique
    assert res.collisions == 6


@given(graphs(min_n=2, max_n=30), st.lists(st.integers(0, 29), min_size=1, max_size=5))
def test_signatures_match_networkx_bfs(g, seeds):
    seeds = [s % g.n for s in seeds]
    res = distance_signatures(g, seeds)
    G = nx.Graph()
    G.add_nodes_from(range(g.n))
    G.add_edges_from(g.edges().tolist())
    for j, s in enumerate(seeds):
        d = nx.single_source_shortest_path_length(G, s)
        for v in range(g.n):
            assert res.vectors[v, j] == d.get(v, math.inf)
    big = max(nx.connected_components(G), key=len)
    assert giant_component(g).sum() == len(big)


def test_seed_count_formula():
    assert signature_seed_count(1000, 4.0, 2.0) == math.ceil(math.log(1000 ** 3) / math.log(8 / 7))
    assert signature_seed_count(1000, 4.0, 2.0) == 156
    with pytest.raises(ValueError):
        signature_seed_count(10, 0.4, 1.0)


def test_every_vertex_as_seed_is_unique():
    rep = check_signatures(200, 4.0, trials=2, seeds=200)
    assert rep.passed == 2


def test_discrimination_identical_vertex():
    res = discrimination_check(path(4), 0, 2, 2, 3)
    assert not res.distinguishable and res.collisions is None


def test_discrimination_on_path():
    qu, qv = characteristic_vectors(path(4), 0, 1, 2, 3)
    assert not np.array_equal(qu, qv)
    res = discrimination_check(path(4), 0, 1, 2, 3, draws=100, rng_seed=1)
    assert res.distinguishable and res.collisions == 0


@pytest.mark.parametrize("L", [1, 2, 5, 9])
def test_symmetric_pair_indistinguishable(L):
    assert not discrimination_check(cycle(6), 0, 1, 5, L).distinguishable


def test_local_trap_marks():
    g1, g2, seeds, (a, b) = local_trap_instance()

    def marks(x, y):
        return sum(g1.has_edge(s, x) and g2.has_edge(t, y) for s, t in seeds)

    assert marks(a, b) == 3
    assert marks(a, a) == 2 and marks(b, b) == 2
    assert giant_component(g1).all() and giant_component(g2).all()
