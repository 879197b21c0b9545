import random

import numpy as np
import pytest

from pprgm.graph import Graph
from pprgm.matcher import Match
from pprgm.metrics import EvalReport, evaluate, identifiable
from pprgm.random_model import CorrelatedPair

from conftest import cycle


def pair(g1, g2=None, kept1=None, kept2=None):
    g2 = g2 or g1
    n = g1.n
    k1 = np.ones(n, bool) if kept1 is None else kept1
    k2 = np.ones(n, bool) if kept2 is None else kept2
    return CorrelatedPair(g1, g2, k1, k2)


def rows(pairs, prov="matched"):
    return [Match(u, v, 1.0, 1, prov) for u, v in pairs]


def test_perfect():
    cp = pair(cycle(6))
    rep = evaluate(rows([(i, i) for i in range(6)]), cp)
    assert (rep.precision, rep.recall, rep.f1) == (1.0, 1.0, 1.0)


def test_empty():
    rep = evaluate([], pair(cycle(4)))
    assert (rep.precision, rep.recall, rep.f1) == (0.0, 0.0, 0.0)


def test_formula_arithmetic():
    rep = EvalReport.from_counts(8, 2, 20)
    assert rep.precision == pytest.approx(0.8)
    assert rep.recall == pytest.approx(0.4)
    assert rep.f1 == pytest.approx(2 * 0.8 * 0.4 / 1.2)
    assert rep.f1 == pytest.approx(0.5333, abs=1e-4)
    assert EvalReport.from_counts(0, 0, 0).f1 == 0.0


def test_eight_correct_two_wrong():
    cp = pair(cycle(20))
    found = [(i, i) for i in range(8)] + [(8, 9), (9, 8)]
    rep = evaluate(rows(found), cp)
    assert (rep.n_correct, rep.n_wrong, rep.n_ident) == (8, 2, 20)
    assert rep.precision == pytest.approx(0.8)


def test_order_invariance():
    cp = pair(cycle(30))
    found = [(i, i) for i in range(12)] + [(12, 14), (14, 12), (20, 21)]
    ref = evaluate(rows(found), cp)
    rng = random.Random(3)
    for _ in range(5):
        rng.shuffle(found)
        assert evaluate(rows(found), cp) == ref


def test_seed_rows_ignored_unless_asked():
    cp = pair(cycle(10))
    res = rows([(0, 0), (1, 2)], "seed") + rows([(3, 3)])
    rep = evaluate(res, cp)
    assert (rep.n_correct, rep.n_wrong) == (1, 0)
    rep = evaluate(res, cp, count_seeds=True)
    assert (rep.n_correct, rep.n_wrong) == (2, 1)


def test_identity_needs_presence_on_both_sides():
    g = cycle(6)
    kept2 = np.ones(6, bool)
    kept2[2] = False
    cp = pair(g, kept2=kept2)
    rep = evaluate(rows([(2, 2)]), cp)
    assert rep.n_wrong == 1


def test_identifiable_needs_degree_two_in_both():
    g1 = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4)])
    g2 = Graph.from_edges(5, [(0, 1), (1, 2), (2, 0), (0, 4)])
    assert identifiable(pair(g1, g2)).tolist() == [True, True, True, False, False]


def test_out_of_range_pair():
    with pytest.raises(IndexError):
        evaluate(rows([(0, 9)]), pair(cycle(4)))
