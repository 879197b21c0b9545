"""Matching scores built from PPR labels."""

from __future__ import annotations

from dataclasses import dataclass, field

from .graph import Graph
from .ppr import forward_push


def pair_term(pu: float, pv: float, sigma: float = 0.0) -> float:
    """``min(pu, pv) / (max(pu, pv) + sigma)``, and 0 when both values are 0."""
    if pu < 0 or pv < 0:
        raise ValueError(f"PPR values must be non-negative, got {pu}, {pv}")
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    lo, hi = (pu, pv) if pu <= pv else (pv, pu)
    if hi == 0.0:
        return 0.0
    return lo / (hi + sigma)


def ne_increment(deg_u: int, deg_v: int, alpha: float, sigma: float = 0.0) -> float:
    """Score credited to each neighboring pair of a matched pair ``[u, v]``."""
    if deg_u < 1 or deg_v < 1:
        raise ValueError("neighbor expansion needs degrees >= 1")
    # same rounding as a single Forward-Push step followed by settling
    keep = 1.0 - alpha
    return pair_term(alpha * (keep / deg_u), alpha * (keep / deg_v), sigma)


@dataclass
class SeedLabelStore:
    """Per-vertex sparse PPR labels keyed by seed index, one map per graph.

    ``left[u]`` maps seed index ``k`` to the value of ``u`` in the push from
    the k-th seed's ``G1`` endpoint, and ``right`` likewise for ``G2``.
    """

    left: dict[int, dict[int, float]] = field(default_factory=dict)
    right: dict[int, dict[int, float]] = field(default_factory=dict)
    size: int = 0
    pushes: int = 0

    @classmethod
    def build(cls, g1: Graph, g2: Graph, seeds, alpha: float, r_max: float,
              settle: bool = True) -> "SeedLabelStore":
        """One Forward-Push per seed endpoint at threshold ``r_max``.

        With ``settle`` the labels are ``reserve + alpha * residue`` (see
        :meth:`PushResult.settled`); otherwise the raw reserves.
        """
        store = cls(size=len(seeds))
        for k, (s1, s2) in enumerate(seeds):
            for g, src, side in ((g1, s1, store.left), (g2, s2, store.right)):
                res = forward_push(g, src, alpha, r_max)
                store.pushes += res.push_count
                vals = res.settled() if settle else res.reserves
                for u, val in vals.items():
                    side.setdefault(u, {})[k] = val
        return store

    def entries(self) -> tuple[int, int]:
        return (sum(map(len, self.left.values())), sum(map(len, self.right.values())))


def basic_score(u: int, v: int, labels: SeedLabelStore, sigma: float = 0.0) -> float:
    """Sum of ``pair_term`` over seeds labelled on both sides.

    A seed missing on either side contributes exactly 0, so iterating the
    smaller label map is exact.
    """
    lu = labels.left.get(u)
    lv = labels.right.get(v)
    if not lu or not lv:
        return 0.0
    small, big = (lv, lu) if len(lu) > len(lv) else (lu, lv)
    total = 0.0
    for k, a in small.items():
        b = big.get(k)
        if b is None:
            continue
        lo, hi = (a, b) if a <= b else (b, a)
        total += lo / (hi + sigma)
    return total


def dense_basic_score(u: int, v: int, labels: SeedLabelStore, sigma: float = 0.0) -> float:
    """Reference: sum over every seed index with missing labels read as 0."""
    lu = labels.left.get(u, {})
    lv = labels.right.get(v, {})
    return sum(pair_term(lu.get(k, 0.0), lv.get(k, 0.0), sigma) for k in range(labels.size))
