"""Precision, recall and F1 of a matching against identity ground truth."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .random_model import CorrelatedPair


@dataclass(frozen=True)
class EvalReport:
    n_correct: int
    n_wrong: int
    n_ident: int
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_counts(cls, n_correct: int, n_wrong: int, n_ident: int) -> "EvalReport":
        tot = n_correct + n_wrong
        p = n_correct / tot if tot else 0.0
        r = n_correct / n_ident if n_ident else 0.0
        f = 2 * p * r / (p + r) if p > 0 and r > 0 else 0.0
        return cls(n_correct, n_wrong, n_ident, p, r, f)

    def as_text(self) -> str:
        return "\n".join(f"{k}={v:.4f}" if isinstance(v, float) else f"{k}={v}"
                         for k, v in asdict(self).items())


def identifiable(cp: CorrelatedPair) -> np.ndarray:
    """Vertices kept on both sides with degree >= 2 in each sampled graph."""
    return cp.common & (cp.g1.degrees >= 2) & (cp.g2.degrees >= 2)


def evaluate(matches, cp: CorrelatedPair, count_seeds: bool = False) -> EvalReport:
    """Score ``matches`` (a MatchResult or rows with left/right/provenance).

    Seed rows are skipped unless ``count_seeds``.
    """
    rows = getattr(matches, "matches", matches)
    n1, n2 = cp.g1.n, cp.g2.n
    common = cp.common
    nc = nw = 0
    for m in rows:
        u, v, prov = m[0], m[1], m[-1]
        if not (0 <= u < n1 and 0 <= v < n2):
            raise IndexError(f"matched pair ({u}, {v}) outside the vertex range")
        if prov == "seed" and not count_seeds:
            continue
        if u == v and common[u]:
            nc += 1
        else:
            nw += 1
    return EvalReport.from_counts(nc, nw, int(identifiable(cp).sum()))
