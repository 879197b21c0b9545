"""Tab-separated pair files, match tables and key=value stats reports."""

from __future__ import annotations

import math

import numpy as np

from .graph import EdgeListError, Graph
from .matcher import Match, MatchResult
from .random_model import CorrelatedPair

MATCH_HEADER = "# left\tright\tscore\tround\tprovenance"


def _rows(path):
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if s and not s.startswith("#"):
                yield lineno, s.split("\t")


def write_pairs(pairs, path) -> None:
    with open(path, "w") as fh:
        for u, v in pairs:
            fh.write(f"{u}\t{v}\n")


def read_pairs(path) -> list[tuple[int, int]]:
    out = []
    for lineno, toks in _rows(path):
        if len(toks) < 2:
            raise EdgeListError(f"{path}:{lineno}: expected 'left<TAB>right'")
        try:
            out.append((int(toks[0]), int(toks[1])))
        except ValueError:
            raise EdgeListError(f"{path}:{lineno}: non-integer vertex id") from None
    return out


def _fmt(x: float) -> str:
    return "nan" if math.isnan(x) else repr(float(x))


def write_matches(result: MatchResult, path) -> None:
    with open(path, "w") as fh:
        fh.write(MATCH_HEADER + "\n")
        for m in result.matches:
            fh.write(f"{m.left}\t{m.right}\t{_fmt(m.score)}\t{m.round}\t{m.provenance}\n")


def read_matches(path) -> list[Match]:
    out = []
    for lineno, toks in _rows(path):
        if len(toks) != 5:
            raise EdgeListError(f"{path}:{lineno}: expected 5 tab-separated columns")
        try:
            out.append(Match(int(toks[0]), int(toks[1]), float(toks[2]), int(toks[3]), toks[4]))
        except ValueError:
            raise EdgeListError(f"{path}:{lineno}: malformed match row") from None
    return out


def write_stats(stats: dict, path, record_time: bool = False) -> None:
    """One ``key=value`` line per entry; wall time only with ``record_time``
    so repeated runs produce identical files."""
    with open(path, "w") as fh:
        for k, v in stats.items():
            if k == "wall_time_ms" and not record_time:
                continue
            fh.write(f"{k}={v!r}\n" if isinstance(v, float) else f"{k}={v}\n")


def read_stats(path) -> dict:
    out = {}
    with open(path) as fh:
        for line in fh:
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            k, _, v = s.partition("=")
            for cast in (int, float):
                try:
                    v = cast(v)
                    break
                except ValueError:
                    pass
            out[k] = v
    return out


def pair_from_files(g1: Graph, g2: Graph, truth) -> CorrelatedPair:
    """Rebuild a CorrelatedPair; a vertex counts as kept on a side when it has
    an edge there or appears in the identity ground truth."""
    if g1.n != g2.n:
        raise ValueError(f"graphs must share one id space ({g1.n} != {g2.n} vertices)")
    common = np.zeros(g1.n, dtype=bool)
    for u, v in truth:
        if u != v:
            raise ValueError(f"ground truth must be the identity, got ({u}, {v})")
        if not 0 <= u < g1.n:
            raise ValueError(f"ground-truth vertex {u} out of range")
        common[u] = True
    kept1 = common | (g1.degrees > 0)
    kept2 = common | (g2.degrees > 0)
    return CorrelatedPair(g1, g2, kept1, kept2)
