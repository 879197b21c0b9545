"""Command-line interface: ``pprgm <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time

from . import analysis, io
from .graph import EdgeListError, read_edge_list, write_edge_list
from .matcher import MatchConfig, run_baseline_pgm, run_pprgm
from .metrics import evaluate
from .ppr import forward_push
from .random_model import gen_er, sample_correlated, sample_seeds

CSV_FIELDS = ["algorithm", "p_n", "p_e", "seeds", "wrong_frac", "precision", "recall", "f1",
              "time_ms", "candidates"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _prob(s):
    x = float(s)
    if not 0.0 <= x <= 1.0:
        raise argparse.ArgumentTypeError(f"must be in [0, 1], got {s}")
    return x


def _outdir(path):
    os.makedirs(path, exist_ok=True)
    return path


def _manifest(path):
    print(f"wrote {path}")


# --- generation ----------------------------------------------------------------

def cmd_gen_er(a):
    if a.n < 1:
        raise UsageError("--n must be >= 1")
    g = gen_er(a.n, a.p, a.rng_seed)
    path = os.path.join(_outdir(a.out), "base.edges")
    write_edge_list(g, path)
    _manifest(path)


def cmd_gen_sample(a):
    base = read_edge_list(a.base)
    cp = sample_correlated(base, a.p_n, a.p_e, a.rng_seed)
    out = _outdir(a.out)
    for name, g in (("g1.edges", cp.g1), ("g2.edges", cp.g2)):
        write_edge_list(g, os.path.join(out, name))
        _manifest(os.path.join(out, name))
    path = os.path.join(out, "truth.tsv")
    io.write_pairs(cp.truth_pairs(), path)
    _manifest(path)


def _load_pair(d):
    g1 = read_edge_list(os.path.join(d, "g1.edges"))
    g2 = read_edge_list(os.path.join(d, "g2.edges"))
    truth = io.read_pairs(os.path.join(d, "truth.tsv"))
    return io.pair_from_files(g1, g2, truth)


def cmd_gen_seeds(a):
    cp = _load_pair(a.pair_dir)
    ss = sample_seeds(cp, a.correct, a.wrong, a.min_degree, a.rng_seed)
    path = os.path.join(_outdir(a.out or a.pair_dir), "seeds.tsv")
    io.write_pairs(ss.pairs, path)
    _manifest(path)


# --- matching ------------------------------------------------------------------

def cmd_match(a):
    g1 = read_edge_list(a.g1)
    g2 = read_edge_list(a.g2)
    seeds = io.read_pairs(a.seeds)
    if a.algorithm == "baseline":
        res = run_baseline_pgm(g1, g2, seeds, a.threshold)
    else:
        cfg = MatchConfig(expansion=a.algorithm, alpha=a.alpha, r_max=a.r_max,
                          r_prime_max=a.r_prime_max, sigma=a.sigma,
                          expansion_sigma=a.expansion_sigma, beta0=a.beta0, gamma0=a.gamma0,
                          beta_floor=a.beta_floor, gamma_floor=a.gamma_floor)
        res = run_pprgm(g1, g2, seeds, cfg)
    out = _outdir(a.out)
    mpath = os.path.join(out, "matches.tsv")
    spath = os.path.join(out, "stats.txt")
    io.write_matches(res, mpath)
    io.write_stats(res.stats, spath, record_time=a.record_time)
    _manifest(mpath)
    _manifest(spath)
    print(f"matched {res.stats['matched']} pairs beyond {len(seeds)} seeds "
          f"in {res.stats['wall_time_ms']:.1f} ms")


def cmd_eval(a):
    cp = io.pair_from_files(read_edge_list(a.g1), read_edge_list(a.g2), io.read_pairs(a.truth))
    rows = io.read_matches(a.matches)
    rep = evaluate(rows, cp, count_seeds=a.count_seeds)
    print(rep.as_text())
    if a.csv:
        stats = io.read_stats(a.stats) if a.stats else {}
        seeds = [(m.left, m.right) for m in rows if m.provenance == "seed"]
        wrong = sum(1 for u, v in seeds if not (u == v and cp.common[u]))
        row = {
            "algorithm": stats.get("algorithm", "unknown"),
            "p_n": a.p_n if a.p_n is not None else "",
            "p_e": a.p_e if a.p_e is not None else "",
            "seeds": len(seeds),
            "wrong_frac": f"{wrong / len(seeds):.4f}" if seeds else "0.0000",
            "precision": f"{rep.precision:.6f}",
            "recall": f"{rep.recall:.6f}",
            "f1": f"{rep.f1:.6f}",
            "time_ms": stats.get("wall_time_ms", ""),
            "candidates": stats.get("candidates", ""),
        }
        new = not os.path.exists(a.csv) or os.path.getsize(a.csv) == 0
        with open(a.csv, "a", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
            if new:
                w.writeheader()
            w.writerow(row)


def cmd_push(a):
    g = read_edge_list(a.graph)
    if not 0 <= a.source < g.n:
        raise ValueError(f"source {a.source} out of range [0, {g.n})")
    res = forward_push(g, a.source, a.alpha, a.r_max)
    support = set(res.reserves) | set(res.residues)
    order = sorted(support, key=lambda u: (-res.reserves.get(u, 0.0), u))
    print(f"# source={a.source} pushes={res.push_count} heavy_hitters={len(res.reserves)}")
    print("vertex\treserve\tresidue")
    for u in order:
        print(f"{u}\t{res.reserves.get(u, 0.0)!r}\t{res.residues.get(u, 0.0)!r}")


# --- analysis ------------------------------------------------------------------

def cmd_validate_lemma1(a):
    p = a.p if a.p is not None else a.np / a.n
    t0 = time.perf_counter()
    rep = analysis.validate_lemma1(a.n, p, a.p_n, a.p_e, a.n_c, a.n_w, a.trials, a.rng_seed,
                                   threads=a.threads)
    print(f"# n={a.n} p={p!r} p_n={a.p_n} p_e={a.p_e} n_c={a.n_c} n_w={a.n_w} "
          f"trials={a.trials}")
    print(rep.table())
    for k, v in rep.exact.items():
        print(f"# exact {k} = {v:.4e}")
    print(f"# {time.perf_counter() - t0:.2f} s", file=sys.stderr)


def cmd_check_signatures(a):
    rep = analysis.check_signatures(a.n, a.np, a.c, a.trials, a.rng_seed, a.seeds)
    print(f"seeds={rep.seeds}")
    for i, (u, k) in enumerate(zip(rep.unique, rep.collisions)):
        print(f"trial {i}: {'unique' if u else 'not unique'} (shared vectors: {k})")
    print(f"unique in {rep.passed}/{len(rep.unique)} trials")


# --- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    ap = _Parser(prog="pprgm", description=__doc__.splitlines()[0], formatter_class=fmt)
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("gen-er", help="Erdos-Renyi base graph", formatter_class=fmt)
    p.add_argument("--n", type=int, required=True, help="vertex count")
    p.add_argument("--p", type=_prob, required=True, help="edge probability")
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory (writes base.edges)")
    p.set_defaults(fn=cmd_gen_er)

    p = sub.add_parser("gen-sample", help="correlated pair from a base graph", formatter_class=fmt)
    p.add_argument("--base", required=True, help="base edge list")
    p.add_argument("--p-n", "--pn", dest="p_n", type=_prob, default=1.0,
                   help="vertex keep probability")
    p.add_argument("--p-e", "--pe", dest="p_e", type=_prob, default=1.0,
                   help="edge keep probability")
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory (g1.edges, g2.edges, truth.tsv)")
    p.set_defaults(fn=cmd_gen_sample)

    p = sub.add_parser("gen-seeds", help="seed pairs for a sampled pair", formatter_class=fmt)
    p.add_argument("--pair-dir", required=True, help="directory holding g1/g2.edges and truth.tsv")
    p.add_argument("--correct", type=int, default=20, help="correct seed count")
    p.add_argument("--wrong", type=int, default=0, help="wrong seed count")
    p.add_argument("--min-degree", type=int, default=1, help="minimum degree of seed endpoints")
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output directory (default: --pair-dir)")
    p.set_defaults(fn=cmd_gen_seeds)

    p = sub.add_parser("match", help="run a matcher", formatter_class=fmt)
    p.add_argument("--g1", required=True)
    p.add_argument("--g2", required=True)
    p.add_argument("--seeds", required=True)
    p.add_argument("--algorithm", choices=["ne", "hoe", "baseline"], default="hoe")
    p.add_argument("--alpha", type=float, default=0.3, help="PPR stopping probability")
    p.add_argument("--r-max", type=float, default=None,
                   help="seed push threshold (default |S| / (2 max(|V1|, |V2|)))")
    p.add_argument("--r-prime-max", type=float, default=1e-3, help="expansion push threshold")
    p.add_argument("--sigma", type=float, default=None,
                   help="smoothing of seed-label terms (default 10 r_max)")
    p.add_argument("--expansion-sigma", type=float, default=None,
                   help="smoothing of expansion increments (default 10 r_prime_max)")
    p.add_argument("--beta0", type=float, default=1.0, help="initial closeness factor")
    p.add_argument("--gamma0", type=float, default=None, help="initial score threshold (default |S|/2)")
    p.add_argument("--beta-floor", type=float, default=1.0 / 128)
    p.add_argument("--gamma-floor", type=float, default=1.0)
    p.add_argument("--threshold", type=int, default=2, help="baseline mark threshold T")
    p.add_argument("--record-time", action="store_true", help="write wall time into stats.txt")
    p.add_argument("--out", required=True, help="output directory (matches.tsv, stats.txt)")
    p.set_defaults(fn=cmd_match)

    p = sub.add_parser("eval", help="precision / recall / F1", formatter_class=fmt)
    p.add_argument("--matches", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--g1", required=True)
    p.add_argument("--g2", required=True)
    p.add_argument("--count-seeds", action="store_true", help="count seed rows as found matches")
    p.add_argument("--csv", default=None, help="append one result row to this CSV file")
    p.add_argument("--stats", default=None, help="stats.txt of the run, for the CSV row")
    p.add_argument("--p-n", type=float, default=None, help="recorded in the CSV row")
    p.add_argument("--p-e", type=float, default=None, help="recorded in the CSV row")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("push", help="print a Forward-Push result", formatter_class=fmt)
    p.add_argument("--graph", required=True)
    p.add_argument("--source", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.3)
    p.add_argument("--r-max", type=float, default=1e-4)
    p.set_defaults(fn=cmd_push)

    p = sub.add_parser("validate-lemma1", help="one-round postponing Monte Carlo",
                       formatter_class=fmt)
    p.add_argument("--n", type=int, default=2000)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--p", type=_prob, default=None, help="edge probability")
    g.add_argument("--np", type=float, default=4.0, help="mean degree, used when --p is absent")
    p.add_argument("--p-n", type=_prob, default=1.0)
    p.add_argument("--p-e", type=_prob, default=0.9)
    p.add_argument("--n-c", type=int, default=40, help="correct seeds")
    p.add_argument("--n-w", type=int, default=0, help="wrong seeds")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(fn=cmd_validate_lemma1)

    p = sub.add_parser("check-signatures", help="distance-vector uniqueness on ER graphs",
                       formatter_class=fmt)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--np", type=float, default=4.0, help="mean degree")
    p.add_argument("--c", type=float, default=2.0, help="constant in the seed-count formula")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seeds", type=int, default=None, help="override the formula's seed count")
    p.add_argument("--rng-seed", type=int, default=0)
    p.set_defaults(fn=cmd_check_signatures)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    a = ap.parse_args(argv)
    try:
        a.fn(a)
    except UsageError as e:
        print(f"pprgm: error: {e}", file=sys.stderr)
        return 1
    except (OSError, EdgeListError, ValueError, IndexError) as e:
        print(f"pprgm: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
