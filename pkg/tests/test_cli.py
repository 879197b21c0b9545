import csv
import subprocess
import sys

import pytest

from pprgm.cli import build_parser, main
from pprgm.graph import Graph, write_edge_list
from pprgm.io import read_matches, read_pairs, read_stats, write_pairs

SUBCOMMANDS = ["gen-er", "gen-sample", "gen-seeds", "match", "eval", "push",
               "validate-lemma1", "check-signatures"]


def cli(*args):
    return main([str(a) for a in args])


def read(path):
    with open(path, "rb") as fh:
        return fh.read()


@pytest.fixture(scope="module")
def instance(tmp_path_factory):
    d = tmp_path_factory.mktemp("inst")
    assert cli("gen-er", "--n", 300, "--p", 0.03, "--rng-seed", 1, "--out", d) == 0
    assert cli("gen-sample", "--base", d / "base.edges", "--pn", 1, "--pe", 0.9,
               "--rng-seed", 2, "--out", d) == 0
    assert cli("gen-seeds", "--pair-dir", d, "--rng-seed", 3) == 0
    return d


@pytest.mark.parametrize("cmd", SUBCOMMANDS)
def test_help_exits_zero(cmd, capsys):
    with pytest.raises(SystemExit) as exc:
        main([cmd, "--help"])
    assert exc.value.code == 0
    text = capsys.readouterr().out
    sub = build_parser()._subparsers._group_actions[0].choices[cmd]
    for act in sub._actions:
        for opt in act.option_strings:
            assert opt in text


def test_usage_error_exits_one(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["gen-er", "--n", "10"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["gen-er", "--n", "10", "--p", "1.5", "--out", "x"])
    assert exc.value.code == 1


def test_data_error_exits_two(tmp_path, capsys):
    assert cli("push", "--graph", tmp_path / "missing.edges", "--source", 0) == 2
    bad = tmp_path / "bad.edges"
    bad.write_text("0 1\nzero one\n")
    assert cli("push", "--graph", bad, "--source", 0) == 2
    assert "line 2" in capsys.readouterr().err


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "pprgm", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "match" in out.stdout


def test_gen_er_is_deterministic(tmp_path):
    for d in ("a", "b"):
        assert cli("gen-er", "--n", 100, "--p", 0.08, "--rng-seed", 7, "--out", tmp_path / d) == 0
    assert read(tmp_path / "a/base.edges") == read(tmp_path / "b/base.edges")
    assert read(tmp_path / "a/base.edges").strip()


def test_full_retention_gives_identical_graphs(tmp_path):
    cli("gen-er", "--n", 100, "--p", 0.08, "--rng-seed", 7, "--out", tmp_path)
    assert cli("gen-sample", "--base", tmp_path / "base.edges", "--pn", 1, "--pe", 1,
               "--out", tmp_path) == 0
    assert read(tmp_path / "g1.edges") == read(tmp_path / "g2.edges")


def test_gen_seeds_default_count(instance):
    seeds = read_pairs(instance / "seeds.tsv")
    assert len(seeds) == 20 and all(u == v for u, v in seeds)


def test_gen_seeds_wrong(instance, tmp_path):
    assert cli("gen-seeds", "--pair-dir", instance, "--correct", 5, "--wrong", 5,
               "--out", tmp_path) == 0
    seeds = read_pairs(tmp_path / "seeds.tsv")
    assert sum(u != v for u, v in seeds) == 5 and len(seeds) == 10


def match(inst, out, *flags):
    args = ["match", "--g1", inst / "g1.edges", "--g2", inst / "g2.edges",
            "--seeds", inst / "seeds.tsv", "--out", out, *flags]
    assert cli(*args) == 0
    return read_matches(out / "matches.tsv"), read_stats(out / "stats.txt")


def test_match_ne(instance, tmp_path):
    rows, stats = match(instance, tmp_path, "--algorithm", "ne")
    assert len(rows) >= 20
    assert [m.provenance for m in rows[:20]] == ["seed"] * 20
    assert stats["algorithm"] == "ne" and "wall_time_ms" not in stats


def test_smaller_expansion_threshold_gives_more_candidates(instance, tmp_path):
    _, coarse = match(instance, tmp_path / "a", "--r-prime-max", 1e-3)
    _, fine = match(instance, tmp_path / "b", "--r-prime-max", 1e-4)
    assert fine["candidates"] > coarse["candidates"]
    assert fine["pushes"] > coarse["pushes"]


def test_match_baseline_triangle(tmp_path, triangle):
    write_edge_list(triangle, tmp_path / "t.edges")
    write_pairs([(0, 0), (1, 1)], tmp_path / "seeds.tsv")
    assert cli("match", "--g1", tmp_path / "t.edges", "--g2", tmp_path / "t.edges",
               "--seeds", tmp_path / "seeds.tsv", "--algorithm", "baseline",
               "--threshold", 2, "--out", tmp_path) == 0
    rows = read_matches(tmp_path / "matches.tsv")
    assert [(m.left, m.right, m.provenance) for m in rows] == \
        [(0, 0, "seed"), (1, 1, "seed"), (2, 2, "matched")]


def test_record_time_flag(instance, tmp_path):
    _, stats = match(instance, tmp_path, "--record-time")
    assert stats["wall_time_ms"] > 0


@pytest.fixture
def cycle_files(tmp_path):
    g = Graph.from_edges(20, [(i, (i + 1) % 20) for i in range(20)])
    write_edge_list(g, tmp_path / "g.edges")
    write_pairs([(i, i) for i in range(20)], tmp_path / "truth.tsv")

    def run(pairs, *flags):
        with open(tmp_path / "m.tsv", "w") as fh:
            fh.write("# left\tright\tscore\tround\tprovenance\n")
            for u, v in pairs:
                fh.write(f"{u}\t{v}\t1.0\t1\tmatched\n")
        return cli("eval", "--matches", tmp_path / "m.tsv", "--truth", tmp_path / "truth.tsv",
                   "--g1", tmp_path / "g.edges", "--g2", tmp_path / "g.edges", *flags)
    return run


def test_eval_perfect(cycle_files, capsys):
    assert cycle_files([(i, i) for i in range(20)]) == 0
    assert "precision=1.0000" in capsys.readouterr().out


def test_eval_empty(cycle_files, capsys):
    assert cycle_files([]) == 0
    out = capsys.readouterr().out
    assert "precision=0.0000" in out and "recall=0.0000" in out and "f1=0.0000" in out


def test_eval_eight_and_two(cycle_files, capsys, tmp_path):
    table = tmp_path / "runs.csv"
    pairs = [(i, i) for i in range(8)] + [(8, 9), (9, 8)]
    for _ in range(2):
        assert cycle_files(pairs, "--csv", table, "--p-e", 0.8) == 0
    assert "precision=0.8000" in capsys.readouterr().out
    with open(table) as fh:
        got = list(csv.DictReader(fh))
    assert len(got) == 2 and got[0]["precision"] == "0.800000" and got[0]["p_e"] == "0.8"


def test_eval_out_of_range_is_data_error(cycle_files):
    assert cycle_files([(0, 50)]) == 2


def test_push_output(tmp_path, capsys):
    g = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    write_edge_list(g, tmp_path / "t.edges")
    assert cli("push", "--graph", tmp_path / "t.edges", "--source", 0, "--r-max", 1e-6) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[1] == "vertex\treserve\tresidue"
    body = [l.split("\t") for l in lines[2:]]
    assert body[0][0] == "0"
    assert sum(float(r) + float(s) for _, r, s in body) == pytest.approx(1.0, abs=1e-12)
    assert cli("push", "--graph", tmp_path / "t.edges", "--source", 9) == 2


def test_validate_lemma1_smoke(capsys):
    assert cli("validate-lemma1", "--n", 200, "--np", 4, "--n-c", 10, "--trials", 2000) == 0
    out = capsys.readouterr().out
    for k in ("wrong_plain", "wrong_postponed", "correct_plain", "correct_postponed"):
        assert k in out


def test_check_signatures_smoke(capsys):
    assert cli("check-signatures", "--n", 120, "--trials", 2, "--seeds", 120) == 0
    assert "unique in 2/2 trials" in capsys.readouterr().out
