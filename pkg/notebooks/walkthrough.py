# %% [markdown]
# # Matching two noisy copies of a random graph
#
# Sample a correlated pair, plant 20 seeds, and compare the PPR matcher
# with percolation matching.  Run as a script or open with jupytext.

# %%
import numpy as np

from pprgm import (MatchConfig, SampleParams, forward_push, run_baseline_pgm, run_pprgm,
                   sample_instance, sample_seeds)
from pprgm.metrics import evaluate

cp = sample_instance(SampleParams(n=2000, p=8 / 2000, p_n=1.0, p_e=0.8, rng_seed=1))
seeds = sample_seeds(cp, 20, rng_seed=2).pairs
print(cp.g1.n, "vertices;", cp.g1.edge_count, "and", cp.g2.edge_count, "edges")

# %% [markdown]
# A Forward-Push from one seed touches only a small neighbourhood.

# %%
res = forward_push(cp.g1, seeds[0][0], alpha=0.3, r_max=1e-4)
print(len(res.reserves), "heavy hitters,", res.push_count, "pushes,",
      f"unpushed mass {sum(res.residues.values()):.2e}")

# %% [markdown]
# With 20 seeds and 20% of edges dropped, the one-hop rules (NE and
# percolation with T=2) usually stall near the seeds.  HOE reaches further.

# %%
for alg in ("ne", "hoe"):
    out = run_pprgm(cp.g1, cp.g2, seeds, MatchConfig(expansion=alg))
    rep = evaluate(out, cp)
    print(f"{alg:8s} precision={rep.precision:.3f} recall={rep.recall:.3f} "
          f"rounds={out.stats['rounds']} candidates={out.stats['candidates']}")

base = run_baseline_pgm(cp.g1, cp.g2, seeds, threshold=2)
rep = evaluate(base, cp)
print(f"baseline precision={rep.precision:.3f} recall={rep.recall:.3f}")

# %% [markdown]
# Wider expansion pushes (smaller r'_max) create more candidates and
# cost more time.  The last row takes a minute or two.

# %%
for r in (1e-2, 1e-3, 1e-4):
    out = run_pprgm(cp.g1, cp.g2, seeds, r_prime_max=r)
    print(f"r'={r:g}: {out.stats['candidates']:8d} candidates "
          f"{out.stats['wall_time_ms']:8.0f} ms  recall={evaluate(out, cp).recall:.3f}")

# %% [markdown]
# Score of every matched pair by round: early rounds are the confident ones.

# %%
found = [m for m in out.matches if m.provenance == "matched"]
rounds = np.array([m.round for m in found])
scores = np.array([m.score for m in found])
for r in np.unique(rounds)[:10]:
    print(r, int((rounds == r).sum()), f"{np.median(scores[rounds == r]):.3f}")
