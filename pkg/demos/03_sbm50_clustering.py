"""End-to-end run on the 50-node replica, with ablations and the K-means baseline.

Each seed draws a fresh replica and initializes the optimizer with the same
seed.  Pass the number of seeds as the first argument (default 5).
"""
import sys
import warnings

from aas.fusion import EmptyCluster, FusionConfig, RankDeficiency, run
from aas.metrics import evaluate, format_table, kmeans_baseline, summarize
from aas.synth import generate, preset

warnings.simplefilter("ignore", RankDeficiency)
warnings.simplefilter("ignore", EmptyCluster)

n_seeds = int(sys.argv[1]) if len(sys.argv) > 1 else 5
reports = {"AAS": [], "AAS no-structure": [], "AAS random-anchors": [], "K-means": []}
iterations = []
for seed in range(n_seeds):
    ds = generate(preset("sbm50", seed))
    for name, mode in (("AAS", "full"), ("AAS no-structure", "no-structure"),
                       ("AAS random-anchors", "random-anchors")):
        state = run(ds, FusionConfig(seed=seed, ablation=mode))
        reports[name].append(evaluate(state.labels, ds.labels))
        if mode == "full":
            iterations.append(len(state.objective_trace))
    reports["K-means"].append(kmeans_baseline(ds, k=4, seed=seed))

print(format_table([("sbm50", name, summarize(r)) for name, r in reports.items()]))
print("\nouter iterations per full run:", iterations)
