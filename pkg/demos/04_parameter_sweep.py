"""Sensitivity to the ridge weight alpha and the anchor proportion theta.

A coarse grid over a few replicas; the command line ``aas sweep`` does the
same and writes the means to CSV.
"""
import warnings

import numpy as np

from aas.fusion import EmptyCluster, FusionConfig, RankDeficiency, run
from aas.metrics import accuracy
from aas.synth import generate, preset

warnings.simplefilter("ignore", RankDeficiency)
warnings.simplefilter("ignore", EmptyCluster)

seeds = range(3)
data = {s: generate(preset("sbm50", s)) for s in seeds}
alphas = (0.01, 0.1, 1.0, 10.0)
thetas = (0.1, 0.3, 0.5)

print("mean ACC" + "".join(f"  theta={t:<4}" for t in thetas))
for alpha in alphas:
    row = []
    for theta in thetas:
        accs = [accuracy(run(ds, FusionConfig(alpha=alpha, theta=theta, seed=s)).labels,
                         ds.labels)[0] for s, ds in data.items()]
        row.append(np.mean(accs))
    print(f"alpha={alpha:<5}" + "".join(f"  {v:10.3f}" for v in row))
