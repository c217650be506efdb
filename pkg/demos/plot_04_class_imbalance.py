"""
Class imbalance and the PR curve
================================

Keep every negative and subsample positives to a ratio r. Fewer positives
means coarser positive quantiles and a harder PR curve to recover.
"""

import statistics

from fedroc.protocol import ProtocolConfig, run
from fedroc.score_data import PartitionSpec, SyntheticSpec, generate, subsample_ratio

print("ratio  positives  median AE_PR  median AE_ROC")
for r in (0.01, 0.1, 0.3, 1.0):
    pr, roc = [], []
    for seed in range(5):
        data = subsample_ratio(generate(SyntheticSpec(n_pos=20_000, n_neg=20_000, seed=seed)), r, seed=seed)
        res = run(data, PartitionSpec(seed=seed), ProtocolConfig(Q=256, mode="SA"))
        pr.append(res.ae_pr)
        roc.append(res.ae_roc)
    print(f"{r:5g}  {data.n_pos:9d}  {statistics.median(pr):.2e}      {statistics.median(roc):.2e}")
