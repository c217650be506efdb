"""
Privacy budget versus area error
================================

Smaller epsilon means more noise per histogram bin and a larger area error.
Past a certain number of quantiles the noise dominates, so raising Q stops
helping.
"""

import statistics

from fedroc.protocol import ProtocolConfig, run
from fedroc.score_data import PartitionSpec, SyntheticSpec, generate

seeds = range(5)
data = [generate(SyntheticSpec(n_pos=20_000, n_neg=20_000, seed=s)) for s in seeds]


def median_ae(**kw):
    return statistics.median(
        run(d, PartitionSpec(seed=s), ProtocolConfig(seed=s, **kw)).ae_roc for s, d in zip(seeds, data)
    )


# %%
print("epsilon  median AE_ROC (Q=256)")
for eps in (0.3, 1.0, 3.0, 10.0):
    print(f"{eps:7g}  {median_ae(Q=256, mode='DDP', epsilon=eps):.2e}")

# %%
print("\nQ      SA          DDP eps=0.3")
for Q in (16, 64, 256, 1024, 4096):
    print(f"{Q:<6d} {median_ae(Q=Q, mode='SA'):.2e}    {median_ae(Q=Q, mode='DDP', epsilon=0.3):.2e}")
