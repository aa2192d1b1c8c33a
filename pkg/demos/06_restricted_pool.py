# %% [markdown]
# # Restricted pools
# The ablation deals strategies from a subset of the 192 configurations.
# Here: one exploitative recipe, a seeded 20-recipe subset, and the full pool.

# %%
import numpy as np

from istratde import Budget, make_problem, run_istratde
from istratde.core import BaseVectorKind, CrossoverKind, pool_index

problem = make_problem("rastrigin", 5, seed=0)
budget = Budget.evaluations(30_000)
pools = {
    "1": [pool_index(BaseVectorKind.CURRENT, BaseVectorKind.BEST, 1, CrossoverKind.BINOMIAL)],
    "20": sorted(np.random.default_rng(0).choice(192, 20, replace=False).tolist()),
    "192": None,
}

# %%
for name, subset in pools.items():
    errors = [run_istratde(problem, 300, budget, seed, subset).best_value for seed in range(5)]
    print(f"pool {name:>3s}: median error {np.median(errors):.3e}")
