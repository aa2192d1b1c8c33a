# %% [markdown]
# # Population size under a fixed evaluation budget
# A bigger population buys diversity but costs generations: with a budget of
# B evaluations and population N, only (B - N) // N generations run.

# %%
from istratde.algorithms import Budget
from istratde.harness import ExperimentSpec, population_scaling_sweep

base = ExperimentSpec(
    algorithm="istratde", function_id="rastrigin", dim=5, pop_size=64,
    budget=Budget.evaluations(30_000), runs=5, track=0,
)
sweep = population_scaling_sweep(base, [32, 128, 512], 30_000)
for row in sweep["table"]:
    gens = (30_000 - row["pop_size"]) // row["pop_size"]
    print(f"N={row['pop_size']:4d} gens={gens:4d} median={row['median']:.3e} normalized={row['normalized_mean']:.3f}")
