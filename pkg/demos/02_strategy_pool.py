# %% [markdown]
# # The strategy pool
# Every individual gets one of 192 recipes DE/bl-to-br/dn/cs plus its own F
# and CR, all fixed for the whole run.

# %%
import numpy as np

from istratde.core import POOL, StrategyConfig, init_population, sample_strategies
from istratde.benchmarks import make_problem
from istratde.harness import pool_census

print(len(POOL), "configurations; first three:")
for entry in POOL[:3]:
    print("  ", StrategyConfig(*entry, f=0.5, cr=0.5).name)

# %%
pop = init_population(make_problem("sphere", 5), 12, seed=3)
for s in pop.strategies[:5]:
    print(f"{s.name:28s} F={s.f:.2f} CR={s.cr:.2f}")

# %% [markdown]
# Plain independent sampling spreads 100k deals evenly. With p = 1/192 the
# multinomial sd per cell is sqrt(100000 p (1-p)), about 22.8.

# %%
census = pool_census(100_000, seed=0)
print(f"sd of counts {census['sd_count']:.2f}, chi-square p {census['p_value']:.3f}")

# %% [markdown]
# A restricted deal only ever hands out the listed indices.

# %%
subset = [0, 50, 100]
dealt = {s.pool_index for s in sample_strategies(7, 1000, subset)}
print(sorted(dealt))
