# %% [markdown]
# # Inside a run: elitism proportion and rank trajectories
# The elitism proportion is the share of individuals within 1e-8 of the
# optimum. With greedy selection it can only grow. Rank snapshots follow the
# first few individuals' normalized fitness rank (0 best, 1 worst).

# %%
import numpy as np

from istratde import Budget, make_problem, run_istratde

problem = make_problem("sphere", 5, seed=2)
res = run_istratde(problem, 100, Budget.generations(300), seed=0, track=5)

# %%
tr = res.trace
for g in range(0, len(tr), 50):
    print(f"gen {tr.generations[g]:3d}  best {tr.best_so_far[g]:.2e}  elite {tr.elitism_proportion[g]:.2f}")
print("elitism never drops:", bool(np.all(np.diff(tr.elitism_proportion) >= 0)))

# %%
# individuals settle at different times rather than all at once
ranks = np.array([r for _, r in tr.rank_snapshots])
changed = np.abs(np.diff(ranks, axis=0)) > 0.02
last_move = [int(np.flatnonzero(col)[-1]) + 1 if col.any() else 0 for col in changed.T]
print("last generation each tracked rank moved by > 0.02:", last_move)
print("final ranks of tracked individuals:", np.round(ranks[-1], 2))
