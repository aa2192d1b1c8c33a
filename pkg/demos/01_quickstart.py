# %% [markdown]
# # Quickstart
# Build a shifted Rastrigin problem and run the per-individual strategy DE
# next to classic DE/rand/1/bin under the same evaluation budget.

# %%
from istratde import Budget, make_problem, round_reported, run_canonical_de, run_istratde

problem = make_problem("rastrigin", dim=10, seed=0)
budget = Budget.evaluations(50_000)

# %%
ist = run_istratde(problem, 500, budget, seed=1)
de = run_canonical_de(problem, 100, 0.5, 0.9, budget, seed=1)
print(f"istratde  n=500  gens={ist.generations_used:4d}  error={round_reported(ist.best_value):.3e}")
print(f"DE        n=100  gens={de.generations_used:4d}  error={round_reported(de.best_value):.3e}")

# %% [markdown]
# Both runs are pure functions of their arguments: rerunning with the same
# seed gives the same trace bit for bit, whatever ISTRATDE_WORKERS says.

# %%
again = run_istratde(problem, 500, budget, seed=1, workers=4)
print("identical:", again.trace.best_so_far == ist.trace.best_so_far)
