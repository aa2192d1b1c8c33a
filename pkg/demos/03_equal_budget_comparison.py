# %% [markdown]
# # Equal-budget comparison with the rank-sum test
# Repeated runs through the harness, then a two-sided Wilcoxon rank-sum
# verdict (+ better, ≈ similar, - worse, read from the first summary's side).
# Budgets here are small so the script finishes quickly; the acceptance
# suite uses 2e5 evaluations and 31 runs.

# %%
import tempfile
from pathlib import Path

from istratde.algorithms import Budget
from istratde.harness import ExperimentSpec, compare_experiments, run_experiment

out = Path(tempfile.mkdtemp())
common = dict(function_id="rastrigin", dim=10, budget=Budget.evaluations(40_000), runs=11, track=0)

ist = run_experiment(ExperimentSpec(algorithm="istratde", pop_size=400, out_dir=str(out / "ist"), **common))
de = run_experiment(ExperimentSpec(algorithm="canonical_de", pop_size=100, out_dir=str(out / "de"), **common))

# %%
rec = compare_experiments(out / "ist", out / "de")
print("istratde", rec["formatted"], f"p={rec['p_value']:.3g}")
print("files:", sorted(p.name for p in (out / "ist").iterdir())[:4], "...")
