"""
One cell of the method-comparison table
=======================================

Each replication draws a fresh instance, tunes every method by ten-fold
cross-validation, and scores the fit against the generating truth.  A small
cell (3 replications, n=200) keeps this demo under a minute; the real table
cells run 20 replications at n=300 through the `bench` CLI subcommand.
"""

from groupsel.bench import bench_table

run = bench_table(table=2, cell="beta=1,kbar=5", reps=3, n=200, seed=0,
                  methods=("iga", "grouplasso", "foba"))

print(f"case {run['case']}, n={run['n']}, {run['replications']} replications\n")
print(f"{'method':12s} {'error':>8s} {'se':>7s} {'correct':>8s} {'junk':>6s}")
for method in run["methods"]:
    s = run["summaries"][method]
    print(f"{method:12s} {s.mean['l2_error']:8.3f} {s.standard_error['l2_error']:7.3f}"
          f" {s.mean['correct_groups']:8.2f} {s.mean['incorrect_groups']:6.2f}")

# per-replication detail for the greedy method
print("\niga replications:")
for i, rep in enumerate(run["reports"]["iga"]):
    print(f"  rep {i}: error {rep.l2_error:.3f},"
          f" {rep.correct_groups} correct + {rep.incorrect_groups} junk groups")
