"""Run the whole numerical audit on a random sample and print a short table.

Each claim reports its worst value over the sample and the weights where
that worst value occurred.  The JSON form of the same report is what
``yamabeflow check`` writes.
"""

from yamabeflow import run_check

report = run_check(samples=500, seed=1, tetra=(1, 1, 1, 0.2))
for claim in report["claims"]:
    worst = claim["worst"]
    shown = "" if worst is None else f"{worst:.2e}"
    print(f"{'ok  ' if claim['passed'] else 'FAIL'} {claim['name']:<55} {shown}")
print()
obs = report["observations"]["tetra"]
print(f"(1,1,1,0.2): negative Omega at {obs['negative_omega']}")
print(f"all claims passed: {report['passed']}")
