"""
Picking by hand from the candidate set
======================================

The engine scores every inactive group each iteration and publishes the set
A_lambda of groups within factor lambda of the best score.  Any of those is a
legal pick; the lambda knob widens or narrows the operator's menu.
"""

from groupsel.criterion import make_objective, standardize
from groupsel.engine import IgaConfig, PathEngine, priority_policy, run_path
from groupsel.simulate import gen_heuristic

inst = gen_heuristic(n=400, seed=1)
obj = make_objective("gaussian", standardize(inst.dataset))

# lambda=0.4 keeps more of the field eligible than the default lambda=1
eng = PathEngine(obj, inst.partition, IgaConfig(lam=0.4))
print("scores at the first iteration:")
for c in eng.candidates:
    mark = "eligible" if c.in_A_lambda else "        "
    print(f"  group {c.group + 1}: {c.score:9.5f}  {mark}")

# pick an eligible group that is NOT the greedy favourite
second = [c.group for c in eng.candidates if c.in_A_lambda][1]
eng.pick(second)
print("picked group", second + 1, "-> active:",
      [g + 1 for g in sorted(eng.active)], " Q =", round(eng.Q, 5))

# hand the rest to the greedy policy
eng.auto(100)
print("after auto-finish:", [g + 1 for g in sorted(eng.active)],
      " finish reason:", eng.finish_reason)

# the same preference can be expressed as a priority list: consulted first
# whenever it intersects A_lambda, greedy otherwise
path = run_path(obj, inst.partition, IgaConfig(lam=0.4),
                policy=priority_policy([second]))
print("priority-list path:",
      [(e.group + 1) if e.action == "add" else -(e.group + 1) for e in path.events])
