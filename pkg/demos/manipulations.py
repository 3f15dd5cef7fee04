"""
Profitable misreports
=====================

The deviation checker applied to three small instances.  In each, one agent
moves its report far to the left, which releases a candidate that the
second facility then takes, closer to the agent's true position.
"""
from fractions import Fraction as F

from facmech import Instance, Mechanism, check_sp

cases = {
    "leftmost-priority": Instance.homogeneous([F(2, 15), F(17, 14)], [-2, 2, F(11, 4)]),
    "alpha-stat": Instance.homogeneous([F(4, 3), F(17, 14), F(-17, 3), F(2, 15), 3, F(-5, 7)],
                                       [2, F(11, 4), -2]),
    "pmm": Instance.build([(-1, False, True), (1, True, False), (4, True, False)], [5, -3, -1]),
}

for name, inst in cases.items():
    mech = Mechanism(name)
    found = check_sp(mech, inst)
    v = found[0]
    print(f"{name}: {len(found)} profitable misreports")
    print(f"  agent {v.agent} at {v.true_position} reports {v.misreport}")
    print(f"  slots {tuple(v.outcome_before)} -> {tuple(v.outcome_after)}, "
          f"cost {v.true_cost} -> {v.deviated_cost}")

# median2 has none on the same positions
print("median2:", check_sp(Mechanism("median2"), cases["alpha-stat"]))
