"""
Near-tight instances
====================

Builds the fixtures behind the lower bounds and the two naive-mechanism
examples, and prints the exact ratio next to a decimal.
"""
from fractions import Fraction

from facmech import Fixture, Mechanism, Objective, ratio

rows = [
    ("median-tight", "median2", Objective.SC, {}),
    ("pmm-example", "naive-median-f1", Objective.SC, {"x": 100}),
    ("pmm-example", "pmm", Objective.SC, {"x": 100}),
    ("vfp-example", "naive-left-right", Objective.MC, {}),
    ("vfp-example", "vote-for-priority", Objective.MC, {}),
]

for eps in (Fraction(1, 10), Fraction(1, 1000)):
    print(f"eps = {eps}")
    for name, mech, obj, extra in rows:
        inst = Fixture(name, eps=eps, **extra).build()
        r = ratio(Mechanism(mech), inst, obj)
        print(f"  {name:14s} {mech:18s} {obj.value}  {str(r):>16s}  ~{float(r.ratio):.4f}")

# The leftmost median of two agents is the one just left of 1/2, so both
# facilities land at 0 and eps; the optimum uses 1-eps and 1.
inst = Fixture("median-tight", eps=Fraction(1, 1000)).build()
print(Mechanism("median2").run(inst))
