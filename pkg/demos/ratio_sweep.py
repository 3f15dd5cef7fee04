"""
Random ratio sweep
==================

Worst ratio of alpha-stat over seeded random homogeneous instances, with
the bucketed distribution and the instance that attains the maximum.
"""
from facmech import Generator, Mechanism, Objective, sweep
from facmech.documents import dumps_instance

rep = sweep(Mechanism("alpha-stat"), Objective.SC, Generator.parse("uniform-homogeneous"), 2000, seed=3)
print("max ratio", rep.max_ratio, f"~{float(rep.max_ratio.ratio):.4f}", "bound", rep.bound,
      "ok" if rep.within_bound else "EXCEEDED")
for edge, count in rep.histogram:
    print(f"  <= {edge:>4s}  {count:5d}  " + "#" * (count // 40))
print(f"witness (trial {rep.argmax_trial}):")
print(dumps_instance(rep.argmax_instance))
