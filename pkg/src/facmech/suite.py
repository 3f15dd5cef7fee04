"""Every fixture paired with the mechanisms it was built to exercise.

Mechanism rows report the ratio of a concrete mechanism.  ``forced`` rows
report the best objective value among the solutions that the lower-bound
argument leaves to any strategyproof mechanism, divided by the optimum.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .documents import decimal_string
from .instances import Fixture
from .mechanisms import Mechanism
from .model import (
    ONE_PLUS_SQRT2,
    THREE,
    TWO,
    BoundExpr,
    Exact,
    Objective,
    format_rational,
    objective_value,
    optimal,
)
from .verification import RatioResult, compare_ratio_to_bound, theorem_bound

DEFAULT_EPS = (Fraction(1, 10), Fraction(1, 100), Fraction(1, 1000), Fraction(1, 10000))

SC, MC = Objective.SC, Objective.MC

# (fixture name, extra params, mechanism or "forced", objective, bound kind, bound)
# A bound of None means "use the mechanism's proven upper bound".
DESIGNATED: tuple = (
    ("median-tight", {}, "median2", SC, "upper", None),
    ("sc-hom-lower-i1", {"n": 100}, "alpha-stat", SC, "upper", None),
    ("sc-hom-lower-case1-end", {"n": 100}, "alpha-stat", SC, "upper", None),
    ("sc-hom-lower-case1-end", {"n": 100}, "forced", SC, "lower", ONE_PLUS_SQRT2),
    ("sc-hom-lower-case2-end", {"n": 100}, "alpha-stat", SC, "upper", None),
    ("sc-hom-lower-case2-end", {"n": 100}, "forced", SC, "lower", ONE_PLUS_SQRT2),
    ("sc-hom-lower-case3-end", {"n": 100}, "alpha-stat", SC, "upper", None),
    ("sc-hom-lower-case3-end", {"n": 100}, "forced", SC, "lower", ONE_PLUS_SQRT2),
    ("sc-general-lower-i1", {}, "pmm", SC, "upper", None),
    ("sc-general-lower-i2", {}, "pmm", SC, "upper", None),
    ("sc-general-lower-i2", {}, "forced", SC, "lower", THREE),
    ("pmm-example", {"x": 100}, "naive-median-f1", SC, "limit", BoundExpr(7)),
    ("pmm-example", {"x": 100}, "pmm", SC, "upper", None),
    ("mc-hom-lower-i1", {}, "leftmost-priority", MC, "upper", None),
    ("mc-hom-lower-i2", {}, "leftmost-priority", MC, "upper", None),
    ("mc-hom-lower-i2", {}, "forced", MC, "lower", TWO),
    ("vfp-example", {}, "naive-left-right", MC, "limit", BoundExpr(5)),
    ("vfp-example", {}, "vote-for-priority", MC, "upper", None),
    ("vfp-example", {}, "general-max", MC, "upper", None),
    ("mc-general-lower-i1", {}, "general-max", MC, "upper", None),
    ("mc-general-lower-i2", {}, "general-max", MC, "upper", None),
    ("mc-general-lower-i2", {}, "forced", MC, "lower", THREE),
)

COLUMNS = ("fixture", "mechanism", "objective", "eps", "mech_value", "opt_value",
           "ratio", "ratio_decimal", "is_infinite", "bound", "bound_kind", "verdict")


@dataclass(frozen=True)
class SuiteRow:
    fixture: str
    mechanism: str
    objective: Objective
    eps: Fraction
    result: RatioResult
    bound: BoundExpr
    bound_kind: str

    @property
    def order(self) -> int:
        """-1, 0 or 1: the exact ratio against the bound."""
        return compare_ratio_to_bound(self.result, self.bound)

    @property
    def verdict(self) -> str:
        return f"{'<=>'[self.order + 1]} {self.bound}"

    def cells(self) -> list:
        r = self.result
        return [self.fixture, self.mechanism, self.objective.value, format_rational(self.eps),
                r.mech_value, r.opt_value,
                "inf" if r.infinite else r.ratio,
                "inf" if r.infinite else decimal_string(r.ratio),
                r.infinite, str(self.bound), self.bound_kind, self.verdict]


def forced_value(fx: Fixture, obj: Objective) -> Exact:
    inst = fx.build()
    return min(objective_value(inst, s, obj) for s in fx.forced())


def suite_row(fx: Fixture, mech_name: str, obj: Objective, kind: str,
              bound: Optional[BoundExpr]) -> SuiteRow:
    inst = fx.build()
    _, opt = optimal(inst, obj)
    if mech_name == "forced":
        value = forced_value(fx, obj)
    else:
        mech = Mechanism(mech_name)
        value = objective_value(inst, mech(inst), obj)
        if bound is None:
            bound = theorem_bound(mech, obj, inst.is_homogeneous)
    return SuiteRow(fx.ident(), mech_name, obj, fx.eps, RatioResult(value, opt), bound, kind)


def paper_suite(eps_list: Sequence = DEFAULT_EPS) -> list[SuiteRow]:
    rows = []
    for eps in eps_list:
        for name, params, mech_name, obj, kind, bound in DESIGNATED:
            rows.append(suite_row(Fixture(name, eps=eps, **params), mech_name, obj, kind, bound))
    return rows
