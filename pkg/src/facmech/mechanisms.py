"""Deterministic two-facility mechanisms with candidate locations on a line.

Each ``run_*`` function maps an :class:`~facmech.model.Instance` to a
:class:`Outcome` holding the chosen slot pair and a trace of the decisions
that produced it.  All order statistics break position ties by lowest agent
index, and every nearest-candidate lookup breaks distance ties by lowest slot
index, so outcomes are functions of the reported profile.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .model import (
    ConfigurationError,
    DomainError,
    Exact,
    Instance,
    Solution,
    exact,
    format_rational,
    nearest_candidates,
    sorted_group,
)


@dataclass(frozen=True)
class AlphaParam:
    """Rank parameter of the alpha-statistic mechanism.

    ``value is None`` denotes the irrational ``sqrt(2) - 1``.
    """

    value: Optional[Exact] = None

    def __post_init__(self):
        if self.value is not None:
            v = exact(self.value)
            if not 0 <= v <= Fraction(1, 2):
                raise ConfigurationError(f"alpha must lie in [0, 1/2], got {format_rational(v)}")
            object.__setattr__(self, "value", v)

    @property
    def is_sqrt2_minus_1(self) -> bool:
        return self.value is None

    @classmethod
    def parse(cls, text: str) -> "AlphaParam":
        t = text.strip().lower().replace(" ", "")
        if t in ("sqrt2-1", "sqrt(2)-1"):
            return SQRT2_MINUS_1
        try:
            return cls(exact(t))
        except ValueError as exc:
            raise ConfigurationError(f"bad alpha {text!r}: {exc}") from None

    def __str__(self) -> str:
        return "sqrt2-1" if self.value is None else format_rational(self.value)


SQRT2_MINUS_1 = AlphaParam()


def alpha_index(n: int, alpha: AlphaParam) -> tuple[int, int]:
    """1-based ranks ``(ceil(alpha*n), ceil((1-alpha)*n))`` of the two deciding agents.

    The first rank is at least 1.  When both ceilings coincide the same agent
    decides both facilities, which is exactly what running the mechanism on a
    copy-expanded profile (every agent replicated k times) selects.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if alpha.value is None:
        # sqrt(2)*n is irrational for n >= 1, so floor = isqrt(2 n^2) and ceil = floor + 1
        root = math.isqrt(2 * n * n)
        lo = root - n + 1
        hi = 2 * n - root
    else:
        lo = math.ceil(alpha.value * n)
        hi = math.ceil((1 - alpha.value) * n)
    lo = max(1, lo)
    hi = max(hi, lo)
    return lo, min(hi, n)


@dataclass(frozen=True)
class Outcome:
    solution: Solution
    trace: dict = field(default_factory=dict, compare=True)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise DomainError(message)


def _second_choice(inst: Instance, x: Exact, taken: int) -> int:
    """Closest slot to ``x`` that is not ``taken``."""
    t, s = nearest_candidates(inst, x)
    return t if t != taken else s


def _leftmost(inst: Instance, group) -> int:
    xs = inst.positions
    return min(group, key=lambda i: (xs[i], i))


def _rightmost(inst: Instance, group) -> int:
    xs = inst.positions
    return min(group, key=lambda i: (-xs[i], i))


def _median(inst: Instance, group) -> int:
    order = sorted_group(inst, group)
    return order[(len(order) + 1) // 2 - 1]


def run_median_two(inst: Instance) -> Outcome:
    """Both facilities at the two candidates closest to the leftmost median agent."""
    _require(inst.is_homogeneous, "median2 is defined for homogeneous instances only")
    med = _median(inst, range(inst.n))
    t, s = nearest_candidates(inst, inst.positions[med])
    return Outcome(Solution(t, s), {"median": med})


def run_alpha_statistic(inst: Instance, alpha: AlphaParam = SQRT2_MINUS_1) -> Outcome:
    _require(inst.is_homogeneous, "alpha-stat is defined for homogeneous instances only")
    i_rank, j_rank = alpha_index(inst.n, alpha)
    order = sorted_group(inst, range(inst.n))
    i, j = order[i_rank - 1], order[j_rank - 1]
    xs = inst.positions
    w1 = nearest_candidates(inst, xs[i])[0]
    w2 = _second_choice(inst, xs[j], w1)
    return Outcome(Solution(w1, w2), {"i_rank": i_rank, "j_rank": j_rank, "i": i, "j": j})


def run_pmm(inst: Instance) -> Outcome:
    """Proportional-Majority-Median.

    Each group's median proposes its closest candidate; the facility whose
    group most strongly (as a fraction) prefers that proposal over the runner-up
    is placed first.  Equal fractions favour the larger group, then F1.
    """
    g1, g2 = inst.group1, inst.group2
    _require(bool(g1) and bool(g2), "pmm needs at least one approver of each facility")
    xs, cs = inst.positions, inst.candidates
    m1, m2 = _median(inst, g1), _median(inst, g2)
    t1, s1 = nearest_candidates(inst, xs[m1])
    t2, s2 = nearest_candidates(inst, xs[m2])
    a1, b1 = cs[t1], cs[s1]
    a2, b2 = cs[t2], cs[s2]
    k1 = sum(1 for i in g1 if abs(xs[i] - a1) <= abs(xs[i] - b1))
    k2 = sum(1 for i in g2 if abs(xs[i] - a2) <= abs(xs[i] - b2))
    lhs, rhs = k1 * len(g2), k2 * len(g1)
    if lhs > rhs:
        first = 1
    elif lhs < rhs:
        first = 2
    else:
        first = 2 if len(g2) > len(g1) else 1
    if first == 1:
        w1 = t1
        w2 = t2 if t2 != w1 else s2
    else:
        w2 = t2
        w1 = t1 if t1 != w2 else s1
    trace = {"m1": m1, "m2": m2, "S1": k1, "N1": len(g1), "S2": k2, "N2": len(g2), "priority": first}
    return Outcome(Solution(w1, w2), trace)


def run_leftmost_priority(inst: Instance) -> Outcome:
    both = inst.both
    _require(bool(both), "leftmost-priority needs an agent approving both facilities")
    left, right = _leftmost(inst, both), _rightmost(inst, both)
    xs = inst.positions
    w1 = nearest_candidates(inst, xs[left])[0]
    w2 = _second_choice(inst, xs[right], w1)
    return Outcome(Solution(w1, w2), {"l12": left, "r12": right})


def _neighbours(inst: Instance, slot: int) -> tuple[Optional[int], Optional[int]]:
    """Nearest slots strictly left and strictly right of ``slot``'s coordinate."""
    cs = inst.candidates
    y = cs[slot]
    left = right = None
    for k, c in enumerate(cs):
        if c < y and (left is None or c > cs[left]):
            left = k
        elif c > y and (right is None or c < cs[right]):
            right = k
    return left, right


def run_vote_for_priority(inst: Instance) -> Outcome:
    """Vote-for-Priority for instances where every agent approves one facility.

    A missing neighbour (``w1`` at an end of the candidate range) counts as
    infinitely far, so both F2 extremes then vote for the existing side.
    """
    g1, g2 = inst.group1, inst.group2
    _require(not inst.both, "vote-for-priority needs singleton preferences")
    _require(bool(g1) and bool(g2), "vote-for-priority needs approvers of both facilities")
    xs, cs = inst.positions, inst.candidates
    l1 = _leftmost(inst, g1)
    l2, r2 = _leftmost(inst, g2), _rightmost(inst, g2)
    w1 = nearest_candidates(inst, xs[l1])[0]
    left, right = _neighbours(inst, w1)

    def vote(x) -> int:
        # -1: strictly closer to L, +1: strictly closer to R, 0: undecided
        if left is None and right is None:
            return 0
        if right is None:
            return -1
        if left is None:
            return 1
        dl, dr = abs(x - cs[left]), abs(x - cs[right])
        return -1 if dl < dr else (1 if dr < dl else 0)

    v_l, v_r = vote(xs[l2]), vote(xs[r2])
    if v_l == v_r == -1:
        case = 1
        w2 = _second_choice(inst, xs[r2], w1)
    elif v_l == v_r == 1:
        case = 2
        w2 = _second_choice(inst, xs[l2], w1)
    else:
        case = 3
        y = cs[w1]
        if left is not None and right is not None:
            w2 = left if abs(y - cs[left]) <= abs(cs[right] - y) else right
        elif left is not None or right is not None:
            w2 = left if left is not None else right
        else:
            # every other slot duplicates w1's coordinate
            w2 = next(k for k in range(inst.m) if k != w1)
    trace = {"l1": l1, "l2": l2, "r2": r2, "L": left, "R": right, "case": case}
    return Outcome(Solution(w1, w2), trace)


def _single_group_fallback(inst: Instance, facility: int) -> Outcome:
    """Only ``facility`` has approvers: serve its leftmost agent, park the other next to it."""
    group = inst.group(facility)
    lead = _leftmost(inst, group)
    w = nearest_candidates(inst, inst.positions[lead])[0]
    other = _second_choice(inst, inst.candidates[w], w)
    sol = Solution(w, other) if facility == 1 else Solution(other, w)
    return Outcome(sol, {"branch": f"only-F{facility}", "leader": lead})


def run_general_max_dispatch(inst: Instance) -> Outcome:
    if inst.both:
        out = run_leftmost_priority(inst)
        branch = "leftmost-priority"
    elif inst.group1 and inst.group2:
        out = run_vote_for_priority(inst)
        branch = "vote-for-priority"
    else:
        return _single_group_fallback(inst, 1 if inst.group1 else 2)
    return Outcome(out.solution, {"branch": branch, **out.trace})


def run_naive_median_f1_first(inst: Instance) -> Outcome:
    g1, g2 = inst.group1, inst.group2
    _require(bool(g1) and bool(g2), "naive-median-f1 needs approvers of both facilities")
    xs = inst.positions
    m1, m2 = _median(inst, g1), _median(inst, g2)
    w1 = nearest_candidates(inst, xs[m1])[0]
    w2 = _second_choice(inst, xs[m2], w1)
    return Outcome(Solution(w1, w2), {"m1": m1, "m2": m2})


def run_naive_left_then_right(inst: Instance) -> Outcome:
    g1, g2 = inst.group1, inst.group2
    _require(bool(g1) and bool(g2), "naive-left-right needs approvers of both facilities")
    xs = inst.positions
    l1, r2 = _leftmost(inst, g1), _rightmost(inst, g2)
    w1 = nearest_candidates(inst, xs[l1])[0]
    w2 = _second_choice(inst, xs[r2], w1)
    return Outcome(Solution(w1, w2), {"l1": l1, "r2": r2})


def run_broken_mean(inst: Instance) -> Outcome:
    """Negative control: both facilities around the mean report (manipulable)."""
    xs = inst.positions
    mean = exact(Fraction(sum(xs), len(xs)))
    t, s = nearest_candidates(inst, mean)
    return Outcome(Solution(t, s), {"mean": format_rational(mean)})


@dataclass(frozen=True)
class Mechanism:
    """A mechanism identifier: stable name plus alpha for ``alpha-stat``."""

    name: str
    alpha: Optional[AlphaParam] = None

    def __post_init__(self):
        if self.name not in _RUNNERS:
            raise ConfigurationError(f"unknown mechanism {self.name!r}; known: {', '.join(MECHANISM_NAMES)}")
        if self.name == "alpha-stat" and self.alpha is None:
            object.__setattr__(self, "alpha", SQRT2_MINUS_1)
        if self.name != "alpha-stat" and self.alpha is not None:
            raise ConfigurationError(f"{self.name} takes no alpha parameter")

    def run(self, inst: Instance) -> Outcome:
        if self.alpha is not None:
            return run_alpha_statistic(inst, self.alpha)
        return _RUNNERS[self.name](inst)

    def __call__(self, inst: Instance) -> Solution:
        return self.run(inst).solution

    def __str__(self) -> str:
        return self.name if self.alpha is None else f"{self.name}[alpha={self.alpha}]"


_RUNNERS: dict[str, Callable[[Instance], Outcome]] = {
    "median2": run_median_two,
    "alpha-stat": run_alpha_statistic,
    "pmm": run_pmm,
    "leftmost-priority": run_leftmost_priority,
    "vote-for-priority": run_vote_for_priority,
    "general-max": run_general_max_dispatch,
    "naive-median-f1": run_naive_median_f1_first,
    "naive-left-right": run_naive_left_then_right,
    "broken-mean": run_broken_mean,
}

MECHANISM_NAMES = tuple(_RUNNERS)
PAPER_MECHANISMS = ("median2", "alpha-stat", "pmm", "leftmost-priority", "vote-for-priority", "general-max")


def in_domain(name: str, inst: Instance) -> bool:
    """Whether mechanism ``name`` is defined on ``inst``."""
    if name in ("median2", "alpha-stat"):
        return inst.is_homogeneous
    if name in ("pmm", "naive-median-f1", "naive-left-right"):
        return bool(inst.group1) and bool(inst.group2)
    if name == "leftmost-priority":
        return bool(inst.both)
    if name == "vote-for-priority":
        return not inst.both and bool(inst.group1) and bool(inst.group2)
    return True
