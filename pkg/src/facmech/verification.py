"""Strategyproofness fuzzing, exact approximation ratios and seeded ratio sweeps."""
from __future__ import annotations

import itertools
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from .instances import Generator, trial_rng
from .mechanisms import Mechanism, in_domain
from .model import (
    ONE_PLUS_SQRT2,
    THREE,
    TWO,
    BoundExpr,
    ConfigurationError,
    DomainError,
    Exact,
    Instance,
    Objective,
    Solution,
    exact,
    format_rational,
    objective_value,
    optimal,
)

log = logging.getLogger(__name__)

MechanismLike = Union[Mechanism, Callable[[Instance], Solution]]


def _solve(mech: MechanismLike, inst: Instance) -> Solution:
    if isinstance(mech, Mechanism):
        return mech.run(inst).solution
    return mech(inst)


# ---------------------------------------------------------------------------
# misreports


def pivotal_misreports(inst: Instance, agent: int) -> list[Exact]:
    """Finite set of deviations witnessing every outcome agent ``agent`` can induce.

    Every mechanism here is piecewise constant in one agent's report, with
    breakpoints only at other agents' positions and at midpoints of candidate
    pairs.  The set holds all candidates, those midpoints and the other
    positions, each of them shifted by +-eta (a quarter of the smallest
    positive gap between agent/candidate coordinates), the midpoint of every
    pair of consecutive breakpoints, and one sentinel on each side, two spans
    beyond the extreme coordinates.
    """
    if not 0 <= agent < inst.n:
        raise IndexError(f"agent index {agent} out of range")
    cands = sorted(set(inst.candidates))
    others = {a.x for k, a in enumerate(inst.agents) if k != agent}
    breaks = set(cands) | others
    breaks.update(exact(Fraction(a + b, 2)) for a, b in itertools.combinations(cands, 2))

    coords = sorted(set(cands) | set(inst.positions))
    gaps = [b - a for a, b in zip(coords, coords[1:])]
    eta = exact(Fraction(min(gaps), 4)) if gaps else 1
    span = coords[-1] - coords[0]
    reach = 2 * span if span else 2 * eta

    probes = set(breaks)
    for b in breaks:
        probes.add(b - eta)
        probes.add(b + eta)
    ordered = sorted(breaks)
    probes.update(exact(Fraction(a + b, 2)) for a, b in zip(ordered, ordered[1:]))
    probes.add(coords[0] - reach)
    probes.add(coords[-1] + reach)
    return sorted(probes)


@dataclass(frozen=True)
class SPViolation:
    agent: int
    true_position: Exact
    misreport: Exact
    true_cost: Exact
    deviated_cost: Exact
    outcome_before: Solution
    outcome_after: Solution

    def __post_init__(self):
        if not self.deviated_cost < self.true_cost:
            raise ValueError("a violation must strictly decrease the agent's cost")


def _cost(inst: Instance, i: int, s: Solution) -> Exact:
    a = inst.agents[i]
    cost = 0
    if a.p1:
        cost += abs(a.x - inst.candidates[s[0]])
    if a.p2:
        cost += abs(a.x - inst.candidates[s[1]])
    return cost


def _integer_scale(inst: Instance) -> int:
    dens = [Fraction(v).denominator for v in inst.candidates]
    dens += [Fraction(a.x).denominator for a in inst.agents]
    # 8 keeps candidate midpoints, eta shifts and interval midpoints integral
    return 8 * math.lcm(*dens)


def check_sp(mech: MechanismLike, inst: Instance, scale: bool = True) -> list[SPViolation]:
    """All strict unilateral improvements over the pivotal misreport sets.

    With ``scale`` the search runs on an integer-scaled copy (all built-in
    mechanisms are invariant under positive scaling) and the violations are
    mapped back to the original units.
    """
    before = _solve(mech, inst)
    work, factor = inst, 1
    if scale:
        factor = _integer_scale(inst)
        if factor != 1:
            work = inst.map_coordinates(lambda v: exact(v * factor))
            before_scaled = _solve(mech, work)
            if before_scaled != before:
                raise AssertionError(f"{mech} is not scale invariant on this instance")

    found = []
    for i in range(work.n):
        true_cost = _cost(work, i, before)
        if true_cost == 0:
            continue
        x = work.agents[i].x
        seen: dict[Solution, Exact] = {}
        for z in pivotal_misreports(work, i):
            if z == x:
                continue
            try:
                after = _solve(mech, work.with_position(i, z))
            except DomainError as exc:
                log.warning("deviation left the mechanism domain (agent %d -> %s): %s", i, z, exc)
                continue
            if after == before:
                continue
            cost = seen.get(after)
            if cost is None:
                cost = seen[after] = _cost(work, i, after)
            if cost < true_cost:
                found.append(SPViolation(
                    agent=i,
                    true_position=exact(Fraction(x) / factor),
                    misreport=exact(Fraction(z) / factor),
                    true_cost=exact(Fraction(true_cost) / factor),
                    deviated_cost=exact(Fraction(cost) / factor),
                    outcome_before=before,
                    outcome_after=after,
                ))
    return found


def reverify(mech: MechanismLike, inst: Instance, v: SPViolation) -> bool:
    """Re-run a reported deviation on the original (unscaled) instance."""
    after = _solve(mech, inst.with_position(v.agent, v.misreport))
    return (
        after == v.outcome_after
        and _cost(inst, v.agent, after) == v.deviated_cost
        and _cost(inst, v.agent, _solve(mech, inst)) == v.true_cost
    )


# ---------------------------------------------------------------------------
# ratios


@dataclass(frozen=True)
class RatioResult:
    mech_value: Exact
    opt_value: Exact

    @property
    def infinite(self) -> bool:
        return self.opt_value == 0 and self.mech_value > 0

    @property
    def ratio(self) -> Optional[Exact]:
        """Exact ratio, ``None`` when infinite; ``0/0`` counts as 1."""
        if self.opt_value == 0:
            return None if self.mech_value > 0 else 1
        return exact(Fraction(self.mech_value, 1) / self.opt_value)

    def sort_key(self):
        return (1, 0) if self.infinite else (0, self.ratio)

    def __str__(self) -> str:
        return "inf" if self.infinite else format_rational(self.ratio)


def ratio(mech: MechanismLike, inst: Instance, obj: Objective) -> RatioResult:
    sol = _solve(mech, inst)
    _, opt = optimal(inst, obj)
    return RatioResult(objective_value(inst, sol, obj), opt)


def compare_ratio_to_bound(r: RatioResult | Exact, bound: BoundExpr) -> int:
    """-1, 0 or 1 as the ratio is below, equal to or above ``bound``; infinite is above."""
    if isinstance(r, RatioResult):
        if r.infinite:
            return 1
        r = r.ratio
    return bound.compare(r)


def theorem_bound(mech: Mechanism, obj: Objective, homogeneous: bool) -> Optional[BoundExpr]:
    """Proven worst-case ratio for ``mech`` on its instance class, if any."""
    name = mech.name
    if obj is Objective.SC:
        if name == "median2" and homogeneous:
            return THREE
        if name == "alpha-stat" and homogeneous and mech.alpha.is_sqrt2_minus_1:
            return ONE_PLUS_SQRT2
        if name == "pmm":
            return THREE
        return None
    if name == "leftmost-priority":
        return TWO if homogeneous else THREE
    if name in ("vote-for-priority", "general-max"):
        return THREE
    return None


# ---------------------------------------------------------------------------
# sweeps

_REQUIREMENTS = {
    "median2": {"homogeneous"},
    "alpha-stat": {"homogeneous"},
    "pmm": {"both-groups"},
    "naive-median-f1": {"both-groups"},
    "naive-left-right": {"both-groups"},
    "leftmost-priority": {"overlap"},
    "vote-for-priority": {"singleton", "both-groups"},
}


def check_compatible(mech: Mechanism, gen: Generator) -> None:
    """Raise :class:`ConfigurationError` unless every instance of ``gen`` suits ``mech``."""
    need = _REQUIREMENTS.get(mech.name, set())
    missing = need - gen.guarantees()
    if missing:
        raise ConfigurationError(
            f"generator {gen.ident()} does not guarantee {sorted(missing)} required by {mech.name}"
        )


HISTOGRAM_EDGES = (Fraction(1), Fraction(5, 4), Fraction(3, 2), Fraction(2), Fraction(5, 2),
                   Fraction(3), Fraction(4), Fraction(5), Fraction(7))


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    n: int
    m: int
    result: RatioResult


@dataclass
class SweepReport:
    mechanism: str
    objective: Objective
    generator: str
    trials: int
    seed: int
    max_ratio: Optional[RatioResult] = None
    argmax_trial: Optional[int] = None
    argmax_instance: Optional[Instance] = None
    histogram: list = field(default_factory=list)
    bound: Optional[BoundExpr] = None
    records: list = field(default_factory=list, repr=False)

    @property
    def within_bound(self) -> Optional[bool]:
        if self.bound is None or self.max_ratio is None:
            return None
        return compare_ratio_to_bound(self.max_ratio, self.bound) <= 0


def _histogram(results: Sequence[RatioResult]) -> list[tuple[str, int]]:
    counts = [0] * (len(HISTOGRAM_EDGES) + 1)
    for r in results:
        if r.infinite:
            counts[-1] += 1
            continue
        k = next((b for b, edge in enumerate(HISTOGRAM_EDGES) if r.ratio <= edge), len(HISTOGRAM_EDGES))
        counts[k] += 1
    labels = [format_rational(e) for e in HISTOGRAM_EDGES] + ["inf"]
    return list(zip(labels, counts))


def worker_count() -> int:
    env = os.environ.get("FACMECH_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigurationError(f"FACMECH_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _chunks(trials: int, workers: int) -> list[range]:
    size = max(1, -(-trials // (workers * 4)))
    return [range(a, min(a + size, trials)) for a in range(0, trials, size)]


def _map_trials(fn, args, trials: int) -> list:
    """Run ``fn(*args, chunk)`` over trial chunks; results come back in trial order."""
    workers = min(worker_count(), max(1, trials))
    chunks = _chunks(trials, workers)
    if workers == 1 or len(chunks) == 1:
        parts = [fn(*args, c) for c in chunks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(fn, *zip(*[(*args, c) for c in chunks])))
    return [item for part in parts for item in part]


def _sweep_chunk(mech: Mechanism, obj: Objective, gen: Generator, seed: int, chunk: range):
    out = []
    for t in chunk:
        inst = gen.sample(trial_rng(seed, t))
        out.append(TrialRecord(t, inst.n, inst.m, ratio(mech, inst, obj)))
    return out


def sweep(mech: Mechanism, obj: Objective, gen: Generator, trials: int, seed: int) -> SweepReport:
    """Ratio of ``mech`` on ``trials`` seeded instances from ``gen``."""
    check_compatible(mech, gen)
    if trials < 0:
        raise ConfigurationError("trials must be >= 0")
    records = _map_trials(_sweep_chunk, (mech, obj, gen, seed), trials)
    report = SweepReport(str(mech), obj, gen.ident(), trials, seed, records=records,
                         bound=theorem_bound(mech, obj, "homogeneous" in gen.guarantees()))
    report.histogram = _histogram([r.result for r in records])
    for rec in records:
        if report.max_ratio is None or rec.result.sort_key() > report.max_ratio.sort_key():
            report.max_ratio = rec.result
            report.argmax_trial = rec.trial
    if report.argmax_trial is not None:
        report.argmax_instance = gen.sample(trial_rng(seed, report.argmax_trial))
    return report


@dataclass
class FuzzReport:
    mechanism: str
    generator: str
    trials: int
    seed: int
    violations: list = field(default_factory=list)  # (trial, SPViolation)

    @property
    def ok(self) -> bool:
        return not self.violations


def _fuzz_chunk(mech: Mechanism, gen: Generator, seed: int, chunk: range):
    out = []
    for t in chunk:
        inst = gen.sample(trial_rng(seed, t))
        out.extend((t, v) for v in check_sp(mech, inst))
    return out


def fuzz_sp(mech: Mechanism, gen: Generator, trials: int, seed: int) -> FuzzReport:
    """``check_sp`` over ``trials`` seeded instances from ``gen``."""
    check_compatible(mech, gen)
    if trials < 0:
        raise ConfigurationError("trials must be >= 0")
    found = _map_trials(_fuzz_chunk, (mech, gen, seed), trials)
    return FuzzReport(str(mech), gen.ident(), trials, seed, found)


def trial_instance(gen: Generator, seed: int, trial: int) -> Instance:
    return gen.sample(trial_rng(seed, trial))


def domain_ok(mech: Mechanism, inst: Instance) -> bool:
    return in_domain(mech.name, inst)
