"""Instance model, cost objectives and the brute-force optimum.

Every coordinate is an exact rational.  Integral values are kept as plain
``int`` (fast path) and everything else as :class:`fractions.Fraction`; floats
are rejected at the boundary so that no tie is ever decided by rounding.
"""
from __future__ import annotations

import enum
import itertools
import numbers
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple, Sequence, Union

Exact = Union[int, Fraction]


class FacilityError(Exception):
    """Base class for all errors raised by this package."""


class InstanceError(FacilityError, ValueError):
    """Malformed instance data (bad rationals, missing approvals, m < 2)."""


class InfeasibleSolution(FacilityError, ValueError):
    """Both facilities were assigned to the same candidate slot."""


class DomainError(FacilityError):
    """A mechanism was run on an instance outside the class it is defined for."""


class ConfigurationError(FacilityError, ValueError):
    """Inconsistent experiment configuration (parameters, generator/mechanism pairing)."""


_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*([+-]?\d+))?\s*$")


def parse_rational(text: str) -> Exact:
    """Parse ``"p/q"`` or ``"p"`` into an exact value; ``q`` must be positive."""
    match = _RATIONAL_RE.match(text)
    if match is None:
        raise InstanceError(f"malformed rational {text!r}")
    num = int(match.group(1))
    if match.group(2) is None:
        return num
    den = int(match.group(2))
    if den <= 0:
        raise InstanceError(f"rational {text!r} has non-positive denominator")
    return exact(Fraction(num, den))


def exact(value) -> Exact:
    """Coerce ``value`` to an exact rational (int when integral)."""
    if isinstance(value, bool):
        raise TypeError("booleans are not coordinates")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, numbers.Rational):
        return exact(Fraction(value.numerator, value.denominator))
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def format_rational(value: Exact) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def distance(x: Exact, y: Exact) -> Exact:
    return abs(x - y)


class Objective(enum.Enum):
    SC = "sc"
    MC = "mc"

    @classmethod
    def parse(cls, text: str) -> "Objective":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ConfigurationError(f"unknown objective {text!r} (expected 'sc' or 'mc')") from None


@dataclass(frozen=True)
class Agent:
    x: Exact
    p1: bool = True
    p2: bool = True

    def __post_init__(self):
        if not (self.p1 or self.p2):
            raise InstanceError("an agent must approve at least one facility")
        object.__setattr__(self, "x", exact(self.x))

    @property
    def both(self) -> bool:
        return self.p1 and self.p2


class Solution(NamedTuple):
    """Slot indices of F1 and F2."""

    c1: int
    c2: int


@dataclass(frozen=True)
class Instance:
    """Agents (position + approvals) and indexed candidate slots.

    Duplicate candidate coordinates are allowed; feasibility is about slots.
    """

    agents: tuple[Agent, ...]
    candidates: tuple[Exact, ...]

    def __post_init__(self):
        agents = tuple(self.agents)
        candidates = tuple(exact(c) for c in self.candidates)
        if not agents:
            raise InstanceError("an instance needs at least one agent")
        if len(candidates) < 2:
            raise InstanceError("an instance needs at least two candidate locations")
        for a in agents:
            if not isinstance(a, Agent):
                raise InstanceError(f"expected Agent, got {type(a).__name__}")
        object.__setattr__(self, "agents", agents)
        object.__setattr__(self, "candidates", candidates)

    @classmethod
    def build(cls, agents: Sequence, candidates: Sequence) -> "Instance":
        """Convenience constructor: agents as ``Agent`` or ``(x, p1, p2)`` / ``x`` entries."""
        out = []
        for a in agents:
            if isinstance(a, Agent):
                out.append(a)
            elif isinstance(a, tuple):
                out.append(Agent(*a))
            else:
                out.append(Agent(a))
        return cls(tuple(out), tuple(candidates))

    @classmethod
    def homogeneous(cls, positions: Sequence, candidates: Sequence) -> "Instance":
        return cls(tuple(Agent(x) for x in positions), tuple(candidates))

    def with_position(self, i: int, x: Exact) -> "Instance":
        """Same instance with agent ``i`` reporting ``x`` (no re-validation)."""
        a = self.agents[i]
        moved = object.__new__(Agent)
        object.__setattr__(moved, "x", x)
        object.__setattr__(moved, "p1", a.p1)
        object.__setattr__(moved, "p2", a.p2)
        inst = object.__new__(Instance)
        object.__setattr__(inst, "agents", self.agents[:i] + (moved,) + self.agents[i + 1:])
        object.__setattr__(inst, "candidates", self.candidates)
        return inst

    def map_coordinates(self, fn) -> "Instance":
        """Apply ``fn`` to every agent position and candidate coordinate."""
        return Instance(
            tuple(Agent(fn(a.x), a.p1, a.p2) for a in self.agents),
            tuple(fn(c) for c in self.candidates),
        )

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def m(self) -> int:
        return len(self.candidates)

    @cached_property
    def positions(self) -> tuple[Exact, ...]:
        return tuple(a.x for a in self.agents)

    @cached_property
    def group1(self) -> tuple[int, ...]:
        return tuple(i for i, a in enumerate(self.agents) if a.p1)

    @cached_property
    def group2(self) -> tuple[int, ...]:
        return tuple(i for i, a in enumerate(self.agents) if a.p2)

    @cached_property
    def both(self) -> tuple[int, ...]:
        return tuple(i for i, a in enumerate(self.agents) if a.p1 and a.p2)

    def group(self, facility: int) -> tuple[int, ...]:
        if facility == 1:
            return self.group1
        if facility == 2:
            return self.group2
        raise ValueError(f"facility must be 1 or 2, got {facility!r}")

    @property
    def is_homogeneous(self) -> bool:
        return len(self.both) == self.n

    @property
    def is_singleton(self) -> bool:
        return not self.both

    def coordinate(self, slot: int) -> Exact:
        return self.candidates[slot]


def _check_solution(inst: Instance, s: Solution) -> None:
    c1, c2 = s
    if c1 == c2:
        raise InfeasibleSolution(f"both facilities at slot {c1}")
    if not (0 <= c1 < inst.m and 0 <= c2 < inst.m):
        raise IndexError(f"solution {tuple(s)} refers to a slot outside 0..{inst.m - 1}")


def agent_cost(inst: Instance, i: int, s: Solution) -> Exact:
    if not 0 <= i < inst.n:
        raise IndexError(f"agent index {i} out of range 0..{inst.n - 1}")
    a = inst.agents[i]
    cost = 0
    if a.p1:
        cost += abs(a.x - inst.candidates[s[0]])
    if a.p2:
        cost += abs(a.x - inst.candidates[s[1]])
    return cost


def agent_costs(inst: Instance, s: Solution) -> list[Exact]:
    _check_solution(inst, s)
    y1 = inst.candidates[s[0]]
    y2 = inst.candidates[s[1]]
    out = []
    for a in inst.agents:
        cost = 0
        if a.p1:
            cost += abs(a.x - y1)
        if a.p2:
            cost += abs(a.x - y2)
        out.append(cost)
    return out


def objective_value(inst: Instance, s: Solution, obj: Objective) -> Exact:
    costs = agent_costs(inst, s)
    if not costs:
        return 0
    if obj is Objective.SC:
        return sum(costs)
    return max(costs)


def nearest_candidates(inst: Instance, x: Exact) -> tuple[int, int]:
    """Closest and second-closest slots to ``x``; ties go to the lowest index."""
    cands = inst.candidates
    if len(cands) < 2:
        raise InstanceError("need at least two candidates")
    best = second = -1
    bd = sd = None
    for k, c in enumerate(cands):
        d = abs(c - x)
        if bd is None or d < bd:
            second, sd = best, bd
            best, bd = k, d
        elif sd is None or d < sd:
            second, sd = k, d
    return best, second


def sorted_group(inst: Instance, group: Sequence[int]) -> list[int]:
    """Agents of ``group`` in nondecreasing position, equal positions by index."""
    xs = inst.positions
    return sorted(group, key=lambda i: (xs[i], i))


def median_agent(inst: Instance, facility: int) -> int:
    """Leftmost median of the agents approving ``facility``."""
    group = inst.group(facility)
    if not group:
        raise DomainError(f"no agent approves F{facility}")
    order = sorted_group(inst, group)
    return order[(len(order) + 1) // 2 - 1]


def optimal(inst: Instance, obj: Objective) -> tuple[Solution, Exact]:
    """Exhaustive minimum over all ordered pairs of distinct slots.

    Pairs are scanned in lexicographic order and only a strictly smaller value
    replaces the incumbent, so ties resolve to the lexicographically first pair.
    """
    best = None
    best_value = None
    for pair in itertools.permutations(range(inst.m), 2):
        s = Solution(*pair)
        value = objective_value(inst, s, obj)
        if best_value is None or value < best_value:
            best, best_value = s, value
    return best, best_value


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def sign_with_sqrt2(a, b) -> int:
    """Exact sign of ``a + b*sqrt(2)`` for rationals ``a`` and ``b``."""
    sa, sb = _sign(a), _sign(b)
    if sb == 0 or sa == sb:
        return sa
    if sa == 0:
        return sb
    # opposite signs; a*a == 2*b*b is impossible for nonzero rationals
    return sa if a * a > 2 * b * b else sb


@dataclass(frozen=True)
class BoundExpr:
    """The real number ``a + b*sqrt(2)``."""

    a: Exact
    b: Exact = 0

    def compare(self, value: Exact) -> int:
        """-1, 0 or 1 as ``value`` is below, equal to or above the bound."""
        return sign_with_sqrt2(value - self.a, -self.b)

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * 2 ** 0.5

    def __str__(self) -> str:
        if self.b == 0:
            return format_rational(self.a)
        surd = "sqrt2" if self.b == 1 else f"{format_rational(self.b)}*sqrt2"
        if self.a == 0:
            return surd
        return f"{format_rational(self.a)}+{surd}"


TWO = BoundExpr(2)
THREE = BoundExpr(3)
ONE_PLUS_SQRT2 = BoundExpr(1, 1)
