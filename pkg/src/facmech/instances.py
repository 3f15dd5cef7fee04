"""Seeded random instance generators and the exact lower-bound / counterexample families.

Fixtures and generators are addressed by stable strings::

    fixture:median-tight?eps=1/1000
    fixture:sc-hom-lower-case3-end?n=100&eps=1/10000&dup=1
    gen:uniform-homogeneous?n=8&m=6&span=20
    gen:uniform-homogeneous?copies=3
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from fractions import Fraction
from urllib.parse import parse_qsl

from .model import Agent, ConfigurationError, Exact, Instance, Solution, exact, format_rational

EPS_MAX = Fraction(1, 8)

F1_ONLY = (True, False)
F2_ONLY = (False, True)
BOTH = (True, True)


def _split_id(text: str, prefix: str) -> tuple[str, dict[str, str]]:
    text = text.strip()
    if text.startswith(prefix + ":"):
        text = text[len(prefix) + 1:]
    name, _, query = text.partition("?")
    params = dict(parse_qsl(query, keep_blank_values=True, strict_parsing=bool(query)))
    return name.strip(), params


def _parse_eps(value) -> Fraction:
    try:
        eps = Fraction(exact(value)) if not isinstance(value, Fraction) else value
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"bad eps {value!r}: {exc}") from None
    if not 0 < eps < EPS_MAX:
        raise ConfigurationError(f"eps must lie in (0, 1/8), got {format_rational(eps)}")
    return eps


def _parse_count(value, name: str) -> int:
    try:
        k = int(value)
    except (TypeError, ValueError):
        raise ConfigurationError(f"{name} must be an integer, got {value!r}") from None
    if k < 1:
        raise ConfigurationError(f"{name} must be >= 1, got {k}")
    return k


def ceil_alpha_n(n: int) -> int:
    """``ceil((sqrt(2) - 1) * n)`` computed with integers only."""
    return math.isqrt(2 * n * n) - n + 1


# name -> (parameter names, default values)
_FIXTURE_PARAMS = {
    "median-tight": ("eps",),
    "sc-hom-lower-i1": ("n", "eps", "dup"),
    "sc-hom-lower-case1-end": ("n", "eps", "dup"),
    "sc-hom-lower-case2-end": ("n", "eps", "dup"),
    "sc-hom-lower-case3-end": ("n", "eps", "dup"),
    "sc-general-lower-i1": ("eps",),
    "sc-general-lower-i2": ("eps",),
    "pmm-example": ("x", "eps"),
    "mc-hom-lower-i1": ("eps",),
    "mc-hom-lower-i2": ("eps",),
    "vfp-example": ("eps",),
    "mc-general-lower-i1": ("eps",),
    "mc-general-lower-i2": ("eps",),
}
FIXTURE_NAMES = tuple(_FIXTURE_PARAMS)


@dataclass(frozen=True)
class Fixture:
    """One member of an exactly parameterised instance family."""

    name: str
    eps: Fraction = Fraction(1, 1000)
    n: int = 100
    x: int = 1
    dup: bool = False

    def __post_init__(self):
        if self.name not in _FIXTURE_PARAMS:
            raise ConfigurationError(f"unknown fixture {self.name!r}; known: {', '.join(FIXTURE_NAMES)}")
        object.__setattr__(self, "eps", _parse_eps(self.eps))
        object.__setattr__(self, "n", _parse_count(self.n, "n"))
        object.__setattr__(self, "x", _parse_count(self.x, "x"))
        # parameters the family does not use are pinned to their defaults
        used = _FIXTURE_PARAMS[self.name]
        for key, default in (("n", 100), ("x", 1), ("dup", False)):
            if key not in used:
                object.__setattr__(self, key, default)
        object.__setattr__(self, "dup", bool(self.dup))

    @classmethod
    def parse(cls, text: str) -> "Fixture":
        name, params = _split_id(text, "fixture")
        if name not in _FIXTURE_PARAMS:
            raise ConfigurationError(f"unknown fixture {name!r}; known: {', '.join(FIXTURE_NAMES)}")
        allowed = _FIXTURE_PARAMS[name]
        kwargs = {}
        for key, value in params.items():
            if key not in allowed:
                raise ConfigurationError(f"fixture {name} takes parameters {allowed}, got {key!r}")
            if key == "dup":
                kwargs[key] = value.lower() in ("1", "true", "yes")
            elif key == "eps":
                try:
                    kwargs[key] = Fraction(exact(value))
                except ValueError as exc:
                    raise ConfigurationError(str(exc)) from None
            else:
                kwargs[key] = value
        return cls(name, **kwargs)

    def ident(self) -> str:
        parts = []
        for key in _FIXTURE_PARAMS[self.name]:
            if key == "eps":
                parts.append(f"eps={format_rational(self.eps)}")
            elif key == "dup":
                if self.dup:
                    parts.append("dup=1")
            else:
                parts.append(f"{key}={getattr(self, key)}")
        return f"fixture:{self.name}" + ("?" + "&".join(parts) if parts else "")

    def build(self) -> Instance:
        return build_fixture(self)

    def forced(self) -> tuple[Solution, ...]:
        return forced_solutions(self)


def _homogeneous_lower_candidates(eps: Fraction, dup: bool) -> tuple:
    if dup:
        return (0, 0, 2, 2)
    return (-eps, eps, 2 - eps, 2 + eps)


def _agents(*groups) -> tuple[Agent, ...]:
    out = []
    for count, x, prefs in groups:
        out.extend(Agent(x, *prefs) for _ in range(count))
    return tuple(out)


def build_fixture(fx: Fixture | str) -> Instance:
    if isinstance(fx, str):
        fx = Fixture.parse(fx)
    e = fx.eps
    name = fx.name
    if name == "median-tight":
        return Instance(_agents((1, Fraction(1, 2) - e, BOTH), (1, 1, BOTH)), (0, e, 1 - e, 1))
    if name.startswith("sc-hom-lower"):
        a = ceil_alpha_n(fx.n)
        b = fx.n - a
        cands = _homogeneous_lower_candidates(e, fx.dup)
        if name == "sc-hom-lower-i1":
            agents = _agents((a, 0, BOTH), (b, 2, BOTH))
        elif name == "sc-hom-lower-case2-end":
            agents = _agents((a, 0, BOTH), (b, 1 + e, BOTH))
        else:
            agents = _agents((a, 1 - e, BOTH), (b, 2, BOTH))
        return Instance(agents, cands)
    if name == "sc-general-lower-i1":
        return Instance(_agents((1, e, F1_ONLY), (1, e, F2_ONLY)), (-1, 1))
    if name == "sc-general-lower-i2":
        return Instance(_agents((1, e, F1_ONLY), (1, 1, F2_ONLY)), (-1, 1))
    if name == "pmm-example":
        x = fx.x
        return Instance(_agents((x + 1, 1 - e, F1_ONLY), (x, 2, F1_ONLY), (2 * x + 1, 0, F2_ONLY)), (0, 2))
    if name == "mc-hom-lower-i1":
        return Instance(_agents((1, -e, BOTH), (1, e, BOTH)), (-1, 0, 1))
    if name == "mc-hom-lower-i2":
        return Instance(_agents((1, -1, BOTH), (1, e, BOTH)), (-1, 0, 1))
    if name == "vfp-example":
        return Instance(_agents((1, 1 + e, F1_ONLY), (1, 1, F2_ONLY), (1, 3 + e, F2_ONLY)), (0, 2, 6))
    if name == "mc-general-lower-i1":
        return Instance(_agents((1, -e, F1_ONLY), (1, e, F1_ONLY)), (-1, 1))
    if name == "mc-general-lower-i2":
        return Instance(_agents((1, -2, F1_ONLY), (1, e, F1_ONLY)), (-1, 1))
    raise ConfigurationError(f"unknown fixture {name!r}")  # pragma: no cover


def forced_solutions(fx: Fixture | str) -> tuple[Solution, ...]:
    """Solutions that the lower-bound argument forces on every strategyproof mechanism.

    For the starting instances these are the "without loss of generality"
    choices; the end instances inherit them through the deviation argument.
    Families that are not lower-bound constructions return ``()``.
    """
    if isinstance(fx, str):
        fx = Fixture.parse(fx)
    name = fx.name
    if name == "sc-hom-lower-case1-end":
        return (Solution(0, 1), Solution(1, 0))
    if name == "sc-hom-lower-case2-end":
        return (Solution(2, 3), Solution(3, 2))
    if name == "sc-hom-lower-case3-end":
        return tuple(s for a in (0, 1) for b in (2, 3) for s in (Solution(a, b), Solution(b, a)))
    if name in ("sc-general-lower-i1", "sc-general-lower-i2", "mc-general-lower-i1", "mc-general-lower-i2"):
        # F1 at 1, F2 at -1
        return (Solution(1, 0),)
    if name in ("mc-hom-lower-i1", "mc-hom-lower-i2"):
        # some facility at candidate 1 (slot 2)
        return (Solution(0, 2), Solution(2, 0), Solution(1, 2), Solution(2, 1))
    return ()


def sc_hom_lower_sequence(case: int, n: int, eps, dup: bool = False) -> list[Instance]:
    """The one-agent-at-a-time moving sequence from the homogeneous starting instance.

    Cases 1 and 3 move the agents at 0 to ``1 - eps``; case 2 moves the agents
    at 2 to ``1 + eps``.  The first element is the starting instance and the last
    one equals the matching ``*-end`` fixture.
    """
    if case not in (1, 2, 3):
        raise ConfigurationError("case must be 1, 2 or 3")
    start = Fixture("sc-hom-lower-i1", eps=eps, n=n, dup=dup).build()
    e = _parse_eps(eps)
    if case == 2:
        movers = [i for i, a in enumerate(start.agents) if a.x == 2]
        target = 1 + e
    else:
        movers = [i for i, a in enumerate(start.agents) if a.x == 0]
        target = 1 - e
    seq = [start]
    inst = start
    for i in movers:
        inst = inst.with_position(i, exact(target))
        seq.append(inst)
    return seq


def duplicate(inst: Instance, copies: int) -> Instance:
    """Replace every agent by ``copies`` identical consecutive agents."""
    if copies < 1:
        raise ConfigurationError("copies must be >= 1")
    return Instance(tuple(a for a in inst.agents for _ in range(copies)), inst.candidates)


# ---------------------------------------------------------------------------
# random generators

PREF_MODES = ("homogeneous", "general", "overlap", "singleton")

_NAMED_GENERATORS = {
    "uniform-homogeneous": ("uniform", "homogeneous"),
    "uniform-general": ("uniform", "general"),
    "uniform-overlap": ("uniform", "overlap"),
    "singleton": ("uniform", "singleton"),
    "clustered": ("clustered", "general"),
}
GENERATOR_NAMES = tuple(_NAMED_GENERATORS)


@dataclass(frozen=True)
class Generator:
    """Random instance distribution.

    Positions and candidates are ``p/q`` with ``p`` uniform in ``[-span, span]``
    and ``q`` uniform in ``1..max_den``; candidate coordinates are distinct.
    ``copies > 1`` replicates every agent (the copy-expansion transform).
    """

    kind: str = "uniform"
    prefs: str = "homogeneous"
    max_agents: int = 8
    max_candidates: int = 6
    span: int = 20
    max_den: int = 16
    copies: int = 1

    def __post_init__(self):
        if self.kind not in ("uniform", "clustered"):
            raise ConfigurationError(f"unknown generator kind {self.kind!r}")
        if self.prefs not in PREF_MODES:
            raise ConfigurationError(f"prefs must be one of {PREF_MODES}, got {self.prefs!r}")
        if self.max_agents < self.min_agents:
            raise ConfigurationError(f"max_agents must be >= {self.min_agents}")
        if self.max_candidates < 2:
            raise ConfigurationError("max_candidates must be >= 2")
        if self.span < 1 or self.max_den < 1 or self.copies < 1:
            raise ConfigurationError("span, max_den and copies must be >= 1")
        if self.max_candidates > (2 * self.span + 1):
            raise ConfigurationError("span too small for the requested number of distinct candidates")

    @property
    def min_agents(self) -> int:
        return 2 if self.prefs == "singleton" else 1

    @property
    def name(self) -> str:
        for name, (kind, prefs) in _NAMED_GENERATORS.items():
            if (kind, prefs) == (self.kind, self.prefs):
                return name
        return f"{self.kind}-{self.prefs}"

    def ident(self) -> str:
        default = Generator()
        parts = []
        if self.kind == "clustered" and self.prefs != "general":
            parts.append(f"prefs={self.prefs}")
        for key, attr in (("n", "max_agents"), ("m", "max_candidates"), ("span", "span"),
                          ("den", "max_den"), ("copies", "copies")):
            if getattr(self, attr) != getattr(default, attr):
                parts.append(f"{key}={getattr(self, attr)}")
        return f"gen:{self.name}" + ("?" + "&".join(parts) if parts else "")

    @classmethod
    def parse(cls, text: str) -> "Generator":
        name, params = _split_id(text, "gen")
        if name not in _NAMED_GENERATORS:
            raise ConfigurationError(f"unknown generator {name!r}; known: {', '.join(GENERATOR_NAMES)}")
        kind, prefs = _NAMED_GENERATORS[name]
        kwargs = {"kind": kind, "prefs": prefs}
        keys = {"n": "max_agents", "m": "max_candidates", "span": "span", "den": "max_den", "copies": "copies"}
        for key, value in params.items():
            if key == "prefs" and kind == "clustered":
                kwargs["prefs"] = value
            elif key in keys:
                kwargs[keys[key]] = _parse_count(value, key)
            else:
                raise ConfigurationError(f"unknown generator parameter {key!r}")
        return cls(**kwargs)

    def guarantees(self) -> set[str]:
        """Structural properties every generated instance has."""
        if self.prefs == "homogeneous":
            return {"homogeneous", "overlap", "both-groups"}
        if self.prefs == "overlap":
            return {"overlap", "both-groups"}
        if self.prefs == "singleton":
            return {"singleton", "both-groups"}
        return {"both-groups"}

    def _coord(self, rng: random.Random) -> Exact:
        return exact(Fraction(rng.randint(-self.span, self.span), rng.randint(1, self.max_den)))

    def _prefs(self, rng: random.Random, n: int) -> list[tuple[bool, bool]]:
        while True:
            if self.prefs == "homogeneous":
                return [BOTH] * n
            if self.prefs == "singleton":
                prefs = [rng.choice((F1_ONLY, F2_ONLY)) for _ in range(n)]
            else:
                prefs = [rng.choice((F1_ONLY, F2_ONLY, BOTH)) for _ in range(n)]
            has1 = any(p[0] for p in prefs)
            has2 = any(p[1] for p in prefs)
            if not (has1 and has2):
                continue
            if self.prefs == "overlap" and BOTH not in prefs:
                continue
            return prefs

    def sample(self, rng: random.Random) -> Instance:
        n = rng.randint(self.min_agents, self.max_agents)
        m = rng.randint(2, self.max_candidates)
        if self.kind == "uniform":
            cands: list = []
            while len(cands) < m:
                c = self._coord(rng)
                if c not in cands:
                    cands.append(c)
            xs = [self._coord(rng) for _ in range(n)]
        else:
            centers = [self._coord(rng) for _ in range(rng.randint(1, 3))]

            def near(center):
                # a point of the 1/q grid within 2/q of the center
                q = rng.randint(1, self.max_den)
                return exact(Fraction(math.floor(center * q) + rng.randint(-2, 2), q))

            cands = []
            while len(cands) < m:
                c = near(rng.choice(centers)) if rng.random() < 0.7 else self._coord(rng)
                if c not in cands:
                    cands.append(c)
            xs = [near(rng.choice(centers)) if rng.random() < 0.8 else rng.choice(cands) for _ in range(n)]
        prefs = self._prefs(rng, n)
        agents = tuple(Agent(x, p1, p2) for x, (p1, p2) in zip(xs, prefs) for _ in range(self.copies))
        return Instance(agents, tuple(cands))


def trial_rng(seed: int, trial: int) -> random.Random:
    """Independent stream per (seed, trial); stable across processes and runs."""
    return random.Random(f"facmech:{seed}:{trial}")


def generate(gen: Generator | str, seed: int, trial: int = 0) -> Instance:
    if isinstance(gen, str):
        gen = Generator.parse(gen)
    return gen.sample(trial_rng(seed, trial))


def with_copies(gen: Generator, copies: int) -> Generator:
    return replace(gen, copies=copies)
