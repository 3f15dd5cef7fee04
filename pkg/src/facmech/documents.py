"""Instance files, JSON reports and CSV tables.

Rationals always travel as strings (``"p/q"`` or ``"p"``).  Decimal fields
are renderings for people; nothing reads them back.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

from .model import (
    Agent,
    Exact,
    Instance,
    InstanceError,
    Objective,
    Solution,
    agent_costs,
    format_rational,
    objective_value,
    optimal,
    parse_rational,
)

VERSION = 1
DIGITS = 12


def decimal_string(value: Exact, digits: int = DIGITS) -> str:
    """``value`` rounded to ``digits`` significant digits."""
    f = Fraction(value)
    with localcontext() as ctx:
        ctx.prec = digits
        d = Decimal(f.numerator) / Decimal(f.denominator)
    text = format(d, "f") if abs(d.adjusted()) < digits else format(d, "e")
    if "." in text and "e" not in text:
        text = text.rstrip("0").rstrip(".")
    return text or "0"


def number(value: Exact) -> dict[str, str]:
    return {"exact": format_rational(value), "decimal": decimal_string(value)}


# ---------------------------------------------------------------------------
# instance documents


def instance_to_dict(inst: Instance) -> dict:
    return {
        "version": VERSION,
        "candidates": [format_rational(c) for c in inst.candidates],
        "agents": [{"x": format_rational(a.x), "p1": a.p1, "p2": a.p2} for a in inst.agents],
    }


def _rational_field(value, where: str) -> Exact:
    # JSON integers are tolerated; floats never are.
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise InstanceError(f"{where}: expected a rational string, got {type(value).__name__}")
    if isinstance(value, int):
        return value
    return parse_rational(value)


def instance_from_dict(doc: Any) -> Instance:
    if not isinstance(doc, dict):
        raise InstanceError("instance document must be a JSON object")
    if doc.get("version") != VERSION:
        raise InstanceError(f"unsupported instance version {doc.get('version')!r} (expected {VERSION})")
    cands = doc.get("candidates")
    agents = doc.get("agents")
    if not isinstance(cands, list) or not isinstance(agents, list):
        raise InstanceError("'candidates' and 'agents' must be lists")
    if len(cands) < 2:
        raise InstanceError(f"need at least two candidates, got {len(cands)}")
    coords = tuple(_rational_field(c, f"candidates[{k}]") for k, c in enumerate(cands))
    out = []
    for k, a in enumerate(agents):
        if not isinstance(a, dict) or "x" not in a:
            raise InstanceError(f"agents[{k}] must be an object with 'x', 'p1', 'p2'")
        p1, p2 = a.get("p1", False), a.get("p2", False)
        if not isinstance(p1, bool) or not isinstance(p2, bool):
            raise InstanceError(f"agents[{k}]: p1 and p2 must be booleans")
        if not (p1 or p2):
            raise InstanceError(f"agents[{k}] approves neither facility")
        out.append(Agent(_rational_field(a["x"], f"agents[{k}].x"), p1, p2))
    return Instance(tuple(out), coords)


def dumps_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), indent=2) + "\n"


def loads_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"not valid JSON: {exc}") from None
    return instance_from_dict(doc)


def load_instance(path: str | os.PathLike) -> Instance:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InstanceError(f"cannot read {path}: {exc.strerror}") from None
    return loads_instance(text)


def save_instance(path: str | os.PathLike, inst: Instance) -> None:
    write_atomic(path, dumps_instance(inst))


# ---------------------------------------------------------------------------
# files


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` to a temp file beside ``path`` and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    write_atomic(path, csv_text(header, rows))


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, Fraction)):
        return format_rational(v)
    return "" if v is None else str(v)


def slots(s: Solution) -> str:
    return f"{s[0]};{s[1]}"


# ---------------------------------------------------------------------------
# reports


def jsonable(value):
    """Trace values in JSON-safe form; indices stay integers, fractions become strings."""
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, Objective):
        return value.value
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return str(value)


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def solution_dict(inst: Instance, s: Solution) -> dict:
    return {"slots": [s.c1, s.c2],
            "coordinates": [format_rational(inst.candidates[s.c1]), format_rational(inst.candidates[s.c2])]}


def ratio_dict(r) -> dict:
    """A :class:`~facmech.verification.RatioResult` as JSON."""
    if r.infinite:
        return {"exact": "inf", "decimal": "inf", "infinite": True}
    return {**number(r.ratio), "infinite": False}


def run_report(mech, inst: Instance, source: str, objective: Objective) -> dict:
    """Everything about one mechanism run, exact and decimal."""
    from .verification import RatioResult

    out = mech.run(inst)
    sol = out.solution
    costs = agent_costs(inst, sol)
    report: dict = {
        "mechanism": mech.name,
        "alpha": None if mech.alpha is None else str(mech.alpha),
        "instance_source": source,
        "objective": objective.value,
        "solution": solution_dict(inst, sol),
        "agent_costs": [number(c) for c in costs],
    }
    ratios = {}
    for obj in Objective:
        value = objective_value(inst, sol, obj)
        best, opt = optimal(inst, obj)
        key = obj.value
        report[key] = number(value)
        report[f"optimal_{key}"] = {**number(opt), "solution": solution_dict(inst, best)}
        ratios[key] = ratio_dict(RatioResult(value, opt))
    report["ratios"] = ratios
    report["ratio"] = ratios[objective.value]["exact"]
    report["ratio_decimal"] = ratios[objective.value]["decimal"]
    report["trace"] = jsonable(out.trace)
    return report


def opt_report(inst: Instance, objective: Objective, source: Optional[str] = None) -> dict:
    best, value = optimal(inst, objective)
    return {
        "instance_source": source,
        "objective": objective.value,
        "solution": solution_dict(inst, best),
        "value": format_rational(value),
        "value_decimal": decimal_string(value),
        "pairs_evaluated": inst.m * (inst.m - 1),
        "tie_break": "first minimum in lexicographic order of (F1 slot, F2 slot)",
    }


def sweep_report_dict(rep) -> dict:
    out = {
        "mechanism": rep.mechanism,
        "objective": rep.objective.value,
        "generator": rep.generator,
        "trials": rep.trials,
        "seed": rep.seed,
        "max_undefined": rep.max_ratio is None,
        "max_ratio": None,
        "argmax_trial": rep.argmax_trial,
        "argmax_instance": None,
        "ratio_histogram": [{"upper": edge, "count": count} for edge, count in rep.histogram],
        "bound": None if rep.bound is None else str(rep.bound),
        "within_bound": rep.within_bound,
    }
    if rep.max_ratio is not None:
        out["max_ratio"] = {
            "mech_value": format_rational(rep.max_ratio.mech_value),
            "opt_value": format_rational(rep.max_ratio.opt_value),
            **ratio_dict(rep.max_ratio),
        }
        out["argmax_instance"] = instance_to_dict(rep.argmax_instance)
    return out


SWEEP_COLUMNS = ("trial", "n", "m", "mech_value", "opt_value", "ratio", "is_infinite")


def sweep_rows(rep) -> list[list]:
    return [[r.trial, r.n, r.m, r.result.mech_value, r.result.opt_value,
             "inf" if r.result.infinite else r.result.ratio, r.result.infinite]
            for r in rep.records]


FUZZ_COLUMNS = ("trial", "agent", "true_x", "misreport", "true_cost", "dev_cost",
                "slots_before", "slots_after")


def fuzz_rows(rep) -> list[list]:
    return [[t, v.agent, v.true_position, v.misreport, v.true_cost, v.deviated_cost,
             slots(v.outcome_before), slots(v.outcome_after)]
            for t, v in rep.violations]
