"""Instance files and report serialization.

Instance files follow::

    {"name": "optional",
     "groups": [{"id": 0, "alpha": "1/4"}],
     "agents": [{"x": "1/7", "group": 0}]}

Rationals may be ``"num/den"`` strings, decimal strings or bare JSON numbers;
JSON numbers are parsed straight from their text, so ``0.1`` is exactly 1/10.

Reports carry each rational as an exact string plus a ``<field>_decimal``
rendering with 12 significant digits.
"""

from __future__ import annotations

import csv
import dataclasses
import enum
import io
import json
import math
from decimal import Context, Decimal
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable

from .model import AgentProfile, GroupSpec, Instance, InstanceError, as_rational

DECIMAL_DIGITS = 12
_CTX = Context(prec=DECIMAL_DIGITS)


class InstanceFormatError(InstanceError):
    """Malformed instance file."""


# -- instances ---------------------------------------------------------------

def _rational(value, where: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, str, Fraction)):
        raise InstanceFormatError(f"{where}: expected a rational, got {value!r}")
    try:
        return as_rational(value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise InstanceFormatError(f"{where}: {exc}") from None


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InstanceFormatError(f"{where}: expected an integer, got {value!r}")
    return value


def instance_from_dict(data: Any, name: str | None = None) -> Instance:
    if not isinstance(data, dict):
        raise InstanceFormatError("instance must be a JSON object")
    for key in ("groups", "agents"):
        if not isinstance(data.get(key), list):
            raise InstanceFormatError(f"missing or non-list field {key!r}")
    groups = []
    for j, g in enumerate(data["groups"]):
        if not isinstance(g, dict) or "id" not in g or "alpha" not in g:
            raise InstanceFormatError(f"groups[{j}] needs 'id' and 'alpha'")
        groups.append(GroupSpec(_int(g["id"], f"groups[{j}].id"), _rational(g["alpha"], f"groups[{j}].alpha")))
    agents = []
    for i, a in enumerate(data["agents"]):
        if not isinstance(a, dict) or "x" not in a or "group" not in a:
            raise InstanceFormatError(f"agents[{i}] needs 'x' and 'group'")
        agents.append(AgentProfile(_rational(a["x"], f"agents[{i}].x"), _int(a["group"], f"agents[{i}].group")))
    label = data.get("name", name)
    return Instance(tuple(agents), tuple(groups), label if isinstance(label, str) else name)


def loads_instance(text: str, name: str | None = None) -> Instance:
    try:
        data = json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"invalid JSON: {exc}") from None
    try:
        return instance_from_dict(data, name)
    except InstanceFormatError:
        raise
    except ValueError as exc:  # dataclass validation
        raise InstanceFormatError(str(exc)) from None


def load_instance(path: str | Path) -> Instance:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InstanceFormatError(f"cannot read {p}: {exc.strerror}") from None
    return loads_instance(text, name=p.stem)


def instance_to_dict(inst: Instance) -> dict:
    out: dict = {}
    if inst.name is not None:
        out["name"] = inst.name
    out["groups"] = [{"id": g.id, "alpha": str(g.alpha)} for g in inst.groups]
    out["agents"] = [{"x": str(a.location), "group": a.group} for a in inst.agents]
    return out


def dumps_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), indent=2) + "\n"


# -- reports -----------------------------------------------------------------

def exact(value) -> str:
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return str(value)


def decimal(value) -> str:
    """12 significant digits, plain notation where reasonable."""
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    q = Fraction(value)
    d = _CTX.divide(Decimal(q.numerator), Decimal(q.denominator))
    if d == 0:
        return "0"
    text = format(d, "f") if -7 < d.adjusted() < DECIMAL_DIGITS else format(d, "e")
    if "." in text and "e" not in text:
        text = text.rstrip("0").rstrip(".")
    return text


def _is_number(v) -> bool:
    return isinstance(v, Fraction) or (isinstance(v, float) and math.isinf(v))


def to_jsonable(obj):
    """Dataclasses become dicts in field order. Rational fields gain a
    ``_decimal`` sibling; tuples of rationals get a list of decimals."""
    if isinstance(obj, Instance):
        return instance_to_dict(obj)
    if isinstance(obj, AgentProfile):
        return {"x": str(obj.location), "group": obj.group}
    if isinstance(obj, enum.Enum):
        return obj.value
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        out = {}
        for f in dataclasses.fields(obj):
            _put(out, f.name, getattr(obj, f.name))
        return out
    if isinstance(obj, dict):
        out = {}
        for k, v in obj.items():
            _put(out, str(k), v)
        return out
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if _is_number(obj):
        return exact(obj)
    return obj


def _put(out: dict, key: str, value) -> None:
    if _is_number(value):
        out[key] = exact(value)
        out[f"{key}_decimal"] = decimal(value)
    elif isinstance(value, (tuple, list)) and value and all(_is_number(v) for v in value):
        out[key] = [exact(v) for v in value]
        out[f"{key}_decimal"] = [decimal(v) for v in value]
    else:
        out[key] = to_jsonable(value)


def dumps_json(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2) + "\n"


# CSV layouts. Lists inside a cell are ';'-separated; a misreport is
# "agent:x@group".

VIOLATION_COLUMNS = (
    "instance", "mechanism", "deviation", "audit",
    "deviators", "misreports",
    "truthful_facility", "truthful_facility_decimal",
    "deviated_facility", "deviated_facility_decimal",
    "cost_before", "cost_after",
    "gain", "gain_decimal",
)

RATIO_COLUMNS = (
    "mechanism", "objective",
    "mechanism_value", "mechanism_value_decimal",
    "oracle_value", "oracle_value_decimal",
    "ratio", "ratio_decimal",
    "witness",
    "facility", "facility_decimal",
    "optimal_facility", "optimal_facility_decimal",
    "in_optimal_set",
)

SEARCH_COLUMNS = ("trials", "seed", "best_trial") + RATIO_COLUMNS + ("bound", "bound_decimal", "within_bound")


def _join(values: Iterable) -> str:
    return ";".join(exact(v) for v in values)


def violation_row(v, *, instance=None, mechanism="", deviation="", audit="") -> dict:
    return {
        "instance": instance or "",
        "mechanism": mechanism,
        "deviation": getattr(deviation, "value", deviation),
        "audit": audit,
        "deviators": _join(v.deviators),
        "misreports": ";".join(f"{i}:{p.location}@{p.group}" for i, p in v.misreports),
        "truthful_facility": exact(v.truthful_facility),
        "truthful_facility_decimal": decimal(v.truthful_facility),
        "deviated_facility": exact(v.deviated_facility),
        "deviated_facility_decimal": decimal(v.deviated_facility),
        "cost_before": _join(v.cost_before),
        "cost_after": _join(v.cost_after),
        "gain": exact(v.gain),
        "gain_decimal": decimal(v.gain),
    }


def ratio_row(r) -> dict:
    row = {}
    for col in RATIO_COLUMNS:
        if col.endswith("_decimal"):
            row[col] = decimal(getattr(r, col[: -len("_decimal")]))
        else:
            val = getattr(r, col)
            row[col] = "" if val is None else (exact(val) if _is_number(val) else str(val).lower() if isinstance(val, bool) else str(val))
    return row


def search_row(s) -> dict:
    row = {"trials": str(s.trials), "seed": str(s.seed), "best_trial": str(s.best_trial)}
    row.update(ratio_row(s.best))
    if s.bound is None:
        row.update(bound="", bound_decimal="", within_bound="")
    else:
        row.update(bound=s.bound.label, bound_decimal=decimal(float(s.bound)),
                   within_bound=str(s.within_bound).lower())
    return row


def dumps_csv(columns: tuple[str, ...], rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow(row)
    return buf.getvalue()
