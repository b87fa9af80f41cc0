"""JSON/CSV emission.  Floats go out with 15 significant digits, complex
numbers as [re, im]; every report except the weight summary carries a
schema version and validates against a schema shipped in the package."""

from __future__ import annotations

import csv
import dataclasses
import enum
import io
import json
import math
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import numpy as np

from .gaussian import GaussianRational

SCHEMA_VERSION = "1.0"
SIG_DIGITS = 15


def _num(x: float):
    if not math.isfinite(x):
        return None if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return float(f"{x:.{SIG_DIGITS}g}")


def to_jsonable(obj):
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (float, np.floating, Fraction)):
        return _num(float(obj))
    if isinstance(obj, (complex, np.complexfloating, GaussianRational)):
        z = complex(obj)
        return [_num(z.real), _num(z.imag)]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "to_json"):
        return to_jsonable(obj.to_json())
    if dataclasses.is_dataclass(obj):
        return to_jsonable({f.name: getattr(obj, f.name) for f in dataclasses.fields(obj)})
    raise TypeError(f"cannot serialise {type(obj).__name__}")


@lru_cache(maxsize=None)
def load_schema(kind: str) -> dict:
    text = resources.files("dxm").joinpath("schemas", f"{kind}.schema.json").read_text()
    return json.loads(text)


def validate(doc: dict, kind: str) -> None:
    import jsonschema
    jsonschema.validate(doc, load_schema(kind))


def build(kind: str, payload: dict, versioned: bool = True) -> dict:
    doc = to_jsonable(payload)
    if versioned:
        doc = {"schema_version": SCHEMA_VERSION, "kind": kind, **doc}
    validate(doc, kind)
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=False)


def to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (f"{v:.{SIG_DIGITS}g}" if isinstance(v, float) else v)
                    for k, v in r.items()})
    return buf.getvalue()
