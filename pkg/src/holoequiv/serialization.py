"""JSON envelopes ``{"schema": ..., "version": 1, "payload": ...}`` for every representation."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

from .functions import CoordinateMeasure, FuzzyFunction, average_measure, function_from_dict
from .holographic import (
    ExplicitTests,
    HoloScheme,
    IdenticalizedTests,
    MeanTest,
)
from .activations import Activation
from .network import Network
from .polynomial import PolyRep
from .regularity import Partition, StepArray

VERSION = 1


class SchemaError(ValueError):
    """Malformed or unsupported serialized payload."""


def scheme_to_dict(scheme: HoloScheme) -> dict:
    from .sampling import Layout, describe_int

    out = {"kind": "holo_scheme", "n": scheme.n, "k": describe_int(scheme.k),
           "tests": scheme.tests.to_dict(), "metadata": dict(scheme.metadata)}
    if isinstance(scheme.measures, Layout):
        out["measures"] = {"layout": scheme.measures.to_dict()}
    else:
        out["measures"] = [m.weights.tolist() for m in scheme.measures]
    return out


def scheme_from_dict(data: dict) -> HoloScheme:
    n = int(data["n"])
    tests = data["tests"]
    kind = tests["kind"]
    meta = dict(data.get("metadata", {}))
    if kind == "plan":
        from .sampling import PlanTest, SamplerPlan

        plan = SamplerPlan.from_dict(tests["plan"])
        return HoloScheme(n, plan.length, plan.layout, PlanTest(plan), meta)
    measures = [CoordinateMeasure(w) for w in data["measures"]]
    k = len(measures)
    if kind == "explicit":
        entries = {tuple(int(i) for i in key.split(",")): table
                   for key, table in tests["entries"].items()}
        return HoloScheme(n, k, measures, ExplicitTests(n, k, entries), meta)
    if kind == "mean":
        return HoloScheme(n, k, measures, MeanTest(Activation.from_dict(tests["activation"])),
                          meta)
    if kind == "identicalized":
        source = scheme_from_dict(tests["source"])
        r = int(tests["r"])
        mu = average_measure(source.measures)
        return HoloScheme(n, r, [mu] * r,
                          IdenticalizedTests(source, r, tests["exact_limit"],
                                             tests["posterior_samples"], tests["seed"]), meta)
    raise SchemaError(f"unknown test kind {kind!r}")


def _schema_of(obj) -> tuple[str, dict]:
    from .sampling import SamplerPlan

    if isinstance(obj, FuzzyFunction):
        return "function", obj.to_dict()
    if isinstance(obj, CoordinateMeasure):
        return "measure", obj.to_dict()
    if isinstance(obj, HoloScheme):
        return "holo_scheme", scheme_to_dict(obj)
    if isinstance(obj, PolyRep):
        return "poly_rep", obj.to_dict()
    if isinstance(obj, Network):
        return "network", obj.to_dict()
    if isinstance(obj, SamplerPlan):
        return "sampler_plan", obj.to_dict()
    if isinstance(obj, Partition):
        return "partition", obj.to_dict()
    if isinstance(obj, StepArray):
        return "step_array", obj.to_dict()
    if isinstance(obj, dict):
        return "report", obj
    if hasattr(obj, "to_dict"):
        return "report", obj.to_dict()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    return value


def to_envelope(obj, provenance: dict | None = None) -> dict:
    schema, payload = _schema_of(obj)
    env = {"schema": schema, "version": VERSION, "payload": _jsonable(payload)}
    if provenance:
        env["provenance"] = _jsonable(provenance)
    return env


def from_envelope(env: dict):
    if not isinstance(env, dict) or "schema" not in env or "payload" not in env:
        raise SchemaError("not a holoequiv envelope")
    if env.get("version") != VERSION:
        raise SchemaError(f"unsupported envelope version {env.get('version')!r}")
    schema, payload = env["schema"], env["payload"]
    try:
        if schema == "function":
            return function_from_dict(payload)
        if schema == "measure":
            return CoordinateMeasure.from_dict(payload)
        if schema == "holo_scheme":
            return scheme_from_dict(payload)
        if schema == "poly_rep":
            return PolyRep.from_dict(payload)
        if schema == "network":
            return Network.from_dict(payload)
        if schema == "sampler_plan":
            from .sampling import SamplerPlan

            return SamplerPlan.from_dict(payload)
        if schema == "partition":
            return Partition.from_dict(payload)
        if schema == "step_array":
            return StepArray.from_dict(payload)
        if schema == "report":
            return payload
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(f"invalid {schema} payload: {exc}") from exc
    raise SchemaError(f"unknown schema {schema!r}")


def dumps(obj, provenance: dict | None = None) -> str:
    return json.dumps(to_envelope(obj, provenance), indent=1)


def loads(text: str):
    try:
        return from_envelope(json.loads(text))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc


def save(obj, path, provenance: dict | None = None) -> None:
    text = dumps(obj, provenance)
    if str(path) == "-":
        sys.stdout.write(text + "\n")
    else:
        Path(path).write_text(text + "\n")


def load(path):
    text = sys.stdin.read() if str(path) == "-" else Path(path).read_text()
    return loads(text)
