"""JSON instance and solution files.

Instances::

    {"kind": "santa", "children": [...], "gifts": [{"id", "value", "eligible": [...]}], "target_T": 12}
    {"kind": "matroid-maxmin", "ground": [...], "resources": [{"id", "value", "eligible": [...]}],
     "matroid": {"type": "uniform", "rank": 2}, "target_T": 12}

Matroid descriptions reference ground ids: ``uniform`` takes ``rank``,
``partition`` takes ``blocks`` and ``capacities``, ``transversal`` takes
``sets`` (each a list of ground ids), ``dual`` takes ``of`` (another
description) and ``free`` takes nothing.  Rationals are written as
``"p/q"`` strings.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

import jsonschema

from .errors import InvalidInputError
from .matroids import DualMatroid, FreeMatroid, Matroid, PartitionMatroid, TransversalMatroid, UniformMatroid
from .model import AllocationInstance
from .santa import SantaInstance

_ID = {"type": ["string", "integer"]}
_ITEM = {
    "type": "object",
    "required": ["id", "value", "eligible"],
    "properties": {
        "id": _ID,
        "value": {"type": "integer", "minimum": 0},
        "eligible": {"type": "array", "items": _ID},
    },
    "additionalProperties": False,
}
_MATROID = {
    "type": "object",
    "required": ["type"],
    "properties": {
        "type": {"enum": ["uniform", "free", "partition", "transversal", "dual"]},
        "rank": {"type": "integer", "minimum": 0},
        "blocks": {"type": "array", "items": {"type": "array", "items": _ID}},
        "capacities": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "sets": {"type": "array", "items": {"type": "array", "items": _ID}},
        "of": {"$ref": "#/$defs/matroid"},
    },
    "additionalProperties": False,
}
INSTANCE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$defs": {"matroid": _MATROID},
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["santa", "matroid-maxmin"]},
        "children": {"type": "array", "items": _ID},
        "gifts": {"type": "array", "items": _ITEM},
        "ground": {"type": "array", "items": _ID},
        "resources": {"type": "array", "items": _ITEM},
        "matroid": {"$ref": "#/$defs/matroid"},
        "target_T": {"type": "integer", "minimum": 0},
    },
    "allOf": [
        {
            "if": {"properties": {"kind": {"const": "santa"}}},
            "then": {"required": ["children", "gifts"]},
            "else": {"required": ["ground", "resources", "matroid"]},
        }
    ],
}
_RATIONAL = {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}
SOLUTION_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["kind", "T", "epsilon", "stats"],
    "properties": {
        "kind": {"enum": ["santa", "matroid-maxmin"]},
        "T": {"type": "integer", "minimum": 0},
        "epsilon": _RATIONAL,
        "partition": {
            "type": ["object", "null"],
            "properties": {"mode": {"type": "string"}, "delta1": _RATIONAL, "delta2": _RATIONAL},
        },
        "assignment": {
            "type": "array",
            "items": {"type": "object", "required": ["gift", "child"], "properties": {"gift": _ID, "child": _ID}},
        },
        "objective": {"type": "integer"},
        "per_child": {"type": "object", "additionalProperties": {"type": "integer"}},
        "threshold": _RATIONAL,
        "basis": {"type": "array", "items": _ID},
        "matching": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["element", "resources", "value"],
                "properties": {"element": _ID, "resources": {"type": "array", "items": _ID}, "value": {"type": "integer"}},
            },
        },
        "stats": {"type": "object", "additionalProperties": {"type": "integer"}},
    },
}


def rational(value) -> Fraction:
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise InvalidInputError(f"not a rational number: {value!r}") from exc


def rational_str(value) -> str:
    return str(Fraction(value))


def _validate(doc, schema, what: str) -> None:
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        lines = [f"{'/'.join(map(str, e.absolute_path)) or '<root>'}: {e.message}" for e in errors]
        raise InvalidInputError(f"invalid {what}:\n  " + "\n  ".join(lines))


def _index(ids, what: str) -> dict:
    out = {}
    for k, x in enumerate(ids):
        if x in out:
            raise InvalidInputError(f"duplicate {what} id {x!r}")
        out[x] = k
    return out


def _lookup(index: dict, ids, what: str) -> list:
    try:
        return [index[x] for x in ids]
    except KeyError as exc:
        raise InvalidInputError(f"unknown {what} id {exc.args[0]!r}") from None


def matroid_from_spec(spec: dict, index: dict) -> Matroid:
    n = len(index)
    kind = spec["type"]
    try:
        if kind == "uniform":
            if "rank" not in spec:
                raise InvalidInputError("uniform matroid needs 'rank'")
            return UniformMatroid(n, spec["rank"])
        if kind == "free":
            return FreeMatroid(n)
        if kind == "partition":
            blocks = [_lookup(index, b, "ground") for b in spec.get("blocks", [])]
            caps = spec.get("capacities", [])
            return PartitionMatroid(n, blocks, caps)
        if kind == "transversal":
            sets = [_lookup(index, s, "ground") for s in spec.get("sets", [])]
            return TransversalMatroid.from_sets(n, sets)
        if "of" not in spec:
            raise InvalidInputError("dual matroid needs 'of'")
        return DualMatroid(matroid_from_spec(spec["of"], index))
    except InvalidInputError:
        raise
    except ValueError as exc:
        raise InvalidInputError(f"bad {kind} matroid: {exc}") from exc


@dataclass(frozen=True)
class InstanceFile:
    """A parsed instance; equality ignores the constructed matroid object."""

    kind: str
    instance: Any  # SantaInstance or AllocationInstance
    target: int | None = None
    matroid_spec: dict | None = None
    resource_ids: tuple = ()
    matroid: Matroid | None = field(default=None, compare=False, repr=False)
    ground_ids: tuple = ()
    resource_eligible: tuple = ()  # per resource, element indices as given in the file

    @property
    def element_ids(self) -> tuple:
        if self.kind == "santa":
            return self.instance.child_ids
        return self.ground_ids


def parse_instance(doc: Any) -> InstanceFile:
    _validate(doc, INSTANCE_SCHEMA, "instance")
    target = doc.get("target_T")
    if doc["kind"] == "santa":
        children = doc["children"]
        index = _index(children, "child")
        gifts = doc["gifts"]
        _index([g["id"] for g in gifts], "gift")
        for g in gifts:
            if g["value"] <= 0:
                raise InvalidInputError(f"gift {g['id']!r} must have a positive value")
        inst = SantaInstance(
            len(children),
            tuple(g["value"] for g in gifts),
            tuple(frozenset(_lookup(index, g["eligible"], "child")) for g in gifts),
            tuple(children),
            tuple(g["id"] for g in gifts),
        )
        return InstanceFile("santa", inst, target)
    ground = doc["ground"]
    index = _index(ground, "ground")
    resources = doc["resources"]
    _index([r["id"] for r in resources], "resource")
    neighbors: list[set] = [set() for _ in ground]
    for w, r in enumerate(resources):
        for i in _lookup(index, r["eligible"], "ground"):
            neighbors[i].add(w)
    alloc = AllocationInstance(
        len(ground),
        {w: r["value"] for w, r in enumerate(resources)},
        tuple(frozenset(n) for n in neighbors),
        target or 0,
    )
    matroid = matroid_from_spec(doc["matroid"], index)
    return InstanceFile(
        "matroid-maxmin",
        alloc,
        target,
        doc["matroid"],
        tuple(r["id"] for r in resources),
        matroid,
        tuple(ground),
        tuple(tuple(_lookup(index, r["eligible"], "ground")) for r in resources),
    )


def instance_to_doc(f: InstanceFile) -> dict:
    if f.kind == "santa":
        inst = f.instance
        doc = {
            "kind": "santa",
            "children": list(inst.child_ids),
            "gifts": [
                {"id": gid, "value": p, "eligible": [inst.child_ids[i] for i in sorted(a)]}
                for gid, p, a in zip(inst.gift_ids, inst.values, inst.eligible)
            ],
        }
    else:
        alloc = f.instance
        ground = list(f.element_ids)
        # zero-valued resources were dropped by the model; keep them in the file
        doc = {
            "kind": "matroid-maxmin",
            "ground": ground,
            "resources": [
                {
                    "id": rid,
                    "value": alloc.values.get(w, 0),
                    "eligible": [ground[i] for i in _eligible_of(f, w)],
                }
                for w, rid in enumerate(f.resource_ids)
            ],
            "matroid": f.matroid_spec,
        }
    if f.target is not None:
        doc["target_T"] = f.target
    return doc


def _eligible_of(f: InstanceFile, w: int):
    if f.resource_eligible:
        return f.resource_eligible[w]
    return [i for i in range(f.instance.n_elements) if w in f.instance.neighbors[i]]


def santa_instance_file(inst: SantaInstance, target: int | None = None) -> InstanceFile:
    return InstanceFile("santa", inst, target)


def load_json(path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from exc


def load_instance(path) -> InstanceFile:
    return parse_instance(load_json(path))


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


@dataclass(frozen=True)
class SolutionFile:
    kind: str
    T: int
    epsilon: Fraction
    stats: dict
    partition: dict | None = None
    assignment: tuple = ()  # (gift id, child id) pairs
    objective: int | None = None
    per_child: dict | None = None
    threshold: Fraction | None = None
    basis: tuple = ()
    matching: tuple = ()  # (element id, resource ids tuple, value)

    def to_doc(self) -> dict:
        doc: dict = {"kind": self.kind, "T": self.T, "epsilon": rational_str(self.epsilon)}
        if self.kind == "santa":
            doc["partition"] = self.partition
            doc["assignment"] = [{"gift": g, "child": c} for g, c in self.assignment]
            doc["objective"] = self.objective
            doc["per_child"] = dict(self.per_child or {})
        else:
            doc["threshold"] = rational_str(self.threshold)
            doc["basis"] = list(self.basis)
            doc["matching"] = [{"element": e, "resources": list(r), "value": v} for e, r, v in self.matching]
        doc["stats"] = dict(self.stats)
        return doc

    @classmethod
    def from_doc(cls, doc) -> "SolutionFile":
        _validate(doc, SOLUTION_SCHEMA, "solution")
        if doc["kind"] == "santa":
            if "assignment" not in doc or "objective" not in doc:
                raise InvalidInputError("santa solution needs 'assignment' and 'objective'")
            return cls(
                "santa",
                doc["T"],
                rational(doc["epsilon"]),
                dict(doc["stats"]),
                doc.get("partition"),
                tuple((a["gift"], a["child"]) for a in doc["assignment"]),
                doc["objective"],
                dict(doc.get("per_child", {})),
            )
        for key in ("threshold", "basis", "matching"):
            if key not in doc:
                raise InvalidInputError(f"matroid solution needs {key!r}")
        return cls(
            "matroid-maxmin",
            doc["T"],
            rational(doc["epsilon"]),
            dict(doc["stats"]),
            threshold=rational(doc["threshold"]),
            basis=tuple(doc["basis"]),
            matching=tuple((m["element"], tuple(m["resources"]), m["value"]) for m in doc["matching"]),
        )


def load_solution(path) -> SolutionFile:
    return SolutionFile.from_doc(load_json(path))


def santa_solution_file(inst: SantaInstance, sol, mode: str = "default") -> SolutionFile:
    from .santa import child_values

    per = child_values(inst, sol.assignment)
    partition = None
    if sol.partition is not None:
        partition = {
            "mode": mode,
            "delta1": rational_str(sol.partition.delta1),
            "delta2": rational_str(sol.partition.delta2),
        }
    return SolutionFile(
        "santa",
        sol.T,
        sol.epsilon,
        sol.stats.summary(),
        partition,
        tuple((inst.gift_ids[j], inst.child_ids[i]) for j, i in enumerate(sol.assignment) if i is not None),
        sol.objective,
        {str(inst.child_ids[i]): v for i, v in enumerate(per)},
    )


def matroid_solution_file(f: InstanceFile, sol) -> SolutionFile:
    ids = f.element_ids
    rids = f.resource_ids
    return SolutionFile(
        "matroid-maxmin",
        f.instance.target,
        sol.params.epsilon,
        sol.stats.summary(),
        threshold=sol.params.beta_threshold,
        basis=tuple(ids[i] for i in sorted(sol.basis)),
        matching=tuple(
            (ids[i], tuple(rids[w] for w in sorted(e.resources)), e.value)
            for i, e in sorted(sol.matching.items())
        ),
    )


def santa_assignment(inst: SantaInstance, sol: SolutionFile) -> tuple:
    """Gift-indexed assignment from a solution file; unknown ids raise InvalidInputError."""
    gift_index = {g: j for j, g in enumerate(inst.gift_ids)}
    child_index = {c: i for i, c in enumerate(inst.child_ids)}
    out: list = [None] * inst.n_gifts
    for g, c in sol.assignment:
        if g not in gift_index:
            raise InvalidInputError(f"solution assigns unknown gift {g!r}")
        if c not in child_index:
            raise InvalidInputError(f"solution assigns gift {g!r} to unknown child {c!r}")
        if out[gift_index[g]] is not None:
            raise InvalidInputError(f"gift {g!r} assigned twice")
        out[gift_index[g]] = child_index[c]
    return tuple(out)
