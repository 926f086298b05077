"""Text and JSON formats for graphs, label maps, NAE instances, traces and bundles.

Graph files are DIMACS-like with 1-based ids::

    c optional comment
    p graph <n> <m>
    e <u> <v>

Canonical output lists edges with u < v in lexicographic order.  JSON is
canonical when keys are sorted and no insignificant whitespace is emitted.
"""

from __future__ import annotations

import hashlib
import json
import os
import warnings
from pathlib import Path
from typing import Any, Mapping

import jsonschema

from mdkit.graph import Graph, GraphError, from_edges
from mdkit.kernel import KernelTrace, Mode
from mdkit.nae import NaeInstance


class FormatError(ValueError):
    """Malformed input; ``pointer`` is a JSON pointer for schema violations."""

    def __init__(self, message: str, pointer: str | None = None):
        super().__init__(message if pointer is None else f"{pointer or '/'}: {message}")
        self.pointer = pointer


class DuplicateEdgeWarning(UserWarning):
    pass


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def sha256_hex(data: str | bytes) -> str:
    if isinstance(data, str):
        data = data.encode()
    return hashlib.sha256(data).hexdigest()


def _pointer(path) -> str:
    return "".join("/" + str(p).replace("~", "~0").replace("/", "~1") for p in path)


def _validate(obj: Any, schema: dict) -> None:
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(obj), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        err = errors[0]
        raise FormatError(err.message, _pointer(err.absolute_path))


def _load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None


# --------------------------------------------------------------------------
# graphs


def read_graph(text: str) -> Graph:
    n = m = None
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    lines = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] == "p":
            if n is not None:
                raise FormatError(f"line {lineno}: second header line")
            if len(parts) != 4 or parts[1] != "graph":
                raise FormatError(f"line {lineno}: expected 'p graph <n> <m>'")
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise FormatError(f"line {lineno}: non-integer in header") from None
            if n < 0 or m < 0:
                raise FormatError(f"line {lineno}: negative count in header")
            continue
        if parts[0] != "e":
            raise FormatError(f"line {lineno}: unknown line type {parts[0]!r}")
        if n is None:
            raise FormatError(f"line {lineno}: edge before header")
        if len(parts) != 3:
            raise FormatError(f"line {lineno}: expected 'e <u> <v>'")
        try:
            u, v = int(parts[1]), int(parts[2])
        except ValueError:
            raise FormatError(f"line {lineno}: non-integer vertex id") from None
        for w in (u, v):
            if not 1 <= w <= n:
                raise FormatError(f"line {lineno}: vertex id {w} outside 1..{n}")
        if u == v:
            raise FormatError(f"line {lineno}: self-loop on vertex {u}")
        lines += 1
        key = (min(u, v), max(u, v))
        if key in seen:
            warnings.warn(f"line {lineno}: duplicate edge {u} {v} ignored", DuplicateEdgeWarning, stacklevel=2)
            continue
        seen.add(key)
        edges.append((key[0] - 1, key[1] - 1))
    if n is None:
        raise FormatError("missing 'p graph' header")
    if lines != m:
        raise FormatError(f"edge count mismatch: header declares {m}, found {lines}")
    try:
        return from_edges(n, edges)
    except GraphError as exc:
        raise FormatError(str(exc)) from None


def write_graph(g: Graph) -> str:
    out = [f"p graph {g.n} {g.m}"]
    out += [f"e {u + 1} {v + 1}" for u, v in g.edges()]
    return "\n".join(out) + "\n"


LABELS_SCHEMA = {
    "type": "object",
    "properties": {
        "labels": {
            "type": "object",
            "patternProperties": {"^[1-9][0-9]*$": {"type": "string", "minLength": 1}},
            "additionalProperties": False,
        }
    },
    "required": ["labels"],
    "additionalProperties": False,
}


def read_labels(text: str, n: int | None = None) -> dict[int, str]:
    """Label sidecar to a 0-based id -> role map."""
    obj = _load_json(text)
    _validate(obj, LABELS_SCHEMA)
    out: dict[int, str] = {}
    owner: dict[str, str] = {}
    for key, role in obj["labels"].items():
        if role in owner:
            raise FormatError(f"role {role!r} already used by vertex {owner[role]}", f"/labels/{key}")
        owner[role] = key
        vid = int(key)
        if n is not None and vid > n:
            raise FormatError(f"vertex {vid} outside 1..{n}", f"/labels/{key}")
        out[vid - 1] = role
    return dict(sorted(out.items()))


def write_labels(labels: Mapping[int, str]) -> str:
    return canonical_json({"labels": {str(v + 1): lab for v, lab in labels.items()}}) + "\n"


def with_labels(g: Graph, labels: Mapping[int, str]) -> Graph:
    return from_edges(g.n, g.edges(), labels)


# --------------------------------------------------------------------------
# NAE instances

NAE_SCHEMA = {
    "type": "object",
    "properties": {
        "d": {"type": "integer", "minimum": 1},
        "vars": {"type": "integer", "minimum": 0},
        "clauses": {
            "type": "array",
            "items": {
                "type": "array",
                "minItems": 3,
                "maxItems": 3,
                "items": {
                    "type": "array",
                    "prefixItems": [
                        {"type": "integer", "minimum": 0},
                        {"type": "integer", "minimum": 1},
                    ],
                    "minItems": 2,
                    "maxItems": 2,
                },
            },
        },
    },
    "required": ["d", "vars", "clauses"],
    "additionalProperties": False,
}


def read_nae(text: str) -> NaeInstance:
    obj = _load_json(text)
    _validate(obj, NAE_SCHEMA)
    for j, clause in enumerate(obj["clauses"]):
        for q, (x, a) in enumerate(clause):
            if x >= obj["vars"]:
                raise FormatError(f"variable {x} outside 0..{obj['vars'] - 1}", f"/clauses/{j}/{q}/0")
            if a > obj["d"]:
                raise FormatError(f"bound {a} outside 1..{obj['d']}", f"/clauses/{j}/{q}/1")
        if len({x for x, _ in clause}) != 3:
            raise FormatError("clause repeats a variable", f"/clauses/{j}")
    return NaeInstance.create(obj["d"], obj["vars"], obj["clauses"])


def nae_record(inst: NaeInstance) -> dict:
    return {
        "d": inst.d,
        "vars": inst.var_count,
        "clauses": [[[x, a] for x, a in clause] for clause in inst.clauses],
    }


def write_nae(inst: NaeInstance) -> str:
    return canonical_json(nae_record(inst)) + "\n"


# --------------------------------------------------------------------------
# kernel traces

TRACE_SCHEMA = {
    "type": "object",
    "properties": {
        "mode": {"enum": [m.value for m in Mode]},
        "initial_k": {"type": "integer"},
        "final_k": {"type": "integer"},
        "steps": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "rule": {"enum": ["RR1", "RR2", "RR3", "RR4"]},
                    "removed": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    "decrement": {"type": "integer", "minimum": 0},
                },
                "required": ["rule", "removed", "decrement"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["mode", "initial_k", "final_k", "steps"],
    "additionalProperties": False,
}


def read_trace(text: str) -> KernelTrace:
    obj = _load_json(text)
    _validate(obj, TRACE_SCHEMA)
    total = sum(s["decrement"] for s in obj["steps"])
    if obj["final_k"] != obj["initial_k"] - total:
        raise FormatError(
            f"final_k {obj['final_k']} differs from initial_k - decrements = {obj['initial_k'] - total}",
            "/final_k",
        )
    for i, step in enumerate(obj["steps"]):
        if step["rule"] == "RR2" and step["decrement"] != 1:
            raise FormatError("RR2 steps decrement k by 1", f"/steps/{i}/decrement")
    return KernelTrace.from_record(obj)


def write_trace(trace: KernelTrace) -> str:
    return canonical_json(trace.to_record()) + "\n"


# --------------------------------------------------------------------------
# artifact bundles


def write_bundle(out_dir: str | os.PathLike, g: Graph, metadata: dict) -> dict[str, str]:
    """Write graph.txt, labels.json (when labelled) and meta.json; returns name -> path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {"graph": out / "graph.txt", "meta": out / "meta.json"}
    files["graph"].write_text(write_graph(g))
    if g.labels:
        files["labels"] = out / "labels.json"
        files["labels"].write_text(write_labels(g.labels))
    files["meta"].write_text(canonical_json(metadata) + "\n")
    return {k: str(v) for k, v in sorted(files.items())}


def read_bundle(out_dir: str | os.PathLike) -> tuple[Graph, dict]:
    out = Path(out_dir)
    g = read_graph((out / "graph.txt").read_text())
    labels_path = out / "labels.json"
    if labels_path.exists():
        g = with_labels(g, read_labels(labels_path.read_text(), g.n))
    meta = _load_json((out / "meta.json").read_text())
    return g, meta
