"""Deterministic JSON documents for tensors, realizations and reports.

Floats are written with 17 significant digits, which round-trips every
IEEE double exactly; non-finite values are written as the strings ``"inf"``,
``"-inf"`` and ``"nan"``. Lists of scalars (and lists of such lists) are kept
on one line so that golden files diff cleanly.

Document kinds::

    tensor          {"shape": [...], "entries": [[re, im], ...]}   (row-major)
    cp-map          {"kind": "cp-map", "kraus": [tensor, ...]}
    dh-realization  {"kind": "dh-realization", "out_dim": K, "bridge_dim": B,
                     "bridge": {"group": "Z2" | null, "dressing": tensor | null},
                     "kraus": [tensor, ...]}
    dd-realization  {"kind": "dd-realization" | "dm-realization",
                     "env_dim": C, "kraus": [tensor, ...]}
    report          {"kind": "report", ...}   see ``report_to_doc``
    report-set      {"kind": "report-set", "passed": bool, "reports": [...],
                     "skipped": {id: reason}}

A missing dressing means the plain group-element bridge.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .cpm import CPMap
from .dilation import DDRealization, DMRealization
from .groupalg import FiniteAbelianGroup
from .hypercube import DHRealization
from .verify import Check, VerificationReport

_NONFINITE = {"inf": math.inf, "-inf": -math.inf, "nan": math.nan}


class DocumentError(ValueError):
    """Malformed document; ``offset`` is a byte offset into the source."""

    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


# -- writer ------------------------------------------------------------------

def format_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if x == 0 and math.copysign(1.0, x) < 0:
        return "-0.0"           # "-0" would parse back as the integer 0
    return format(x, ".17g")


def _scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    if isinstance(v, str):
        return json.dumps(v)
    raise TypeError(f"cannot serialize {type(v).__name__}")


def _is_flat(v) -> bool:
    if not isinstance(v, list):
        return False
    return all(not isinstance(x, (list, dict)) or
               (isinstance(x, list) and all(not isinstance(y, (list, dict)) for y in x))
               for x in v)


def _write(v, indent: int) -> str:
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_write(x, indent + 1)}"
                 for k, x in v.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(v, list):
        if _is_flat(v):
            return "[" + ", ".join(_write(x, indent) for x in v) + "]"
        return "[\n" + ",\n".join(inner + _write(x, indent + 1) for x in v) + "\n" + pad + "]"
    return _scalar(v)


def dumps(doc: Any) -> str:
    return _write(doc, 0) + "\n"


def loads(text: str | bytes) -> Any:
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as err:
            raise DocumentError("document is not UTF-8", err.start) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise DocumentError(err.msg, len(text[:err.pos].encode("utf-8"))) from None


# -- schema helpers -------------------------------------------------------------

class _Source:
    """Raw text kept around to turn schema errors into byte offsets."""

    def __init__(self, text: str | None):
        self.text = text or ""

    def error(self, message: str, key: str | None = None) -> DocumentError:
        pos = self.text.find(json.dumps(key)) if key else -1
        return DocumentError(message, len(self.text[:max(pos, 0)].encode("utf-8")))


def _field(doc, key: str, src: _Source, kind=None):
    if not isinstance(doc, dict):
        raise src.error("expected an object")
    if key not in doc:
        raise src.error(f"missing field {key!r}")
    v = doc[key]
    if kind is not None and not isinstance(v, kind) or isinstance(v, bool) and kind is int:
        raise src.error(f"field {key!r} has the wrong type", key)
    return v


def _number(v, src: _Source, key: str) -> float:
    if isinstance(v, str) and v in _NONFINITE:
        return _NONFINITE[v]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise src.error(f"expected a number in {key!r}", key)
    return float(v)


# -- tensors ------------------------------------------------------------------

def tensor_to_doc(t) -> dict:
    t = np.asarray(t, dtype=complex)
    flat = t.reshape(-1)
    return {"shape": [int(n) for n in t.shape],
            "entries": [[float(z.real), float(z.imag)] for z in flat]}


def tensor_from_doc(doc, src: _Source | None = None) -> np.ndarray:
    src = src or _Source(None)
    shape = _field(doc, "shape", src, list)
    entries = _field(doc, "entries", src, list)
    if any(isinstance(n, bool) or not isinstance(n, int) or n < 0 for n in shape):
        raise src.error("shape must list nonnegative integers", "shape")
    if len(entries) != math.prod(shape):
        raise src.error(f"{len(entries)} entries for shape {shape}", "entries")
    out = np.empty(len(entries), dtype=complex)
    for i, e in enumerate(entries):
        if not isinstance(e, list) or len(e) != 2:
            raise src.error(f"entry {i} is not a [re, im] pair", "entries")
        out[i] = complex(_number(e[0], src, "entries"), _number(e[1], src, "entries"))
    return out.reshape(shape)


# -- maps and realizations ---------------------------------------------------------

def _kraus_docs(phi: CPMap) -> list:
    return [tensor_to_doc(k) for k in phi.kraus]


def _kraus_from(doc, src: _Source) -> CPMap:
    ops = _field(doc, "kraus", src, list)
    mats = [tensor_from_doc(k, src) for k in ops]
    try:
        return CPMap(tuple(mats))
    except ValueError as err:
        raise src.error(str(err), "kraus") from None


def cp_map_to_doc(phi: CPMap) -> dict:
    return {"kind": "cp-map", "kraus": _kraus_docs(phi)}


def realization_to_doc(r, group: FiniteAbelianGroup | str | None = None) -> dict:
    if isinstance(r, DHRealization):
        if group is not None:
            group = FiniteAbelianGroup.parse(group) if isinstance(group, str) else group
            if group.order != r.bridge_dim:
                raise ValueError("group order does not match the bridge dimension")
        bridge = {"group": None if group is None else group.spec,
                  "dressing": None if r.bridge is None else tensor_to_doc(r.bridge)}
        return {"kind": "dh-realization", "out_dim": r.d_out,
                "bridge_dim": r.bridge_dim, "bridge": bridge,
                "kraus": _kraus_docs(r.phi)}
    if isinstance(r, DDRealization):
        kind = "dm-realization" if isinstance(r, DMRealization) else "dd-realization"
        return {"kind": kind, "env_dim": r.env_dim, "kraus": _kraus_docs(r.phi)}
    if isinstance(r, CPMap):
        return cp_map_to_doc(r)
    raise TypeError(f"cannot serialize {type(r).__name__}")


def realization_from_doc(doc, src: _Source | None = None):
    src = src or _Source(None)
    kind = _field(doc, "kind", src, str)
    phi = _kraus_from(doc, src)
    try:
        if kind == "cp-map":
            return phi
        if kind == "dh-realization":
            bdim = _field(doc, "bridge_dim", src, int)
            bridge = _field(doc, "bridge", src, dict)
            spec = bridge.get("group")
            if spec is not None:
                try:
                    g = FiniteAbelianGroup.parse(spec)
                except (ValueError, AttributeError):
                    raise src.error(f"malformed group spec {spec!r}", "group") from None
                if g.order != bdim:
                    raise src.error("bridge group order differs from bridge_dim", "group")
            dressing = bridge.get("dressing")
            w = None if dressing is None else tensor_from_doc(dressing, src)
            r = DHRealization(phi, bdim, w)
            out_dim = _field(doc, "out_dim", src, int)
            if out_dim != r.d_out:
                raise src.error(f"out_dim {out_dim} but Kraus operators give {r.d_out}",
                                "out_dim")
            return r
        if kind in ("dd-realization", "dm-realization"):
            cls = DMRealization if kind == "dm-realization" else DDRealization
            return cls(phi, _field(doc, "env_dim", src, int))
    except DocumentError:
        raise
    except ValueError as err:
        raise src.error(str(err), "kraus") from None
    raise src.error(f"unknown document kind {kind!r}", "kind")


# -- reports ---------------------------------------------------------------------

def report_to_doc(rep: VerificationReport, timings: bool = False) -> dict:
    doc = {
        "kind": "report",
        "proposition": rep.proposition,
        "theory": rep.theory,
        "groups": list(rep.groups),
        "dims": rep.dims,
        "trials": rep.trials,
        "seed": rep.seed,
        "tolerance": rep.tolerance,
        "max_violation": rep.max_violation,
        "passed": rep.passed,
        "fitted_scalars": dict(rep.fitted_scalars),
        "statistics": dict(rep.statistics),
        "checks": [{"name": c.name, "kind": c.kind, "value": c.value,
                    "threshold": c.threshold, "passed": c.passed}
                   for c in rep.checks],
    }
    if timings and rep.elapsed is not None:
        doc["elapsed"] = rep.elapsed
    return doc


def report_from_doc(doc, src: _Source | None = None) -> VerificationReport:
    src = src or _Source(None)
    if _field(doc, "kind", src, str) != "report":
        raise src.error("not a report document", "kind")
    checks = []
    for c in _field(doc, "checks", src, list):
        kind = _field(c, "kind", src, str)
        if kind not in ("bound", "exclusion"):
            raise src.error(f"unknown check kind {kind!r}", "kind")
        checks.append(Check(_field(c, "name", src, str),
                            _number(_field(c, "value", src), src, "value"),
                            _number(_field(c, "threshold", src), src, "threshold"),
                            kind))

    def floats(key):
        return {str(k): _number(v, src, key)
                for k, v in _field(doc, key, src, dict).items()}

    rep = VerificationReport(
        _field(doc, "proposition", src, str), _field(doc, "theory", src, str),
        list(_field(doc, "groups", src, list)), _field(doc, "trials", src, int),
        _field(doc, "seed", src, int),
        _number(_field(doc, "tolerance", src), src, "tolerance"),
        checks, floats("fitted_scalars"), floats("statistics"))
    if "elapsed" in doc:
        rep.elapsed = _number(doc["elapsed"], src, "elapsed")
    return rep


def report_set_to_doc(reports: list[VerificationReport], skipped: dict[str, str],
                      timings: bool = False) -> dict:
    return {"kind": "report-set",
            "passed": all(r.passed for r in reports),
            "reports": [report_to_doc(r, timings) for r in reports],
            "skipped": dict(skipped)}


# -- generic entry points ------------------------------------------------------------

def to_doc(value, **kw) -> dict:
    if isinstance(value, VerificationReport):
        return report_to_doc(value, kw.get("timings", False))
    if isinstance(value, (DHRealization, DDRealization, CPMap)):
        return realization_to_doc(value, kw.get("group"))
    if isinstance(value, np.ndarray) or hasattr(value, "tensor"):
        return tensor_to_doc(getattr(value, "tensor", value))
    raise TypeError(f"cannot serialize {type(value).__name__}")


def from_doc(doc, text: str | None = None):
    src = _Source(text)
    if not isinstance(doc, dict):
        raise src.error("top-level value must be an object")
    if "kind" not in doc:
        return tensor_from_doc(doc, src)
    if doc["kind"] == "report":
        return report_from_doc(doc, src)
    if doc["kind"] == "report-set":
        return [report_from_doc(r, src) for r in _field(doc, "reports", src, list)]
    return realization_from_doc(doc, src)


def serialize(value, **kw) -> bytes:
    return dumps(to_doc(value, **kw)).encode("utf-8")


def deserialize(data: str | bytes):
    text = data.decode("utf-8", errors="replace") if isinstance(data, bytes) else data
    return from_doc(loads(data), text)


def write_file(path, value, **kw) -> None:
    Path(path).write_bytes(serialize(value, **kw))


def read_file(path):
    return deserialize(Path(path).read_bytes())
