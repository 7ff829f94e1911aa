"""Instance and point-set files, plus deterministic JSON/CSV output."""
from __future__ import annotations

import csv
import io
import json
import math
import re
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from .polarlab import FinitePointSet, PointSetError
from .polycore import IntervalVector, MultiPoly
from .visibility import ConvexDomain, InstanceError, LinearConstraint, ProblemInstance

FIXTURE_PREFIX = "fixture:"


class InputError(ValueError):
    """Malformed input; ``line`` points into the source file when known."""

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source:
            where = f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}".strip() if where else message)


def fixture_names() -> list[str]:
    root = resources.files("visicut") / "fixtures"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def read_text(path: str) -> tuple[str, str]:
    """Text of ``path`` (or of a packaged fixture ``fixture:NAME``) and a label."""
    if path.startswith(FIXTURE_PREFIX):
        name = path[len(FIXTURE_PREFIX):]
        res = resources.files("visicut") / "fixtures" / f"{name}.json"
        if not res.is_file():
            raise InputError(f"unknown fixture {name!r}; available: {', '.join(fixture_names())}")
        return res.read_text(), path
    try:
        return Path(path).read_text(), path
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _line_of(text: str, key: str) -> int | None:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    if m is None:
        return None
    return text.count("\n", 0, m.start()) + 1


class _Doc:
    """Parsed JSON plus the source text, for line-anchored complaints."""

    def __init__(self, text: str, source: str):
        self.text = text
        self.source = source
        try:
            self.data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON: {exc.msg}", exc.lineno, source) from None
        if not isinstance(self.data, dict):
            raise InputError("top level must be a JSON object", 1, source)

    def fail(self, key: str, message: str):
        raise InputError(message, _line_of(self.text, key), self.source)

    def get(self, key: str, required: bool = True):
        if key not in self.data:
            if required:
                raise InputError(f"missing key {key!r}", 1, self.source)
            return None
        return self.data[key]

    def vector(self, value, key: str, n: int | None = None) -> np.ndarray:
        if not isinstance(value, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
        ):
            self.fail(key, f"{key!r} must be a list of numbers")
        arr = np.array(value, dtype=float)
        if not np.all(np.isfinite(arr)):
            self.fail(key, f"{key!r} has non-finite entries")
        if n is not None and arr.size != n:
            self.fail(key, f"{key!r} must have {n} entries, got {arr.size}")
        return arr


def _parse_poly(doc: _Doc, g, n: int) -> MultiPoly:
    if not isinstance(g, dict) or "monomials" not in g:
        doc.fail("g", "'g' must be an object with a 'monomials' list")
    mons = g["monomials"]
    if not isinstance(mons, list):
        doc.fail("monomials", "'monomials' must be a list")
    terms = []
    for m in mons:
        if not isinstance(m, dict) or "c" not in m or "e" not in m:
            doc.fail("monomials", "each monomial needs 'c' and 'e'")
        c = m["c"]
        e = m["e"]
        if not isinstance(c, (int, float)) or isinstance(c, bool) or not math.isfinite(c):
            doc.fail("c", "monomial coefficient must be a finite number")
        if (
            not isinstance(e, list)
            or len(e) != n
            or not all(isinstance(k, int) and not isinstance(k, bool) and k >= 0 for k in e)
        ):
            doc.fail("e", f"exponent vector must list {n} nonnegative integers")
        terms.append((float(c), e))
    return MultiPoly(n, terms)


def parse_instance(text: str, source: str = "<input>") -> ProblemInstance:
    doc = _Doc(text, source)
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        doc.fail("n", "'n' must be a positive integer")
    xlp = doc.vector(doc.get("xlp"), "xlp", n)
    box = doc.get("box")
    if not isinstance(box, dict) or "lo" not in box or "hi" not in box:
        doc.fail("box", "'box' must be an object with 'lo' and 'hi'")
    lo = doc.vector(box["lo"], "lo", n)
    hi = doc.vector(box["hi"], "hi", n)
    if np.any(lo > hi):
        doc.fail("box", "box has lo > hi")
    linear = []
    for item in doc.get("linear", required=False) or []:
        if not isinstance(item, dict) or not {"a", "sense", "rhs"} <= item.keys():
            doc.fail("linear", "each linear constraint needs 'a', 'sense', 'rhs'")
        sense = {"≤": "<=", "≥": ">="}.get(item["sense"], item["sense"])
        if sense not in ("<=", ">="):
            doc.fail("sense", f"sense must be '<=' or '>=', got {item['sense']!r}")
        rhs = item["rhs"]
        if not isinstance(rhs, (int, float)) or isinstance(rhs, bool) or not math.isfinite(rhs):
            doc.fail("rhs", "'rhs' must be a finite number")
        linear.append(LinearConstraint(doc.vector(item["a"], "a", n), sense, float(rhs)))
    g = _parse_poly(doc, doc.get("g"), n)
    try:
        return ProblemInstance(g, ConvexDomain(IntervalVector(lo, hi), tuple(linear)), xlp)
    except InstanceError as exc:
        key = "xlp" if "xbar" in str(exc) else "g"
        doc.fail(key, str(exc))


def load_instance(path: str) -> ProblemInstance:
    text, label = read_text(path)
    return parse_instance(text, label)


def parse_pointset(text: str, source: str = "<input>") -> tuple[FinitePointSet, FinitePointSet | None]:
    """The point set and, if the file names one, an explicit candidate generator."""
    doc = _Doc(text, source)
    xlp = doc.vector(doc.get("xlp"), "xlp")
    n = xlp.size
    if n < 1:
        doc.fail("xlp", "'xlp' must be nonempty")

    def points(key):
        raw = doc.get(key)
        if not isinstance(raw, list):
            doc.fail(key, f"{key!r} must be a list of points")
        rows = [doc.vector(p, key, n) for p in raw]
        try:
            return FinitePointSet(np.array(rows).reshape(-1, n), xlp)
        except PointSetError as exc:
            doc.fail(key, str(exc))

    ps = points("points")
    cand = points("candidate") if "candidate" in doc.data else None
    return ps, cand


def load_pointset(path: str):
    text, label = read_text(path)
    return parse_pointset(text, label)


def to_plain(obj: Any) -> Any:
    """Convert numpy containers and scalars into JSON-ready Python values."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x}")
    s = format(x, ".17g")
    if not any(ch in s for ch in ".eEn"):
        s += ".0"
    return s


def dumps(obj: Any, indent: int = 2) -> str:
    """Deterministic JSON with every real written to 17 significant digits."""
    obj = to_plain(obj)
    out = io.StringIO()

    def emit(v, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if v is None:
            out.write("null")
        elif isinstance(v, bool):
            out.write("true" if v else "false")
        elif isinstance(v, int):
            out.write(str(v))
        elif isinstance(v, float):
            out.write(_fmt_float(v))
        elif isinstance(v, str):
            out.write(json.dumps(v, ensure_ascii=False))
        elif isinstance(v, list):
            if not v:
                out.write("[]")
            elif all(isinstance(u, (int, float)) and not isinstance(u, bool) for u in v):
                out.write("[")
                out.write(", ".join(_fmt_float(u) if isinstance(u, float) else str(u) for u in v))
                out.write("]")
            else:
                out.write("[\n")
                for i, u in enumerate(v):
                    out.write(pad)
                    emit(u, level + 1)
                    out.write(",\n" if i + 1 < len(v) else "\n")
                out.write(end + "]")
        elif isinstance(v, dict):
            if not v:
                out.write("{}")
                return
            out.write("{\n")
            items = list(v.items())
            for i, (k, u) in enumerate(items):
                out.write(pad + json.dumps(k) + ": ")
                emit(u, level + 1)
                out.write(",\n" if i + 1 < len(items) else "\n")
            out.write(end + "}")
        else:
            raise TypeError(f"cannot serialize {type(v).__name__}")

    emit(obj, 0)
    out.write("\n")
    return out.getvalue()


def _flatten(obj: Any, prefix: str, rows: list[tuple[str, str]]):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(v, f"{prefix}.{k}" if prefix else str(k), rows)
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _flatten(v, f"{prefix}[{i}]", rows)
    elif isinstance(obj, float):
        rows.append((prefix, _fmt_float(obj)))
    elif isinstance(obj, bool):
        rows.append((prefix, "true" if obj else "false"))
    elif obj is None:
        rows.append((prefix, ""))
    else:
        rows.append((prefix, str(obj)))


def to_csv(obj: Any) -> str:
    """Two-column ``field,value`` CSV of a nested result."""
    rows: list[tuple[str, str]] = []
    _flatten(to_plain(obj), "", rows)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["field", "value"])
    w.writerows(rows)
    return buf.getvalue()


def instance_to_json(inst: ProblemInstance) -> dict:
    return {
        "n": inst.n,
        "xlp": inst.xbar,
        "box": {"lo": inst.C.box.lo, "hi": inst.C.box.hi},
        "linear": [{"a": c.a, "sense": c.sense, "rhs": c.rhs} for c in inst.C.linear],
        "g": {"monomials": inst.g.to_json()},
    }
