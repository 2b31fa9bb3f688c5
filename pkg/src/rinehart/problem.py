"""Problem files: JSON documents describing algebras, modules and extensions.

Layout::

    {
      "algebras":     {"A": {"dim": 2, "labels": ["1", "t"], "unit": ["1", "0"], "mult": [[[...]]]}},
      "lie_rinehart": {"L": {"base": "A", "rank": 1, "labels": ["X"],
                             "bracket": [[[["0", "0"]]]], "anchor": [[["0", "0"], ["0", "1"]]]},
                       "H": "FIX-SL2"},
      "modules":      {"M": {"over": "L", "kind": "base"}},
      "extensions":   {"E": "FIX-HEIS(2)"},
      "request":      {"command": "cohomology", "lie_rinehart": "L", "module": "M"}
    }

Rationals are strings "p/q" or "p" (JSON integers are accepted too).  Any
algebra, Lie-Rinehart or extension definition may be replaced by a fixture name.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .algebra import CommutativeAlgebra, rationals
from .cochain import AltForm
from .exact_linalg import Matrix, parse_rational
from .extension import Extension
from .fixtures import UnknownFixtureError, builtin_fixture
from .lierinehart import LieRinehartAlgebra, LRModule, base_module, free_a_action, trivial_module


class ProblemError(ValueError):
    """A parse or reference error, with the location in the input."""

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


def _rat(v: Any, path: str) -> Fraction:
    if isinstance(v, bool):
        raise ProblemError("expected a rational, got a boolean", path)
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return parse_rational(v)
        except (ValueError, ZeroDivisionError) as exc:
            raise ProblemError(f"malformed rational {v!r} ({exc})", path) from None
    raise ProblemError(f"expected a rational string, got {type(v).__name__}", path)


def _vec(v: Any, n: int | None, path: str) -> tuple:
    if not isinstance(v, list):
        raise ProblemError("expected an array", path)
    if n is not None and len(v) != n:
        raise ProblemError(f"expected {n} entries, got {len(v)}", path)
    return tuple(_rat(x, f"{path}[{i}]") for i, x in enumerate(v))


def _list(v: Any, n: int | None, path: str) -> list:
    if not isinstance(v, list):
        raise ProblemError("expected an array", path)
    if n is not None and len(v) != n:
        raise ProblemError(f"expected {n} entries, got {len(v)}", path)
    return v


def _matrix(v: Any, rows: int, cols: int, path: str) -> Matrix:
    rs = _list(v, rows, path)
    return Matrix.from_rows([_vec(r, cols, f"{path}[{i}]") for i, r in enumerate(rs)], cols)


def _obj(v: Any, path: str) -> dict:
    if not isinstance(v, dict):
        raise ProblemError("expected an object", path)
    return v


def _int(v: Any, path: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise ProblemError("expected a non-negative integer", path)
    return v


def _labels(v: Any, n: int, path: str) -> list[str] | None:
    if v is None:
        return None
    ls = _list(v, n, path)
    if not all(isinstance(x, str) for x in ls):
        raise ProblemError("labels must be strings", path)
    return ls


@dataclass
class Problem:
    algebras: dict[str, CommutativeAlgebra] = field(default_factory=dict)
    lie_rinehart: dict[str, LieRinehartAlgebra] = field(default_factory=dict)
    modules: dict[str, LRModule] = field(default_factory=dict)
    extensions: dict[str, Extension] = field(default_factory=dict)
    module_over: dict[str, str] = field(default_factory=dict)
    default_modules: dict[str, LRModule] = field(default_factory=dict)
    request: dict = field(default_factory=dict)
    fixture_names: dict[str, str] = field(default_factory=dict)


def _fixture(name: str, path: str):
    try:
        return builtin_fixture(name)
    except UnknownFixtureError:
        raise ProblemError(f"unknown fixture {name!r}", path) from None


def parse_problem_text(text: str) -> Problem:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None
    return parse_problem(_obj(doc, "$"))


def parse_problem(doc: dict) -> Problem:
    known = {"algebras", "lie_rinehart", "modules", "extensions", "request"}
    for k in doc:
        if k not in known:
            raise ProblemError(f"unknown block {k!r}", "$")
    P = Problem()
    for name, d in _obj(doc.get("algebras", {}), "$.algebras").items():
        P.algebras[name] = _parse_algebra(d, f"$.algebras.{name}")
    for name, d in _obj(doc.get("lie_rinehart", {}), "$.lie_rinehart").items():
        path = f"$.lie_rinehart.{name}"
        if isinstance(d, str):
            fx = _fixture(d, path)
            P.lie_rinehart[name] = fx.lra if not fx.is_extension else fx.extension.total
            P.default_modules[name] = fx.module if not fx.is_extension else None
            P.fixture_names[name] = d
        else:
            P.lie_rinehart[name] = _parse_lra(P, _obj(d, path), path)
    for name, d in _obj(doc.get("extensions", {}), "$.extensions").items():
        path = f"$.extensions.{name}"
        if isinstance(d, str):
            fx = _fixture(d, path)
            if not fx.is_extension:
                raise ProblemError(f"fixture {d!r} is not an extension", path)
            P.extensions[name] = fx.extension
            P.fixture_names[name] = d
        else:
            P.extensions[name] = _parse_extension(P, _obj(d, path), path)
    for name, d in _obj(doc.get("modules", {}), "$.modules").items():
        path = f"$.modules.{name}"
        P.modules[name], P.module_over[name] = _parse_module(P, _obj(d, path), path)
    P.request = _obj(doc.get("request", {}), "$.request")
    return P


def _parse_algebra(d: Any, path: str) -> CommutativeAlgebra:
    if isinstance(d, str):
        if d in ("Q", "QQ"):
            return rationals()
        fx = _fixture(d, path)
        return fx.lra.base
    d = _obj(d, path)
    n = _int(d.get("dim"), f"{path}.dim")
    mult = _list(d.get("mult"), n, f"{path}.mult")
    table = [[_vec(c, n, f"{path}.mult[{i}][{j}]") for j, c in enumerate(_list(row, n, f"{path}.mult[{i}]"))]
             for i, row in enumerate(mult)]
    unit = _vec(d.get("unit"), n, f"{path}.unit")
    return CommutativeAlgebra(n, table, unit, _labels(d.get("labels"), n, f"{path}.labels"))


def _base(P: Problem, ref: Any, path: str) -> CommutativeAlgebra:
    if ref is None or ref in ("Q", "QQ"):
        return rationals()
    if not isinstance(ref, str) or ref not in P.algebras:
        raise ProblemError(f"unresolved algebra reference {ref!r}", path)
    return P.algebras[ref]


def _parse_lra(P: Problem, d: dict, path: str) -> LieRinehartAlgebra:
    A = _base(P, d.get("base"), f"{path}.base")
    n = _int(d.get("rank"), f"{path}.rank")
    labels = _labels(d.get("labels"), n, f"{path}.labels")
    rows = _list(d.get("bracket"), n, f"{path}.bracket")
    bracket = []
    for i, row in enumerate(rows):
        r = []
        for j, coeffs in enumerate(_list(row, n, f"{path}.bracket[{i}]")):
            cs = _list(coeffs, n, f"{path}.bracket[{i}][{j}]")
            r.append([_vec(c, A.dim, f"{path}.bracket[{i}][{j}][{k}]") for k, c in enumerate(cs)])
        bracket.append(r)
    if d.get("anchor") is None:
        anchor = [Matrix.zero(A.dim, A.dim)] * n
    else:
        anchor = [_matrix(m, A.dim, A.dim, f"{path}.anchor[{i}]")
                  for i, m in enumerate(_list(d["anchor"], n, f"{path}.anchor"))]
    return LieRinehartAlgebra(A, n, bracket, anchor, labels)


def _lra_ref(P: Problem, ref: Any, path: str) -> LieRinehartAlgebra:
    if not isinstance(ref, str) or ref not in P.lie_rinehart:
        raise ProblemError(f"unresolved Lie-Rinehart reference {ref!r}", path)
    return P.lie_rinehart[ref]


def _parse_module(P: Problem, d: dict, path: str) -> tuple[LRModule, str]:
    over = d.get("over")
    L = _lra_ref(P, over, f"{path}.over")
    kind = d.get("kind")
    if kind == "trivial":
        if L.base.dim != 1:
            raise ProblemError("the trivial module needs A = Q", f"{path}.kind")
        return trivial_module(L, _int(d.get("dim", 1), f"{path}.dim")), over
    if kind == "base":
        return base_module(L), over
    if kind is not None:
        raise ProblemError(f"unknown module kind {kind!r}", f"{path}.kind")
    q = _int(d.get("qdim"), f"{path}.qdim")
    A = L.base
    if d.get("a_action") is None:
        if q % A.dim:
            raise ProblemError("qdim must be a multiple of dim(A) when a_action is omitted", f"{path}.qdim")
        a_act = free_a_action(A, q // A.dim)
    else:
        a_act = [_matrix(m, q, q, f"{path}.a_action[{s}]")
                 for s, m in enumerate(_list(d["a_action"], A.dim, f"{path}.a_action"))]
    l_act = [_matrix(m, q, q, f"{path}.l_action[{i}]")
             for i, m in enumerate(_list(d.get("l_action"), L.rank, f"{path}.l_action"))]
    return LRModule(A, q, a_act, l_act, _labels(d.get("labels"), q, f"{path}.labels")), over


def _amatrix(v: Any, rows: int, cols: int, dim: int, path: str):
    rs = _list(v, rows, path)
    return [[_vec(c, dim, f"{path}[{i}][{j}]") for j, c in enumerate(_list(r, cols, f"{path}[{i}]"))]
            for i, r in enumerate(rs)]


def _parse_extension(P: Problem, d: dict, path: str) -> Extension:
    K = _lra_ref(P, d.get("kernel"), f"{path}.kernel")
    L = _lra_ref(P, d.get("total"), f"{path}.total")
    Q = _lra_ref(P, d.get("quotient"), f"{path}.quotient")
    A = L.base
    incl = _amatrix(d.get("incl"), L.rank, K.rank, A.dim, f"{path}.incl")
    proj = _amatrix(d.get("proj"), Q.rank, L.rank, A.dim, f"{path}.proj")
    conn = None
    if d.get("connection") is not None:
        conn = _amatrix(d["connection"], L.rank, Q.rank, A.dim, f"{path}.connection")
    try:
        return Extension(K, L, Q, incl, proj, conn, path.rsplit(".", 1)[-1])
    except ValueError as exc:
        raise ProblemError(str(exc), path) from None


def parse_form(d: Any, L: LieRinehartAlgebra, M: LRModule, degree: int, path: str) -> AltForm:
    """Form records: [{"indices": [...], "value": [...]}, ...]."""
    vals = {}
    for n, rec in enumerate(_list(d, None, path)):
        rec = _obj(rec, f"{path}[{n}]")
        idx = rec.get("indices")
        if not isinstance(idx, list) or len(idx) != degree or not all(isinstance(i, int) for i in idx):
            raise ProblemError(f"indices must be {degree} integers", f"{path}[{n}].indices")
        if sorted(set(idx)) != idx or any(i < 0 or i >= L.rank for i in idx):
            raise ProblemError("indices must be strictly increasing and in range", f"{path}[{n}].indices")
        vals[tuple(idx)] = _vec(rec.get("value"), M.qdim, f"{path}[{n}].value")
    return AltForm(L, M, degree, vals)


def form_records(f: AltForm) -> list[dict]:
    return [{"indices": list(k), "value": [str(x) for x in v]} for k, v in sorted(f.values.items())]


def rationals_out(v) -> list[str]:
    return [str(x) for x in v]
