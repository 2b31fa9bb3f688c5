"""Command-line front end.

Exit codes: 0 success, 1 validation failure, 2 parse or usage error,
3 internal verification failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
from typing import Any

from . import __version__
from .algebra import ValidationReport, validate_algebra
from .chernweil import (
    VerificationError,
    as_component_tables,
    check_classifying_map_closed,
    check_flat_component,
    chern_weil_class,
    classifying_map,
    coalgebra_morphism_check,
    global_invariant,
    max_weight,
    symmetric_coalgebra,
)
from .coalgebra import invariants
from .cochain import AltForm, cohomology, differential_matrix
from .extension import (
    Center,
    Extension,
    act_rho,
    bianchi_check,
    check_adjoint,
    cocycle_class,
    congruent,
    curvature,
    extension_from_cocycle,
    quotient_module,
    random_connection,
    validate_extension,
)
from .fixtures import UnknownFixtureError, builtin_fixture
from .lierinehart import LieRinehartAlgebra, LRModule, validate_lra, validate_module
from .problem import Problem, ProblemError, form_records, parse_form, parse_problem_text, rationals_out

COMMANDS = ("validate", "cohomology", "curvature", "bianchi", "classify", "chern-weil", "invariants",
            "global-invariant")
RANDOM_CONNECTIONS = 3
SEED = 0


class UsageError(Exception):
    pass


class ValidationFailed(Exception):
    def __init__(self, reports: dict):
        self.reports = reports
        super().__init__("validation failed")


# -- inputs ------------------------------------------------------------------------

class Inputs:
    """Resolved objects for one run: either a fixture or a parsed problem file."""

    def __init__(self, problem: Problem | None, fixture_name: str | None):
        self.problem = problem
        self.fixture_name = fixture_name
        self.fixture = builtin_fixture(fixture_name) if fixture_name else None

    @property
    def request(self) -> dict:
        return self.problem.request if self.problem else {}

    def _pick(self, table: dict, key: str, what: str):
        ref = self.request.get(key)
        if ref is not None:
            if ref not in table:
                raise ProblemError(f"unresolved {what} reference {ref!r}", f"$.request.{key}")
            return ref, table[ref]
        if len(table) == 1:
            return next(iter(table.items()))
        raise UsageError(f"request must name the {what} ('{key}')")

    def algebra_and_module(self) -> tuple[LieRinehartAlgebra, LRModule]:
        if self.fixture:
            return self.fixture.lra, self.fixture.module
        P = self.problem
        if P.extensions and not P.lie_rinehart:
            e = self._pick(P.extensions, "extension", "extension")[1]
            from .lierinehart import base_module
            return e.quotient, base_module(e.quotient)
        name, L = self._pick(P.lie_rinehart, "lie_rinehart", "Lie-Rinehart algebra")
        mods = {k: v for k, v in P.modules.items() if P.module_over[k] == name}
        if self.request.get("module") is None and not mods:
            M = P.default_modules.get(name)
            if M is None:
                raise UsageError("request must name a module")
            return L, M
        return L, self._pick(mods, "module", "module")[1]

    def extension(self) -> Extension:
        if self.fixture:
            if not self.fixture.is_extension:
                raise UsageError(f"fixture {self.fixture_name} is not an extension")
            return self.fixture.extension
        return self._pick(self.problem.extensions, "extension", "extension")[1]


def validate_inputs(inputs: Inputs) -> dict[str, ValidationReport]:
    reports: dict[str, ValidationReport] = {}
    if inputs.fixture:
        f = inputs.fixture
        if f.is_extension:
            r = validate_extension(f.extension)
            r.extend(check_adjoint(f.extension))
            reports[f.name] = r
        else:
            r = validate_algebra(f.lra.base)
            r.extend(validate_lra(f.lra))
            r.extend(validate_module(f.lra, f.module))
            reports[f.name] = r
        return reports
    P = inputs.problem
    for name, A in P.algebras.items():
        reports[f"algebras.{name}"] = validate_algebra(A)
    for name, L in P.lie_rinehart.items():
        r = validate_algebra(L.base)
        r.extend(validate_lra(L))
        reports[f"lie_rinehart.{name}"] = r
    for name, M in P.modules.items():
        L = P.lie_rinehart[P.module_over[name]]
        reports[f"modules.{name}"] = validate_module(L, M)
    for name, e in P.extensions.items():
        r = validate_extension(e)
        if r.ok:
            r.extend(check_adjoint(e))
        reports[f"extensions.{name}"] = r
    return reports


def _require_valid(inputs: Inputs) -> None:
    reports = validate_inputs(inputs)
    if not all(r.ok for r in reports.values()):
        raise ValidationFailed(reports)


# -- serialization helpers ------------------------------------------------------------

def _amatrix_out(M) -> list:
    return [[rationals_out(c) for c in row] for row in M]


def _labels(L: LieRinehartAlgebra) -> list[str]:
    return list(L.labels)


def _ext_summary(e: Extension) -> dict:
    return {"kernel": _labels(e.kernel), "total": _labels(e.total), "quotient": _labels(e.quotient),
            "connection": _amatrix_out(e.connection)}


# -- commands ------------------------------------------------------------------------

def cmd_validate(inputs: Inputs, args) -> tuple[dict, dict, int]:
    reports = validate_inputs(inputs)
    ok = all(r.ok for r in reports.values())
    result = {"valid": ok, "blocks": {k: v.to_dict() for k, v in sorted(reports.items())}}
    return result, {"validated": True}, 0 if ok else 1


def cmd_cohomology(inputs: Inputs, args) -> tuple[dict, dict, int]:
    _require_valid(inputs)
    L, M = inputs.algebra_and_module()
    degree = args.degree if args.degree is not None else inputs.request.get("degree")
    if args.all or inputs.request.get("all") or degree is None:
        degrees = list(range(L.rank + 1))
    else:
        if not isinstance(degree, int) or degree < 0:
            raise UsageError("degree must be a non-negative integer")
        degrees = [degree]
    out = []
    d_sq = True
    for p in degrees:
        if p + 1 <= L.rank and p >= 1:
            d_sq &= (differential_matrix(L, M, p) @ differential_matrix(L, M, p - 1)).is_zero()
        H = cohomology(L, M, p)
        out.append({"degree": p, "betti": H.betti, "representatives": [form_records(f) for f in H.representatives]})
    if not d_sq:
        raise VerificationError("d o d != 0")
    result = {"algebra": _labels(L), "module_dim": M.qdim, "degrees": out, "betti": [c["betti"] for c in out]}
    return result, {"d_squared_zero": d_sq}, 0


def _connections(e: Extension) -> list:
    rng = random.Random(SEED)
    return [e.connection] + [random_connection(e, rng) for _ in range(RANDOM_CONNECTIONS)]


def cmd_curvature(inputs: Inputs, args) -> tuple[dict, dict, int]:
    _require_valid(inputs)
    e = inputs.extension()
    om = curvature(e)
    result = {"extension": _ext_summary(e), "curvature": form_records(om), "flat": om.is_zero()}
    if e.kernel_is_abelian:
        result["class"] = rationals_out(cocycle_class(e))
    b = bianchi_check(e)
    if not b:
        raise VerificationError("Bianchi identity failed")
    return result, {"curvature_in_kernel": True, "bianchi": b}, 0


def cmd_bianchi(inputs: Inputs, args) -> tuple[dict, dict, int]:
    _require_valid(inputs)
    e = inputs.extension()
    checks = [bianchi_check(e, w) for w in _connections(e)]
    if not all(checks):
        raise VerificationError("Bianchi identity failed")
    return ({"extension": _ext_summary(e), "connections_checked": len(checks), "bianchi": all(checks)},
            {"bianchi": True}, 0)


def _read_act(path: str) -> tuple[Any, bytes]:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        loc = f"line {exc.lineno}, column {exc.colno}" if isinstance(exc, json.JSONDecodeError) else ""
        raise ProblemError(getattr(exc, "msg", str(exc)), f"{path}: {loc}") from None
    if not isinstance(doc, dict) or "rho" not in doc:
        raise ProblemError("expected an object with a 'rho' array", path)
    return doc["rho"], raw


def cmd_classify(inputs: Inputs, args) -> tuple[dict, dict, int]:
    _require_valid(inputs)
    e = None
    if inputs.fixture or (inputs.problem and inputs.problem.extensions):
        e = inputs.extension()
        if not e.kernel_is_abelian:
            raise UsageError("classification needs an abelian kernel")
        Q, M = e.quotient, quotient_module(e)
    else:
        P = inputs.problem
        qname, Q = inputs._pick(P.lie_rinehart, "quotient", "quotient")
        mods = {k: v for k, v in P.modules.items() if P.module_over[k] == qname}
        M = inputs._pick(mods, "kernel_module", "kernel module")[1]
    H = cohomology(Q, M, 2)
    classes = []
    round_trip = True
    for i, rep in enumerate(H.representatives):
        ext = extension_from_cocycle(Q, M, rep, f"class{i}")
        coords = cocycle_class(ext)
        expect = tuple(int(j == i) for j in range(H.betti))
        ok = tuple(coords) == expect and validate_extension(ext).ok
        round_trip &= ok
        classes.append({"representative": form_records(rep), "extension": _ext_summary(ext),
                        "class": rationals_out(coords)})
    split = extension_from_cocycle(Q, M, AltForm(Q, M, 2), "split")
    round_trip &= not any(cocycle_class(split))
    if not round_trip:
        raise VerificationError("classification round trip failed")
    result: dict = {"quotient": _labels(Q), "kernel_dim": M.qdim, "h2_dim": H.betti, "classes": classes}
    if e is not None:
        result["input_class"] = rationals_out(cocycle_class(e))
    if args.act:
        if e is None:
            raise UsageError("--act needs an extension input")
        data, _ = args.act_payload
        Z = Center(e)
        rho = parse_form(data, e.quotient, Z.module, 2, "rho")
        try:
            er = act_rho(e, rho, name="acted")
        except ValueError as exc:
            raise ProblemError(str(exc), "rho") from None
        if not validate_extension(er).ok or not bianchi_check(er):
            raise VerificationError("acted extension failed validation")
        same = congruent(e, er)
        result["action"] = {"rho": form_records(rho), "curvature": form_records(curvature(er)),
                            "class": rationals_out(cocycle_class(er)), "congruent_to_input": same,
                            "verdict": "congruent to input" if same else "not congruent to input"}
    return result, {"round_trip": round_trip}, 0


def _weights(e: Extension, requested: int | None) -> tuple[int, dict]:
    bound = max_weight(e)
    if requested is None:
        return bound, {}
    if requested < 0:
        raise UsageError("--max-weight must be non-negative")
    if requested > bound:
        return bound, {"clamped_from": requested, "clamped_to": bound}
    return requested, {}


def _poly_out(S, phi) -> dict:
    labels = S.basis_labels(phi.weight)
    idx = {m: i for i, m in enumerate(S.basis(phi.weight))}
    return {"weight": phi.weight,
            "monomials": [{"monomial": list(m), "label": labels[idx[m]], "coefficient": rationals_out(v)}
                          for m, v in phi.items()]}


def cmd_chern_weil(inputs: Inputs, args) -> tuple[dict, dict, int]:
    _require_valid(inputs)
    e = inputs.extension()
    w, note = _weights(e, _max_weight_arg(inputs, args))
    S = symmetric_coalgebra(e)
    cmap = classifying_map(e, None, w)
    morph = coalgebra_morphism_check(as_component_tables(cmap), e.quotient.rank, w, e.base)
    closed = check_classifying_map_closed(cmap)
    flat1 = check_flat_component(cmap)
    bianchi = all(bianchi_check(e, c) for c in _connections(e))
    if not (morph and closed and flat1 and bianchi):
        raise VerificationError("classifying map verification failed")
    weights = []
    for k in range(w + 1):
        entries = []
        for phi in invariants(S, k):
            cls = chern_weil_class(e, phi, seed=SEED, extra_connections=RANDOM_CONNECTIONS)
            entries.append({"invariant": _poly_out(S, phi), "representative": form_records(cls.representative),
                            "class": rationals_out(cls.coordinates), "zero": cls.is_zero})
        weights.append({"weight": k, "invariants_dim": len(entries), "classes": entries})
    result = {"extension": _ext_summary(e), "max_weight": w, "weights": weights, **note}
    flags = {"coalgebra_morphism": morph, "classifying_map_closed": closed, "weight_one_is_curvature": flat1,
             "bianchi": bianchi, "cocycle": True, "connection_independent": True}
    return result, flags, 0


def _max_weight_arg(inputs: Inputs, args):
    v = args.max_weight if args.max_weight is not None else inputs.request.get("max_weight")
    if v is not None and (isinstance(v, bool) or not isinstance(v, int)):
        raise UsageError("max_weight must be an integer")
    return v


def cmd_invariants(inputs: Inputs, args) -> tuple[dict, dict, int]:
    _require_valid(inputs)
    e = inputs.extension()
    w = _max_weight_arg(inputs, args)
    w = max_weight(e) if w is None else w
    if w < 0:
        raise UsageError("--max-weight must be non-negative")
    S = symmetric_coalgebra(e)
    weights = []
    for k in range(w + 1):
        basis = invariants(S, k)
        weights.append({"weight": k, "dim": len(basis), "basis": [_poly_out(S, p) for p in basis]})
    return {"extension": _ext_summary(e), "weights": weights}, {"invariance_checked": True}, 0


def cmd_global_invariant(inputs: Inputs, args) -> tuple[dict, dict, int]:
    _require_valid(inputs)
    e = inputs.extension()
    w, note = _weights(e, _max_weight_arg(inputs, args))
    S = symmetric_coalgebra(e)
    out = []
    gis = global_invariant(e, None, w)
    for g in gis:
        labels = S.basis_labels(g.weight)
        out.append({"weight": g.weight, "coinvariants_dim": len(g.coinvariants.representatives),
                    "representative_choice": "rref-quotient-basis",
                    "representatives": [rationals_out(r) for r in g.coinvariants.representatives],
                    "sigma_basis": labels, "form": form_records(g.form),
                    "class": rationals_out(g.coordinates), "zero": g.is_zero})
    return ({"extension": _ext_summary(e), "max_weight": w, "weights": out, **note},
            {"closed": all(g.closed for g in gis)}, 0)


HANDLERS = {
    "validate": cmd_validate,
    "cohomology": cmd_cohomology,
    "curvature": cmd_curvature,
    "bianchi": cmd_bianchi,
    "classify": cmd_classify,
    "chern-weil": cmd_chern_weil,
    "invariants": cmd_invariants,
    "global-invariant": cmd_global_invariant,
}


# -- driver -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rinehart", description="Exact Lie-Rinehart cohomology and Chern-Weil classes.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("file", nargs="?", help="problem file (JSON)")
    p.add_argument("--fixture", metavar="NAME", help="use a built-in fixture instead of a file")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--degree", type=int)
    g.add_argument("--all", action="store_true")
    p.add_argument("--max-weight", type=int, dest="max_weight")
    p.add_argument("--act", metavar="FILE", help="2-cocycle rho with center values (classify)")
    p.add_argument("--output", metavar="PATH")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def _request_echo(args, inputs: Inputs) -> dict:
    echo = {"command": args.command}
    if args.fixture:
        echo["fixture"] = args.fixture
    for key in ("degree", "max_weight"):
        v = getattr(args, key)
        if v is not None:
            echo[key] = v
    if args.all:
        echo["all"] = True
    if args.act:
        echo["act"] = True
    if inputs.problem is not None and inputs.request:
        echo["file_request"] = inputs.request
    return echo


def run(argv: list[str] | None = None) -> tuple[int, str, str]:
    """Run the CLI; returns (exit code, stdout text, stderr text)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (exc.code if isinstance(exc.code, int) else 2), "", ""
    if bool(args.file) == bool(args.fixture):
        return 2, "", "error: give exactly one of FILE or --fixture\n"
    digest = hashlib.sha256()
    try:
        if args.file:
            try:
                with open(args.file, "rb") as fh:
                    raw = fh.read()
            except OSError as exc:
                return 2, "", f"error: cannot read {args.file}: {exc.strerror}\n"
            digest.update(raw)
            try:
                text = raw.decode("utf-8")
            except UnicodeDecodeError:
                return 2, "", f"error: {args.file}: not UTF-8\n"
            inputs = Inputs(parse_problem_text(text), None)
            cmd = inputs.request.get("command")
            if cmd is not None and cmd != args.command:
                raise UsageError(f"file requests {cmd!r} but command is {args.command!r}")
        else:
            digest.update(f"fixture:{args.fixture}".encode())
            inputs = Inputs(None, args.fixture)
        args.act_payload = None
        if args.act:
            args.act_payload = _read_act(args.act)
            digest.update(args.act_payload[1])
        result, flags, code = HANDLERS[args.command](inputs, args)
    except ProblemError as exc:
        return 2, "", f"parse error: {exc}\n"
    except UnknownFixtureError as exc:
        return 2, "", f"error: unknown fixture {exc.args[0]!r}\n"
    except UsageError as exc:
        return 2, "", f"error: {exc}\n"
    except ValidationFailed as exc:
        result = {"valid": False, "blocks": {k: v.to_dict() for k, v in sorted(exc.reports.items())}}
        flags, code = {"validated": True}, 1
    except VerificationError as exc:
        return 3, "", f"internal verification failure: {exc}\n"
    report = {
        "tool": "rinehart",
        "version": __version__,
        "input_digest": "sha256:" + digest.hexdigest(),
        "request": _request_echo(args, inputs),
        "result": result,
        "verification": flags,
    }
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            return 2, "", f"error: cannot write {args.output}: {exc.strerror}\n"
        return code, "", ""
    return code, text, ""


def main(argv: list[str] | None = None) -> int:
    code, out, err = run(argv)
    if out:
        sys.stdout.write(out)
    if err:
        sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
