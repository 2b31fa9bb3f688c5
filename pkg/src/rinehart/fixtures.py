"""Built-in catalog of small Lie-Rinehart algebras and extensions.

Names accepted by :func:`builtin_fixture`:

FIX-AB2, FIX-SL2, FIX-TP2            Lie-Rinehart algebras
FIX-HEIS, FIX-HEIS(c)                0 -> Qz -> heis -> Q^2 -> 0 with [x, y] = c z
FIX-SPLIT-SL2                        0 -> sl2 -> sl2 x Q -> Q -> 0
FIX-SL2xSL2                          0 -> sl2 -> sl2 x| sl2 -> sl2 -> 0, quotient acting by ad
FIX-AB4-Z2                           central Q^2 over abelian Q^4, two independent 2-cocycles
FIX-TP3-A                            kernel A over a rank-3 algebra on Q[t]/(t^2) with anchor
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .algebra import rationals, truncated_polynomial, validate_algebra
from .cochain import AltForm
from .exact_linalg import Matrix, parse_rational
from .extension import (
    Extension,
    a_from_columns,
    adjoint_module,
    assemble_extension,
    extension_from_cocycle,
    validate_extension,
)
from .lierinehart import (
    LieRinehartAlgebra,
    LRModule,
    abelian_lra,
    base_module,
    lie_algebra,
    trivial_module,
    validate_lra,
    validate_module,
)

SL2_BRACKETS = {(2, 0): {0: 2}, (2, 1): {1: -2}, (0, 1): {2: 1}}


class UnknownFixtureError(KeyError):
    pass


@dataclass
class Fixture:
    """A validated catalog entry.

    ``lra`` is the Lie-Rinehart algebra forms live on (the quotient for
    extensions), ``module`` its default coefficient module.
    """

    name: str
    lra: LieRinehartAlgebra
    module: LRModule
    extension: Extension | None = None

    @property
    def is_extension(self) -> bool:
        return self.extension is not None


def ab2() -> LieRinehartAlgebra:
    return abelian_lra(rationals(), 2, labels=["x", "y"])


def sl2() -> LieRinehartAlgebra:
    return lie_algebra(3, SL2_BRACKETS, ["e", "f", "h"])


def tp2() -> LieRinehartAlgebra:
    A = truncated_polynomial(2)
    t_dt = Matrix.from_rows([[0, 0], [0, 1]])
    return LieRinehartAlgebra(A, 1, [[[A.zero()]]], [t_dt], ["X"])


def heis(c=1) -> Extension:
    c = Fraction(c)
    A = rationals()
    total = lie_algebra(3, {(0, 1): {2: c}} if c else {}, ["x", "y", "z"])
    kernel = abelian_lra(A, 1, labels=["z"])
    one, zero = A.one(), A.zero()
    incl = [[zero], [zero], [one]]
    proj = [[one, zero, zero], [zero, one, zero]]
    omega = [[one, zero], [zero, one], [zero, zero]]
    name = "FIX-HEIS" if c == 1 else f"FIX-HEIS({c})"
    return Extension(kernel, total, ab2(), incl, proj, omega, name)


def split_sl2() -> Extension:
    A = rationals()
    quotient = abelian_lra(A, 1, labels=["u"])
    theta = [a_from_columns([tuple(A.zero() for _ in range(3))] * 3, 3)]
    return assemble_extension(sl2(), quotient, theta, {}, "FIX-SPLIT-SL2")


def sl2_by_sl2() -> Extension:
    """The quotient copy of sl2 acts on the kernel copy by the adjoint action."""
    kernel = lie_algebra(3, SL2_BRACKETS, ["e1", "f1", "h1"])
    quotient = lie_algebra(3, SL2_BRACKETS, ["e2", "f2", "h2"])
    theta = [a_from_columns([kernel.bracket(kernel.basis(a), kernel.basis(i)) for i in range(3)], 3)
             for a in range(3)]
    return assemble_extension(kernel, quotient, theta, {}, "FIX-SL2xSL2")


def ab4_z2() -> Extension:
    A = rationals()
    quotient = abelian_lra(A, 4, labels=["x1", "x2", "x3", "x4"])
    M = LRModule(A, 2, [Matrix.identity(2)], [Matrix.zero(2, 2)] * 4, ["z1", "z2"])
    om = AltForm(quotient, M, 2, {(0, 1): (1, 0), (2, 3): (1, 0), (0, 2): (0, 1), (1, 3): (0, 1)})
    return extension_from_cocycle(quotient, M, om, "FIX-AB4-Z2")


def tp3_a() -> Extension:
    A = truncated_polynomial(2)
    t_dt = Matrix.from_rows([[0, 0], [0, 1]])
    zero = Matrix.zero(2, 2)
    quotient = abelian_lra(A, 3, labels=["X", "Y", "W"], anchor=[t_dt, zero, zero])
    M = base_module(quotient)
    M = LRModule(A, 2, M.a_action, M.l_action, ["c", "t*c"])
    om = AltForm(quotient, M, 2, {(1, 2): (1, 0)})
    return extension_from_cocycle(quotient, M, om, "FIX-TP3-A")


_HEIS = re.compile(r"^FIX-HEIS\(\s*([^)]*?)\s*\)$")

CATALOG = ("FIX-AB2", "FIX-SL2", "FIX-TP2", "FIX-HEIS", "FIX-SPLIT-SL2", "FIX-SL2xSL2", "FIX-AB4-Z2", "FIX-TP3-A")
EXTENSION_FIXTURES = ("FIX-HEIS", "FIX-SPLIT-SL2", "FIX-SL2xSL2", "FIX-AB4-Z2", "FIX-TP3-A")


def _from_extension(name: str, e: Extension) -> Fixture:
    rep = validate_extension(e)
    if not rep.ok:
        raise AssertionError(f"catalog extension {name} is invalid: {rep.to_dict()}")
    mod = validate_module(e.total, adjoint_module(e))
    if not mod.ok:
        raise AssertionError(f"adjoint module of {name} is invalid: {mod.to_dict()}")
    return Fixture(name, e.quotient, base_module(e.quotient), e)


def builtin_fixture(name: str) -> Fixture:
    name = name.strip()
    m = _HEIS.match(name)
    if m:
        try:
            c = parse_rational(m.group(1))
        except ValueError as exc:
            raise UnknownFixtureError(f"bad parameter in {name!r}: {exc}") from None
        e = heis(c)
        e.name = name
        return _from_extension(name, e)
    if name == "FIX-HEIS":
        return _from_extension(name, heis(1))
    builders = {"FIX-SPLIT-SL2": split_sl2, "FIX-SL2xSL2": sl2_by_sl2, "FIX-AB4-Z2": ab4_z2, "FIX-TP3-A": tp3_a}
    if name in builders:
        return _from_extension(name, builders[name]())
    simple = {"FIX-AB2": ab2, "FIX-SL2": sl2, "FIX-TP2": tp2}
    if name not in simple:
        raise UnknownFixtureError(name)
    L = simple[name]()
    rep = validate_algebra(L.base)
    rep.extend(validate_lra(L))
    if not rep.ok:
        raise AssertionError(f"catalog algebra {name} is invalid: {rep.to_dict()}")
    M = trivial_module(L) if L.base.dim == 1 else base_module(L)
    return Fixture(name, L, M)
