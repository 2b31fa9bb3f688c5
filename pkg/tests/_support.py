"""Shared helpers for the test suite: random data and fixture enumeration."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

from rinehart.cochain import AltForm
from rinehart.extension import adjoint_module, quotient_module
from rinehart.fixtures import CATALOG, builtin_fixture
from rinehart.lierinehart import base_module


def rand_q(rng: random.Random, spread: int = 4) -> Fraction:
    return Fraction(rng.randint(-spread, spread), rng.randint(1, 3))


def random_form(rng: random.Random, L, M, p: int, density: float = 0.8) -> AltForm:
    vals = {}
    for idx in combinations(range(L.rank), p):
        if rng.random() < density:
            vals[idx] = tuple(rand_q(rng) for _ in range(M.qdim))
    return AltForm(L, M, p, vals)


def form_pairs():
    """(label, L, M) for every fixture and every natural coefficient module on it."""
    out = []
    for name in CATALOG:
        fx = builtin_fixture(name)
        out.append((f"{name}/default", fx.lra, fx.module))
        if fx.is_extension:
            e = fx.extension
            out.append((f"{name}/total-adjoint", e.total, adjoint_module(e)))
            out.append((f"{name}/total-A", e.total, base_module(e.total)))
            if e.kernel_is_abelian:
                out.append((f"{name}/quotient-kernel", e.quotient, quotient_module(e)))
    return out


def extensions():
    return [builtin_fixture(n).extension for n in CATALOG if builtin_fixture(n).is_extension]
