import random
from fractions import Fraction

import pytest

from rinehart.cochain import AltForm, ce_differential, is_coboundary
from rinehart.extension import (
    BoundaryMismatchError,
    Center,
    Extension,
    NotACocycleError,
    act_rho,
    adjoint_module,
    assemble_extension,
    bianchi_check,
    cocycle_class,
    congruent,
    covariant_derivative,
    covariant_derivative_via_total,
    curvature,
    extension_from_cocycle,
    flat_connection,
    quotient_module,
    random_connection,
    split_extension,
    validate_extension,
)
from rinehart.fixtures import SL2_BRACKETS, ab2, builtin_fixture, heis, tp2
from rinehart.lierinehart import abelian_lra, base_module, lie_algebra, trivial_module

from _support import extensions, random_form


def fx(name):
    return builtin_fixture(name).extension


def test_validate_examples():
    assert validate_extension(fx("FIX-HEIS")).ok
    assert validate_extension(fx("FIX-SPLIT-SL2")).ok
    e = heis()
    A = e.base
    bad_proj = [[A.one(), A.zero(), A.one()], [A.zero(), A.one(), A.zero()]]
    bad = Extension(e.kernel, e.total, e.quotient, e.incl, bad_proj, e.connection)
    assert "exactness" in validate_extension(bad).kinds()


def test_curvature_examples():
    om = curvature(fx("FIX-HEIS"))
    assert om.values == {(0, 1): (1,)}
    assert curvature(fx("FIX-SPLIT-SL2")).is_zero()
    assert curvature(fx("FIX-HEIS(5)")).values == {(0, 1): (5,)}


def test_covariant_derivative_examples():
    e = fx("FIX-HEIS")
    assert covariant_derivative(e, None, adjoint_module(e), curvature(e)).is_zero()
    rng = random.Random(0)
    # flat split case over a trivial module reduces to the CE differential of the quotient
    s = fx("FIX-SPLIT-SL2")
    Mt = trivial_module(s.total)
    Mq = trivial_module(s.quotient)
    for p in (0, 1):
        f = random_form(rng, s.quotient, Mt, p)
        got = covariant_derivative(s, None, Mt, f)
        assert got.values == ce_differential(s.quotient, Mq, AltForm(s.quotient, Mq, p, f.values)).values
    # identity extension 0 -> 0 -> L -> L -> 0 over TP2
    T = tp2()
    t = split_extension(T)
    MA = base_module(T)
    for p in (0, 1):
        f = random_form(rng, T, MA, p)
        assert covariant_derivative(t, None, MA, f) == ce_differential(T, MA, f)


def test_covariant_two_routes():
    rng = random.Random(1)
    for e in extensions():
        M = adjoint_module(e)
        w = random_connection(e, rng)
        for p in range(e.quotient.rank):
            f = random_form(rng, e.quotient, M, p)
            assert covariant_derivative(e, w, M, f) == covariant_derivative_via_total(e, w, M, f)


def test_bianchi_on_random_cocycle_extensions():
    rng = random.Random(2)
    L = abelian_lra(ab2().base, 4)
    M = trivial_module(L, 2)
    for _ in range(5):
        om = random_form(rng, L, M, 2)
        e = extension_from_cocycle(L, M, om)
        assert validate_extension(e).ok
        assert curvature(e).values == om.values
        for _ in range(3):
            assert bianchi_check(e, random_connection(e, rng))


def test_extension_from_cocycle_examples():
    L = ab2()
    M = trivial_module(L)
    e = extension_from_cocycle(L, M, AltForm(L, M, 2, {(0, 1): (Fraction(1),)}))
    assert congruent(e, fx("FIX-HEIS"))
    split = extension_from_cocycle(L, M, AltForm(L, M, 2))
    assert split.total.bracket_table == abelian_lra(L.base, 3).bracket_table
    e3 = extension_from_cocycle(L, M, AltForm(L, M, 2, {(0, 1): (Fraction(3),)}))
    assert congruent(e3, fx("FIX-HEIS(3)"))


def test_not_a_cocycle():
    e = fx("FIX-TP3-A")
    Mq = quotient_module(e)
    om = AltForm(e.quotient, Mq, 2, {(1, 2): (Fraction(0), Fraction(1))})
    with pytest.raises(NotACocycleError):
        extension_from_cocycle(e.quotient, Mq, om)


def test_cocycle_class_examples():
    assert cocycle_class(fx("FIX-HEIS")) == (1,)
    assert cocycle_class(fx("FIX-HEIS(0)")) == (0,)
    e = fx("FIX-HEIS")
    rng = random.Random(3)
    assert cocycle_class(e, random_connection(e, rng)) == cocycle_class(e)


def test_curvature_differences_are_coboundaries():
    rng = random.Random(4)
    for e in extensions():
        if not e.kernel_is_abelian:
            continue
        Mq = quotient_module(e)
        for _ in range(3):
            w1, w2 = random_connection(e, rng), random_connection(e, rng)
            d = AltForm(e.quotient, Mq, 2, (curvature(e, w1) - curvature(e, w2)).values)
            assert is_coboundary(e.quotient, Mq, d) is not None


def test_congruent_examples():
    assert congruent(fx("FIX-HEIS"), fx("FIX-HEIS(1)"))
    assert not congruent(fx("FIX-HEIS(1)"), fx("FIX-HEIS(2)"))
    L = ab2()
    direct = extension_from_cocycle(L, trivial_module(L), AltForm(L, trivial_module(L), 2))
    assert congruent(fx("FIX-HEIS(0)"), direct)
    with pytest.raises(BoundaryMismatchError):
        congruent(fx("FIX-HEIS"), fx("FIX-AB4-Z2"))


def test_congruent_up_to_coboundary():
    # over TP3-A, h(Y) = t has dh(X, Y) = +-t since X acts by t d/dt
    e = fx("FIX-TP3-A")
    Q = e.quotient
    Mq = quotient_module(e)
    h = AltForm(Q, Mq, 1, {(1,): (Fraction(0), Fraction(1))})
    dh = ce_differential(Q, Mq, h)
    assert not dh.is_zero()
    om = AltForm(Q, Mq, 2, curvature(e).values)
    assert congruent(e, extension_from_cocycle(Q, Mq, om + dh))
    assert not congruent(e, extension_from_cocycle(Q, Mq, om.scale(2)))


def _sl2_plus_q():
    K = lie_algebra(4, SL2_BRACKETS, ["e", "f", "h", "c"])
    Q = abelian_lra(K.base, 1, labels=["u"])
    z = K.base.zero()
    theta = [[[z] * 4 for _ in range(4)]]
    return assemble_extension(K, Q, theta, {})


def test_center_examples():
    Z = Center(fx("FIX-HEIS"))
    assert Z.dim == 1 and Z.report.ok
    assert Center(fx("FIX-SPLIT-SL2")).dim == 0
    Zc = Center(_sl2_plus_q())
    assert Zc.dim == 1 and Zc.report.ok
    assert Zc.embed((1,)) == (0, 0, 0, 1)


def test_act_rho_examples():
    e0 = fx("FIX-HEIS(0)")
    Z = Center(e0).module
    rho = AltForm(e0.quotient, Z, 2, {(0, 1): (Fraction(1),)})
    e1 = act_rho(e0, rho)
    assert validate_extension(e1).ok
    assert congruent(e1, fx("FIX-HEIS(1)"))
    assert congruent(act_rho(e0, AltForm(e0.quotient, Z, 2)), e0)
    e2 = act_rho(fx("FIX-HEIS(1)"), rho)
    assert congruent(e2, fx("FIX-HEIS(2)")) and not congruent(e2, fx("FIX-HEIS(1)"))


def test_act_rho_rejects_non_cocycle():
    # rho(Y, W) = t is not closed: X acts on t by t d/dt
    e = fx("FIX-TP3-A")
    Z = Center(e).module
    rho = AltForm(e.quotient, Z, 2, {(1, 2): (Fraction(0), Fraction(1))})
    with pytest.raises(NotACocycleError):
        act_rho(e, rho)


def test_flat_iff_split():
    assert flat_connection(fx("FIX-HEIS")) is None
    assert flat_connection(fx("FIX-TP3-A")) is None
    assert flat_connection(fx("FIX-SPLIT-SL2")) is not None
    e = fx("FIX-AB4-Z2")
    assert flat_connection(e) is None
    rng = random.Random(5)
    # a split extension twisted by a random connection still admits a flat one
    L = ab2()
    M = trivial_module(L)
    split = extension_from_cocycle(L, M, AltForm(L, M, 2))
    tw = split.with_connection(random_connection(split, rng))
    w = flat_connection(tw)
    assert w is not None and curvature(tw, w).is_zero()


def test_flat_non_abelian_kernel():
    e = fx("FIX-SL2xSL2")
    assert flat_connection(e) is not None
    rng = random.Random(6)
    w = random_connection(e, rng)
    if not curvature(e, w).is_zero():
        with pytest.raises(NotImplementedError):
            flat_connection(e.with_connection(w))
