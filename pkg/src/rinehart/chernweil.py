"""Classifying map of an extension and the induced Chern-Weil classes.

For a connection w with curvature Omega, the weight-k component of the
classifying map is the k-fold cup power of Omega, read in divided-power
coordinates: on a 2k-tuple of quotient basis elements the coefficient of
gamma_m (with sorted word w_1 <= ... <= w_k) is

    sum over ordered partitions (P_1, ..., P_k) of the positions into increasing pairs
        sign(P_1 P_2 ... P_k) * Omega(P_1)[w_1] * ... * Omega(P_k)[w_k]
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import factorial

from .cochain import AltForm, Cohomology, ce_differential, cohomology, function_pairing, shuffle_sign, wedge
from .coalgebra import (
    InvariantPolynomial,
    SymmetricCoalgebra,
    counit,
    invariants,
    polarize,
    product,
    sub_multisets,
)
from .exact_linalg import Matrix, Vector, quotient_basis, row_space_basis, solve
from .extension import AMatrix, Extension, adjoint_module, covariant_derivative, curvature, random_connection
from .lierinehart import LRModule, base_module


class VerificationError(RuntimeError):
    """An identity that holds for every valid input failed: an internal bug."""


def max_weight(e: Extension) -> int:
    return e.quotient.rank // 2


def symmetric_coalgebra(e: Extension) -> SymmetricCoalgebra:
    return SymmetricCoalgebra(e.total, adjoint_module(e), labels=e.kernel.labels)


@lru_cache(maxsize=None)
def _pair_partitions(n: int) -> tuple:
    """Ordered partitions of range(n) into increasing pairs, with permutation signs."""
    out = []

    def rec(remaining: tuple, acc: tuple, sign: int):
        if not remaining:
            out.append((acc, sign))
            return
        for p in range(len(remaining)):
            for q in range(p + 1, len(remaining)):
                # moving positions p, q of the remaining word to its front
                s = -sign if (p + q - 1) % 2 else sign
                rest = remaining[:p] + remaining[p + 1:q] + remaining[q + 1:]
                rec(rest, acc + ((remaining[p], remaining[q]),), s)

    if n % 2 == 0:
        rec(tuple(range(n)), (), 1)
    return tuple(out)


@dataclass
class ClassifyingMap:
    """Weight components of the classifying map; component k is a 2k-form with Sigma'_k values."""

    extension: Extension
    connection: AMatrix
    coalgebra: SymmetricCoalgebra
    components: dict[int, AltForm] = field(default_factory=dict)

    @property
    def w_max(self) -> int:
        return max(self.components) if self.components else -1


def classifying_map(e: Extension, omega: AMatrix | None = None, w_max: int | None = None) -> ClassifyingMap:
    omega = e.connection if omega is None else omega
    bound = max_weight(e)
    w_max = bound if w_max is None else min(w_max, bound)
    S = symmetric_coalgebra(e)
    A = e.base
    Q = e.quotient
    om = curvature(e, omega)
    K = e.kernel
    # Omega on basis pairs as kernel A-coefficients
    pair_val = {}
    for a, b in combinations(range(Q.rank), 2):
        pair_val[(a, b)] = K.unflatten(om.get((a, b)))
    comps = {0: AltForm(Q, S.module(0), 0, {(): A.one()})}
    for k in range(1, w_max + 1):
        M = S.module(k)
        basis = S.basis(k)
        vals = {}
        for tup in combinations(range(Q.rank), 2 * k):
            flat = []
            for m in basis:
                acc = A.zero()
                for parts, sign in _pair_partitions(2 * k):
                    term = A.one()
                    for (p, q), letter in zip(parts, m):
                        c = pair_val[(tup[p], tup[q])][letter]
                        if not any(c):
                            term = None
                            break
                        term = A.multiply(term, c)
                    if term is not None:
                        acc = tuple(x + sign * y for x, y in zip(acc, term))
                flat.extend(acc)
            vals[tup] = tuple(flat)
        comps[k] = AltForm(Q, M, 2 * k, vals)
    return ClassifyingMap(e, omega, S, comps)


def tensor_cup_power(e: Extension, omega: AMatrix | None, k: int) -> dict:
    """The k-fold cup power of Omega with tensor-algebra values, via repeated shuffle products.

    Returned as {2k-tuple: {word: A-element}}; an independent route to the
    classifying map through the tensor coalgebra.
    """
    Q = e.quotient
    A = e.base
    K = e.kernel
    om = curvature(e, omega)
    current = {(): {(): A.one()}}
    deg = 0
    for _ in range(k):
        nxt = {}
        for tup in combinations(range(Q.rank), deg + 2):
            acc: dict = {}
            for pos in combinations(range(deg + 2), deg):
                rest = [t for t in range(deg + 2) if t not in pos]
                left = current.get(tuple(tup[t] for t in pos))
                if not left:
                    continue
                pair = K.unflatten(om.get(tuple(tup[t] for t in rest)))
                s = shuffle_sign(pos, deg + 2)
                for word, a in left.items():
                    for c, b in enumerate(pair):
                        if not any(b):
                            continue
                        w = word + (c,)
                        v = A.multiply(a, b)
                        old = acc.get(w, A.zero())
                        acc[w] = tuple(x + s * y for x, y in zip(old, v))
            acc = {w: v for w, v in acc.items() if any(v)}
            if acc:
                nxt[tup] = acc
        current = nxt
        deg += 2
    return current


def coalgebra_morphism_check(F: dict[int, dict], rank: int, w_max: int, algebra) -> bool:
    """Delta F = (F (x) F) Delta through weight w_max, plus counit compatibility.

    ``F[k]`` maps increasing 2k-tuples of quotient indices to {multiset: A-element}.
    """
    A = algebra
    if F.get(0, {}).get(()) != {(): A.one()}:
        return False
    for k in range(1, w_max + 1):
        comp = F.get(k, {})
        for tup in combinations(range(rank), 2 * k):
            x = comp.get(tup, {})
            for u in range(0, k + 1):
                v = k - u
                lhs: dict = {}
                for m, a in x.items():
                    for m1, m2 in sub_multisets(m, u):
                        old = lhs.get((m1, m2), A.zero())
                        lhs[(m1, m2)] = tuple(p + q for p, q in zip(old, a))
                rhs: dict = {}
                for pos in combinations(range(2 * k), 2 * u):
                    rest = [t for t in range(2 * k) if t not in pos]
                    s = shuffle_sign(pos, 2 * k)
                    fu = F.get(u, {}).get(tuple(tup[t] for t in pos), {})
                    fv = F.get(v, {}).get(tuple(tup[t] for t in rest), {})
                    for m1, a in fu.items():
                        for m2, b in fv.items():
                            old = rhs.get((m1, m2), A.zero())
                            rhs[(m1, m2)] = tuple(p + s * q for p, q in zip(old, A.multiply(a, b)))
                lhs = {k_: a for k_, a in lhs.items() if any(a)}
                rhs = {k_: a for k_, a in rhs.items() if any(a)}
                if lhs != rhs:
                    return False
    return True


def as_component_tables(cmap: ClassifyingMap) -> dict[int, dict]:
    """Convert a classifying map to the {k: {tuple: {multiset: A-element}}} form."""
    A = cmap.extension.base
    d = A.dim
    out = {}
    for k, form in cmap.components.items():
        basis = cmap.coalgebra.basis(k)
        table = {}
        for tup, v in form.values.items():
            entry = {}
            for i, m in enumerate(basis):
                a = tuple(v[i * d:(i + 1) * d])
                if any(a):
                    entry[m] = a
            table[tup] = entry
        out[k] = table
    return out


def check_classifying_map_closed(cmap: ClassifyingMap) -> bool:
    """D^w annihilates every weight component of the classifying map."""
    e = cmap.extension
    for k, form in cmap.components.items():
        if 2 * k + 1 > e.quotient.rank:
            continue
        if not covariant_derivative(e, cmap.connection, cmap.coalgebra.module(k), form).is_zero():
            return False
    return True


def check_flat_component(cmap: ClassifyingMap) -> bool:
    """The weight-1 component is the curvature itself."""
    if 1 not in cmap.components:
        return True
    om = curvature(cmap.extension, cmap.connection)
    return cmap.components[1].values == om.values


# -- Chern-Weil forms and classes --------------------------------------------------------

def _values_module(e: Extension) -> LRModule:
    return base_module(e.quotient)


def chern_weil_form(e: Extension, omega: AMatrix | None, phi: InvariantPolynomial,
                    cmap: ClassifyingMap | None = None) -> AltForm:
    """phi composed with the weight-k component of the classifying map."""
    S = cmap.coalgebra if cmap is not None else symmetric_coalgebra(e)
    if not S.is_invariant(phi.coefficients, phi.weight):
        raise ValueError("phi is not invariant")
    A = e.base
    Q = e.quotient
    Mv = _values_module(e)
    k = phi.weight
    if 2 * k > Q.rank:
        # forms of degree above the rank are identically zero
        return AltForm(Q, Mv, 2 * k)
    if cmap is None or k not in cmap.components:
        cmap = classifying_map(e, omega, k)
    comp = cmap.components[k]
    d = A.dim
    basis = S.basis(k)
    vals = {}
    for tup, v in comp.values.items():
        acc = A.zero()
        for i, m in enumerate(basis):
            a = tuple(v[i * d:(i + 1) * d])
            c = phi.value(m)
            if any(a) and any(c):
                acc = tuple(x + y for x, y in zip(acc, A.multiply(c, a)))
        vals[tup] = acc
    return AltForm(Q, Mv, 2 * k, vals)


def chern_weil_form_polarized(e: Extension, omega: AMatrix | None, phi: InvariantPolynomial) -> AltForm:
    """Second route: the polarized functional on the tensor-valued cup power, divided by k!."""
    A = e.base
    Q = e.quotient
    k = phi.weight
    Mv = _values_module(e)
    if 2 * k > Q.rank:
        return AltForm(Q, Mv, 2 * k)
    sym = polarize(phi)
    cup = tensor_cup_power(e, omega, k)
    vals = {}
    for tup, words in cup.items():
        acc = A.zero()
        for w, a in words.items():
            c = sym.get(tuple(sorted(w)))
            if c is not None:
                acc = tuple(x + y for x, y in zip(acc, A.multiply(c, a)))
        vals[tup] = tuple(x / factorial(k) for x in acc)
    return AltForm(Q, Mv, 2 * k, vals)


def curvature_pairing(e: Extension, omega: AMatrix | None, phi: InvariantPolynomial) -> AltForm:
    """phi(Omega(a, b)) for weight-1 phi, computed straight from the curvature."""
    if phi.weight != 1:
        raise ValueError("weight-1 functional required")
    A = e.base
    K = e.kernel
    om = curvature(e, omega)
    vals = {}
    for key, v in om.values.items():
        coeffs = K.unflatten(v)
        acc = A.zero()
        for c, a in enumerate(coeffs):
            acc = tuple(x + y for x, y in zip(acc, A.multiply(phi.value((c,)), a)))
        vals[key] = acc
    return AltForm(e.quotient, _values_module(e), 2, vals)


@dataclass
class CharacteristicClass:
    weight: int
    representative: AltForm
    coordinates: Vector
    connections_checked: int = 1

    @property
    def is_zero(self) -> bool:
        return not any(self.coordinates)


def class_of(e: Extension, form: AltForm, cache: dict | None = None) -> Vector:
    Q = e.quotient
    p = form.degree
    if p > Q.rank:
        return ()
    key = p
    if cache is not None and key in cache:
        H = cache[key]
    else:
        H = cohomology(Q, _values_module(e), p)
        if cache is not None:
            cache[key] = H
    f = AltForm(Q, H.representatives[0].module if H.representatives else form.module, p, form.values)
    return H.class_coordinates(f)


def chern_weil_class(e: Extension, phi: InvariantPolynomial, omega: AMatrix | None = None,
                     seed: int = 0, extra_connections: int = 1) -> CharacteristicClass:
    """Class of phi(Omega) with a connection-independence check against sampled connections."""
    omega = e.connection if omega is None else omega
    Mv = _values_module(e)
    form = chern_weil_form(e, omega, phi)
    if form.degree <= e.quotient.rank and not ce_differential(e.quotient, Mv, form).is_zero():
        raise VerificationError("Chern-Weil form is not a cocycle")
    cache: dict = {}
    coords = class_of(e, form, cache)
    rng = random.Random(seed)
    for _ in range(extra_connections):
        w = random_connection(e, rng)
        other = chern_weil_form(e, w, phi)
        if class_of(e, other, cache) != coords:
            raise VerificationError("Chern-Weil class depends on the connection")
    return CharacteristicClass(phi.weight, form, coords, 1 + extra_connections)


def multiplicativity_check(e: Extension, phi1: InvariantPolynomial, phi2: InvariantPolynomial,
                           omega: AMatrix | None = None) -> bool:
    S = symmetric_coalgebra(e)
    prod_ = product(S, phi1, phi2)
    lhs = chern_weil_form(e, omega, prod_)
    f1 = chern_weil_form(e, omega, phi1)
    f2 = chern_weil_form(e, omega, phi2)
    if lhs.degree > e.quotient.rank:
        return True
    rhs = wedge(f1, f2, function_pairing(_values_module(e)))
    return lhs.values == rhs.values


# -- coinvariants ------------------------------------------------------------------------

@dataclass
class CoinvariantQuotient:
    weight: int
    representatives: list[Vector]
    kernel_span: list[Vector]
    projection: Matrix
    module: LRModule


def coinvariants(e: Extension, S: SymmetricCoalgebra, k: int, omega: AMatrix | None = None) -> CoinvariantQuotient:
    """Sigma'_k modulo the span of the kernel's action, as an (A, L'')-module through w."""
    omega = e.connection if omega is None else omega
    n = S.qdim(k)
    M = S.module(k)
    K = e.kernel
    images = []
    for x in K.qbasis_all():
        act = M.element_matrix(e.include(x))
        for j in range(n):
            col = act.column(j)
            if any(col):
                images.append(col)
    sub = row_space_basis(images, n)
    full = [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    reps = quotient_basis(n, sub, full)
    q = len(reps)
    cols = list(reps) + list(sub)
    big = Matrix.from_columns(cols, n) if cols else Matrix.zero(n, 0)

    def project(v):
        if not q:
            return ()
        x = solve(big, v)
        if x is None:
            raise VerificationError("projection failed")
        return x[:q]

    proj = Matrix.from_columns([project(full[j]) for j in range(n)], q) if q else Matrix.zero(0, n)
    R = Matrix.from_columns(reps, n) if q else Matrix.zero(n, 0)
    a_act = [proj @ m @ R for m in M.a_action]
    l_act = [proj @ M.element_matrix(e.lift(e.quotient.basis(a), omega)) @ R for a in range(e.quotient.rank)]
    mod = LRModule(e.base, q, a_act, l_act, [f"q{i}" for i in range(q)])
    return CoinvariantQuotient(k, list(reps), sub, proj, mod)


@dataclass
class GlobalInvariant:
    weight: int
    coinvariants: CoinvariantQuotient
    form: AltForm
    closed: bool
    cohomology: Cohomology | None
    coordinates: Vector

    @property
    def is_zero(self) -> bool:
        return not any(self.coordinates)


def global_invariant(e: Extension, omega: AMatrix | None = None, w_max: int | None = None) -> list[GlobalInvariant]:
    """The classifying map with the kernel action divided out, weight by weight."""
    omega = e.connection if omega is None else omega
    cmap = classifying_map(e, omega, w_max)
    S = cmap.coalgebra
    Q = e.quotient
    out = []
    for k, comp in sorted(cmap.components.items()):
        cq = coinvariants(e, S, k, omega)
        vals = {t: cq.projection.apply(v) for t, v in comp.values.items()}
        form = AltForm(Q, cq.module, 2 * k, vals)
        closed = ce_differential(Q, cq.module, form).is_zero()
        if not closed:
            raise VerificationError(f"projected classifying map is not closed in weight {k}")
        H = cohomology(Q, cq.module, 2 * k)
        out.append(GlobalInvariant(k, cq, form, closed, H, H.class_coordinates(form)))
    return out


__all__ = [
    "CharacteristicClass", "ClassifyingMap", "GlobalInvariant", "VerificationError",
    "as_component_tables", "chern_weil_class", "chern_weil_form", "chern_weil_form_polarized",
    "check_classifying_map_closed", "check_flat_component", "classifying_map", "coalgebra_morphism_check",
    "coinvariants", "counit", "curvature_pairing", "global_invariant", "invariants", "max_weight",
    "multiplicativity_check", "symmetric_coalgebra", "tensor_cup_power",
]
