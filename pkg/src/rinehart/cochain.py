"""Alternating A-multilinear forms Alt_A(L, M) and their differentials.

A p-form is stored by its values on strictly increasing p-tuples of
L-basis indices; absent keys mean zero.  Sign conventions:

* the CE differential carries the global sign (-1)^n, n = number of
  arguments of the output form;
* the shuffle product carries the global sign (-1)^(p q), p and q the form
  degrees of the factors.

Both signs are what make the graded Leibniz rule
d(f ^ g) = df ^ g + (-1)^p f ^ dg hold.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Sequence

from .algebra import ValidationReport
from .exact_linalg import (
    ZERO,
    Matrix,
    Vector,
    kernel_basis,
    quotient_basis,
    row_space_basis,
    solve,
    vec,
)
from .lierinehart import LElement, LieRinehartAlgebra, LRModule


def sort_with_sign(idx: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sign of the sorting permutation and the sorted tuple; sign 0 on repeats."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, tuple(sorted(idx))
    sign = 1
    # insertion sort counting transpositions
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(idx)


def shuffle_sign(first: Sequence[int], total: int) -> int:
    """Sign of the (p, q)-shuffle putting positions ``first`` (sorted) in front."""
    inv = sum(s - i for i, s in enumerate(first))
    return -1 if inv % 2 else 1


class AltForm:
    """A degree-p alternating A-multilinear form on ``lra`` with values in ``module``."""

    __slots__ = ("lra", "module", "degree", "values")

    def __init__(self, lra: LieRinehartAlgebra, module: LRModule, degree: int, values: dict | None = None):
        if degree < 0:
            raise ValueError("negative form degree")
        self.lra = lra
        self.module = module
        self.degree = degree
        clean = {}
        for k, v in (values or {}).items():
            k = tuple(k)
            if len(k) != degree or any(b <= a for a, b in zip(k, k[1:])):
                raise ValueError(f"key {k} is not a strictly increasing {degree}-tuple")
            if any(i < 0 or i >= lra.rank for i in k):
                raise ValueError(f"key {k} out of range")
            v = vec(v)
            if len(v) != module.qdim:
                raise ValueError(f"value at {k} has length {len(v)}, expected {module.qdim}")
            if any(v):
                clean[k] = v
        self.values = clean

    def __repr__(self) -> str:
        return f"AltForm(degree={self.degree}, values={self.values})"

    def get(self, idx: Sequence[int]) -> Vector:
        """Value on basis elements in any order (sign-adjusted)."""
        sign, key = sort_with_sign(idx)
        if sign == 0:
            return self.module.zero()
        v = self.values.get(key)
        if v is None:
            return self.module.zero()
        return v if sign > 0 else tuple(-x for x in v)

    def is_zero(self) -> bool:
        return not self.values

    def _combine(self, other: AltForm, op) -> AltForm:
        if self.degree != other.degree:
            raise ValueError("degree mismatch")
        keys = set(self.values) | set(other.values)
        z = self.module.zero()
        return AltForm(self.lra, self.module, self.degree,
                       {k: tuple(op(a, b) for a, b in zip(self.values.get(k, z), other.values.get(k, z)))
                        for k in keys})

    def __add__(self, other: AltForm) -> AltForm:
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other: AltForm) -> AltForm:
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self) -> AltForm:
        return self.scale(-1)

    def scale(self, c) -> AltForm:
        c = Fraction(c)
        return AltForm(self.lra, self.module, self.degree,
                       {k: tuple(c * x for x in v) for k, v in self.values.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, AltForm):
            return NotImplemented
        return self.degree == other.degree and self.values == other.values

    def to_vector(self) -> Vector:
        out = []
        z = self.module.zero()
        for k in combinations(range(self.lra.rank), self.degree):
            out.extend(self.values.get(k, z))
        return tuple(out)

    @classmethod
    def from_vector(cls, lra, module, degree, v: Sequence[Fraction]) -> AltForm:
        q = module.qdim
        vals = {}
        for n, k in enumerate(combinations(range(lra.rank), degree)):
            vals[k] = tuple(v[n * q:(n + 1) * q])
        return cls(lra, module, degree, vals)

    def to_records(self) -> list[dict]:
        return [{"indices": list(k), "value": [str(x) for x in v]} for k, v in sorted(self.values.items())]

    def map_values(self, module: LRModule, fn: Callable[[Vector], Vector]) -> AltForm:
        return AltForm(self.lra, module, self.degree, {k: fn(v) for k, v in self.values.items()})


def form_space_dim(L: LieRinehartAlgebra, M: LRModule, p: int) -> int:
    return len(list(combinations(range(L.rank), p))) * M.qdim if p >= 0 else 0


def zero_form(L, M, p) -> AltForm:
    return AltForm(L, M, p)


def unit_form(L: LieRinehartAlgebra, M: LRModule, value: Sequence) -> AltForm:
    return AltForm(L, M, 0, {(): value})


def evaluate(f: AltForm, args: Sequence[LElement]) -> Vector:
    """Alternating A-multilinear extension of f to arbitrary L-elements."""
    if len(args) != f.degree:
        raise ValueError(f"expected {f.degree} arguments, got {len(args)}")
    M = f.module
    A = f.lra.base
    acc = list(M.zero())
    supports = [[i for i, a in enumerate(x) if any(a)] for x in args]
    for idx in product(*supports):
        val = f.get(idx)
        if not any(val):
            continue
        coeff = A.one()
        for x, i in zip(args, idx):
            coeff = A.multiply(coeff, x[i])
        w = M.act_a(coeff, val)
        acc = [u + v for u, v in zip(acc, w)]
    return tuple(acc)


def differential_with_action(L: LieRinehartAlgebra, M: LRModule, f: AltForm, act: Sequence[Matrix],
                             sign: int | None = None) -> AltForm:
    """The CE-type operator with basis element i acting on values by ``act[i]``.

    ``sign`` defaults to (-1)^(p+1); the graded-coefficient differential
    passes its own global sign.
    """
    p = f.degree
    n = L.rank
    q = M.qdim
    if sign is None:
        sign = -1 if (p + 1) % 2 else 1
    out = {}
    if p + 1 > n:
        return AltForm(L, M, p + 1)
    for tup in combinations(range(n), p + 1):
        acc = [ZERO] * q
        for i, e in enumerate(tup):
            rest = tup[:i] + tup[i + 1:]
            v = f.values.get(rest)
            if v is not None:
                w = act[e].apply(v)
                if i % 2:
                    acc = [a - b for a, b in zip(acc, w)]
                else:
                    acc = [a + b for a, b in zip(acc, w)]
        for j in range(len(tup)):
            for k in range(j + 1, len(tup)):
                coeffs = L.bracket_table[tup[j]][tup[k]]
                rest = tup[:j] + tup[j + 1:k] + tup[k + 1:]
                s = -1 if (j + k) % 2 else 1
                for m, c in enumerate(coeffs):
                    if not any(c):
                        continue
                    val = f.get((m,) + rest)
                    if not any(val):
                        continue
                    w = M.act_a(c, val)
                    if s > 0:
                        acc = [a + b for a, b in zip(acc, w)]
                    else:
                        acc = [a - b for a, b in zip(acc, w)]
        if any(acc):
            out[tup] = tuple(sign * a for a in acc)
    return AltForm(L, M, p + 1, out)


def ce_differential(L: LieRinehartAlgebra, M: LRModule, f: AltForm) -> AltForm:
    if len(M.l_action) != L.rank:
        raise ValueError("module is not a module over this Lie-Rinehart algebra")
    return differential_with_action(L, M, f, M.l_action)


# -- pairings and products ---------------------------------------------------------

class Pairing:
    """A Q-bilinear map M' x M'' -> M given by ``table[i][j]`` = mu(m'_i, m''_j)."""

    def __init__(self, left: LRModule, right: LRModule, target: LRModule, table):
        self.left = left
        self.right = right
        self.target = target
        self.table = tuple(tuple(vec(table[i][j]) for j in range(right.qdim)) for i in range(left.qdim))

    def __call__(self, u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
        out = [ZERO] * self.target.qdim
        for i, x in enumerate(u):
            if not x:
                continue
            row = self.table[i]
            for j, y in enumerate(v):
                if not y:
                    continue
                xy = x * y
                for k, c in enumerate(row[j]):
                    if c:
                        out[k] += xy * c
        return tuple(out)


def _basis(n):
    return [tuple(Fraction(1) if j == i else ZERO for j in range(n)) for i in range(n)]


def validate_pairing(L: LieRinehartAlgebra, mu: Pairing) -> ValidationReport:
    """A-balanced, A-linear, and L-equivariant with respect to the tensor-product action."""
    rep = ValidationReport("pairing")
    A = L.base
    Lm, Rm, T = mu.left, mu.right, mu.target
    for s in range(A.dim):
        a = A.basis(s)
        for i, u in enumerate(_basis(Lm.qdim)):
            for j, v in enumerate(_basis(Rm.qdim)):
                au = mu(Lm.act_a(a, u), v)
                av = mu(u, Rm.act_a(a, v))
                amu = T.act_a(a, mu(u, v))
                if not (au == av == amu):
                    rep.add("a_balanced", (A.labels[s], i, j))
    for x in range(L.rank):
        for i, u in enumerate(_basis(Lm.qdim)):
            for j, v in enumerate(_basis(Rm.qdim)):
                lhs = T.l_action[x].apply(mu(u, v))
                r1 = mu(Lm.l_action[x].apply(u), v)
                r2 = mu(u, Rm.l_action[x].apply(v))
                if lhs != tuple(a + b for a, b in zip(r1, r2)):
                    rep.add("equivariance", (L.labels[x], i, j))
    return rep


def algebra_pairing(A_module: LRModule, M: LRModule) -> Pairing:
    """Multiplication A x M -> M, with ``A_module`` the functions on L (usually ``base_module``)."""
    A = M.base
    table = [[M.act_a(A.basis(s), e) for e in _basis(M.qdim)] for s in range(A.dim)]
    return Pairing(A_module, M, M, table)


def function_pairing(A_module: LRModule) -> Pairing:
    """Multiplication A x A -> A."""
    A = A_module.base
    table = [[A.multiply(A.basis(s), A.basis(t)) for t in range(A.dim)] for s in range(A.dim)]
    return Pairing(A_module, A_module, A_module, table)


def wedge(f: AltForm, g: AltForm, mu: Pairing) -> AltForm:
    """Shuffle product with the global sign (-1)^(pq)."""
    if f.lra is not g.lra and not f.lra.structure_equal(g.lra):
        raise ValueError("forms live on different Lie-Rinehart algebras")
    p, q = f.degree, g.degree
    L = f.lra
    out = {}
    glob = -1 if (p * q) % 2 else 1
    if p + q <= L.rank:
        for tup in combinations(range(L.rank), p + q):
            acc = [ZERO] * mu.target.qdim
            for pos in combinations(range(p + q), p):
                rest = [k for k in range(p + q) if k not in pos]
                u = f.values.get(tuple(tup[k] for k in pos))
                if u is None:
                    continue
                v = g.values.get(tuple(tup[k] for k in rest))
                if v is None:
                    continue
                w = mu(u, v)
                if shuffle_sign(pos, p + q) > 0:
                    acc = [a + b for a, b in zip(acc, w)]
                else:
                    acc = [a - b for a, b in zip(acc, w)]
            if any(acc):
                out[tup] = tuple(glob * a for a in acc)
    return AltForm(L, mu.target, p + q, out)


# -- graded coefficients ---------------------------------------------------------------

@dataclass
class GradedModule:
    """A chain complex of (A, L)-modules; ``differential[l]`` maps C_l to C_(l-1)."""

    components: dict[int, LRModule]
    differential: dict[int, Matrix] = field(default_factory=dict)

    def d(self, l: int) -> Matrix | None:
        return self.differential.get(l)


def validate_graded_module(L: LieRinehartAlgebra, C: GradedModule) -> ValidationReport:
    rep = ValidationReport("graded_module")
    A = L.base
    for l, d in sorted(C.differential.items()):
        src, tgt = C.components.get(l), C.components.get(l - 1)
        if src is None or tgt is None:
            rep.add("differential_degrees", (l,), "differential between missing components")
            continue
        if d.rows != tgt.qdim or d.cols != src.qdim:
            rep.add("differential_shape", (l,))
            continue
        for i in range(L.rank):
            if d @ src.l_action[i] != tgt.l_action[i] @ d:
                rep.add("chain_map", (l, L.labels[i]), "L-action does not commute with the differential")
        for s in range(A.dim):
            if d @ src.a_action[s] != tgt.a_action[s] @ d:
                rep.add("a_linearity", (l, A.labels[s]))
        d2 = C.differential.get(l - 1)
        if d2 is not None and not (d2 @ d).is_zero():
            rep.add("d_squared", (l,))
    return rep


class ChainMapError(ValueError):
    pass


@dataclass
class GradedAltForm:
    """Homogeneous form of total degree T: component l has T + l arguments and values in C_l."""

    total_degree: int
    components: dict[int, AltForm]

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedAltForm):
            return NotImplemented
        keys = set(self.components) | set(other.components)
        for k in keys:
            a, b = self.components.get(k), other.components.get(k)
            if (a is None or a.is_zero()) and (b is None or b.is_zero()):
                continue
            if a != b:
                return False
        return self.total_degree == other.total_degree or not keys

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components.values())


def total_differential(L: LieRinehartAlgebra, C: GradedModule, f: GradedAltForm) -> GradedAltForm:
    """d = d0 + d1 on Alt_A(L, C).

    d0 applies the differential of C to the values; d1 is the CE operator with
    global sign (-1)^(T+1), T the total degree, which makes d0 d1 + d1 d0 = 0.
    """
    rep = validate_graded_module(L, C)
    if "chain_map" in rep.kinds() or "a_linearity" in rep.kinds():
        raise ChainMapError("the L-action is not by chain maps")
    T = f.total_degree
    sign = -1 if (T + 1) % 2 else 1
    out: dict[int, AltForm] = {}

    def accumulate(l: int, form: AltForm):
        if l in out:
            out[l] = out[l] + form
        else:
            out[l] = form

    for l, comp in f.components.items():
        M = C.components[l]
        if comp.degree + 1 <= L.rank:
            accumulate(l, differential_with_action(L, M, comp, M.l_action, sign))
        d = C.d(l)
        if d is not None:
            tgt = C.components[l - 1]
            accumulate(l - 1, comp.map_values(tgt, d.apply))
    return GradedAltForm(T + 1, out)


# -- Hom complexes --------------------------------------------------------------------

def hom_differential(c_diff: dict[int, Matrix], u_diff: dict[int, Matrix], f: dict[int, Matrix], degree: int,
                     step: int = -1) -> dict[int, Matrix]:
    """Df = d f + (-1)^(|f|+1) f d for a homogeneous map f of the given degree.

    ``c_diff[i]`` maps C_i to C_(i+step), likewise ``u_diff``; ``f[i]`` maps
    C_i to U_(i+degree).  Missing entries are zero maps.
    """
    eps = 1 if (degree + 1) % 2 == 0 else -1
    out: dict[int, Matrix] = {}
    degrees = set(f) | {i - step for i in f}
    for i in sorted(degrees):
        term = None
        fi = f.get(i)
        du = u_diff.get(i + degree)
        if fi is not None and du is not None:
            term = du @ fi
        fs = f.get(i + step)
        dc = c_diff.get(i)
        if fs is not None and dc is not None:
            t2 = (fs @ dc).scale(eps)
            term = t2 if term is None else term + t2
        if term is not None:
            out[i] = term
    return out


# -- cohomology ---------------------------------------------------------------------

def differential_matrix(L: LieRinehartAlgebra, M: LRModule, p: int,
                        d: Callable[[AltForm], AltForm] | None = None) -> Matrix:
    """Q-matrix of Alt^p -> Alt^(p+1)."""
    rows = form_space_dim(L, M, p + 1)
    cols_n = form_space_dim(L, M, p)
    if d is None:
        def d(f):
            return ce_differential(L, M, f)
    cols = []
    for j in range(cols_n):
        e = [ZERO] * cols_n
        e[j] = Fraction(1)
        f = AltForm.from_vector(L, M, p, e)
        cols.append(d(f).to_vector() if p + 1 <= L.rank else ())
    if rows == 0:
        return Matrix.zero(0, cols_n)
    return Matrix.from_columns(cols, rows)


@dataclass
class Cohomology:
    degree: int
    betti: int
    representatives: list[AltForm]
    boundary_basis: list[Vector]
    ambient_dim: int

    def class_coordinates(self, f: AltForm) -> Vector:
        """Coordinates of [f] against the representatives; f must be a cocycle."""
        cols = [r.to_vector() for r in self.representatives] + list(self.boundary_basis)
        if not cols:
            if any(f.to_vector()):
                raise ValueError("form is not a cocycle")
            return ()
        x = solve(Matrix.from_columns(cols, self.ambient_dim), f.to_vector())
        if x is None:
            raise ValueError("form is not a cocycle")
        return x[:len(self.representatives)]


def cohomology(L: LieRinehartAlgebra, M: LRModule, p: int,
               d: Callable[[AltForm], AltForm] | None = None) -> Cohomology:
    """H^p(Alt_A(L, M)) with canonical RREF-based representatives."""
    dim_p = form_space_dim(L, M, p)
    if p < 0 or p > L.rank:
        return Cohomology(p, 0, [], [], dim_p)
    dp = differential_matrix(L, M, p, d)
    cycles = kernel_basis(dp) if dp.rows else [tuple(Fraction(int(i == j)) for j in range(dim_p))
                                                   for i in range(dim_p)]
    if p > 0:
        dprev = differential_matrix(L, M, p - 1, d)
        if dp.rows and not (dp @ dprev).is_zero():
            from .exact_linalg import NotSubspaceError
            raise NotSubspaceError(f"d∘d != 0 from degree {p - 1}")
        bounds = row_space_basis([dprev.column(j) for j in range(dprev.cols)], dim_p)
    else:
        bounds = []
    reps = quotient_basis(dim_p, bounds, cycles)
    forms = [AltForm.from_vector(L, M, p, r) for r in reps]
    return Cohomology(p, len(forms), forms, bounds, dim_p)


def is_coboundary(L: LieRinehartAlgebra, M: LRModule, f: AltForm,
                  d: Callable[[AltForm], AltForm] | None = None) -> Vector | None:
    """A primitive g with dg = f (pivot-first), or None."""
    if f.degree == 0:
        return None if any(f.to_vector()) else ()
    dm = differential_matrix(L, M, f.degree - 1, d)
    return solve(dm, f.to_vector())
