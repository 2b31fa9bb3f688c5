"""Lie-Rinehart algebras (A, L) with L free over A, and (A, L)-modules.

Elements of L are tuples of A-elements: ``x[i]`` is the A-coefficient of the
basis element e_i.  Brackets and anchors are stored on the basis only; their
extension to arbitrary elements uses

    (a x)(b)   = a x(b)
    [a x, b y] = ab [x, y] + a x(b) y - b y(a) x
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .algebra import (
    AElement,
    CommutativeAlgebra,
    ValidationReport,
    derivation_bracket,
    is_derivation,
)
from .exact_linalg import ZERO, Matrix, Vector, vec

LElement = tuple  # tuple[AElement, ...]


class LieRinehartAlgebra:
    """Free Lie-Rinehart algebra over a commutative algebra ``base``.

    ``bracket[i][j]`` is a list of ``rank`` A-elements (the coefficients of
    [e_i, e_j]); ``anchor[i]`` is a dim(A) x dim(A) matrix, the derivation
    through which e_i acts on A.
    """

    def __init__(self, base: CommutativeAlgebra, rank: int, bracket, anchor, labels: Sequence[str] | None = None):
        self.base = base
        self.rank = rank
        self.labels = tuple(labels) if labels is not None else tuple(f"x{i}" for i in range(rank))
        if len(self.labels) != rank:
            raise ValueError("label count does not match rank")
        if len(bracket) != rank or any(len(r) != rank for r in bracket):
            raise ValueError("bracket table must be rank x rank")
        self.bracket_table = tuple(
            tuple(tuple(vec(c) for c in bracket[i][j]) for j in range(rank)) for i in range(rank))
        for i in range(rank):
            for j in range(rank):
                cs = self.bracket_table[i][j]
                if len(cs) != rank or any(len(c) != base.dim for c in cs):
                    raise ValueError(f"bracket[{i}][{j}] has the wrong shape")
        if len(anchor) != rank:
            raise ValueError("one anchor derivation per basis element is required")
        self.anchor_maps = tuple(a if isinstance(a, Matrix) else Matrix.from_rows(a, base.dim) for a in anchor)
        for a in self.anchor_maps:
            if a.rows != base.dim or a.cols != base.dim:
                raise ValueError("anchor matrices must be dim(A) x dim(A)")

    def __repr__(self) -> str:
        return f"LieRinehartAlgebra(rank={self.rank}, labels={self.labels}, base_dim={self.base.dim})"

    # -- elements -----------------------------------------------------------
    @property
    def qdim(self) -> int:
        return self.rank * self.base.dim

    def zero(self) -> LElement:
        return tuple(self.base.zero() for _ in range(self.rank))

    def basis(self, i: int) -> LElement:
        A = self.base
        return tuple(A.one() if j == i else A.zero() for j in range(self.rank))

    def qbasis(self, i: int, s: int) -> LElement:
        """The Q-basis element a_s * e_i."""
        A = self.base
        return tuple(A.basis(s) if j == i else A.zero() for j in range(self.rank))

    def qbasis_all(self) -> list[LElement]:
        return [self.qbasis(i, s) for i in range(self.rank) for s in range(self.base.dim)]

    def flatten(self, x: LElement) -> Vector:
        return tuple(c for a in x for c in a)

    def unflatten(self, v: Sequence[Fraction]) -> LElement:
        d = self.base.dim
        return tuple(tuple(v[i * d:(i + 1) * d]) for i in range(self.rank))

    def add(self, x: LElement, y: LElement) -> LElement:
        return tuple(tuple(p + q for p, q in zip(a, b)) for a, b in zip(x, y))

    def sub(self, x: LElement, y: LElement) -> LElement:
        return tuple(tuple(p - q for p, q in zip(a, b)) for a, b in zip(x, y))

    def scale(self, a: AElement, x: LElement) -> LElement:
        return tuple(self.base.multiply(a, c) for c in x)

    # -- structure ------------------------------------------------------------
    def anchor(self, x: LElement) -> Matrix:
        """The derivation of A through which x acts."""
        A = self.base
        out = Matrix.zero(A.dim, A.dim)
        for i, a in enumerate(x):
            if any(a):
                out = out + A.mult_matrix(a) @ self.anchor_maps[i]
        return out

    def act_on_base(self, x: LElement, a: AElement) -> AElement:
        return self.anchor(x).apply(a)

    def bracket(self, x: LElement, y: LElement) -> LElement:
        A = self.base
        out = [list(A.zero()) for _ in range(self.rank)]

        def acc(coeffs: Sequence[AElement], scalar: AElement):
            for k, c in enumerate(coeffs):
                if any(c):
                    p = A.multiply(scalar, c)
                    out[k] = [u + v for u, v in zip(out[k], p)]

        for i, a in enumerate(x):
            if not any(a):
                continue
            for j, b in enumerate(y):
                if not any(b):
                    continue
                acc(self.bracket_table[i][j], A.multiply(a, b))
                # a e_i(b) e_j - b e_j(a) e_i
                eib = self.anchor_maps[i].apply(b)
                if any(eib):
                    out[j] = [u + v for u, v in zip(out[j], A.multiply(a, eib))]
                eja = self.anchor_maps[j].apply(a)
                if any(eja):
                    out[i] = [u - v for u, v in zip(out[i], A.multiply(b, eja))]
        return tuple(tuple(r) for r in out)

    def structure_equal(self, other: LieRinehartAlgebra) -> bool:
        return (self.rank == other.rank and self.base.mult == other.base.mult
                and self.bracket_table == other.bracket_table and self.anchor_maps == other.anchor_maps)


def _label_triple(L: LieRinehartAlgebra, idx) -> tuple:
    return tuple(L.labels[i] for i in idx)


def _qlabel(L: LieRinehartAlgebra, i: int, s: int) -> str:
    a = L.base.labels[s]
    return L.labels[i] if a == "1" else f"{a}*{L.labels[i]}"


def validate_lra(L: LieRinehartAlgebra) -> ValidationReport:
    """Check antisymmetry, Jacobi, anchors by derivations and anchor/bracket compatibility."""
    rep = ValidationReport("lie_rinehart")
    A = L.base
    n = L.rank
    zero_coeffs = tuple(A.zero() for _ in range(n))
    for i in range(n):
        if L.bracket_table[i][i] != zero_coeffs:
            rep.add("antisymmetry", (L.labels[i], L.labels[i]), "[x, x] != 0")
        for j in range(i + 1, n):
            neg = tuple(tuple(-c for c in a) for a in L.bracket_table[j][i])
            if L.bracket_table[i][j] != neg:
                rep.add("antisymmetry", (L.labels[i], L.labels[j]))
    for i in range(n):
        ok, pair = is_derivation(A, L.anchor_maps[i])
        if not ok:
            rep.add("anchor_derivation", (L.labels[i],) + tuple(A.labels[p] for p in pair))
    # Jacobi on A-basis triples, then on Q-basis triples where A is not Q
    seen = set()
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                x, y, z = L.basis(i), L.basis(j), L.basis(k)
                if _jacobi(L, x, y, z) != L.zero():
                    rep.add("jacobi", _label_triple(L, (i, j, k)))
                    seen.add((i, j, k))
    if A.dim > 1:
        qb = [(i, s) for i in range(n) for s in range(A.dim)]
        for p in range(len(qb)):
            for q in range(p + 1, len(qb)):
                for r in range(q + 1, len(qb)):
                    (i, s), (j, t), (k, u) = qb[p], qb[q], qb[r]
                    if tuple(sorted((i, j, k))) in seen:
                        continue
                    if _jacobi(L, L.qbasis(i, s), L.qbasis(j, t), L.qbasis(k, u)) != L.zero():
                        rep.add("jacobi", (_qlabel(L, i, s), _qlabel(L, j, t), _qlabel(L, k, u)))
    for i in range(n):
        for j in range(i + 1, n):
            lhs = L.anchor(L.bracket(L.basis(i), L.basis(j)))
            rhs = derivation_bracket(L.anchor_maps[i], L.anchor_maps[j])
            if lhs != rhs:
                rep.add("anchor_bracket", (L.labels[i], L.labels[j]),
                        "anchor([x,y]) != [anchor(x), anchor(y)]")
    # (1.1.a)/(1.1.b) on generators x basis of A, as a check on the extension formulas
    for i in range(n):
        for s in range(A.dim):
            a = A.basis(s)
            ax = L.scale(a, L.basis(i))
            if L.anchor(ax) != A.mult_matrix(a) @ L.anchor_maps[i]:
                rep.add("anchor_linearity", (_qlabel(L, i, s),))
            for j in range(n):
                x, y = L.basis(i), L.basis(j)
                lhs = L.bracket(x, L.scale(a, y))
                rhs = L.add(L.scale(a, L.bracket(x, y)), L.scale(L.act_on_base(x, a), y))
                if lhs != rhs:
                    rep.add("bracket_leibniz", (L.labels[i], _qlabel(L, j, s)))
    return rep


def _jacobi(L: LieRinehartAlgebra, x, y, z) -> LElement:
    b = L.bracket
    return L.add(L.add(b(b(x, y), z), b(b(y, z), x)), b(b(z, x), y))


class LRModule:
    """An (A, L)-module, presented as a finite-dimensional Q-vector space.

    ``a_action[s]`` is the matrix of the A-basis element a_s and
    ``l_action[i]`` the matrix of the L-basis element e_i.  The action of
    an arbitrary element sum_i c_i e_i is sum_i a_action(c_i) l_action[i].
    """

    def __init__(self, base: CommutativeAlgebra, qdim: int, a_action: Sequence[Matrix], l_action: Sequence[Matrix],
                 labels: Sequence[str] | None = None):
        self.base = base
        self.qdim = qdim
        self.a_action = tuple(m if isinstance(m, Matrix) else Matrix.from_rows(m, qdim) for m in a_action)
        self.l_action = tuple(m if isinstance(m, Matrix) else Matrix.from_rows(m, qdim) for m in l_action)
        if len(self.a_action) != base.dim:
            raise ValueError("one A-action matrix per A-basis element is required")
        for m in self.a_action + self.l_action:
            if m.rows != qdim or m.cols != qdim:
                raise ValueError("action matrices must be qdim x qdim")
        self.labels = tuple(labels) if labels is not None else tuple(f"m{i}" for i in range(qdim))
        self._a_cache: dict[tuple, Matrix] = {}

    def __repr__(self) -> str:
        return f"LRModule(qdim={self.qdim}, n_l={len(self.l_action)})"

    def zero(self) -> Vector:
        return (ZERO,) * self.qdim

    def a_matrix(self, a: Sequence[Fraction]) -> Matrix:
        key = tuple(a)
        m = self._a_cache.get(key)
        if m is None:
            m = Matrix.zero(self.qdim, self.qdim)
            for s, c in enumerate(key):
                if c:
                    m = m + self.a_action[s].scale(c)
            self._a_cache[key] = m
        return m

    def act_a(self, a: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
        return self.a_matrix(a).apply(v)

    def element_matrix(self, x: LElement) -> Matrix:
        """Matrix of the L-element x acting on M."""
        m = Matrix.zero(self.qdim, self.qdim)
        for i, a in enumerate(x):
            if any(a):
                m = m + self.a_matrix(a) @ self.l_action[i]
        return m

    def with_l_action(self, l_action: Sequence[Matrix]) -> LRModule:
        return LRModule(self.base, self.qdim, self.a_action, l_action, self.labels)


def validate_module(L: LieRinehartAlgebra, M: LRModule) -> ValidationReport:
    rep = ValidationReport("module")
    A = L.base
    if M.base is not A and M.base.mult != A.mult:
        rep.add("base_mismatch", (), "module and Lie-Rinehart algebra over different A")
        return rep
    if len(M.l_action) != L.rank:
        rep.add("l_action_count", (len(M.l_action), L.rank))
        return rep
    ident = Matrix.identity(M.qdim)
    if M.a_matrix(A.unit) != ident:
        rep.add("unit_action", (), "1 does not act as the identity")
    for s in range(A.dim):
        for t in range(s, A.dim):
            lhs = M.a_action[s] @ M.a_action[t]
            if lhs != M.a_matrix(A.mult[s][t]):
                rep.add("a_representation", (A.labels[s], A.labels[t]))
    for i in range(L.rank):
        li = M.l_action[i]
        for s in range(A.dim):
            a = A.basis(s)
            lhs = li @ M.a_action[s]
            rhs = M.a_action[s] @ li + M.a_matrix(L.anchor_maps[i].apply(a))
            if lhs != rhs:
                rep.add("leibniz_1_2_b", (L.labels[i], A.labels[s]), "x(a m) != a x(m) + x(a) m")
    for i in range(L.rank):
        for j in range(i + 1, L.rank):
            lhs = M.element_matrix(L.bracket(L.basis(i), L.basis(j)))
            rhs = M.l_action[i] @ M.l_action[j] - M.l_action[j] @ M.l_action[i]
            if lhs != rhs:
                rep.add("lie_condition", (L.labels[i], L.labels[j]))
    return rep


# -- standard modules ------------------------------------------------------------

def free_a_action(A: CommutativeAlgebra, rank: int) -> list[Matrix]:
    """A-action on A^rank in the block coordinates i*dim(A)+s."""
    d = A.dim
    mats = []
    for s in range(d):
        ms = A.mult_matrix(A.basis(s))
        ent = [ZERO] * (rank * d * rank * d)
        n = rank * d
        for b in range(rank):
            for r in range(d):
                for c in range(d):
                    ent[(b * d + r) * n + b * d + c] = ms[r, c]
        mats.append(Matrix(n, n, ent))
    return mats


def is_standard_free(M: LRModule, rank: int) -> bool:
    return M.qdim == rank * M.base.dim and list(M.a_action) == free_a_action(M.base, rank)


def trivial_module(L: LieRinehartAlgebra, dim: int = 1) -> LRModule:
    """Q^dim with zero L-action; only meaningful for A = Q."""
    if L.base.dim != 1:
        raise ValueError("the trivial module Q needs A = Q")
    u = L.base.unit[0]
    ident = Matrix.identity(dim).scale(1 / u) if u != 1 else Matrix.identity(dim)
    return LRModule(L.base, dim, [ident], [Matrix.zero(dim, dim)] * L.rank)


def base_module(L: LieRinehartAlgebra) -> LRModule:
    """A itself, with L acting through the anchor."""
    A = L.base
    return LRModule(A, A.dim, [A.mult_matrix(A.basis(s)) for s in range(A.dim)], list(L.anchor_maps),
                    labels=A.labels)


def permute_basis(L: LieRinehartAlgebra, perm: Sequence[int]) -> LieRinehartAlgebra:
    """Relabel: new basis element k is old basis element perm[k]."""
    n = L.rank
    bracket = [[None] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            old = L.bracket_table[perm[a]][perm[b]]
            bracket[a][b] = [old[perm[k]] for k in range(n)]
    return LieRinehartAlgebra(L.base, n, bracket, [L.anchor_maps[perm[k]] for k in range(n)],
                              [L.labels[perm[k]] for k in range(n)])


def permute_module(M: LRModule, perm: Sequence[int]) -> LRModule:
    return M.with_l_action([M.l_action[p] for p in perm])


def abelian_lra(base: CommutativeAlgebra, rank: int, labels=None, anchor=None) -> LieRinehartAlgebra:
    """Zero bracket on the basis; anchors default to zero.

    With nonzero anchors the anchors must commute for Jacobi to hold.
    """
    z = base.zero()
    bracket = [[[z] * rank for _ in range(rank)] for _ in range(rank)]
    if anchor is None:
        anchor = [Matrix.zero(base.dim, base.dim)] * rank
    return LieRinehartAlgebra(base, rank, bracket, anchor, labels)


def lie_algebra(rank: int, brackets: dict, labels=None, base: CommutativeAlgebra | None = None) -> LieRinehartAlgebra:
    """Lie algebra over Q (zero anchor) from {(i, j): {k: c}} with i < j."""
    from .algebra import rationals
    A = base or rationals()
    z = A.zero()
    table = [[[z] * rank for _ in range(rank)] for _ in range(rank)]
    for (i, j), coeffs in brackets.items():
        row = [z] * rank
        neg = [z] * rank
        for k, c in coeffs.items():
            row[k] = A.scalar(c)
            neg[k] = A.scalar(-Fraction(c))
        table[i][j] = row
        table[j][i] = neg
    return LieRinehartAlgebra(A, rank, table, [Matrix.zero(A.dim, A.dim)] * rank, labels)
