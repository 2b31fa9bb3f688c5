"""Extensions 0 -> L' -> L -> L'' -> 0 of Lie-Rinehart algebras.

Maps between free A-modules are "A-matrices": ``M[i][j]`` is the
A-coefficient of target basis element i in the image of source basis element j.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .algebra import CommutativeAlgebra, ValidationReport
from .cochain import AltForm, ce_differential, cohomology, differential_with_action, evaluate, is_coboundary
from .exact_linalg import ZERO, Matrix, Vector, kernel_basis, rank, solve, vec
from .lierinehart import (
    LElement,
    LieRinehartAlgebra,
    LRModule,
    abelian_lra,
    free_a_action,
    is_standard_free,
    validate_lra,
    validate_module,
)


class InvalidExtensionError(ValueError):
    pass


class NotACocycleError(ValueError):
    pass


class BoundaryMismatchError(ValueError):
    """Two extensions do not share kernel, quotient or outer action."""


# -- A-matrices -----------------------------------------------------------------

AMatrix = tuple  # tuple[tuple[AElement, ...], ...]


def amatrix(A: CommutativeAlgebra, rows: int, cols: int, entries) -> AMatrix:
    if len(entries) != rows or any(len(r) != cols for r in entries):
        raise ValueError(f"A-matrix must be {rows} x {cols}")
    out = tuple(tuple(vec(c) for c in r) for r in entries)
    if any(len(c) != A.dim for r in out for c in r):
        raise ValueError("A-matrix entries must be A-elements")
    return out


def a_identity(A: CommutativeAlgebra, n: int) -> AMatrix:
    return tuple(tuple(A.one() if i == j else A.zero() for j in range(n)) for i in range(n))


def a_zero(A: CommutativeAlgebra, rows: int, cols: int) -> AMatrix:
    return tuple(tuple(A.zero() for _ in range(cols)) for _ in range(rows))


def a_apply(A: CommutativeAlgebra, M: AMatrix, x: LElement) -> LElement:
    out = []
    for row in M:
        acc = A.zero()
        for c, a in zip(row, x):
            if any(c) and any(a):
                acc = tuple(u + v for u, v in zip(acc, A.multiply(c, a)))
        out.append(acc)
    return tuple(out)


def a_column(M: AMatrix, j: int) -> LElement:
    return tuple(row[j] for row in M)


def a_compose(A: CommutativeAlgebra, M: AMatrix, N: AMatrix) -> AMatrix:
    cols = [a_apply(A, M, a_column(N, j)) for j in range(len(N[0]) if N else 0)]
    return tuple(tuple(cols[j][i] for j in range(len(cols))) for i in range(len(M)))


def a_add(M: AMatrix, N: AMatrix) -> AMatrix:
    return tuple(tuple(tuple(p + q for p, q in zip(a, b)) for a, b in zip(r, s)) for r, s in zip(M, N))


def a_qmatrix(A: CommutativeAlgebra, M: AMatrix, cols: int) -> Matrix:
    """The Q-matrix of M in flat coordinates i*dim(A)+s."""
    d = A.dim
    rows = len(M)
    ent = [[ZERO] * (cols * d) for _ in range(rows * d)]
    for i in range(rows):
        for j in range(cols):
            c = M[i][j]
            if not any(c):
                continue
            m = A.mult_matrix(c)
            for r in range(d):
                for s in range(d):
                    ent[i * d + r][j * d + s] = m[r, s]
    return Matrix.from_rows(ent, cols * d)


def a_from_columns(cols: Sequence[LElement], rows: int) -> AMatrix:
    return tuple(tuple(cols[j][i] for j in range(len(cols))) for i in range(rows))


# -- the extension ------------------------------------------------------------------

class Extension:
    """A short exact sequence kernel -> total -> quotient with a connection.

    ``incl`` is rank(total) x rank(kernel), ``proj`` is rank(quotient) x
    rank(total), ``connection`` is rank(total) x rank(quotient).  Without an
    explicit connection a pivot-first section of ``proj`` is used.
    """

    def __init__(self, kernel: LieRinehartAlgebra, total: LieRinehartAlgebra, quotient: LieRinehartAlgebra,
                 incl, proj, connection=None, name: str | None = None):
        A = total.base
        self.base = A
        self.kernel = kernel
        self.total = total
        self.quotient = quotient
        self.name = name
        self.incl = amatrix(A, total.rank, kernel.rank, incl)
        self.proj = amatrix(A, quotient.rank, total.rank, proj)
        self._incl_q = a_qmatrix(A, self.incl, kernel.rank)
        self._adjoint: LRModule | None = None
        if connection is None:
            connection = self._default_section()
        self.connection = amatrix(A, total.rank, quotient.rank, connection)

    def __repr__(self) -> str:
        return (f"Extension({self.name or ''} ranks {self.kernel.rank}->{self.total.rank}->{self.quotient.rank})")

    def _default_section(self) -> AMatrix:
        A = self.base
        pq = a_qmatrix(A, self.proj, self.total.rank)
        cols = []
        for a in range(self.quotient.rank):
            x = solve(pq, self.quotient.flatten(self.quotient.basis(a)))
            if x is None:
                raise InvalidExtensionError(f"proj is not surjective onto {self.quotient.labels[a]}")
            cols.append(self.total.unflatten(x))
        return a_from_columns(cols, self.total.rank)

    def with_connection(self, omega) -> Extension:
        e = Extension(self.kernel, self.total, self.quotient, self.incl, self.proj, omega, self.name)
        e._adjoint = self._adjoint
        return e

    # maps
    def include(self, x: LElement) -> LElement:
        return a_apply(self.base, self.incl, x)

    def project(self, x: LElement) -> LElement:
        return a_apply(self.base, self.proj, x)

    def lift(self, alpha: LElement, omega: AMatrix | None = None) -> LElement:
        return a_apply(self.base, self.connection if omega is None else omega, alpha)

    def retract_flat(self, x: LElement) -> Vector:
        """Flat kernel coordinates of an element of im(incl) (pivot-first)."""
        v = solve(self._incl_q, self.total.flatten(x))
        if v is None:
            raise InvalidExtensionError("element does not lie in the image of the kernel")
        return v

    def retract(self, x: LElement) -> LElement:
        return self.kernel.unflatten(self.retract_flat(x))

    @property
    def kernel_is_abelian(self) -> bool:
        z = self.kernel.zero()
        return all(self.kernel.bracket_table[i][j] == z
                   for i in range(self.kernel.rank) for j in range(self.kernel.rank))


def validate_extension(e: Extension) -> ValidationReport:
    rep = ValidationReport("extension")
    A = e.base
    K, L, Q = e.kernel, e.total, e.quotient
    for part, name in ((K, "kernel"), (L, "total"), (Q, "quotient")):
        if part.base.mult != A.mult:
            rep.add("base_mismatch", (name,))
        sub = validate_lra(part)
        for v in sub.violations:
            rep.add(f"{name}_{v.kind}", v.witness, v.detail)
    if not rep.ok:
        return rep
    for i in range(K.rank):
        if not K.anchor_maps[i].is_zero():
            rep.add("kernel_anchor", (K.labels[i],), "the kernel must act trivially on A")
    if L.rank != K.rank + Q.rank:
        rep.add("rank", (K.rank, L.rank, Q.rank))
    pi = a_compose(A, e.proj, e.incl)
    if pi != a_zero(A, Q.rank, K.rank):
        bad = next((Q.labels[i], K.labels[j]) for i in range(Q.rank) for j in range(K.rank) if any(pi[i][j]))
        rep.add("exactness", bad, "proj o incl != 0")
    iq = e._incl_q
    pq = a_qmatrix(A, e.proj, L.rank)
    if rank(iq) != K.qdim:
        rep.add("incl_injective", ())
    if rank(pq) != Q.qdim:
        rep.add("proj_surjective", ())
    if rank(iq) + rank(pq) != L.qdim:
        rep.add("middle_exactness", (), "ker(proj) != im(incl)")
    for i in range(K.rank):
        xi = e.include(K.basis(i))
        if not L.anchor(xi).is_zero():
            rep.add("incl_anchor", (K.labels[i],))
        for j in range(i + 1, K.rank):
            lhs = e.include(K.bracket(K.basis(i), K.basis(j)))
            if lhs != L.bracket(xi, e.include(K.basis(j))):
                rep.add("incl_bracket", (K.labels[i], K.labels[j]))
    for i in range(L.rank):
        pi_ = e.project(L.basis(i))
        if L.anchor_maps[i] != Q.anchor(pi_):
            rep.add("proj_anchor", (L.labels[i],))
        for j in range(i + 1, L.rank):
            lhs = e.project(L.bracket(L.basis(i), L.basis(j)))
            if lhs != Q.bracket(pi_, e.project(L.basis(j))):
                rep.add("proj_bracket", (L.labels[i], L.labels[j]))
    for v in validate_connection(e, e.connection).violations:
        rep.violations.append(v)
    return rep


def validate_connection(e: Extension, omega: AMatrix) -> ValidationReport:
    rep = ValidationReport("connection")
    A = e.base
    if a_compose(A, e.proj, omega) != a_identity(A, e.quotient.rank):
        rep.add("section", (), "proj o omega != id")
    return rep


def adjoint_module(e: Extension) -> LRModule:
    """The kernel as an (A, L)-module through the adjoint action."""
    if e._adjoint is not None:
        return e._adjoint
    K, L = e.kernel, e.total
    A = e.base
    qb = K.qbasis_all()
    mats = []
    for i in range(L.rank):
        x = L.basis(i)
        cols = [e.retract_flat(L.bracket(x, e.include(v))) for v in qb]
        mats.append(Matrix.from_columns(cols, K.qdim))
    labels = [K.labels[i] if A.labels[s] == "1" else f"{A.labels[s]}*{K.labels[i]}"
              for i in range(K.rank) for s in range(A.dim)]
    e._adjoint = LRModule(A, K.qdim, free_a_action(A, K.rank), mats, labels)
    return e._adjoint


def check_adjoint(e: Extension) -> ValidationReport:
    """Module axioms plus: every L-basis element acts by a derivation of the kernel bracket."""
    M = adjoint_module(e)
    rep = validate_module(e.total, M)
    K = e.kernel
    qb = K.qbasis_all()
    for i in range(e.total.rank):
        act = M.l_action[i]
        for p, x in enumerate(qb):
            fx = K.unflatten(act.apply(K.flatten(x)))
            for q, y in enumerate(qb[p + 1:], p + 1):
                fy = K.unflatten(act.apply(K.flatten(y)))
                lhs = act.apply(K.flatten(K.bracket(x, y)))
                rhs = K.flatten(K.add(K.bracket(fx, y), K.bracket(x, fy)))
                if lhs != rhs:
                    rep.add("derivation", (e.total.labels[i], M.labels[p], M.labels[q]))
    return rep


# -- connections, curvature, covariant derivative ------------------------------------

def random_connection(e: Extension, rng: random.Random, spread: int = 3) -> AMatrix:
    """omega + incl o h for a random A-linear h: L'' -> L' with small integer coordinates."""
    A = e.base
    h = tuple(tuple(tuple(Fraction(rng.randint(-spread, spread)) for _ in range(A.dim))
                    for _ in range(e.quotient.rank)) for _ in range(e.kernel.rank))
    if e.kernel.rank == 0:
        return e.connection
    return a_add(e.connection, a_compose(A, e.incl, h))


def shift_connection(e: Extension, omega: AMatrix, h: AMatrix) -> AMatrix:
    """omega + incl o h, h an A-matrix rank(kernel) x rank(quotient)."""
    if e.kernel.rank == 0:
        return omega
    return a_add(omega, a_compose(e.base, e.incl, h))


def curvature(e: Extension, omega: AMatrix | None = None) -> AltForm:
    """Omega(a, b) = [w a, w b] - w [a, b], as a 2-form on the quotient with kernel values."""
    omega = e.connection if omega is None else omega
    if not validate_connection(e, omega).ok:
        raise InvalidExtensionError("connection is not a section of proj")
    Q, L = e.quotient, e.total
    M = adjoint_module(e)
    lifts = [e.lift(Q.basis(a), omega) for a in range(Q.rank)]
    vals = {}
    for a in range(Q.rank):
        for b in range(a + 1, Q.rank):
            defect = L.sub(L.bracket(lifts[a], lifts[b]), e.lift(Q.bracket_table[a][b], omega))
            vals[(a, b)] = e.retract_flat(defect)
    return AltForm(Q, M, 2, vals)


def connection_action(e: Extension, M: LRModule, omega: AMatrix | None = None) -> list[Matrix]:
    """Matrices of w(e''_a) acting on an (A, L)-module M."""
    Q = e.quotient
    return [M.element_matrix(e.lift(Q.basis(a), omega)) for a in range(Q.rank)]


def covariant_derivative(e: Extension, omega: AMatrix | None, M: LRModule, f: AltForm) -> AltForm:
    """D^w f: the CE formula on the quotient with w(e''_a) acting on the values."""
    if f.lra.rank != e.quotient.rank:
        raise ValueError("form must live on the quotient")
    return differential_with_action(e.quotient, M, f, connection_action(e, M, omega))


def pullback(f: AltForm, source: LieRinehartAlgebra, phi: AMatrix) -> AltForm:
    """(phi^* f)(x_1, ..., x_p) = f(phi x_1, ..., phi x_p) for an A-linear phi: source -> f.lra."""
    from itertools import combinations

    A = source.base
    images = [a_apply(A, phi, source.basis(i)) for i in range(source.rank)]
    vals = {}
    for tup in combinations(range(source.rank), f.degree):
        vals[tup] = evaluate(f, [images[i] for i in tup])
    return AltForm(source, f.module, f.degree, vals)


def covariant_derivative_via_total(e: Extension, omega: AMatrix | None, M: LRModule, f: AltForm) -> AltForm:
    """w^* d_L p^* f, an independent route to D^w."""
    omega = e.connection if omega is None else omega
    pf = pullback(f, e.total, e.proj)
    return pullback(ce_differential(e.total, M, pf), e.quotient, omega)


def bianchi_check(e: Extension, omega: AMatrix | None = None) -> bool:
    omega = e.connection if omega is None else omega
    return covariant_derivative(e, omega, adjoint_module(e), curvature(e, omega)).is_zero()


# -- assembling extensions from data ----------------------------------------------------

def assemble_extension(kernel: LieRinehartAlgebra, quotient: LieRinehartAlgebra, theta: Sequence[AMatrix],
                       omega: dict, name: str | None = None, labels=None) -> Extension:
    """L = kernel (+) quotient with [e''_a, e'_i] = theta_a(e'_i) and
    [e''_a, e''_b] = omega(a, b) + [e''_a, e''_b]''.

    ``omega`` maps increasing pairs (a, b) to kernel elements.  The kernel
    basis comes first; the canonical connection is the quotient block.
    """
    A = quotient.base
    r1, r2 = kernel.rank, quotient.rank
    n = r1 + r2
    z = A.zero()
    neg = lambda x: tuple(tuple(-c for c in a) for a in x)  # noqa: E731
    table = [[tuple([z] * n) for _ in range(n)] for _ in range(n)]
    for i in range(r1):
        for j in range(r1):
            table[i][j] = tuple(kernel.bracket_table[i][j]) + (z,) * r2
    for a in range(r2):
        for i in range(r1):
            col = a_column(theta[a], i) + (z,) * r2
            table[r1 + a][i] = col
            table[i][r1 + a] = neg(col)
        for b in range(r2):
            if a == b:
                continue
            key, s = ((a, b), 1) if a < b else ((b, a), -1)
            om = omega.get(key)
            kpart = tuple(om) if om is not None else tuple([z] * r1)
            if s < 0:
                kpart = neg(kpart)
            table[r1 + a][r1 + b] = kpart + tuple(quotient.bracket_table[a][b])
    zero_anchor = Matrix.zero(A.dim, A.dim)
    anchor = [zero_anchor] * r1 + list(quotient.anchor_maps)
    if labels is None:
        labels = list(kernel.labels) + list(quotient.labels)
    total = LieRinehartAlgebra(A, n, table, anchor, labels)
    one, zero = A.one(), A.zero()
    incl = [[one if (i == j) else zero for j in range(r1)] for i in range(n)]
    proj = [[one if (j == r1 + a) else zero for j in range(n)] for a in range(r2)]
    conn = [[one if (i == r1 + a) else zero for a in range(r2)] for i in range(n)]
    return Extension(kernel, total, quotient, incl, proj, conn, name)


def _require_free(M: LRModule) -> int:
    A = M.base
    if M.qdim % A.dim:
        raise ValueError("kernel module must be free over A")
    r = M.qdim // A.dim
    if not is_standard_free(M, r):
        raise ValueError("kernel module must be A^r with the standard A-action")
    return r


def extension_from_cocycle(quotient: LieRinehartAlgebra, M: LRModule, omega: AltForm,
                           name: str | None = None) -> Extension:
    """The abelian extension M -> M (+) L'' -> L'' twisted by a 2-cocycle."""
    if omega.degree != 2:
        raise ValueError("a 2-form is required")
    if not ce_differential(quotient, M, omega).is_zero():
        raise NotACocycleError("d(Omega) != 0")
    A = quotient.base
    r = _require_free(M)
    kernel = abelian_lra(A, r, labels=_free_labels(M, r))
    theta = []
    for a in range(quotient.rank):
        act = M.l_action[a]
        cols = [kernel.unflatten(act.apply(kernel.flatten(kernel.basis(i)))) for i in range(r)]
        theta.append(a_from_columns(cols, r))
    vals = {k: kernel.unflatten(v) for k, v in omega.values.items()}
    return assemble_extension(kernel, quotient, theta, vals, name)


def _free_labels(M: LRModule, r: int) -> list[str]:
    d = M.base.dim
    labs = [M.labels[i * d] for i in range(r)]
    return labs if len(set(labs)) == r else [f"m{i}" for i in range(r)]


def split_extension(L: LieRinehartAlgebra) -> Extension:
    """0 -> 0 -> L -> L -> 0 with the identity connection."""
    A = L.base
    kernel = abelian_lra(A, 0, labels=[])
    ident = a_identity(A, L.rank)
    return Extension(kernel, L, L, tuple(() for _ in range(L.rank)), ident, ident, "split")


def outer_data(e: Extension, omega: AMatrix | None = None) -> list[AMatrix]:
    """theta_a = ad(w e''_a) restricted to the kernel, as A-matrices."""
    M = adjoint_module(e)
    K = e.kernel
    out = []
    for act in connection_action(e, M, omega):
        cols = [K.unflatten(act.apply(K.flatten(K.basis(i)))) for i in range(K.rank)]
        out.append(a_from_columns(cols, K.rank))
    return out


def quotient_module(e: Extension, omega: AMatrix | None = None) -> LRModule:
    """For an abelian kernel: the kernel as an (A, L'')-module, independent of the connection."""
    if not e.kernel_is_abelian:
        raise ValueError("the kernel is not abelian")
    M = adjoint_module(e)
    return M.with_l_action(connection_action(e, M, omega))


def cocycle_class(e: Extension, omega: AMatrix | None = None) -> Vector:
    """Coordinates of [Omega] in H^2(Alt_A(L'', L')) against the canonical representatives."""
    if not e.kernel_is_abelian:
        raise ValueError("cocycle classes are only defined here for abelian kernels")
    Mq = quotient_module(e, omega)
    om = curvature(e, omega)
    om = AltForm(e.quotient, Mq, 2, om.values)
    return cohomology(e.quotient, Mq, 2).class_coordinates(om)


# -- center, congruence, torsor action ---------------------------------------------------

def center_basis(K: LieRinehartAlgebra) -> list[Vector]:
    """Q-basis (flat coordinates) of the center of the kernel Lie algebra."""
    if K.qdim == 0:
        return []
    rows = []
    for j in range(K.rank):
        y = K.basis(j)
        cols = [K.flatten(K.bracket(x, y)) for x in K.qbasis_all()]
        rows.extend(Matrix.from_columns(cols, K.qdim).to_rows())
    if not rows:
        return [tuple(Fraction(int(i == j)) for j in range(K.qdim)) for i in range(K.qdim)]
    return kernel_basis(Matrix.from_rows(rows, K.qdim))


class Center:
    """The center Z of the kernel with its induced (A, L'')-module structure."""

    def __init__(self, e: Extension, omega: AMatrix | None = None):
        self.extension = e
        K = e.kernel
        A = e.base
        self.basis = center_basis(K)
        dim = len(self.basis)
        self.dim = dim
        M = adjoint_module(e)
        self.report = ValidationReport("center")

        def restrict(mat: Matrix, what: tuple) -> Matrix:
            cols = []
            for b in self.basis:
                c = _coords(self.basis, mat.apply(b), K.qdim)
                if c is None:
                    self.report.add("stability", what)
                    c = (ZERO,) * dim
                cols.append(c)
            return Matrix.from_columns(cols, dim) if dim else Matrix.zero(0, 0)

        a_act = [restrict(M.a_action[s], ("A", A.labels[s])) for s in range(A.dim)]
        l_act = [restrict(m, ("L''", e.quotient.labels[a]))
                 for a, m in enumerate(connection_action(e, M, omega))]
        # the kernel acts trivially on Z, so the induced action does not depend on w
        for i in range(K.rank):
            ad = M.element_matrix(e.include(K.basis(i)))
            if any(any(ad.apply(b)) for b in self.basis):
                self.report.add("connection_dependence", (K.labels[i],))
        self.module = LRModule(A, dim, a_act, l_act, [f"z{i}" for i in range(dim)])

    def embed(self, coords: Sequence[Fraction]) -> Vector:
        K = self.extension.kernel
        out = [ZERO] * K.qdim
        for c, b in zip(coords, self.basis):
            if c:
                out = [u + c * v for u, v in zip(out, b)]
        return tuple(out)

    def coordinates(self, v: Sequence[Fraction]) -> Vector | None:
        return _coords(self.basis, v, self.extension.kernel.qdim)


def _coords(basis, v, dim) -> Vector | None:
    if not basis:
        return () if not any(v) else None
    return solve(Matrix.from_columns(basis, dim), v)


def center(e: Extension, omega: AMatrix | None = None) -> Center:
    return Center(e, omega)


def _inner_adjustment(e1: Extension, e2: Extension) -> AMatrix:
    """h with ad(w2 a + h a)|L' = ad(w1 a)|L' for every quotient basis element a."""
    K = e1.kernel
    t1, t2 = outer_data(e1), outer_data(e2)
    qb = K.qbasis_all()
    # ad_K(y)(e'_i) = [y, e'_i], linear in the flat coordinates of y
    rows_blocks = []
    for i in range(K.rank):
        cols = [K.flatten(K.bracket(y, K.basis(i))) for y in qb]
        rows_blocks.extend(Matrix.from_columns(cols, K.qdim).to_rows())
    cols_h = []
    for a in range(e1.quotient.rank):
        rhs = []
        for i in range(K.rank):
            rhs.extend(K.flatten(K.sub(a_column(t1[a], i), a_column(t2[a], i))))
        if K.rank == 0:
            cols_h.append(())
            continue
        y = solve(Matrix.from_rows(rows_blocks, K.qdim), rhs)
        if y is None:
            raise BoundaryMismatchError(f"outer actions differ at {e1.quotient.labels[a]}")
        cols_h.append(K.unflatten(y))
    return a_from_columns(cols_h, K.rank) if K.rank else ()


def congruent(e1: Extension, e2: Extension) -> bool:
    """Is there an isomorphism of the middle terms over the identity of kernel and quotient?

    Decided at the cocycle level: after matching the adjoint actions on the
    kernel, the curvature difference must be a Z-valued coboundary.
    """
    if not (e1.kernel.structure_equal(e2.kernel) and e1.quotient.structure_equal(e2.quotient)):
        raise BoundaryMismatchError("kernels or quotients differ")
    if e1.kernel.rank == 0:
        return True
    h = _inner_adjustment(e1, e2)
    w2 = shift_connection(e2, e2.connection, h)
    diff = curvature(e1) - AltForm(e1.quotient, adjoint_module(e1), 2, curvature(e2, w2).values)
    Z = Center(e1)
    vals = {}
    for k, v in diff.values.items():
        c = Z.coordinates(v)
        if c is None:
            return False
        vals[k] = c
    if Z.dim == 0:
        return True
    rho = AltForm(e1.quotient, Z.module, 2, vals)
    return is_coboundary(e1.quotient, Z.module, rho) is not None


def act_rho(e: Extension, rho: AltForm, omega: AMatrix | None = None, name: str | None = None) -> Extension:
    """The extension with the same outer action and curvature Omega + rho.

    ``rho`` is a 2-form on the quotient with values in the center module
    (coordinates against ``center(e).basis``).
    """
    Z = Center(e, omega)
    if rho.degree != 2:
        raise ValueError("rho must be a 2-form")
    if rho.module.qdim != Z.dim:
        raise ValueError("rho must take values in the center")
    if not ce_differential(e.quotient, Z.module, rho).is_zero():
        raise NotACocycleError("d(rho) != 0")
    K = e.kernel
    om = curvature(e, omega)
    vals = {}
    for a in range(e.quotient.rank):
        for b in range(a + 1, e.quotient.rank):
            v = tuple(p + q for p, q in zip(om.get((a, b)), Z.embed(rho.get((a, b)))))
            vals[(a, b)] = K.unflatten(v)
    return assemble_extension(K, e.quotient, outer_data(e, omega), vals, name,
                              labels=_total_labels(e))


def _total_labels(e: Extension) -> list[str]:
    labs = list(e.kernel.labels) + list(e.quotient.labels)
    return labs if len(set(labs)) == len(labs) else None


def flat_connection(e: Extension) -> AMatrix | None:
    """A connection with zero curvature if one exists, else None.

    Abelian kernels: solve d h = -Omega.  Otherwise only the stored
    connection is tested.
    """
    om = curvature(e)
    if om.is_zero():
        return e.connection
    if not e.kernel_is_abelian:
        raise NotImplementedError("flatness search for non-abelian kernels is not linear")
    Mq = quotient_module(e)
    target = AltForm(e.quotient, Mq, 2, om.values).scale(-1)
    h = is_coboundary(e.quotient, Mq, target)
    if h is None:
        return None
    hf = AltForm.from_vector(e.quotient, Mq, 1, h)
    K = e.kernel
    cols = [K.unflatten(hf.get((a,))) for a in range(e.quotient.rank)]
    w = shift_connection(e, e.connection, a_from_columns(cols, K.rank))
    assert curvature(e, w).is_zero()
    return w
