"""The symmetric coalgebra on the kernel, placed in degree 2, and its dual.

Weight-k basis: sorted multisets m of kernel indices (lexicographic), read as
divided-power monomials gamma_m.  Under the embedding into the tensor
coalgebra, gamma_m is the sum of the distinct words with letters m; the
diagonal is

    Delta(gamma_m) = sum over sub-multisets m1 of m: gamma_m1 (x) gamma_(m - m1)

with no signs, since everything sits in even degree.

Functionals zeta on weight k are stored by their A-values zeta(gamma_m).  These
coordinates are also the coefficients of the corresponding polynomial in the
dual basis (gamma_m is dual to the monomial xi^m), and the product dual to
Delta is ordinary polynomial multiplication.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from math import factorial, prod
from typing import Sequence

from .exact_linalg import ZERO, Matrix, Vector, kernel_basis, vstack
from .lierinehart import LieRinehartAlgebra, LRModule, free_a_action, is_standard_free

Multiset = tuple  # sorted tuple of kernel indices


@lru_cache(maxsize=None)
def sym_basis(rank: int, k: int) -> tuple[Multiset, ...]:
    """Multisets of size k from range(rank), lexicographically ordered."""
    if k < 0:
        raise ValueError("negative weight")
    return tuple(combinations_with_replacement(range(rank), k))


def sym_index(rank: int, k: int) -> dict[Multiset, int]:
    return {m: i for i, m in enumerate(sym_basis(rank, k))}


def monomial_label(m: Multiset, labels: Sequence[str]) -> str:
    """gamma-notation, e.g. ``g2(x)*y``; weight 0 is ``1``."""
    if not m:
        return "1"
    parts = []
    for j, c in sorted(Counter(m).items()):
        parts.append(labels[j] if c == 1 else f"g{c}({labels[j]})")
    return "*".join(parts)


def sub_multisets(m: Multiset, u: int) -> list[tuple[Multiset, Multiset]]:
    """Distinct splittings m = m1 + m2 with |m1| = u."""
    counts = sorted(Counter(m).items())
    out = []

    def rec(i: int, left: int, chosen: list):
        if i == len(counts):
            if left == 0:
                m1 = tuple(x for x, c in chosen for _ in range(c))
                m2 = tuple(x for (x, total), (_, c) in zip(counts, chosen) for _ in range(total - c))
                out.append((m1, m2))
            return
        x, total = counts[i]
        for c in range(min(total, left) + 1):
            chosen.append((x, c))
            rec(i + 1, left - c, chosen)
            chosen.pop()

    rec(0, u, [])
    return sorted(out)


def diagonal_component(x: dict, u: int, v: int) -> dict:
    """The (u, v) component of Delta on an element {multiset: A-element} of weight u + v."""
    out: dict = {}
    for m, a in x.items():
        if len(m) != u + v:
            raise ValueError(f"element has weight {len(m)}, not {u + v}")
        for m1, m2 in sub_multisets(m, u):
            key = (m1, m2)
            if key in out:
                out[key] = tuple(p + q for p, q in zip(out[key], a))
            else:
                out[key] = tuple(a)
    return {k: a for k, a in out.items() if any(a)}


class SymmetricCoalgebra:
    """Sigma'_A[s^2 M] for a free (A, L)-module M of rank r, weightwise.

    ``M`` is usually the adjoint module of an extension, an (A, L)-module
    over the total algebra ``lra``.
    """

    def __init__(self, lra: LieRinehartAlgebra, M: LRModule, labels: Sequence[str] | None = None):
        A = lra.base
        if M.qdim % A.dim or not is_standard_free(M, M.qdim // A.dim):
            raise ValueError("the coefficient module must be A^r with the standard A-action")
        self.lra = lra
        self.base = A
        self.generator_module = M
        self.rank = M.qdim // A.dim
        self.labels = tuple(labels) if labels is not None else tuple(
            M.labels[i * A.dim] for i in range(self.rank))
        # K[i][c][j]: A-coefficient of generator c in e_i . (generator j)
        self._gen = []
        for act in M.l_action:
            cols = []
            for j in range(self.rank):
                v = act.apply(self._gen_vec(j))
                cols.append(tuple(tuple(v[c * A.dim:(c + 1) * A.dim]) for c in range(self.rank)))
            self._gen.append(tuple(tuple(cols[j][c] for j in range(self.rank)) for c in range(self.rank)))
        self._a_matrices: dict = {}
        self._modules: dict = {}

    def _gen_vec(self, j: int) -> Vector:
        A = self.base
        out = [ZERO] * (self.rank * A.dim)
        for s, u in enumerate(A.unit):
            out[j * A.dim + s] = u
        return tuple(out)

    def basis(self, k: int) -> tuple[Multiset, ...]:
        return sym_basis(self.rank, k)

    def basis_labels(self, k: int) -> list[str]:
        return [monomial_label(m, self.labels) for m in self.basis(k)]

    def qdim(self, k: int) -> int:
        return len(self.basis(k)) * self.base.dim

    def action_a_matrix(self, i: int, k: int) -> tuple:
        """K[m'][m]: A-coefficient of gamma_m' in e_i . gamma_m (coefficient part only)."""
        key = (i, k)
        if key in self._a_matrices:
            return self._a_matrices[key]
        A = self.base
        basis = self.basis(k)
        idx = sym_index(self.rank, k)
        K = self._gen[i]
        n = len(basis)
        out = [[A.zero() for _ in range(n)] for _ in range(n)]
        for tgt, mt in enumerate(basis):
            # words of m agreeing with sorted(mt) off position p, letter j at p
            for p, c in enumerate(mt):
                rest = mt[:p] + mt[p + 1:]
                for j in range(self.rank):
                    coeff = K[c][j]
                    if not any(coeff):
                        continue
                    src = idx[tuple(sorted(rest + (j,)))]
                    out[tgt][src] = tuple(x + y for x, y in zip(out[tgt][src], coeff))
        res = tuple(tuple(r) for r in out)
        self._a_matrices[key] = res
        return res

    def action(self, i: int, k: int) -> Matrix:
        """Q-matrix of e_i on the weight-k component, including the anchor on coefficients."""
        A = self.base
        d = A.dim
        K = self.action_a_matrix(i, k)
        n = len(self.basis(k))
        anchor = self.lra.anchor_maps[i]
        ent = [[ZERO] * (n * d) for _ in range(n * d)]
        for m in range(n):
            for s in range(d):
                col = m * d + s
                a = A.basis(s)
                da = anchor.column(s)
                for r in range(d):
                    if da[r]:
                        ent[m * d + r][col] += da[r]
                for mt in range(n):
                    c = K[mt][m]
                    if any(c):
                        prodv = A.multiply(a, c)
                        for r in range(d):
                            if prodv[r]:
                                ent[mt * d + r][col] += prodv[r]
        return Matrix.from_rows(ent, n * d)

    def module(self, k: int) -> LRModule:
        """The weight-k component as an (A, L)-module."""
        if k not in self._modules:
            n = len(self.basis(k))
            self._modules[k] = LRModule(self.base, n * self.base.dim, free_a_action(self.base, n),
                                        [self.action(i, k) for i in range(self.lra.rank)],
                                        self._flat_labels(k))
        return self._modules[k]

    def _flat_labels(self, k: int) -> list[str]:
        A = self.base
        out = []
        for lab in self.basis_labels(k):
            for s in range(A.dim):
                out.append(lab if A.labels[s] == "1" else f"{A.labels[s]}*{lab}")
        return out

    # -- dual side ------------------------------------------------------------------
    def dual_action_matrix(self, i: int, k: int) -> Matrix:
        """(e_i zeta)(gamma_m) = e_i(zeta(gamma_m)) - zeta(e_i gamma_m), on flat zeta-coordinates."""
        A = self.base
        d = A.dim
        K = self.action_a_matrix(i, k)
        n = len(self.basis(k))
        anchor = self.lra.anchor_maps[i]
        ent = [[ZERO] * (n * d) for _ in range(n * d)]
        for m in range(n):
            for r in range(d):
                for s in range(d):
                    if anchor[r, s]:
                        ent[m * d + r][m * d + s] += anchor[r, s]
            for mt in range(n):
                c = K[mt][m]
                if not any(c):
                    continue
                cm = A.mult_matrix(c)
                # - c * zeta(gamma_mt)
                for r in range(d):
                    for s in range(d):
                        if cm[r, s]:
                            ent[m * d + r][mt * d + s] -= cm[r, s]
        return Matrix.from_rows(ent, n * d)

    def dual_action(self, i: int, zeta: Sequence[Fraction], k: int) -> Vector:
        return self.dual_action_matrix(i, k).apply(tuple(zeta))

    def invariant_basis(self, k: int) -> list[Vector]:
        """Canonical Q-basis of the functionals annihilated by every L-basis element."""
        n = self.qdim(k)
        if self.lra.rank == 0:
            return [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
        stacked = vstack([self.dual_action_matrix(i, k) for i in range(self.lra.rank)])
        return kernel_basis(stacked)

    def is_invariant(self, zeta: Sequence[Fraction], k: int) -> bool:
        return all(not any(self.dual_action(i, zeta, k)) for i in range(self.lra.rank))


# -- functionals, products and polarization -----------------------------------------

@dataclass(frozen=True)
class InvariantPolynomial:
    """A weight-k functional on Sigma', read as a polynomial in the dual basis.

    ``coefficients`` holds flat coordinates: entry m*dim(A)+s is the A-basis
    coordinate s of the value on gamma_m (= the coefficient of xi^m).
    """

    weight: int
    rank: int
    dim_a: int
    coefficients: Vector
    invariant: bool = False

    def value(self, m: Multiset) -> Vector:
        i = sym_index(self.rank, self.weight)[tuple(m)]
        return self.coefficients[i * self.dim_a:(i + 1) * self.dim_a]

    def items(self):
        for m in sym_basis(self.rank, self.weight):
            v = self.value(m)
            if any(v):
                yield m, v

    def to_records(self) -> dict:
        return {"weight": self.weight,
                "monomials": [{"monomial": list(m), "coefficient": [str(x) for x in v]} for m, v in self.items()]}

    def scale(self, c) -> InvariantPolynomial:
        c = Fraction(c)
        return InvariantPolynomial(self.weight, self.rank, self.dim_a, tuple(c * x for x in self.coefficients),
                                   self.invariant)

    def __add__(self, other: InvariantPolynomial) -> InvariantPolynomial:
        if (self.weight, self.rank, self.dim_a) != (other.weight, other.rank, other.dim_a):
            raise ValueError("incompatible functionals")
        return InvariantPolynomial(self.weight, self.rank, self.dim_a,
                                   tuple(a + b for a, b in zip(self.coefficients, other.coefficients)),
                                   self.invariant and other.invariant)


def functional(S: SymmetricCoalgebra, k: int, values: dict) -> InvariantPolynomial:
    """Build a weight-k functional from {multiset: A-element}."""
    d = S.base.dim
    idx = sym_index(S.rank, k)
    flat = [ZERO] * (len(idx) * d)
    for m, a in values.items():
        i = idx[tuple(sorted(m))]
        a = tuple(Fraction(x) for x in a)
        flat[i * d:(i + 1) * d] = a
    return InvariantPolynomial(k, S.rank, d, tuple(flat), S.is_invariant(flat, k))


def counit(S: SymmetricCoalgebra) -> InvariantPolynomial:
    return functional(S, 0, {(): S.base.one()})


def invariants(S: SymmetricCoalgebra, k: int) -> list[InvariantPolynomial]:
    d = S.base.dim
    return [InvariantPolynomial(k, S.rank, d, v, True) for v in S.invariant_basis(k)]


def product(S: SymmetricCoalgebra, p: InvariantPolynomial, q: InvariantPolynomial) -> InvariantPolynomial:
    """(p q)(gamma_m) = sum over splittings m = m1 + m2 of p(gamma_m1) q(gamma_m2)."""
    A = S.base
    k = p.weight + q.weight
    vals = {}
    for m in sym_basis(S.rank, k):
        acc = A.zero()
        for m1, m2 in sub_multisets(m, p.weight):
            a, b = p.value(m1), q.value(m2)
            if any(a) and any(b):
                acc = tuple(x + y for x, y in zip(acc, A.multiply(a, b)))
        vals[m] = acc
    return functional(S, k, vals)


def _mult_factor(m: Multiset) -> int:
    return prod(factorial(c) for c in Counter(m).values())


def polarize(p: InvariantPolynomial) -> dict:
    """The symmetric multilinear functional of a polynomial, by its values on sorted words.

    xi^m goes to the symmetric functional with value prod(mult_j!) on the word m;
    restricted to Sigma' this is k! times the original functional.
    """
    return {m: tuple(_mult_factor(m) * x for x in v) for m, v in p.items()}


def depolarize(values: dict, rank: int, weight: int, dim_a: int) -> InvariantPolynomial:
    """Inverse of ``polarize`` (characteristic zero)."""
    idx = sym_index(rank, weight)
    flat = [ZERO] * (len(idx) * dim_a)
    for m, v in values.items():
        m = tuple(sorted(m))
        f = _mult_factor(m)
        i = idx[m]
        flat[i * dim_a:(i + 1) * dim_a] = [Fraction(x) / f for x in v]
    return InvariantPolynomial(weight, rank, dim_a, tuple(flat))


def polarization_matrix(rank: int, k: int) -> Matrix:
    """Diagonal matrix of ``polarize`` in weight k (A = Q)."""
    basis = sym_basis(rank, k)
    n = len(basis)
    return Matrix(n, n, [Fraction(_mult_factor(basis[i])) if i == j else ZERO
                         for i in range(n) for j in range(n)])


def word_value(symmetric: dict, word: Sequence[int]):
    """Evaluate a symmetric functional given on sorted words at an arbitrary word."""
    return symmetric.get(tuple(sorted(word)))


def restrict_to_sigma(symmetric: dict, rank: int, k: int, dim_a: int) -> dict:
    """Value of a symmetric tensor functional on gamma_m = sum of the distinct words of m."""
    out = {}
    for m in sym_basis(rank, k):
        v = symmetric.get(m)
        if v is None:
            continue
        words = factorial(k) // _mult_factor(m)
        out[m] = tuple(words * x for x in v)
    return out
