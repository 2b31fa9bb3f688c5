"""Finite-dimensional commutative unital Q-algebras and their derivations."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exact_linalg import (
    ONE,
    ZERO,
    Matrix,
    Vector,
    kernel_basis,
    unit_vector,
    vec,
    zeros,
)

AElement = Vector


@dataclass(frozen=True)
class Violation:
    kind: str
    witness: tuple
    detail: str = ""

    def to_dict(self) -> dict:
        return {"kind": self.kind, "witness": list(self.witness), "detail": self.detail}


@dataclass
class ValidationReport:
    subject: str
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, witness: tuple, detail: str = "") -> None:
        self.violations.append(Violation(kind, tuple(witness), detail))

    def extend(self, other: ValidationReport) -> None:
        self.violations.extend(other.violations)

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def to_dict(self) -> dict:
        return {"subject": self.subject, "valid": self.ok,
                "violations": [v.to_dict() for v in self.violations]}


class CommutativeAlgebra:
    """Commutative unital algebra given by structure constants.

    ``mult[i][j][k]`` is the coefficient of e_k in e_i * e_j.
    """

    def __init__(self, dim: int, mult, unit: Sequence, labels: Sequence[str] | None = None):
        self.dim = dim
        self.labels = tuple(labels) if labels is not None else tuple(f"e{i}" for i in range(dim))
        if len(self.labels) != dim:
            raise ValueError("label count does not match dim")
        if len(mult) != dim or any(len(row) != dim for row in mult):
            raise ValueError("mult table must be dim x dim x dim")
        self.mult = tuple(tuple(vec(mult[i][j]) for j in range(dim)) for i in range(dim))
        if any(len(self.mult[i][j]) != dim for i in range(dim) for j in range(dim)):
            raise ValueError("mult table must be dim x dim x dim")
        self.unit = vec(unit)
        if len(self.unit) != dim:
            raise ValueError("unit has wrong length")
        self._mult_matrices: dict[Vector, Matrix] = {}

    def __repr__(self) -> str:
        return f"CommutativeAlgebra(dim={self.dim}, labels={self.labels})"

    def zero(self) -> AElement:
        return zeros(self.dim)

    def one(self) -> AElement:
        return self.unit

    def basis(self, i: int) -> AElement:
        return unit_vector(self.dim, i)

    def scalar(self, c) -> AElement:
        return tuple(Fraction(c) * u for u in self.unit)

    def multiply(self, a: Sequence[Fraction], b: Sequence[Fraction]) -> AElement:
        if len(a) != self.dim or len(b) != self.dim:
            raise ValueError(f"A-element length mismatch (dim {self.dim})")
        out = [ZERO] * self.dim
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                if not y:
                    continue
                xy = x * y
                for k, c in enumerate(self.mult[i][j]):
                    if c:
                        out[k] += xy * c
        return tuple(out)

    def mult_matrix(self, a: Sequence[Fraction]) -> Matrix:
        """Matrix of b -> a*b."""
        key = tuple(a)
        m = self._mult_matrices.get(key)
        if m is None:
            cols = [self.multiply(key, unit_vector(self.dim, j)) for j in range(self.dim)]
            m = Matrix.from_columns(cols, self.dim)
            self._mult_matrices[key] = m
        return m

    def is_field_q(self) -> bool:
        return self.dim == 1


def multiply(A: CommutativeAlgebra, a, b) -> AElement:
    return A.multiply(vec(a), vec(b))


def validate_algebra(A: CommutativeAlgebra) -> ValidationReport:
    """Check commutativity, associativity and the unit law on basis elements."""
    rep = ValidationReport("algebra")
    n = A.dim
    for i in range(n):
        for j in range(i + 1, n):
            if A.mult[i][j] != A.mult[j][i]:
                rep.add("commutativity", (i, j), f"{A.labels[i]}*{A.labels[j]} != {A.labels[j]}*{A.labels[i]}")
    e = [A.basis(i) for i in range(n)]
    for i in range(n):
        for j in range(n):
            ij = A.mult[i][j]
            for l in range(n):
                if A.multiply(ij, e[l]) != A.multiply(e[i], A.mult[j][l]):
                    rep.add("associativity", (i, j, l))
    for i in range(n):
        if A.multiply(A.unit, e[i]) != e[i]:
            rep.add("unit", (i,), f"1*{A.labels[i]} != {A.labels[i]}")
    return rep


def is_derivation(A: CommutativeAlgebra, d: Matrix) -> tuple[bool, tuple[int, int] | None]:
    """Leibniz rule on all basis pairs; returns (ok, first violating pair)."""
    if d.rows != A.dim or d.cols != A.dim:
        raise ValueError("derivation matrix must be dim x dim")
    for i in range(A.dim):
        for j in range(i, A.dim):
            lhs = d.apply(A.mult[i][j])
            rhs1 = A.multiply(d.column(i), A.basis(j))
            rhs2 = A.multiply(A.basis(i), d.column(j))
            if lhs != tuple(x + y for x, y in zip(rhs1, rhs2)):
                return False, (i, j)
    return True, None


def derivations_basis(A: CommutativeAlgebra) -> list[Matrix]:
    """Basis of Der(A) as the solution space of the Leibniz system.

    Unknowns are the dim^2 matrix entries D[r][c] in row-major order.
    """
    n = A.dim
    eqs = []
    for i in range(n):
        for j in range(i, n):
            # D(e_i e_j) - D(e_i) e_j - e_i D(e_j) = 0, one equation per output coordinate r
            for r in range(n):
                row = [ZERO] * (n * n)
                for k, c in enumerate(A.mult[i][j]):
                    if c:
                        row[r * n + k] += c
                # D(e_i) = sum_s D[s][i] e_s ; (e_s e_j)_r
                for s in range(n):
                    row[s * n + i] -= A.mult[s][j][r]
                    row[s * n + j] -= A.mult[i][s][r]
                eqs.append(row)
    if not eqs:
        return []
    sols = kernel_basis(Matrix.from_rows(eqs, n * n))
    return [Matrix(n, n, s) for s in sols]


def derivation_bracket(d1: Matrix, d2: Matrix) -> Matrix:
    return d1 @ d2 - d2 @ d1


# -- a few standard algebras ---------------------------------------------------

def rationals() -> CommutativeAlgebra:
    return CommutativeAlgebra(1, [[[1]]], [1], labels=["1"])


def truncated_polynomial(n: int = 2, var: str = "t") -> CommutativeAlgebra:
    """Q[t]/(t^n) with basis 1, t, ..., t^(n-1)."""
    mult = [[[ONE if k == i + j else ZERO for k in range(n)] for j in range(n)] for i in range(n)]
    labels = ["1"] + [var if i == 1 else f"{var}^{i}" for i in range(1, n)]
    return CommutativeAlgebra(n, mult, unit_vector(n, 0), labels=labels)


def product_of_fields(n: int = 2) -> CommutativeAlgebra:
    """Q^n with orthogonal idempotent basis."""
    mult = [[[ONE if i == j == k else ZERO for k in range(n)] for j in range(n)] for i in range(n)]
    return CommutativeAlgebra(n, mult, [ONE] * n, labels=[f"p{i}" for i in range(n)])
