from rinehart.algebra import (
    CommutativeAlgebra,
    derivations_basis,
    is_derivation,
    product_of_fields,
    rationals,
    truncated_polynomial,
    validate_algebra,
)
from rinehart.exact_linalg import Matrix


def test_multiply():
    Q = rationals()
    assert Q.multiply((2,), (3,)) == (6,)
    A = truncated_polynomial(2)
    t = A.basis(1)
    assert A.multiply(t, t) == (0, 0)
    a = (5, -2)
    assert A.multiply(A.one(), a) == a


def test_validate():
    assert validate_algebra(rationals()).ok
    assert validate_algebra(truncated_polynomial(2)).ok
    assert validate_algebra(product_of_fields(2)).ok
    bad = CommutativeAlgebra(2, [[(1, 0), (0, 1)], [(1, 1), (0, 0)]], (1, 0))
    rep = validate_algebra(bad)
    assert not rep.ok
    assert any(v.kind == "commutativity" and v.witness == (0, 1) for v in rep.violations)


def test_derivations():
    A = truncated_polynomial(2)
    assert is_derivation(A, Matrix.zero(2, 2)) == (True, None)
    assert is_derivation(A, Matrix.from_rows([[0, 0], [0, 1]]))[0]
    assert is_derivation(A, Matrix.from_rows([[0, 1], [0, 0]])) == (False, (1, 1))
    assert derivations_basis(rationals()) == []
    (d,) = derivations_basis(A)
    assert d == Matrix.from_rows([[0, 0], [0, 1]]) or d.scale(-1) == Matrix.from_rows([[0, 0], [0, 1]])
    assert derivations_basis(product_of_fields(2)) == []
