import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dercross.errors import ConfigurationError
from dercross.graded import (INHOMOGENEOUS, GradedAlgebra, GradedMatrix, GradedScalar,
                             algebra_arithmetic, degree_of, extract_coefficient,
                             graded_bilinear)


@pytest.fixture
def alg():
    # y1, y2 odd; abar odd of degree 1; e even of degree 2
    return GradedAlgebra([("y1", 1), ("y2", 1), ("abar", 1), ("e", 2)])


def test_odd_generators_anticommute(alg):
    y1, y2 = alg.gen("y1"), alg.gen("y2")
    y12 = algebra_arithmetic(y1, y2, "mul")
    y21 = algebra_arithmetic(y2, y1, "mul")
    assert extract_coefficient(y12, ("y1", "y2")) == 1.0
    assert extract_coefficient(y21, ("y1", "y2")) == -1.0


def test_odd_square_is_zero(alg):
    y1 = alg.gen("y1")
    assert (y1 * y1).terms == {}


def test_even_product_times_odd(alg):
    # (c + y1 y2) y1 = c y1 because y1 y2 y1 = -y1 y1 y2 = 0
    c = 2.5
    lhs = algebra_arithmetic(alg.scalar(c) + alg.gen("y1") * alg.gen("y2"), alg.gen("y1"), "mul")
    assert lhs == alg.gen("y1", c)


def test_extract_examples(alg):
    a = alg.scalar(3.0) + alg.gen("abar", 2.0)
    assert extract_coefficient(a, ("abar",)) == 2.0
    assert extract_coefficient(a, ()) == 3.0
    assert a.body == 3.0
    y12 = alg.gen("y1") * alg.gen("y2")
    assert extract_coefficient(y12, ("y2", "y1")) == -1.0
    assert extract_coefficient(y12, ("y1", "y1")) == 0.0


def test_degree_of(alg):
    assert degree_of(alg.gen("abar")) == 1
    assert degree_of(5.0) == 0
    assert degree_of(alg.scalar(1.0) + alg.gen("abar")) == INHOMOGENEOUS
    assert degree_of(alg.gen("y1") * alg.gen("e")) == 3


def test_canonical_form_drops_zeros(alg):
    a = alg.gen("y1") - alg.gen("y1")
    assert a.terms == {}
    assert a == alg.zero()


def test_mismatched_algebras_raise(alg):
    other = GradedAlgebra([("z", 1)])
    with pytest.raises(ConfigurationError):
        algebra_arithmetic(alg.gen("y1"), other.gen("z"), "add")


def test_generator_cap():
    with pytest.raises(ConfigurationError):
        GradedAlgebra([(f"g{i}", 1) for i in range(9)])
    assert len(GradedAlgebra([(f"g{i}", 1) for i in range(9)], max_generators=9)) == 9


def test_duplicate_or_unknown_generators():
    with pytest.raises(ConfigurationError):
        GradedAlgebra([("y", 1), ("y", 1)])
    with pytest.raises(ConfigurationError):
        GradedAlgebra([("y", 1, "bogus")])
    with pytest.raises(ConfigurationError):
        GradedAlgebra([("y", 1)]).gen("q")


def test_left_coefficient(alg):
    # y2 y1 = -y1 y2, so the left y1-coefficient is -y2
    x = alg.gen("y2") * alg.gen("y1") + alg.scalar(4.0)
    assert x.left_coefficient("y1") == -alg.gen("y2")
    assert x.drop("y1") == alg.scalar(4.0)


def test_float_conversion(alg):
    assert float(alg.scalar(2.0)) == 2.0
    with pytest.raises(ValueError):
        float(alg.gen("y1"))


def test_graded_matrix_product_against_entrywise(alg, rng):
    # the dict-of-arrays product must agree with the naive entry-by-entry product
    names = ("y1", "y2", "e")
    def rand():
        terms = {(): rng.normal(size=(2, 2))}
        for n in names:
            _, mono = alg.monomial(n)
            terms[mono] = rng.normal(size=(2, 2))
        return GradedMatrix(alg, terms, (2, 2))
    A, B = rand(), rand()
    C = A @ B
    Ae, Be, Ce = A.to_entries(), B.to_entries(), C.to_entries()
    for i in range(2):
        for j in range(2):
            want = Ae[i, 0] * Be[0, j] + Ae[i, 1] * Be[1, j]
            assert (Ce[i, j] - want).norm() < 1e-14


def test_graded_matrix_inverse(alg, rng):
    _, m1 = alg.monomial("y1")
    _, m2 = alg.monomial(("y1", "y2"))
    A = GradedMatrix(alg, {(): np.eye(3) + 0.1 * rng.normal(size=(3, 3)),
                           m1: rng.normal(size=(3, 3)), m2: rng.normal(size=(3, 3))}, (3, 3))
    prod = A @ A.inv() - np.eye(3)
    assert prod.norm() < 1e-13


def test_graded_bilinear_sign(alg):
    # for odd A, B the graded commutator is AB + BA = y1 y2 [X, Y]
    X = np.array([[0.0, 1.0], [0.0, 0.0]])
    Y = np.array([[0.0, 0.0], [1.0, 0.0]])
    _, m1 = alg.monomial("y1")
    _, m2 = alg.monomial("y2")
    A = GradedMatrix(alg, {m1: X}, (2, 2))
    B = GradedMatrix(alg, {m2: Y}, (2, 2))
    direct = A @ B + B @ A
    via = graded_bilinear(lambda p, q: p @ q - q @ p, A, B)
    assert (direct - via).norm() == 0.0
    _, m12 = alg.monomial(("y1", "y2"))
    assert np.array_equal(via.terms[m12], X @ Y - Y @ X)


# --- properties -----------------------------------------------------------------
PROP_ALG = GradedAlgebra([("o1", 1), ("o2", 1), ("o3", -1), ("v", 2), ("w", 0)])
NAMES = [g.name for g in PROP_ALG.generators]


@st.composite
def homogeneous(draw):
    deg = draw(st.integers(-1, 3))
    words = [()] + [(n,) for n in NAMES] + [(a, b) for a in NAMES for b in NAMES if a < b]
    words = [w for w in words if sum(PROP_ALG.generators[PROP_ALG.index[n]].degree
                                     for n in w) == deg]
    out = PROP_ALG.zero()
    coeffs = st.floats(-4, 4, allow_nan=False).map(lambda c: round(c, 2))
    for w in draw(st.lists(st.sampled_from(words), max_size=4)) if words else []:
        s, mono = PROP_ALG.monomial(w)
        if s:
            out = out + GradedScalar(PROP_ALG, {mono: s * draw(coeffs)})
    return deg, out


@settings(max_examples=60, deadline=None)
@given(homogeneous(), homogeneous())
def test_graded_commutativity(x, y):
    (p, a), (q, b) = x, y
    assert ((a * b) - (b * a) * ((-1) ** (p * q))).norm() == 0.0


@settings(max_examples=60, deadline=None)
@given(homogeneous(), homogeneous(), homogeneous())
def test_associativity(x, y, z):
    a, b, c = x[1], y[1], z[1]
    assert ((a * b) * c - a * (b * c)).norm() < 1e-12


@settings(max_examples=40, deadline=None)
@given(homogeneous(), homogeneous(), st.sampled_from([(), ("o1",), ("o1", "o2"), ("v", "o3")]))
def test_extract_is_linear(x, y, mono):
    a, b = x[1], y[1]
    lhs = extract_coefficient(a + b, mono)
    assert lhs == pytest.approx(extract_coefficient(a, mono) + extract_coefficient(b, mono),
                                abs=1e-12)


def test_scalar_index_gives_graded_scalar(alg):
    _, m1 = alg.monomial("y1")
    A = GradedMatrix(alg, {(): np.eye(2), m1: np.array([[0.0, 2.0], [0.0, 0.0]])}, (2, 2))
    e = A[0, 1]
    assert isinstance(e, GradedScalar) and e == alg.gen("y1", 2.0)
    row = A[0]
    assert isinstance(row, GradedMatrix) and row.shape == (2,)
