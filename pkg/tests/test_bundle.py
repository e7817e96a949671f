import numpy as np
import pytest

from dercross import DerivedModule, make_fixture
from dercross import bundle as bd
from dercross.crossed_module import sample_rng
from dercross.errors import ConfigurationError, MembershipError, PreconditionError
from dercross.matrix_lie import mexp

from conftest import FIXTURES


@pytest.fixture(scope="module")
def conj_model():
    return bd.BundleModel(make_fixture("CONJ(SO3)"))


def coeff(scalar, *names):
    return scalar.coefficient(names) if names else scalar.body


# --- structure maps ---------------------------------------------------------------------
def test_source_projection_and_trivialization(conj_model, rng):
    V = conj_model.sample_point(rng)
    S = bd.source_map(V)
    assert np.array_equal(S.x, V.x) and np.array_equal(S.a, V.a) and not S.L.any()
    V0 = conj_model.sample_point(rng, with_L=False)
    S0 = bd.source_map(V0)
    assert np.array_equal(S0.a, V0.a) and not S0.L.any()
    assert np.array_equal(bd.project(V), V.x)
    x, P = bd.trivialize(bd.SyntheticPoint(conj_model, V.x, np.eye(3), np.zeros((3, 3))))
    assert np.array_equal(x, V.x)
    assert np.array_equal(P.a, np.eye(3)) and not P.L.any()


def test_right_action(conj_model, rng):
    D = conj_model.derived
    V = conj_model.sample_point(rng)
    W = bd.right_action(V, D.identity())
    assert np.max(np.abs(W.a - V.a)) == 0.0 and np.max(np.abs(W.L - V.L)) < 1e-15
    Q, R = D.sample_group(rng), D.sample_group(rng)
    from dercross import dmul
    lhs = bd.right_action(bd.right_action(V, Q), R)
    rhs = bd.right_action(V, dmul(Q, R))
    assert np.max(np.abs(lhs.a - rhs.a)) < 1e-12 and np.max(np.abs(lhs.L - rhs.L)) < 1e-12
    other = DerivedModule(make_fixture("COVER"))
    with pytest.raises(ConfigurationError):
        bd.right_action(V, other.identity())


def test_local_gauge(rng):
    M = make_fixture("CONJ(SO3)")
    sigma = lambda m: mexp(m[0] * M.G.algebra.basis[0])
    m = np.array([0.3])
    A = M.G.sample(rng)
    out = bd.local_gauge(sigma, m, A, "morphism", M)
    assert np.max(np.abs(out - A.T @ sigma(m) @ A)) < 1e-14
    assert np.max(np.abs(bd.local_gauge(sigma, m, np.eye(3)) - sigma(m))) == 0.0
    with pytest.raises(MembershipError):
        bd.local_gauge(sigma, m, 2 * np.eye(3), "morphism", M)
    with pytest.raises(MembershipError):
        bd.local_gauge(sigma, m, np.zeros((3, 3)))
    with pytest.raises(ConfigurationError):
        bd.local_gauge(sigma, m, A, "morphism")
    with pytest.raises(ValueError):
        bd.local_gauge(sigma, m, A, "sideways")


# --- forms and derivations ---------------------------------------------------------------
def test_d_of_base_polynomial(conj_model, rng):
    # d(1 + 2 x1 + x1 x2) = (2 + x2) dx1 + x1 dx2
    f = bd.FormField.make(conj_model, bd.poly_coeff(1.0, [2.0, 0.0], [[0, 0.5], [0.5, 0]]))
    V = conj_model.sample_point(rng)
    df = bd.d_form(f).evaluate(V)
    x1, x2 = V.x
    assert abs(coeff(df, "dx1") - (2 + x2)) < 1e-14
    assert abs(coeff(df, "dx2") - x1) < 1e-14


def test_d_of_group_entries_is_left_coframe(conj_model, rng):
    # da = a w with w = sum_A w^A e_A
    V = conj_model.sample_point(rng)
    basis = conj_model.module.G.algebra.basis
    for i, j in ((0, 1), (2, 0)):
        df = bd.d_form(bd.FormField.make(conj_model, bd.a_entry_coeff(i, j))).evaluate(V)
        for A, e in enumerate(basis):
            assert abs(coeff(df, f"w{A + 1}") - (V.a @ e)[i, j]) < 1e-14


def test_d_of_shift_coordinates(conj_model, rng):
    # the L-component moves only in e-directions, by mu_dot(a, e_B)
    V = conj_model.sample_point(rng)
    M = conj_model.module
    for k in range(conj_model.e_dim):
        df = bd.d_form(bd.FormField.make(conj_model, bd.ell_coeff(k))).evaluate(V)
        for B, e in enumerate(M.E.algebra.basis):
            want = conj_model.e_coords(M.exact.mu_dot(V.a, e))[k]
            assert abs(coeff(df, f"h{B + 1}") - want) < 1e-14
        for A in range(conj_model.g_dim):
            assert coeff(df, f"w{A + 1}") == 0.0


def test_d_squared_and_contraction_of_functions(conj_model, rng):
    V = conj_model.sample_point(rng)
    Z = conj_model.sample_Z(rng)
    for f in bd.sample_fields(conj_model, rng):
        assert bd.d_form(bd.d_form(f)).evaluate(V).norm() < 1e-7
    f0 = bd.sample_fields(conj_model, rng)[0]
    assert bd.j_form(Z, f0).evaluate(V).norm() == 0.0


def test_wedge_is_graded_commutative(conj_model, rng):
    V = conj_model.sample_point(rng)
    f = bd.FormField.make(conj_model, bd.a_entry_coeff(0, 0), ("w1",))
    g = bd.FormField.make(conj_model, bd.ell_coeff(1), ("dx1",))
    fg = f.wedge(g).evaluate(V)
    gf = g.wedge(f).evaluate(V)
    assert (fg + gf).norm() < 1e-15
    h = bd.FormField.make(conj_model, bd.const_coeff(1.0), ("w1", "w1"))
    assert h.terms == {}


def test_non_polynomial_coefficients_are_rejected(conj_model, rng):
    f = bd.FormField.make(conj_model, lambda x, a, ell: np.sin(x[0]))
    with pytest.raises(ConfigurationError):
        bd.d_form(f).evaluate(conj_model.sample_point(rng))


def test_vertical_field_examples(conj_model, rng):
    M = conj_model.module
    V = conj_model.sample_point(rng)
    Zu = conj_model.sample_Z(rng, "g")
    f = bd.FormField.make(conj_model, bd.a_entry_coeff(1, 2))
    assert abs(bd.vertical_field(Zu, f, V).body - (V.a @ Zu.u)[1, 2]) < 1e-6
    for p in bd.pullback_fields(conj_model, rng):
        assert bd.vertical_field(conj_model.sample_Z(rng), p, V).norm() < 1e-12
    V1 = bd.SyntheticPoint(conj_model, V.x, np.eye(3), V.L)
    ZU = conj_model.sample_Z(rng, "e")
    want = M.E.algebra.coords(ZU.U)
    for k in range(3):
        g = bd.FormField.make(conj_model, bd.ell_coeff(k))
        assert abs(bd.vertical_field(ZU, g, V1).body - want[k]) < 1e-10


def test_lie_derivative_kills_pullbacks(conj_model, rng):
    V = conj_model.sample_point(rng)
    Z = conj_model.sample_Z(rng)
    for p in bd.pullback_fields(conj_model, rng):
        assert bd.l_form(Z, p).evaluate(V).norm() < 1e-6


def test_derivation_handles(conj_model, rng):
    V = conj_model.sample_point(rng)
    Z = conj_model.sample_Z(rng)
    f = bd.sample_fields(conj_model, rng)[1]
    assert bd.DerivationHandle("deRham").degree == 1
    assert bd.DerivationHandle("contraction", Z).degree == -1
    d = bd.apply_derivation(bd.DerivationHandle("deRham"), f, V)
    assert (d - bd.d_form(f).evaluate(V)).norm() == 0.0
    with pytest.raises(ConfigurationError):
        bd.DerivationHandle("lie")(f)


# --- Cartan relations --------------------------------------------------------------------
@pytest.mark.parametrize("name", FIXTURES)
def test_cartan_relations(name):
    B = bd.BundleModel(make_fixture(name))
    worst = dict.fromkeys(bd.CARTAN, 0.0)
    for i in range(6):
        rng = sample_rng(11, name, i)
        fields = bd.sample_fields(B, rng)
        Z = B.sample_Z(rng, ("mixed", "g", "e")[i % 3])
        W = B.sample_Z(rng, ("e", "mixed", "g")[i % 3])
        V = B.sample_point(rng)
        for k, v in bd.cartan_residuals(Z, W, fields[i % 3], V).items():
            worst[k] = max(worst[k], v)
    assert max(worst.values()) < 1e-5


def test_double_contraction_vanishes(conj_model, rng):
    Z = conj_model.sample_Z(rng)
    f = bd.sample_fields(conj_model, rng)[2]
    V = conj_model.sample_point(rng)
    jj = bd.j_form(Z, bd.j_form(Z, f))
    assert (jj * 2.0).evaluate(V).norm() < 1e-8


def test_lj_on_ordinary_directions(conj_model, rng):
    rep = bd.cartan_check(conj_model, [conj_model.sample_Z(rng, "g") for _ in range(3)],
                          bd.sample_fields(conj_model, rng),
                          [conj_model.sample_point(rng) for _ in range(3)])
    assert rep["lj"] < 1e-5


def test_cartan_check_needs_samples(conj_model):
    with pytest.raises(ValueError):
        bd.cartan_check(conj_model, [], [], [])


def test_flipped_contraction_breaks_cartan(rng):
    B = bd.BundleModel(make_fixture("CONJ(SO3)"), flip_contraction=True)
    worst = 0.0
    for i in range(4):
        f = bd.sample_fields(B, rng)[2]
        res = bd.cartan_residuals(B.sample_Z(rng), B.sample_Z(rng), f, B.sample_point(rng))
        worst = max(worst, res["lj"], res["ll"])
    assert worst > 1e-4


# --- basic subalgebra and restriction ------------------------------------------------------
def test_basic_discrimination(conj_model, rng):
    Zs = [conj_model.sample_Z(rng, k) for k in ("g", "e", "mixed")]
    pts = [conj_model.sample_point(rng) for _ in range(3)]
    for p in bd.pullback_fields(conj_model, rng):
        ok, r = bd.basic_check(p, conj_model, Zs, pts)
        assert ok and r < 1e-6
    const = bd.FormField.make(conj_model, bd.const_coeff(3.0))
    assert bd.basic_residual(const, Zs, pts) < 1e-12
    entry = bd.FormField.make(conj_model, bd.a_entry_coeff(0, 1))
    assert bd.basic_residual(entry, Zs, pts) > 0.1
    for w in bd.witness_fields(conj_model, rng):
        assert not bd.basic_check(w, conj_model, Zs, pts)[0]


@pytest.mark.parametrize("name", FIXTURES)
def test_restriction_is_a_morphism(name):
    B = bd.BundleModel(make_fixture(name))
    rep = bd.restriction_morphism_check(B, 6, 1)
    assert set(rep) == {"restrict_d", "restrict_j", "restrict_l"}
    assert max(rep.values()) < 1e-5


def test_restriction_rejects_e_directions(conj_model, rng):
    B0 = conj_model.object_model()
    assert B0.objects and B0.e_dim == 0
    Z = conj_model.sample_Z(rng, "mixed")
    f = bd.sample_fields(conj_model, rng)[0]
    with pytest.raises(PreconditionError):
        bd.restriction_residuals(conj_model, B0, Z, f, B0.sample_point(rng))


def test_fields_and_points_must_share_a_space(conj_model, rng):
    B0 = conj_model.object_model()
    f = bd.sample_fields(conj_model, rng)[0]
    with pytest.raises(ConfigurationError):
        f.evaluate(B0.sample_point(rng))


def test_restriction_drops_shift_generators(conj_model, rng):
    B0 = conj_model.object_model()
    f = bd.FormField.make(conj_model, bd.ell_coeff(0), ("h1",)) + \
        bd.FormField.make(conj_model, bd.a_entry_coeff(0, 0), ("w2",))
    r = bd.restrict(f, B0).evaluate(B0.sample_point(rng))
    assert set(B0.fiber_names) == {"dx1", "dx2", "w1", "w2", "w3"}
    assert len(r.terms) == 1
