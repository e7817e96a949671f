"""Check suites run by the harness.

Each suite is a function (fixture name, settings) -> list of (check name,
max residual, tolerance).  Names are prefixed with the suite name so reports
group naturally.  Residual-type checks pass when residual <= tolerance;
discrimination checks report threshold / observed against tolerance 1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bundle as bd
from . import derived as dv
from .crossed_module import (check_algebra_axioms, check_group_axioms, check_morphism,
                             corrupt_mu, covering_morphism, differentiate_module,
                             differentiate_morphism, exact_algebra_module, identity_suite,
                             inclusion_morphism, make_fixture, sample_rng, variational_suite)
from .matrix_lie import max_abs, mexp

SUITES = ("axioms", "identities", "variational", "derived", "graded", "bundle", "gauge")
CONVERGENCE_JERK = 1e4
CONVERGENCE_FACTOR = 10.0
WITNESS_FLOOR = 0.1


@dataclass(frozen=True)
class Settings:
    samples: int
    seed: int
    fd_step: float
    tol_alg: float
    tol_fd: float
    negative_control: bool = False


def _prefixed(suite, rep, tol):
    return [(f"{suite}.{k}", v, tol) for k, v in rep.items()]


def _ratio(threshold, observed):
    """threshold / observed, guarded for zero."""
    return threshold / observed if observed > 0 else float("inf")


def _morphisms(M):
    out = [inclusion_morphism(M)]
    if M.name == "COVER":
        out.append(covering_morphism("COVER"))
    if M.name == "CONJ(SU2)":
        out.append(covering_morphism("CONJ(SU2)"))
    return out


# --- crossed module suites ----------------------------------------------------------------
def suite_axioms(fixture, s: Settings):
    M = make_fixture(fixture)
    Mg = corrupt_mu(M) if s.negative_control else M
    out = _prefixed("axioms.group", check_group_axioms(Mg, s.samples, s.seed), s.tol_alg)
    out += _prefixed("axioms.algebra_exact",
                     check_algebra_axioms(exact_algebra_module(M), s.samples, s.seed), s.tol_alg)
    alg_fd, _ = differentiate_module(M, s.fd_step, "fd")
    out += _prefixed("axioms.algebra_fd", check_algebra_axioms(alg_fd, s.samples, s.seed),
                     s.tol_fd)
    for beta in _morphisms(M):
        tag = beta.name.split("[")[0]
        out += _prefixed(f"axioms.morphism_{tag}", check_morphism(beta, s.samples, s.seed),
                         s.tol_alg)
        out += _prefixed(f"axioms.dmorphism_{tag}",
                         check_morphism(differentiate_morphism(beta, s.fd_step, "fd"),
                                        s.samples, s.seed), s.tol_fd)
    return out


def suite_identities(fixture, s: Settings):
    M = make_fixture(fixture)
    out = _prefixed("identities.fd", identity_suite(M, s.samples, s.seed, step=s.fd_step),
                    s.tol_fd)
    out += _prefixed("identities.exact", identity_suite(M, s.samples, s.seed, maps=M.exact),
                     s.tol_alg)
    return out


def suite_variational(fixture, s: Settings):
    M = make_fixture(fixture)
    out = _prefixed("variational", variational_suite(M, s.samples, s.seed, step=s.fd_step),
                    s.tol_fd)
    coarse = variational_suite(M, s.samples, s.seed, step=s.fd_step,
                               curve_jerk=CONVERGENCE_JERK)
    fine = variational_suite(M, s.samples, s.seed, step=s.fd_step / 10,
                             curve_jerk=CONVERGENCE_JERK)
    for k in coarse:
        decay = coarse[k] / fine[k] if fine[k] > 0 else float("inf")
        out.append((f"variational.convergence_{k}", _ratio(CONVERGENCE_FACTOR, decay), 1.0))
    return out


# --- derived suites -------------------------------------------------------------------------
def _curve(D, rng):
    M = D.M
    x0, x1 = M.G.algebra.sample(rng), M.G.algebra.sample(rng)
    E0, E1, E2 = (M.E.algebra.sample(rng) for _ in range(3))
    g0 = M.G.sample(rng)
    l0 = M.lift(g0)
    lam = M.realization.lift_algebra

    def value(t):
        w = t * x0 + t * t * x1
        return dv.DerivedGroupElement(D, g0 @ mexp(w), E0 + t * E1 + t * t * E2, "bar",
                                      l0 @ mexp(lam(w)))

    return dv.DerivedCurve([0.0], value)


def suite_derived(fixture, s: Settings):
    M = make_fixture(fixture)
    D = dv.DerivedModule(M, drop_adjoint_dmd=s.negative_control)
    rep_alg, rep_fd = {}, {}

    def up(rep, k, v):
        rep[k] = max(rep.get(k, 0.0), float(v))

    ident = D.identity()
    for i in range(s.samples):
        rng = sample_rng(s.seed, f"derived/{M.name}", i)
        P, Q, R = D.sample_group(rng), D.sample_group(rng), D.sample_group(rng)
        Y, W, X = D.sample_algebra(rng), D.sample_algebra(rng), D.sample_algebra(rng)
        r = dv.residual
        up(rep_alg, "dmul_oracle", r(dv.dmul(P, Q), dv.oracle_dmul(P, Q)))
        up(rep_alg, "dinv_oracle", r(dv.dinv(P), dv.oracle_dinv(P)))
        up(rep_alg, "dbracket_oracle", r(dv.dbracket(Y, W), dv.oracle_dbracket(Y, W)))
        up(rep_fd, "adjoint_oracle",
           r(dv.d_adjoint(P, Y), dv.oracle_d_adjoint(P, Y, step=s.fd_step)))
        up(rep_fd, "adjoint_inverse_oracle",
           r(dv.d_adjoint(P, Y, True), dv.oracle_d_adjoint(P, Y, True, step=s.fd_step)))
        curve = _curve(D, rng)
        t0 = float(rng.uniform(-0.5, 0.5))
        for side in ("left", "right"):
            up(rep_fd, f"mc_{side}_oracle",
               r(dv.mc_form(curve, t0, side, s.fd_step),
                 dv.oracle_mc_form(curve, t0, side, s.fd_step)))
        # group and algebra axioms
        up(rep_alg, "associativity", r(dv.dmul(dv.dmul(P, Q), R), dv.dmul(P, dv.dmul(Q, R))))
        up(rep_alg, "inverse", max(r(dv.dmul(P, dv.dinv(P)), ident),
                                   r(dv.dmul(dv.dinv(P), P), ident)))
        up(rep_alg, "identity", r(dv.dmul(ident, P), P))
        up(rep_alg, "antisymmetry", r(dv.dbracket(Y, W), dv.dbracket(W, Y) * -1.0))
        jac = (dv.dbracket(Y, dv.dbracket(W, X)) + dv.dbracket(W, dv.dbracket(X, Y))
               + dv.dbracket(X, dv.dbracket(Y, W)))
        up(rep_alg, "jacobi", r(jac, jac * 0.0))
        up(rep_fd, "adjoint_action",
           r(dv.d_adjoint(dv.dmul(P, Q), Y), dv.d_adjoint(P, dv.d_adjoint(Q, Y))))
        up(rep_fd, "adjoint_automorphism",
           r(dv.d_adjoint(P, dv.dbracket(Y, W)),
             dv.dbracket(dv.d_adjoint(P, Y), dv.d_adjoint(P, W))))
        up(rep_fd, "adjoint_inverse",
           r(dv.d_adjoint(P, dv.d_adjoint(P, Y, True)), Y))
        # cross modality
        cP, cQ = dv.cross_mode(P), dv.cross_mode(Q)
        up(rep_alg, "cross_homomorphism", r(dv.cross_mode(dv.dmul(P, Q)), dv.dmul(cP, cQ)))
        up(rep_alg, "cross_roundtrip", max(r(dv.cross_mode(cP), P),
                                           r(dv.cross_mode(dv.cross_mode(Y)), Y)))
        up(rep_fd, "cross_differential",
           r(dv.lie_differential(dv.cross_mode, Y, s.fd_step), dv.cross_mode(Y)))
    for beta in _morphisms(M):
        tag = beta.name.split("[")[0]
        src = dv.DerivedModule(beta.source)
        tgt = dv.DerivedModule(beta.target)
        for i in range(s.samples):
            rng = sample_rng(s.seed, f"derived_morphism/{beta.name}", i)
            P, Q = src.sample_group(rng), src.sample_group(rng)
            Y = src.sample_algebra(rng)
            img = lambda x: dv.derived_morphism(beta, x, tgt, s.fd_step)
            up(rep_fd, f"morphism_{tag}_homomorphism",
               dv.residual(img(dv.dmul(P, Q)), dv.dmul(img(P), img(Q))))
            up(rep_fd, f"morphism_{tag}_differential",
               dv.residual(dv.lie_differential(img, Y, s.fd_step), img(Y)))
    return _prefixed("derived", rep_alg, s.tol_alg) + _prefixed("derived", rep_fd, s.tol_fd)


DEGREES = (-1, 0, 1, 2)


def suite_graded(fixture, s: Settings):
    M = make_fixture(fixture)
    D = dv.DerivedModule(M)
    rep_alg, rep_fd = {}, {}

    def up(rep, k, v):
        rep[k] = max(rep.get(k, 0.0), float(v))

    for i in range(s.samples):
        rng = sample_rng(s.seed, f"graded/{M.name}", i)
        p, q, r_ = (DEGREES[int(k)] for k in rng.integers(0, len(DEGREES), 3))
        S, T, U = dv.sample_graded(D, rng, p), dv.sample_graded(D, rng, q), \
            dv.sample_graded(D, rng, r_)
        br, res = dv.graded_bracket, dv.residual
        up(rep_alg, "bracket_oracle", res(br(S, T), dv.oracle_graded_bracket(S, T)))
        up(rep_alg, "antisymmetry", res(br(S, T), br(T, S) * -((-1) ** (p * q))))
        jac = (br(S, br(T, U)) * ((-1) ** (p * r_)) + br(T, br(U, S)) * ((-1) ** (q * p))
               + br(U, br(S, T)) * ((-1) ** (r_ * q)))
        up(rep_alg, "jacobi", max(max_abs(jac.j), max_abs(jac.J)))
        dt = dv.coboundary_dt
        dd = dt(dt(S))
        up(rep_alg, "dt_squared", max(max_abs(dd.j), max_abs(dd.J)))
        up(rep_alg, "dt_leibniz",
           res(dt(br(S, T)), br(dt(S), T) + br(S, dt(T)) * ((-1) ** p)))
        if M.name.startswith("LIN"):
            up(rep_alg, "dt_vanishes_lin", max(max_abs(dt(S).j), max_abs(dt(S).J)))
        field = dv.TransportField.sample(D, rng)
        x = rng.uniform(-1.0, 1.0, field.m)
        for side in ("left", "right"):
            for der, rep, tag in ((dv.Derivation("odd_partial", int(rng.integers(field.k))),
                                   rep_alg, "odd"),
                                  (dv.Derivation("odd_times_even", int(rng.integers(field.k)),
                                                 int(rng.integers(field.m))), rep_fd, "even")):
                up(rep, f"transport_{tag}_{side}_oracle",
                   res(dv.derivation_transport(field, der, x, side, s.fd_step),
                       dv.oracle_derivation_transport(field, der, x, side, s.fd_step)))
            up(rep_alg, f"dtau_{side}_oracle",
               res(dv.dtau_transport(field, x, side), dv.oracle_dtau_transport(field, x, side)))
    return _prefixed("graded", rep_alg, s.tol_alg) + _prefixed("graded", rep_fd, s.tol_fd)


# --- bundle and gauge ---------------------------------------------------------------------------
def _samples_for(model, rng):
    fields = bd.sample_fields(model, rng) + bd.pullback_fields(model, rng)
    return fields


def suite_bundle(fixture, s: Settings):
    M = make_fixture(fixture)
    B = bd.BundleModel(M, flip_contraction=s.negative_control)
    D = B.derived
    rep_alg, rep_fd = {}, {}

    def up(rep, k, v):
        rep[k] = max(rep.get(k, 0.0), float(v))

    n_struct = 2 * s.samples
    for i in range(n_struct):
        rng = sample_rng(s.seed, f"bundle_structure/{M.name}", i)
        V = B.sample_point(rng)
        Q, Q2 = D.sample_group(rng), D.sample_group(rng)
        RV = bd.right_action(V, Q)
        up(rep_alg, "pi_source", max_abs(bd.project(V) - bd.project(bd.source_map(V))))
        up(rep_alg, "pi_action", max_abs(bd.project(RV) - bd.project(V)))
        lhs = bd.right_action(RV, Q2)
        rhs = bd.right_action(V, dv.dmul(Q, Q2))
        up(rep_alg, "action_axiom", max(max_abs(lhs.a - rhs.a), max_abs(lhs.L - rhs.L)))
        up(rep_alg, "trivialization_equivariance",
           dv.residual(bd.trivialize(RV)[1], dv.dmul(bd.trivialize(V)[1], Q)))
    # Cartan relations, cycling through g-, e- and mixed directions
    kinds = ("mixed", "g", "e")
    n_cartan = 2 * s.samples
    for i in range(n_cartan):
        rng = sample_rng(s.seed, f"bundle_cartan/{M.name}", i)
        fields = _samples_for(B, rng)
        f = fields[i % len(fields)]
        Z = B.sample_Z(rng, kinds[i % 3])
        W = B.sample_Z(rng, kinds[(i // 3) % 3])
        V = B.sample_point(rng)
        for k, v in bd.cartan_residuals(Z, W, f, V).items():
            up(rep_fd, f"cartan_{k}", v)
    # [l_Z, j_W] = j_[Z,W] with both Z, W in the Abelian e-part, explicitly
    for i in range(max(1, s.samples // 5)):
        rng = sample_rng(s.seed, f"bundle_cartan_e/{M.name}", i)
        f = bd.sample_fields(B, rng)[1 + i % 2]
        Z, W = B.sample_Z(rng, "e"), B.sample_Z(rng, "e")
        V = B.sample_point(rng)
        up(rep_fd, "cartan_lj_pure_e", bd.cartan_residuals(Z, W, f, V)["lj"])
    # basic subalgebra discrimination
    rng = sample_rng(s.seed, f"bundle_basic/{M.name}", 0)
    Zs = [B.sample_Z(rng, k) for k in kinds]
    pts = [B.sample_point(rng) for _ in range(3)]
    pull = max(bd.basic_residual(f, Zs, pts) for f in bd.pullback_fields(B, rng))
    up(rep_fd, "basic_pullbacks", pull)
    witness = min(bd.basic_residual(f, Zs, pts) for f in bd.witness_fields(B, rng))
    out = _prefixed("bundle", rep_alg, s.tol_alg) + _prefixed("bundle", rep_fd, s.tol_fd)
    out.append(("bundle.basic_witnesses", _ratio(WITNESS_FLOOR, witness), 1.0))
    out += _prefixed("bundle.restriction", bd.restriction_morphism_check(B, s.samples, s.seed),
                     s.tol_fd)
    # vertical field against right translation
    rep_v = {}
    for i in range(s.samples):
        rng = sample_rng(s.seed, f"bundle_vertical/{M.name}", i)
        V = B.sample_point(rng)
        n = M.G.size
        r, c = (int(v) for v in rng.integers(0, n, 2))
        Zu = B.sample_Z(rng, "g")
        f = bd.FormField.make(B, bd.a_entry_coeff(r, c))
        val = bd.vertical_field(Zu, f, V, s.fd_step).body
        rep_v["vertical_g"] = max(rep_v.get("vertical_g", 0.0), abs(val - (V.a @ Zu.u)[r, c]))
        if B.e_dim:
            k = int(rng.integers(0, B.e_dim))
            ZU = B.sample_Z(rng, "e")
            f = bd.FormField.make(B, bd.ell_coeff(k))
            val = bd.vertical_field(ZU, f, V, s.fd_step).body
            want = B.e_coords(M.exact.mu_dot(V.a, ZU.U))[k]
            rep_v["vertical_e"] = max(rep_v.get("vertical_e", 0.0), abs(val - want))
    out += [(f"bundle.{k}", v, s.tol_fd if k == "vertical_g" else s.tol_alg)
            for k, v in rep_v.items()]
    return out


def suite_gauge(fixture, s: Settings):
    M = make_fixture(fixture)
    rep = {}
    for i in range(s.samples):
        rng = sample_rng(s.seed, f"gauge/{M.name}", i)
        c0, c1 = M.G.algebra.sample(rng), M.G.algebra.sample(rng)
        sigma = lambda m: mexp(c0 + m[0] * c1)
        m = rng.uniform(0.0, 1.0, 2)
        A, B_ = M.G.sample(rng), M.G.sample(rng)
        for kind in ("object", "morphism"):
            H = lambda g: bd.local_gauge(sigma, m, g, kind, M)
            rep[f"{kind}_equivariance"] = max(rep.get(f"{kind}_equivariance", 0.0),
                                              max_abs(H(A @ B_) - np.linalg.inv(B_) @ H(A) @ B_))
            rep[f"{kind}_identity"] = max(rep.get(f"{kind}_identity", 0.0),
                                          max_abs(H(M.G.identity()) - sigma(m)))
    return _prefixed("gauge", rep, s.tol_alg)


SUITE_FUNCS = {
    "axioms": suite_axioms,
    "identities": suite_identities,
    "variational": suite_variational,
    "derived": suite_derived,
    "graded": suite_graded,
    "bundle": suite_bundle,
    "gauge": suite_gauge,
}
