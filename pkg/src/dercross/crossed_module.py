"""Lie group and Lie algebra crossed modules, morphisms and differentiation.

A group crossed module is (E, G, tau, mu) with tau: E -> G and mu: G x E -> E.
Structure maps take plain float matrices; mu(a, .) and tau also accept graded
matrices in the E slot, which is how the E-direction derivatives are taken
exactly with an auxiliary odd generator.

Fixtures
--------
CONJ(G)   E = G, tau = id, mu = conjugation.
LIN(n)    E = R^n as unipotent blocks, G = GL(n), tau = 1, mu = natural action.
COVER     E = SU(2) as real 4x4 quaternion matrices, G = SO(3), tau the double
          cover, mu conjugation by the lift with nonnegative scalar part.
"""
from __future__ import annotations

import re
import zlib
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError
from .graded import GradedMatrix
from .matrix_lie import (MatrixAlgebra, MatrixGroup, commutator, fd_differential, gl, hat,
                         max_abs, mexp, minv, quat_left, quat_to_rotation, rotation_to_quat,
                         so3, su2, su2_from_vector, su2_to_vector, trivial_group, vector_group,
                         vee)

DEFAULT_STEP = 1e-5


def sample_rng(seed, name, index):
    """Independent generator for one (check, sample) pair."""
    key = zlib.crc32(name.encode())
    return np.random.default_rng(np.random.SeedSequence([int(seed), key, int(index)]))


def _blockdiag(p, q):
    """Block diagonal of two plain or graded square matrices."""
    n, m = p.shape[0], q.shape[0]

    def top(a):
        out = np.zeros((n + m, n + m))
        out[:n, :n] = a
        return out

    def bottom(a):
        out = np.zeros((n + m, n + m))
        out[n:, n:] = a
        return out

    def place(x, fn):
        return x.map_linear(fn) if isinstance(x, GradedMatrix) else fn(np.asarray(x, dtype=float))

    return place(p, top) + place(q, bottom)


def _lin(fn, x):
    return x.map_linear(fn) if isinstance(x, GradedMatrix) else fn(np.asarray(x, dtype=float))


# --- semidirect product realizations ------------------------------------------
class DiagonalRealization:
    """E x| G and e x| g inside block-diagonal matrices.

    (A, a~) -> diag(A a~, proj(a~)) where a~ is a lift of a to a group acting on
    E by conjugation; (X, x) -> diag(X + lam(x), x).  For CONJ both the lift and
    lam are identities; for COVER they go to SU(2).
    """

    def __init__(self, lift_group, lift_algebra, project, k):
        self.lift_group = lift_group
        self.lift_algebra = lift_algebra
        self.project = project
        self.k = k

    def group(self, A, lifted):
        return _blockdiag(A @ lifted, self.project(lifted))

    def split_group(self, m, lifted):
        k = self.k
        return m[:k, :k] @ minv(lifted), m[k:, k:]

    def algebra(self, X, x):
        return _blockdiag(X + _lin(self.lift_algebra, x), x)

    def split_algebra(self, m):
        k = self.k
        x = m[k:, k:]
        return m[:k, :k] - _lin(self.lift_algebra, x), x


class AffineRealization:
    """E x| G for LIN(n) as the affine group [[a, v], [0, 1]]."""

    def __init__(self, n):
        self.n = n

    def lift_group(self, a):
        return a

    def lift_algebra(self, x):
        return x

    def _pad(self, a, fill):
        n = self.n

        def fn(m):
            out = np.zeros((n + 1, n + 1))
            out[:n, :n] = m
            return out

        out = _lin(fn, a)
        if fill:
            e = np.zeros((n + 1, n + 1))
            e[n, n] = 1.0
            out = out + e
        return out

    def group(self, A, lifted):
        return A @ self._pad(lifted, True)

    def split_group(self, m, lifted):
        n = self.n
        a = m[:n, :n]
        return m @ minv(self._pad(lifted, True)), a

    def algebra(self, X, x):
        return X + self._pad(x, False)

    def split_algebra(self, m):
        n = self.n
        x = m[:n, :n]
        return m - self._pad(x, False), x


# --- module types --------------------------------------------------------------
@dataclass(eq=False)
class DifferentiatedMaps:
    """tau_dot: e -> g; mu_dot: G x e -> e; dot_mu: g x E -> e; dot_mu_dot: g x e -> e."""

    tau_dot: Callable
    mu_dot: Callable
    dot_mu: Callable
    dot_mu_dot: Callable
    method: str = "exact"


@dataclass(eq=False)
class GroupCrossedModule:
    E: MatrixGroup
    G: MatrixGroup
    tau: Callable
    mu: Callable
    name: str
    exact: Optional[DifferentiatedMaps] = None
    realization: object = None
    params: dict = field(default_factory=dict)

    def lift(self, a):
        return self.realization.lift_group(a)


@dataclass(eq=False)
class AlgebraCrossedModule:
    e: MatrixAlgebra
    g: MatrixAlgebra
    t: Callable
    m: Callable
    name: str = ""


@dataclass(eq=False)
class CrossedModuleMorphism:
    """beta = (Phi, phi): M' -> M, or (H, h): m' -> m for algebra modules."""

    source: object
    target: object
    Phi: Callable
    phi: Callable
    name: str = ""
    Phi_dot: Optional[Callable] = None
    phi_dot: Optional[Callable] = None

    @property
    def is_algebra(self):
        return isinstance(self.source, AlgebraCrossedModule)


# --- fixtures ---------------------------------------------------------------------
def _conj(group: MatrixGroup, name):
    def mu(a, A):
        return a @ A @ minv(a)

    exact = DifferentiatedMaps(
        tau_dot=lambda X: np.array(X, dtype=float),
        mu_dot=lambda a, X: a @ X @ np.linalg.inv(a),
        dot_mu=lambda x, A: x - A @ x @ np.linalg.inv(A),
        dot_mu_dot=lambda x, X: commutator(x, X),
    )
    real = DiagonalRealization(lambda a: a, lambda x: x, lambda a: a, group.size)
    return GroupCrossedModule(group, group, lambda A: A, mu, name, exact, real)


def _lin_fixture(n):
    E, G = vector_group(n), gl(n)

    def pad(a):
        out = np.eye(n + 1)
        out[:n, :n] = a
        return out

    def pad0(x):
        out = np.zeros((n + 1, n + 1))
        out[:n, :n] = x
        return out

    def mu(a, A):
        return pad(a) @ A @ pad(np.linalg.inv(a))

    def tau(A):
        return np.eye(n)

    exact = DifferentiatedMaps(
        tau_dot=lambda X: np.zeros((n, n)),
        mu_dot=lambda a, X: pad(a) @ X @ pad(np.linalg.inv(a)),
        dot_mu=lambda x, A: pad0(x) - A @ pad0(x) @ np.linalg.inv(A),
        dot_mu_dot=lambda x, X: commutator(pad0(x), X),
    )
    mod = GroupCrossedModule(E, G, tau, mu, f"LIN({n})", exact, _lin_real(n), {"n": n})
    return mod


def _lin_real(n):
    return AffineRealization(n)


def _lift_so3(x):
    """su(2) element projecting to x under the cover differential."""
    return su2_from_vector(vee(x) / 2.0)


def _cover():
    E, G = su2(), so3()

    def lift(r):
        return quat_left(rotation_to_quat(r))

    def mu(r, A):
        q = lift(r)
        return q @ A @ q.T

    def lam(x):
        return _lift_so3(np.asarray(x, dtype=float))

    exact = DifferentiatedMaps(
        tau_dot=lambda X: hat(2.0 * su2_to_vector(X)),
        mu_dot=lambda r, X: lift(r) @ X @ lift(r).T,
        dot_mu=lambda x, A: lam(x) - A @ lam(x) @ np.linalg.inv(A),
        dot_mu_dot=lambda x, X: commutator(lam(x), X),
    )
    real = DiagonalRealization(lift, lam, quat_to_rotation, 4)
    return GroupCrossedModule(E, G, quat_to_rotation, mu, "COVER", exact, real)


FIXTURE_KINDS = ("CONJ", "LIN", "COVER")
_NAME = re.compile(r"^\s*(CONJ|LIN|COVER)\s*(?:\(\s*([A-Za-z0-9]*)\s*\))?\s*$", re.I)


def make_fixture(kind, params=None) -> GroupCrossedModule:
    """Build a named fixture.

    kind may carry its parameter inline: "CONJ(SO3)", "CONJ(SU2)", "LIN(3)".
    """
    params = dict(params or {})
    m = _NAME.match(str(kind))
    if not m:
        raise ConfigurationError(f"unknown fixture {kind!r}")
    kind, arg = m.group(1).upper(), m.group(2)
    if kind == "CONJ":
        gname = (arg or params.get("group", "SO3")).upper()
        if gname == "SO3":
            return _conj(so3(), "CONJ(SO3)")
        if gname == "SU2":
            return _conj(su2(), "CONJ(SU2)")
        raise ConfigurationError(f"CONJ supports SO3 or SU2, not {gname!r}")
    if kind == "LIN":
        n = arg or params.get("n", 3)
        try:
            n = int(n)
        except ValueError:
            raise ConfigurationError(f"LIN dimension must be an integer, got {n!r}") from None
        if n < 1:
            raise ConfigurationError("LIN dimension must be at least 1")
        return _lin_fixture(n)
    if arg:
        raise ConfigurationError("COVER takes no parameter")
    return _cover()


def inclusion_submodule(M: GroupCrossedModule) -> GroupCrossedModule:
    """M0 = (1_E, G) with the restricted maps."""
    E0 = trivial_group(M.E.size)
    zeros = np.zeros((M.E.size, M.E.size))
    exact = DifferentiatedMaps(
        tau_dot=lambda X: np.zeros((M.G.size, M.G.size)),
        mu_dot=lambda a, X: zeros.copy(),
        dot_mu=lambda x, A: zeros.copy(),
        dot_mu_dot=lambda x, X: zeros.copy(),
    )
    return GroupCrossedModule(E0, M.G, M.tau, M.mu, f"{M.name}_0", exact, M.realization)


# --- morphisms ---------------------------------------------------------------------
def identity_morphism(M):
    return CrossedModuleMorphism(M, M, lambda A: A, lambda a: a, f"id[{M.name}]",
                                 Phi_dot=lambda X: X, phi_dot=lambda x: x)


def inclusion_morphism(M):
    M0 = inclusion_submodule(M)
    return CrossedModuleMorphism(M0, M, lambda A: A, lambda a: a, f"incl[{M.name}]",
                                 Phi_dot=lambda X: np.zeros_like(X),
                                 phi_dot=lambda x: x)


def covering_morphism(source="COVER"):
    """The double cover onto CONJ(SO3).

    From COVER: Phi = cover, phi = id.  From CONJ(SU2): Phi = phi = cover.
    """
    target = make_fixture("CONJ(SO3)")
    tdot = lambda X: hat(2.0 * su2_to_vector(X))
    if str(source).upper() == "COVER":
        return CrossedModuleMorphism(make_fixture("COVER"), target, quat_to_rotation,
                                     lambda a: a, "cover[COVER->CONJ(SO3)]",
                                     Phi_dot=tdot, phi_dot=lambda x: x)
    return CrossedModuleMorphism(make_fixture("CONJ(SU2)"), target, quat_to_rotation,
                                 quat_to_rotation, "cover[CONJ(SU2)->CONJ(SO3)]",
                                 Phi_dot=tdot, phi_dot=tdot)


# --- differentiation -----------------------------------------------------------------
def fd_maps(M: GroupCrossedModule, step=DEFAULT_STEP, richardson=False) -> DifferentiatedMaps:
    """Differentiated structure maps built from fd_differential.

    E-slot directions use the exact auxiliary-generator path; G-slot
    directions are central differences.
    """
    eE, eG = M.E.identity(), M.G.identity()

    def tau_dot(X):
        return fd_differential(M.tau, eE, X, step, odd=True)

    def mu_dot(a, X):
        return fd_differential(lambda A: M.mu(a, A), eE, X, step, odd=True)

    def dot_mu(x, A):
        return fd_differential(lambda c: M.mu(c, A), eG, x, step, richardson=richardson)

    def dot_mu_dot(x, X):
        return fd_differential(lambda c: mu_dot(c, X), eG, x, step, target="algebra",
                               richardson=richardson)

    return DifferentiatedMaps(tau_dot, mu_dot, dot_mu, dot_mu_dot, method="fd")


def differentiate_module(M: GroupCrossedModule, step=DEFAULT_STEP, method="fd",
                         richardson=False):
    """The Lie algebra crossed module (e, g, tau_dot, dot_mu_dot) of M."""
    if method == "exact":
        if M.exact is None:
            raise ConfigurationError(f"{M.name} has no closed-form differentials")
        maps = M.exact
    elif method == "fd":
        maps = fd_maps(M, step, richardson)
    else:
        raise ValueError(f"unknown method {method!r}")
    alg = AlgebraCrossedModule(M.E.algebra, M.G.algebra, maps.tau_dot, maps.dot_mu_dot,
                               f"d{M.name}")
    return alg, maps


def exact_algebra_module(M):
    return differentiate_module(M, method="exact")[0]


# --- checks -------------------------------------------------------------------------
def _maxin(report, key, value):
    report[key] = max(report.get(key, 0.0), float(value))


def check_group_axioms(M: GroupCrossedModule, samples=50, seed=0):
    """Max residuals of tau multiplicativity, equivariance and Peiffer."""
    if samples < 1:
        raise ValueError("samples must be at least 1")
    rep = {"tau_morphism": 0.0, "equivariance": 0.0, "peiffer": 0.0}
    for i in range(samples):
        rng = sample_rng(seed, f"group_axioms/{M.name}", i)
        a = M.G.sample(rng)
        A, B = M.E.sample(rng), M.E.sample(rng)
        _maxin(rep, "tau_morphism", max_abs(M.tau(A @ B) - M.tau(A) @ M.tau(B)))
        _maxin(rep, "equivariance",
               max_abs(M.tau(M.mu(a, A)) - a @ M.tau(A) @ np.linalg.inv(a)))
        _maxin(rep, "peiffer", max_abs(M.mu(M.tau(A), B) - A @ B @ np.linalg.inv(A)))
    return rep


def check_algebra_axioms(m: AlgebraCrossedModule, samples=50, seed=0):
    if samples < 1:
        raise ValueError("samples must be at least 1")
    rep = {"t_morphism": 0.0, "equivariance": 0.0, "peiffer": 0.0}
    for i in range(samples):
        rng = sample_rng(seed, f"algebra_axioms/{m.name}", i)
        u = m.g.sample(rng)
        U, V = m.e.sample(rng), m.e.sample(rng)
        _maxin(rep, "t_morphism", max_abs(m.t(commutator(U, V)) - commutator(m.t(U), m.t(V))))
        _maxin(rep, "equivariance", max_abs(m.t(m.m(u, U)) - commutator(u, m.t(U))))
        _maxin(rep, "peiffer", max_abs(m.m(m.t(U), V) - commutator(U, V)))
    return rep


def check_morphism(beta: CrossedModuleMorphism, samples=50, seed=0):
    """Residuals of the two defining relations of a morphism."""
    src, tgt = beta.source, beta.target
    rep = {"tau_compat": 0.0, "action_compat": 0.0}
    for i in range(samples):
        rng = sample_rng(seed, f"morphism/{beta.name}", i)
        if beta.is_algebra:
            x = src.g.sample(rng)
            X = src.e.sample(rng)
            _maxin(rep, "tau_compat", max_abs(tgt.t(beta.Phi(X)) - beta.phi(src.t(X))))
            _maxin(rep, "action_compat",
                   max_abs(beta.Phi(src.m(x, X)) - tgt.m(beta.phi(x), beta.Phi(X))))
        else:
            a = src.G.sample(rng)
            A = src.E.sample(rng)
            _maxin(rep, "tau_compat", max_abs(tgt.tau(beta.Phi(A)) - beta.phi(src.tau(A))))
            _maxin(rep, "action_compat",
                   max_abs(beta.Phi(src.mu(a, A)) - tgt.mu(beta.phi(a), beta.Phi(A))))
    return rep


def differentiate_morphism(beta: CrossedModuleMorphism, step=DEFAULT_STEP, method="exact"):
    """(H, h) = (Phi_dot, phi_dot) between the differentiated modules."""
    src_alg = differentiate_module(beta.source, step, "exact" if method == "exact" else "fd")[0]
    tgt_alg = differentiate_module(beta.target, step, "exact" if method == "exact" else "fd")[0]
    if method == "exact" and beta.Phi_dot is not None:
        H, h = beta.Phi_dot, beta.phi_dot
    else:
        eE, eG = beta.source.E.identity(), beta.source.G.identity()

        def H(X):
            return fd_differential(beta.Phi, eE, X, step, odd=True)

        def h(x):
            return fd_differential(beta.phi, eG, x, step)

    return CrossedModuleMorphism(src_alg, tgt_alg, H, h, f"d{beta.name}")


def _samples(M, rng):
    a = M.G.sample(rng)
    A, B = M.E.sample(rng), M.E.sample(rng)
    x, y = M.G.algebra.sample(rng), M.G.algebra.sample(rng)
    X = M.E.algebra.sample(rng)
    return a, A, B, x, y, X


IDENTITIES = ("tdot_dotmu", "dotmu_tdot", "dotmu_bracket", "dotmu_product", "dotmu_equivariance",
              "adjoint_dotmudot")


def identity_suite(M: GroupCrossedModule, samples=50, seed=0, maps=None, step=DEFAULT_STEP):
    """Max residual of each algebraic identity between the differentiated maps.

    tdot_dotmu          tau_dot(dot_mu(x, A)) = x - Ad tau(A) x
    dotmu_tdot          dot_mu(tau_dot X, A) = X - Ad A X
    dotmu_bracket       dot_mu([x, y], A) = dot_mu_dot(x, dot_mu(y, A))
                            - dot_mu_dot(y, dot_mu(x, A)) - [dot_mu(x, A), dot_mu(y, A)]
    dotmu_product       dot_mu(x, AB) = dot_mu(x, A) + Ad A dot_mu(x, B)
    dotmu_equivariance  dot_mu(Ad a x, mu(a, A)) = mu_dot(a, dot_mu(x, A))
    adjoint_dotmudot    Ad A dot_mu_dot(x, X) = dot_mu_dot(x, Ad A X) - [dot_mu(x, A), Ad A X]
    """
    if maps is None:
        maps = fd_maps(M, step)
    td, md, dm, dmd = maps.tau_dot, maps.mu_dot, maps.dot_mu, maps.dot_mu_dot
    rep = {k: 0.0 for k in IDENTITIES}
    for i in range(samples):
        rng = sample_rng(seed, f"identities/{M.name}", i)
        a, A, B, x, y, X = _samples(M, rng)
        Ai = np.linalg.inv(A)
        tA = M.tau(A)
        dmxA, dmyA = dm(x, A), dm(y, A)
        AdAX = A @ X @ Ai
        _maxin(rep, "tdot_dotmu", max_abs(td(dmxA) - (x - tA @ x @ np.linalg.inv(tA))))
        _maxin(rep, "dotmu_tdot", max_abs(dm(td(X), A) - (X - AdAX)))
        _maxin(rep, "dotmu_bracket", max_abs(
            dm(commutator(x, y), A) - (dmd(x, dmyA) - dmd(y, dmxA) - commutator(dmxA, dmyA))))
        _maxin(rep, "dotmu_product", max_abs(dm(x, A @ B) - (dmxA + A @ dm(x, B) @ Ai)))
        _maxin(rep, "dotmu_equivariance", max_abs(
            dm(a @ x @ np.linalg.inv(a), M.mu(a, A)) - md(a, dmxA)))
        _maxin(rep, "adjoint_dotmudot", max_abs(
            A @ dmd(x, X) @ Ai - (dmd(x, AdAX) - commutator(dmxA, AdAX))))
    return rep


VARIATIONAL = ("d_mu", "d_mudot", "d_dotmu")


def _linear_slot(fn, base, delta):
    """d/ds fn(base + s*delta) read off an auxiliary odd generator."""
    from .matrix_lie import aux_algebra

    alg = aux_algebra()
    val = fn(GradedMatrix(alg, {(): base, (0,): delta}, np.shape(base)))
    if not isinstance(val, GradedMatrix):
        return np.zeros(np.shape(val))
    return val.left_coefficient("sigma").body


def variational_suite(M: GroupCrossedModule, samples=50, seed=0, maps=None,
                      step=DEFAULT_STEP, richardson=False, curve_jerk=0.0):
    """Max residual of the variational identities.

    Variations come from curves a(t) = a exp(t xi + k t^3 w), A(t) = exp(t Xi + k t^3 W) A
    so that a^-1 da = xi and dA A^-1 = Xi; k = curve_jerk only adds higher order
    terms, which is useful to put the central differences in their truncation
    dominated regime.  Variations of the linear (algebra) slots are exact.

    d_mu     d mu(a, A) mu(a, A)^-1 = mu_dot(a, dot_mu(a^-1 da, A) + dA A^-1)
    d_mudot  d mu_dot(a, X) = mu_dot(a, dot_mu_dot(a^-1 da, X) + dX)
    d_dotmu  d dot_mu(x, A) = dot_mu(dx, A) + dot_mu_dot(x, dA A^-1) - [dot_mu(x, A), dA A^-1]
    """
    if maps is None:
        maps = M.exact if M.exact is not None else fd_maps(M, step)
    md, dm, dmd = maps.mu_dot, maps.dot_mu, maps.dot_mu_dot
    rep = {k: 0.0 for k in VARIATIONAL}
    for i in range(samples):
        rng = sample_rng(seed, f"variational/{M.name}", i)
        a, A, _, x, _, X = _samples(M, rng)
        xi, w = M.G.algebra.sample(rng), M.G.algebra.sample(rng)
        Xi, W = M.E.algebra.sample(rng), M.E.algebra.sample(rng)
        dx, dX = M.G.algebra.sample(rng), M.E.algebra.sample(rng)
        k = curve_jerk

        def a_t(t):
            return a @ mexp(t * xi + k * t ** 3 * w)

        def A_t(t):
            return mexp(t * Xi + k * t ** 3 * W) @ A

        def deriv(fn):
            from .matrix_lie import central_difference
            return central_difference(fn, step, richardson)

        mu0 = M.mu(a, A)
        lhs11 = deriv(lambda t: M.mu(a_t(t), A_t(t))) @ np.linalg.inv(mu0)
        rhs11 = md(a, dm(xi, A) + Xi)
        _maxin(rep, "d_mu", max_abs(lhs11 - rhs11))

        lhs12 = deriv(lambda t: md(a_t(t), X)) + _linear_slot(lambda Y: _lin_map(md, a, Y), X, dX)
        rhs12 = md(a, dmd(xi, X) + dX)
        _maxin(rep, "d_mudot", max_abs(lhs12 - rhs12))

        lhs13 = deriv(lambda t: dm(x, A_t(t))) + _linear_slot(lambda y: _lin_map2(dm, y, A), x, dx)
        dmxA = dm(x, A)
        rhs13 = dm(dx, A) + dmd(x, Xi) - commutator(dmxA, Xi)
        _maxin(rep, "d_dotmu", max_abs(lhs13 - rhs13))
    return rep


def _lin_map(md, a, Y):
    return Y.map_linear(lambda Z: md(a, Z)) if isinstance(Y, GradedMatrix) else md(a, Y)


def _lin_map2(dm, y, A):
    return y.map_linear(lambda z: dm(z, A)) if isinstance(y, GradedMatrix) else dm(y, A)


def corrupt_mu(M: GroupCrossedModule, factor=1.01) -> GroupCrossedModule:
    """Negative control: the action scaled by a constant factor."""
    mu = M.mu
    return GroupCrossedModule(M.E, M.G, M.tau, lambda a, A: factor * mu(a, A),
                              f"{M.name}", None, M.realization, M.params)
