"""The derived group DM = e[1] x| G, its Lie algebra Dm, and the Z-graded extension.

Derived elements keep plain matrices plus a mode tag; Grassmann generators
only appear in GradedDerivedElement components and in the oracles, which
embed everything in the block matrix realization of the semidirect product
and recompute each law by matrix arithmetic.

Conventions
-----------
* P = (a, L) stands for exp(abar L) a with abar odd of degree 1 ("bar" mode);
  the cross modality partner ("plus" mode) carries the same data with the
  shift retagged to degree -1.
* A graded element S = (p, j, J) stands for j + (-1)^p alpha J, alpha of
  degree -1, so j has degree p and J degree p + 1.
* The odd differential of a curve sits on the left of its logarithmic
  derivative: dM M^-1 = theta (M' M^-1).  Its e-component is the coefficient
  of the ordered monomial abar theta, which is minus the abar-coefficient of
  M' M^-1.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Callable, Optional

import numpy as np

from .crossed_module import (DEFAULT_STEP, CrossedModuleMorphism, DifferentiatedMaps,
                             GroupCrossedModule, fd_maps)
from .errors import ConfigurationError, DomainError, MembershipError, PreconditionError, \
    ShapeError
from .graded import INHOMOGENEOUS, GradedAlgebra, GradedMatrix, graded_bilinear
from .matrix_lie import (central_difference, commutator, fd_differential, max_abs, mexp,
                         minv)

MODES = ("bar", "plus")
SHIFT = {"bar": 1, "plus": -1}
MEMBER_TOL = 1e-9


def _lin(fn, x):
    return x.map_linear(fn) if isinstance(x, GradedMatrix) else fn(x)


class DerivedModule:
    """DM and Dm for a group crossed module, with a chosen set of differentials."""

    def __init__(self, M: GroupCrossedModule, maps: Optional[DifferentiatedMaps] = None,
                 drop_adjoint_dmd=False):
        self.M = M
        if maps is None:
            maps = M.exact if M.exact is not None else fd_maps(M)
        self.maps = maps
        self.real = M.realization
        # negative control: forget the dot_mu_dot term of the forward adjoint
        self.drop_adjoint_dmd = drop_adjoint_dmd

    @property
    def name(self):
        return self.M.name

    def dmd(self, x, X):
        """dot_mu_dot lifted to graded arguments."""
        return graded_bilinear(self.maps.dot_mu_dot, x, X)

    def mu_dot(self, a, X):
        return _lin(lambda Y: self.maps.mu_dot(a, Y), X)

    def t(self, X):
        return _lin(self.maps.tau_dot, X)

    # --- constructors ---------------------------------------------------------
    def element(self, a, L=None, mode="bar", lift=None, check=True):
        a = np.asarray(a, dtype=float)
        L = self.M.E.algebra.zero() if L is None else np.asarray(L, dtype=float)
        P = DerivedGroupElement(self, a, L, mode, lift)
        if check:
            P.validate()
        return P

    def algebra_element(self, u=None, U=None, mode="bar", check=True):
        u = self.M.G.algebra.zero() if u is None else np.asarray(u, dtype=float)
        U = self.M.E.algebra.zero() if U is None else np.asarray(U, dtype=float)
        Y = DerivedAlgebraElement(self, u, U, mode)
        if check:
            Y.validate()
        return Y

    def identity(self, mode="bar"):
        return self.element(self.M.G.identity(), None, mode)

    def sample_group(self, rng, mode="bar"):
        a = self.M.G.sample(rng)
        return DerivedGroupElement(self, a, self.M.E.algebra.sample(rng), mode)

    def sample_algebra(self, rng, mode="bar"):
        return DerivedAlgebraElement(self, self.M.G.algebra.sample(rng),
                                     self.M.E.algebra.sample(rng), mode)


@dataclass(eq=False)
class DerivedGroupElement:
    module: DerivedModule
    a: np.ndarray
    L: np.ndarray
    mode: str = "bar"
    lift: Optional[np.ndarray] = None

    @property
    def degree_tag(self):
        return SHIFT[self.mode]

    @property
    def lifted(self):
        return self.lift if self.lift is not None else self.module.M.lift(self.a)

    def validate(self):
        M = self.module.M
        if self.mode not in MODES:
            raise ConfigurationError(f"unknown mode {self.mode!r}")
        if not M.G.contains(self.a, MEMBER_TOL):
            raise MembershipError(f"a is not in {M.G.name}")
        if not M.E.algebra.contains(self.L, MEMBER_TOL):
            raise MembershipError(f"L is not in {M.E.algebra.name}")
        return self


@dataclass(eq=False)
class DerivedAlgebraElement:
    module: DerivedModule
    u: np.ndarray
    U: np.ndarray
    mode: str = "bar"

    @property
    def degree_tag(self):
        return SHIFT[self.mode]

    def validate(self):
        M = self.module.M
        if self.mode not in MODES:
            raise ConfigurationError(f"unknown mode {self.mode!r}")
        if not M.G.algebra.contains(self.u, MEMBER_TOL):
            raise MembershipError(f"u is not in {M.G.algebra.name}")
        if not M.E.algebra.contains(self.U, MEMBER_TOL):
            raise MembershipError(f"U is not in {M.E.algebra.name}")
        return self

    def __add__(self, other):
        _same(self, other)
        return DerivedAlgebraElement(self.module, self.u + other.u, self.U + other.U, self.mode)

    def __sub__(self, other):
        _same(self, other)
        return DerivedAlgebraElement(self.module, self.u - other.u, self.U - other.U, self.mode)

    def __mul__(self, c):
        return DerivedAlgebraElement(self.module, c * self.u, c * self.U, self.mode)

    __rmul__ = __mul__


def _same(x, y):
    if x.module.M is not y.module.M:
        raise ConfigurationError("elements belong to different crossed modules")
    if x.mode != y.mode:
        raise ConfigurationError(f"cannot combine {x.mode} and {y.mode} elements")


def residual(x, y):
    """Max abs difference between two derived elements of the same kind."""
    if isinstance(x, DerivedGroupElement):
        return max(max_abs(x.a - y.a), max_abs(x.L - y.L))
    if isinstance(x, DerivedAlgebraElement):
        return max(max_abs(x.u - y.u), max_abs(x.U - y.U))
    if isinstance(x, GradedDerivedElement):
        if x.p != y.p:
            return float("inf")
        return max(max_abs(x.j - y.j), max_abs(x.J - y.J))
    raise TypeError(type(x))


# --- group and algebra laws ----------------------------------------------------
def dmul(P: DerivedGroupElement, Q: DerivedGroupElement) -> DerivedGroupElement:
    _same(P, Q)
    D = P.module
    lift = P.lifted @ Q.lifted if (P.lift is not None or Q.lift is not None) else None
    return DerivedGroupElement(D, P.a @ Q.a, P.L + D.mu_dot(P.a, Q.L), P.mode, lift)


def dinv(P: DerivedGroupElement) -> DerivedGroupElement:
    D = P.module
    ai = np.linalg.inv(P.a)
    lift = minv(P.lift) if P.lift is not None else None
    return DerivedGroupElement(D, ai, -D.mu_dot(ai, P.L), P.mode, lift)


def dbracket(Y: DerivedAlgebraElement, W: DerivedAlgebraElement) -> DerivedAlgebraElement:
    _same(Y, W)
    D = Y.module
    return DerivedAlgebraElement(D, commutator(Y.u, W.u),
                                 D.dmd(Y.u, W.U) - D.dmd(W.u, Y.U), Y.mode)


def d_adjoint(P: DerivedGroupElement, Y: DerivedAlgebraElement, inverse=False):
    """Ad P (Y), or Ad P^-1 (Y) with inverse=True."""
    _same(P, Y)
    D = P.module
    a, L = P.a, P.L
    if inverse:
        ai = np.linalg.inv(a)
        return DerivedAlgebraElement(D, ai @ Y.u @ a, D.mu_dot(ai, Y.U + D.dmd(Y.u, L)), Y.mode)
    adu = a @ Y.u @ np.linalg.inv(a)
    U = D.mu_dot(a, Y.U)
    if not D.drop_adjoint_dmd:
        U = U - D.dmd(adu, L)
    return DerivedAlgebraElement(D, adu, U, Y.mode)


# --- curves and Maurer-Cartan forms -----------------------------------------------
@dataclass(eq=False)
class DerivedCurve:
    times: list
    values: Callable

    def __call__(self, t):
        return self.values(t)


def _curve_parts(curve, t0, step):
    P0 = curve(t0)
    gdot = central_difference(lambda h: curve(t0 + h).a, step)
    Edot = central_difference(lambda h: curve(t0 + h).L, step)
    if not (np.all(np.isfinite(gdot)) and np.all(np.isfinite(Edot))):
        raise DomainError("finite difference produced non-finite values")
    return P0, gdot, Edot


def mc_form(curve: DerivedCurve, t0=0.0, side="left", step=DEFAULT_STEP):
    """Left (dM M^-1) or right (M^-1 dM) Maurer-Cartan form at t0."""
    P0, gdot, Edot = _curve_parts(curve, t0, step)
    D = P0.module
    gi = np.linalg.inv(P0.a)
    if side == "left":
        x = gdot @ gi
        return DerivedAlgebraElement(D, x, -(Edot - D.dmd(x, P0.L)), P0.mode)
    if side == "right":
        return DerivedAlgebraElement(D, gi @ gdot, -D.mu_dot(gi, Edot), P0.mode)
    raise ValueError(f"unknown side {side!r}")


def dexp(Y: DerivedAlgebraElement) -> DerivedGroupElement:
    """exp(u + abar U) in DM, computed in the matrix realization."""
    D = Y.module
    real = D.real
    alg = _bar_algebra()
    ab = alg.gen("abar")
    X = real.algebra(GradedMatrix.constant(alg, Y.U) * ab, GradedMatrix.constant(alg, Y.u))
    lift = mexp(real.lift_algebra(Y.u))
    A, g = real.split_group(mexp(X), lift)
    return DerivedGroupElement(D, g.body, A.left_coefficient("abar").body, Y.mode, lift)


def lie_differential(fn, Y: DerivedAlgebraElement, step=DEFAULT_STEP, richardson=False):
    """Tangent at t = 0 of t -> fn(dexp(t Y)), assuming fn(identity) = identity."""
    def curve(t):
        return fn(dexp(DerivedAlgebraElement(Y.module, t * Y.u, t * Y.U, Y.mode)))

    P0 = curve(0.0)
    u = central_difference(lambda h: curve(h).a, step, richardson)
    U = central_difference(lambda h: curve(h).L, step, richardson)
    return DerivedAlgebraElement(P0.module, u @ np.linalg.inv(P0.a), U, P0.mode)


# --- Z-graded extension --------------------------------------------------------------
@dataclass(eq=False)
class GradedDerivedElement:
    """S = j + (-1)^p alpha J with j of degree p and J of degree p + 1."""

    module: DerivedModule
    p: int
    j: object
    J: object

    def __post_init__(self):
        self.p = int(self.p)
        for name, comp, want in (("j", self.j, self.p), ("J", self.J, self.p + 1)):
            if isinstance(comp, GradedMatrix):
                deg = comp.degree()
                if deg == INHOMOGENEOUS:
                    raise ShapeError(f"component {name} is inhomogeneous")
                if comp.terms and deg != want:
                    raise ShapeError(f"component {name} has degree {deg}, expected {want}")

    @classmethod
    def from_algebra(cls, Y: DerivedAlgebraElement):
        return cls(Y.module, 0, Y.u, Y.U)

    def __add__(self, other):
        if self.p != other.p:
            raise ShapeError("cannot add elements of different degrees")
        return GradedDerivedElement(self.module, self.p, self.j + other.j, self.J + other.J)

    def __sub__(self, other):
        return self + other * -1.0

    def __mul__(self, c):
        return GradedDerivedElement(self.module, self.p, self.j * c, self.J * c)

    __rmul__ = __mul__


def _gcheck(S, T):
    if S.module.M is not T.module.M:
        raise ConfigurationError("elements belong to different crossed modules")


def graded_bracket(S: GradedDerivedElement, T: GradedDerivedElement) -> GradedDerivedElement:
    _gcheck(S, T)
    D = S.module
    p, q = S.p, T.p
    j = graded_bilinear(commutator, S.j, T.j)
    J = D.dmd(S.j, T.J) - D.dmd(T.j, S.J) * ((-1) ** (p * q))
    return GradedDerivedElement(D, p + q, j, J)


def coboundary_dt(S: GradedDerivedElement) -> GradedDerivedElement:
    D = S.module
    j = D.t(S.J) * ((-1) ** S.p)
    J = S.J * 0.0
    return GradedDerivedElement(D, S.p + 1, j, J)


# --- cross modality and morphisms ----------------------------------------------------
def cross_mode(x):
    """The suspension retag bar <-> plus; values are untouched."""
    other = "plus" if x.mode == "bar" else "bar"
    if isinstance(x, DerivedGroupElement):
        return DerivedGroupElement(x.module, x.a, x.L, other, x.lift)
    if isinstance(x, DerivedAlgebraElement):
        return DerivedAlgebraElement(x.module, x.u, x.U, other)
    raise TypeError(f"cannot cross {type(x).__name__}")


def derived_morphism(beta: CrossedModuleMorphism, x, target: Optional[DerivedModule] = None,
                     step=DEFAULT_STEP):
    """D beta = (Phi_dot, phi) on DM, or (Phi_dot, phi_dot) on Dm.

    beta is a group crossed module morphism; its differentials come from the
    attached closed forms or, failing those, from finite differences.
    """
    if target is None:
        target = DerivedModule(beta.target)
    src = beta.source

    def Phi_dot(X):
        if beta.Phi_dot is not None:
            return beta.Phi_dot(X)
        return fd_differential(beta.Phi, src.E.identity(), X, step, odd=True)

    def phi_dot(x):
        if beta.phi_dot is not None:
            return beta.phi_dot(x)
        return fd_differential(beta.phi, src.G.identity(), x, step)

    if isinstance(x, DerivedGroupElement):
        return DerivedGroupElement(target, beta.phi(x.a), Phi_dot(x.L), x.mode)
    if isinstance(x, DerivedAlgebraElement):
        return DerivedAlgebraElement(target, phi_dot(x.u), Phi_dot(x.U), x.mode)
    raise TypeError(f"cannot map {type(x).__name__}")


# --- transports over the model manifold N = R^m x R[1]^k -------------------------------
@lru_cache(maxsize=None)
def _bar_algebra():
    return GradedAlgebra([("abar", 1, "auxiliary"), ("theta", 1, "auxiliary"),
                          ("bbar", 1, "auxiliary")])


@lru_cache(maxsize=None)
def field_algebra(k=2):
    gens = [("alpha", -1, "auxiliary"), ("eps", -1, "auxiliary")]
    gens += [(f"xi{r + 1}", 1, "internal") for r in range(k)]
    return GradedAlgebra(gens)


@lru_cache(maxsize=None)
def sample_algebra():
    gens = [("alpha", -1, "auxiliary")] + [(f"y{i}", 1, "internal") for i in range(1, 6)]
    gens.append(("z", -1, "internal"))
    return GradedAlgebra(gens)


class TransportField:
    """C = exp(alpha O) r over N with r = exp(w(x)) and O = sum_r xi_r O_r(x).

    w(x) = w0 + sum_i x_i w_i + x_0 x_1 w2 and O_r(x) = O_r0 + sum_i x_i O_ri.
    """

    def __init__(self, module: DerivedModule, m, k, w0, w1, w2, O0, O1):
        self.module, self.m, self.k = module, m, k
        self.w0, self.w1, self.w2 = w0, w1, w2
        self.O0, self.O1 = O0, O1
        self.algebra = field_algebra(k)

    @classmethod
    def sample(cls, module: DerivedModule, rng, m=2, k=2, scale=0.4, constant=False):
        g, e = module.M.G.algebra, module.M.E.algebra
        w0 = g.sample(rng, scale)
        z = 0.0 if constant else 1.0
        w1 = [z * g.sample(rng, scale) for _ in range(m)]
        w2 = z * g.sample(rng, scale)
        O0 = [e.sample(rng) for _ in range(k)]
        O1 = [[z * e.sample(rng) for _ in range(m)] for _ in range(k)]
        return cls(module, m, k, w0, w1, w2, O0, O1)

    def w(self, x):
        out = self.w0 + sum(xi * wi for xi, wi in zip(x, self.w1))
        if self.m >= 2:
            out = out + x[0] * x[1] * self.w2
        return out

    def r(self, x):
        return mexp(self.w(x))

    def lift(self, x):
        return mexp(self.module.real.lift_algebra(self.w(x)))

    def O_r(self, r, x):
        return self.O0[r] + sum(xi * o for xi, o in zip(x, self.O1[r]))

    def O(self, x):
        alg = self.algebra
        terms = {}
        for r in range(self.k):
            _, mono = alg.monomial(f"xi{r + 1}")
            terms[mono] = self.O_r(r, x)
        return GradedMatrix(alg, terms, self.O0[0].shape)

    def embedded(self, x, with_eps=None):
        """Realization of exp(alpha O) r; with_eps adds eps * tau_dot(O) to the exponent."""
        D = self.module
        alg = self.algebra
        O = self.O(x)
        alpha = alg.gen("alpha")
        g0 = GradedMatrix.constant(alg, np.zeros(D.M.G.algebra.basis[0].shape))
        bottom = g0 if with_eps is None else alg.gen("eps") * D.t(O)
        R = D.real.group(GradedMatrix.constant(alg, D.M.E.identity()),
                         GradedMatrix.constant(alg, self.lift(x)))
        return mexp(D.real.algebra(alpha * O, bottom)) @ R


@dataclass(frozen=True)
class Derivation:
    """A derivation of the function algebra of N.

    kind "odd_partial": d/d xi_s, degree -1.
    kind "odd_times_even": xi_s d/dx_j, degree +1.
    """

    kind: str
    s: int
    j: int = 0

    @property
    def degree(self):
        if self.kind == "odd_partial":
            return -1
        if self.kind == "odd_times_even":
            return 1
        raise PreconditionError(f"unsupported derivation {self.kind!r}")


def _check_derivation(D: Derivation, field: TransportField):
    D.degree  # noqa: B018 - raises on unsupported kinds
    if not 0 <= D.s < field.k:
        raise PreconditionError(f"odd coordinate index {D.s} out of range")
    if D.kind == "odd_times_even" and not 0 <= D.j < field.m:
        raise PreconditionError(f"even coordinate index {D.j} out of range")


def _apply(D: Derivation, field: TransportField, fn, x, step):
    """D applied to a graded-matrix valued function of x (entrywise)."""
    name = f"xi{D.s + 1}"
    if D.kind == "odd_partial":
        return fn(x).left_coefficient(name)
    x = np.asarray(x, dtype=float)
    e = np.zeros_like(x)
    e[D.j] = 1.0
    dval = central_difference(lambda h: fn(x + h * e), step)
    if not isinstance(dval, GradedMatrix):
        dval = GradedMatrix.constant(field.algebra, dval)
    return field.algebra.gen(name) * dval


def derivation_transport(field: TransportField, D: Derivation, x, side="left",
                         step=DEFAULT_STEP) -> GradedDerivedElement:
    """D C C^-1 (left) or C^-1 D C (right) for C = exp(alpha O) r."""
    _check_derivation(D, field)
    mod = field.module
    alg = field.algebra
    p = D.degree
    x = np.asarray(x, dtype=float)
    r = field.r(x)
    ri = np.linalg.inv(r)
    Dr = _apply(D, field, lambda y: GradedMatrix.constant(alg, field.r(y)), x, step)
    DO = _apply(D, field, field.O, x, step)
    if side == "left":
        y = Dr @ ri
        return GradedDerivedElement(mod, p, y, DO - mod.dmd(y, field.O(x)))
    if side == "right":
        return GradedDerivedElement(mod, p, ri @ Dr, mod.mu_dot(ri, DO))
    raise ValueError(f"unknown side {side!r}")


def dtau_transport(field: TransportField, x, side="left") -> GradedDerivedElement:
    """The transport of d_t = tau_dot d/d alpha; degree 1."""
    mod = field.module
    x = np.asarray(x, dtype=float)
    O = field.O(x)
    OO = graded_bilinear(commutator, O, O)
    tO = mod.t(O)
    if side == "left":
        return GradedDerivedElement(mod, 1, tO, OO * -0.5)
    if side == "right":
        r = field.r(x)
        ri = np.linalg.inv(r)
        return GradedDerivedElement(mod, 1, ri @ tO @ r, mod.mu_dot(ri, OO) * 0.5)
    raise ValueError(f"unknown side {side!r}")


# --- sampling graded elements ---------------------------------------------------------
def _monomials_of_degree(alg, degree, max_len=3):
    names = [g.name for g in alg.generators if g.name != "alpha"]
    out = []
    for k in range(max_len + 1):
        for combo in combinations(names, k):
            s, mono = alg.monomial(combo)
            if s and alg.degree(mono) == degree:
                out.append(mono)
    return out


def sample_homogeneous(rng, alg, space, degree, n_terms=2):
    """Random space-valued graded matrix of the given degree."""
    monos = _monomials_of_degree(alg, degree)
    if not monos:
        raise ValueError(f"no monomials of degree {degree}")
    pick = rng.choice(len(monos), size=min(n_terms, len(monos)), replace=False)
    terms = {monos[i]: space.sample(rng) for i in sorted(pick)}
    return GradedMatrix(alg, terms, space.basis[0].shape)


def sample_graded(D: DerivedModule, rng, p):
    alg = sample_algebra()
    return GradedDerivedElement(D, p, sample_homogeneous(rng, alg, D.M.G.algebra, p),
                                sample_homogeneous(rng, alg, D.M.E.algebra, p + 1))


# --- Grassmann embedding oracles --------------------------------------------------------
def _embed_group(P: DerivedGroupElement, alg, gen="abar"):
    real = P.module.real
    L = GradedMatrix.constant(alg, P.L) * alg.gen(gen)
    one = GradedMatrix.constant(alg, P.module.M.E.identity())
    return real.group(one + L, GradedMatrix.constant(alg, P.lifted))


def _split_group(D, m, lift, gen="abar"):
    A, g = D.real.split_group(m, lift)
    return DerivedGroupElement(D, g.body, A.left_coefficient(gen).body, "bar", lift)


def oracle_dmul(P, Q):
    alg = _bar_algebra()
    m = _embed_group(P, alg) @ _embed_group(Q, alg)
    out = _split_group(P.module, m, P.lifted @ Q.lifted)
    out.mode = P.mode
    return out


def oracle_dinv(P):
    alg = _bar_algebra()
    m = _embed_group(P, alg).inv()
    out = _split_group(P.module, m, minv(P.lifted))
    out.mode = P.mode
    return out


def _embed_algebra(Y, alg, gen="abar"):
    real = Y.module.real
    U = GradedMatrix.constant(alg, Y.U) * alg.gen(gen)
    return real.algebra(U, GradedMatrix.constant(alg, Y.u))


def _split_algebra(D, m, gen="abar", mode="bar"):
    X, x = D.real.split_algebra(m)
    return DerivedAlgebraElement(D, x.body, X.left_coefficient(gen).body, mode)


def oracle_dbracket(Y, W):
    alg = _bar_algebra()
    a, b = _embed_algebra(Y, alg), _embed_algebra(W, alg)
    return _split_algebra(Y.module, a @ b - b @ a, mode=Y.mode)


def oracle_d_adjoint(P, Y, inverse=False, step=DEFAULT_STEP):
    """Linearize P exp(abar t U) exp(t u) P^-1 in t and read off the components."""
    if inverse:
        P = dinv(P)
    D = P.module
    alg = _bar_algebra()
    real = D.real
    EP = _embed_group(P, alg)
    EPi = EP.inv()
    one = D.M.E.identity()
    lam = real.lift_algebra(Y.u)
    base_lift = P.lifted

    def conj(t):
        A = GradedMatrix.constant(alg, one) + GradedMatrix.constant(alg, t * Y.U) * alg.gen("abar")
        lt = mexp(t * lam)
        Dt = real.group(A, GradedMatrix.constant(alg, lt))
        lift = base_lift @ lt @ minv(base_lift)
        return real.split_group(EP @ Dt @ EPi, lift)

    dA = central_difference(lambda t: conj(t)[0], step)
    dg = central_difference(lambda t: conj(t)[1], step)
    return DerivedAlgebraElement(D, dg.body, dA.left_coefficient("abar").body, Y.mode)


def oracle_mc_form(curve: DerivedCurve, t0=0.0, side="left", step=DEFAULT_STEP):
    alg = _bar_algebra()
    P0 = curve(t0)
    D = P0.module
    M0 = _embed_group(P0, alg)
    Mdot = central_difference(lambda h: _embed_group(curve(t0 + h), alg), step)
    log = Mdot @ M0.inv() if side == "left" else M0.inv() @ Mdot
    form = alg.gen("theta") * log
    X, x = D.real.split_algebra(form)
    u = x.coefficient(("theta",))
    U = X.coefficient(("abar", "theta"))
    return DerivedAlgebraElement(D, u, U, P0.mode)


def _read_graded(D, m, p):
    X, x = D.real.split_algebra(m)
    return GradedDerivedElement(D, p, x, X.left_coefficient("alpha") * ((-1) ** p))


def oracle_graded_bracket(S, T):
    alg = S.j.algebra if isinstance(S.j, GradedMatrix) else S.J.algebra
    D = S.module

    def embed(R):
        alpha = alg.gen("alpha")
        J = GradedMatrix.constant(alg, np.zeros(D.M.E.algebra.basis[0].shape)) + R.J
        j = GradedMatrix.constant(alg, np.zeros(D.M.G.algebra.basis[0].shape)) + R.j
        return D.real.algebra(alpha * J * ((-1) ** R.p), j)

    a, b = embed(S), embed(T)
    return _read_graded(D, a @ b - b @ a * ((-1) ** (S.p * T.p)), S.p + T.p)


def oracle_derivation_transport(field, D: Derivation, x, side="left", step=DEFAULT_STEP):
    _check_derivation(D, field)
    x = np.asarray(x, dtype=float)
    C = field.embedded(x)
    DC = _apply(D, field, field.embedded, x, step)
    m = DC @ C.inv() if side == "left" else C.inv() @ DC
    return _read_graded(field.module, m, D.degree)


def oracle_dtau_transport(field, x, side="left"):
    x = np.asarray(x, dtype=float)
    Ce = field.embedded(x, with_eps=True)
    C = Ce.drop("eps")
    dC = Ce.left_coefficient("eps")
    m = dC @ C.inv() if side == "left" else C.inv() @ dC
    return _read_graded(field.module, m, 1)
