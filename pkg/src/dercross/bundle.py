"""The trivial synthetic principal 2-bundle P = U x DM and its operation.

Points are (x, a, L) with x in the base chart, a in G and L in e.  Differential
forms are polynomials in fiber generators with coefficient functions of the
point:

    dx_i   dual to the base coordinates,
    w_A    dual to the vertical fields of a g-basis (a -> a exp(t u)),
    h_B    dual to the vertical fields of an e-basis (L -> L + t mu_dot(a, U)).

All fiber generators are odd of degree 1.  The coframe (w, h) is dual to the
fundamental vector fields of the right action, so contractions j_Z have
constant coefficients and d(w^c) = -1/2 C^c_AB w^A w^B with the structure
constants of Dm.  The e-directions are handled as ordinary coordinates, the
cross modality picture in which DM is an ordinary Lie group.

Coefficient functions take (x, a, ell) with ell the e-coordinates of L.  They
must be polynomial in the entries of x, a and ell: derivatives are taken by
evaluating them on even square-zero dual numbers, so nested derivatives are
exact and any derivation can be applied any number of times.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .crossed_module import DEFAULT_STEP, GroupCrossedModule
from .derived import (DerivedAlgebraElement, DerivedGroupElement, DerivedModule, dbracket,
                      dmul)
from .errors import ConfigurationError, MembershipError, PreconditionError
from .graded import GradedAlgebra, GradedMatrix, GradedScalar, graded_bilinear
from .matrix_lie import aux_algebra, central_difference, mexp, minv

DUAL_DEPTH = 8


@lru_cache(maxsize=None)
def dual_algebra():
    return GradedAlgebra([(f"e{i}", 0, "auxiliary") for i in range(DUAL_DEPTH)])


def _scalar(v):
    if isinstance(v, GradedScalar):
        extra = [m for m in v.terms if m]
        if extra:
            raise ValueError("coefficient left infinitesimal terms behind")
        return v.body
    return float(v)


def _entry(a, i, j):
    return a.entry(i, j) if isinstance(a, GradedMatrix) else float(a[i, j])


def _used(*vals):
    used = set()
    for v in vals:
        if isinstance(v, GradedMatrix):
            for m in v.terms:
                used.update(m)
        elif isinstance(v, np.ndarray) and v.dtype == object:
            for s in v.ravel():
                if isinstance(s, GradedScalar):
                    for m in s.terms:
                        used.update(m)
    return used


def _free_generator(*vals):
    used = _used(*vals)
    for i in range(DUAL_DEPTH):
        if i not in used:
            return i
    raise ConfigurationError(f"derivatives nested deeper than {DUAL_DEPTH}")


# --- model ----------------------------------------------------------------------------
class BundleModel:
    """P = U x DM over a box U in R^d.

    objects=True gives the object space P0 (the L = 0 slice) with the
    operation of m0 = (0, g).  flip_contraction is a negative control.
    """

    def __init__(self, module: GroupCrossedModule, base_dim=2, bounds=(0.0, 1.0), maps=None,
                 objects=False, flip_contraction=False):
        if base_dim < 0:
            raise ConfigurationError("base dimension must be nonnegative")
        self.module = module
        self.base_dim = int(base_dim)
        self.bounds = tuple(bounds)
        self.derived = DerivedModule(module, maps)
        self.objects = objects
        self.flip_contraction = flip_contraction
        g, e = module.G.algebra, module.E.algebra
        self.g_dim = g.dim
        self.e_dim = 0 if objects else e.dim
        names = [f"dx{i + 1}" for i in range(self.base_dim)]
        names += [f"w{A + 1}" for A in range(self.g_dim)]
        names += [f"h{B + 1}" for B in range(self.e_dim)]
        self.fiber_names = names
        self.fiber = GradedAlgebra([(n, 1, "form") for n in names], max_generators=len(names))
        self.g_offset = self.base_dim
        self.e_offset = self.base_dim + self.g_dim
        self._e_pinv = np.linalg.pinv(np.array([b.ravel() for b in e.basis]).T) if e.dim else None
        self.structure = self._structure_constants()

    def object_model(self):
        return BundleModel(self.module, self.base_dim, self.bounds, self.derived.maps,
                           objects=True, flip_contraction=self.flip_contraction)

    # coordinates of Dm elements in the (g, e) basis
    def basis_element(self, A):
        g, e = self.module.G.algebra, self.module.E.algebra
        D = self.derived
        if A < self.g_dim:
            return DerivedAlgebraElement(D, g.basis[A], e.zero())
        return DerivedAlgebraElement(D, g.zero(), e.basis[A - self.g_dim])

    def components(self, Z: DerivedAlgebraElement):
        g, e = self.module.G.algebra, self.module.E.algebra
        if Z.module.M is not self.module:
            raise ConfigurationError("algebra element belongs to another crossed module")
        U = e.coords(Z.U) if e.dim else np.zeros(0)
        if self.objects:
            if np.max(np.abs(U), initial=0.0) > 0.0:
                raise PreconditionError("Z has an e-component and is not in m0")
            U = np.zeros(0)
        return np.concatenate([g.coords(Z.u), U])

    def _structure_constants(self):
        n = self.g_dim + self.e_dim
        C = np.zeros((n, n, n))
        for A in range(n):
            for B in range(n):
                C[:, A, B] = self.components_unchecked(
                    dbracket(self.basis_element(A), self.basis_element(B)))
        return C

    def components_unchecked(self, Z):
        g, e = self.module.G.algebra, self.module.E.algebra
        U = e.coords(Z.U)[: self.e_dim] if self.e_dim else np.zeros(0)
        return np.concatenate([g.coords(Z.u), U])

    def e_coords(self, X):
        """e-basis coordinates of a plain or graded e-matrix."""
        P = self._e_pinv
        if isinstance(X, GradedMatrix):
            return X.map_linear(lambda m: P @ m.ravel())
        return P @ np.asarray(X, dtype=float).ravel()

    def mu_dot(self, a, U):
        """mu_dot(a, U) with a plain or a dual-number group element."""
        md = self.derived.maps.mu_dot
        if not isinstance(a, GradedMatrix):
            return md(a, U)
        a0 = a.body
        n = minv(a0) @ a
        xi = _nil_log(n)
        D = self.derived
        total, term, k = GradedMatrix.constant(a.algebra, U), GradedMatrix.constant(a.algebra, U), 0
        while True:
            k += 1
            term = graded_bilinear(D.maps.dot_mu_dot, xi, term) * (1.0 / k)
            if not term.terms:
                break
            total = total + term
        return total.map_linear(lambda m: md(a0, m))

    # sampling
    def sample_point(self, rng, with_L=True):
        lo, hi = self.bounds
        x = rng.uniform(lo, hi, self.base_dim)
        a = self.module.G.sample(rng)
        L = self.module.E.algebra.sample(rng) if (with_L and not self.objects) else \
            self.module.E.algebra.zero()
        return SyntheticPoint(self, x, a, L)

    def sample_Z(self, rng, kind="mixed"):
        D = self.derived
        g, e = self.module.G.algebra, self.module.E.algebra
        u = g.sample(rng) if kind in ("mixed", "g") else g.zero()
        U = e.sample(rng) if kind in ("mixed", "e") and not self.objects else e.zero()
        return DerivedAlgebraElement(D, u, U)


def _nil_log(n: GradedMatrix):
    """log of a graded matrix with identity body, by its terminating series."""
    size = n.shape[0]
    s = n.soul
    total = s.zeros_like()
    power = GradedMatrix.constant(n.algebra, np.eye(size))
    k = 0
    while True:
        k += 1
        power = power @ s
        if not power.terms:
            return total
        total = total + power * ((-1) ** (k + 1) / k)


@dataclass(eq=False)
class SyntheticPoint:
    model: BundleModel
    x: np.ndarray
    a: np.ndarray
    L: np.ndarray

    @property
    def ell(self):
        if self.model.e_dim == 0:
            return np.zeros(0)
        return self.model.e_coords(self.L)

    def derived(self) -> DerivedGroupElement:
        return DerivedGroupElement(self.model.derived, self.a, self.L)


# --- structure maps ----------------------------------------------------------------------
def source_map(V: SyntheticPoint) -> SyntheticPoint:
    return SyntheticPoint(V.model, V.x.copy(), V.a.copy(), np.zeros_like(V.L))


def project(V: SyntheticPoint):
    return V.x.copy()


def right_action(V: SyntheticPoint, Q: DerivedGroupElement) -> SyntheticPoint:
    if Q.module.M is not V.model.module:
        raise ConfigurationError("group element belongs to another crossed module")
    P = dmul(V.derived(), DerivedGroupElement(V.model.derived, Q.a, Q.L))
    return SyntheticPoint(V.model, V.x.copy(), P.a, P.L)


def trivialize(V: SyntheticPoint):
    return project(V), V.derived()


def local_gauge(V: Callable, m, A, kind="object", module: Optional[GroupCrossedModule] = None):
    """A^-1 V(m) A for objects, a^-1 sigma(m) a for morphisms (a must lie in G)."""
    A = np.asarray(A, dtype=float)
    if kind == "morphism":
        if module is None:
            raise ConfigurationError("morphism gauge needs the crossed module to check a in G")
        if not module.G.contains(A):
            raise MembershipError(f"gauge element is not in {module.G.name}")
    elif kind != "object":
        raise ValueError(f"unknown kind {kind!r}")
    if A.ndim != 2 or A.shape[0] != A.shape[1] or abs(np.linalg.det(A)) < 1e-12:
        raise MembershipError("gauge element must be an invertible square matrix")
    return np.linalg.inv(A) @ np.asarray(V(m), dtype=float) @ A


# --- form fields ---------------------------------------------------------------------------
class Coeff:
    """A coefficient function with a path of frame derivatives applied to it.

    path = (g1, g2, ...) means V_g1 V_g2 ... fn.  Keeping the base function and
    the path separate lets evaluations at one point be shared between fields.
    """

    __slots__ = ("fn", "path", "model")

    def __init__(self, fn, path=(), model=None):
        self.fn, self.path, self.model = fn, tuple(path), model

    def __call__(self, x, a, ell):
        return _eval_path(self.fn, self.path, self.model, x, a, ell)

    def key(self):
        return id(self.fn), self.path


def _as_coeff(fn):
    return fn if isinstance(fn, Coeff) else Coeff(fn)


def _eval_path(fn, path, model, x, a, ell):
    if not path:
        return fn(x, a, ell)
    rest = path[1:]
    return _derivative_at(lambda x_, a_, l_: _eval_path(fn, rest, model, x_, a_, l_),
                          model, path[0], x, a, ell)


@dataclass(eq=False)
class FormField:
    """sum over fiber monomials of (sum of factor * coefficient function)."""

    model: BundleModel
    terms: dict = field(default_factory=dict)

    @classmethod
    def zero(cls, model):
        return cls(model, {})

    @classmethod
    def make(cls, model, coeff, gens=()):
        """coeff * g1 g2 ... with gens given by fiber generator names."""
        sign, mono = model.fiber.monomial(tuple(gens)) if gens else (1, ())
        if not sign:
            return cls.zero(model)
        return cls(model, {mono: [(float(sign), _as_coeff(coeff))]})

    def _add_term(self, out, mono, factor, fn):
        if factor:
            out.setdefault(mono, []).append((factor, fn))

    def __add__(self, other):
        out = {m: list(v) for m, v in self.terms.items()}
        for m, v in other.terms.items():
            out.setdefault(m, []).extend(v)
        return FormField(self.model, out)

    def __sub__(self, other):
        return self + other * -1.0

    def __mul__(self, c):
        c = float(c)
        return FormField(self.model,
                         {m: [(f * c, fn) for f, fn in v] for m, v in self.terms.items()})

    __rmul__ = __mul__

    def wedge(self, other):
        fib = self.model.fiber
        out = {}
        for m1, v1 in self.terms.items():
            for m2, v2 in other.terms.items():
                s, m = fib.mul_monomials(m1, m2)
                if not s:
                    continue
                for f1, fn1 in v1:
                    for f2, fn2 in v2:
                        self._add_term(out, m, s * f1 * f2, _product(fn1, fn2))
        return FormField(self.model, out)

    def evaluate(self, V: SyntheticPoint, memo=None) -> GradedScalar:
        """The fiber polynomial at a point.

        memo, a dict, shares coefficient values between fields evaluated at
        the same point.
        """
        if V.model.objects != self.model.objects:
            raise ConfigurationError("point and field live on different spaces")
        memo = {} if memo is None else memo
        x, a, ell = np.asarray(V.x, dtype=float), np.asarray(V.a, dtype=float), V.ell
        terms = {}
        for m, v in self.terms.items():
            total = 0.0
            for f, c in v:
                k = c.key()
                if k not in memo:
                    try:
                        # the function object is kept so its id cannot be reused
                        memo[k] = (c.fn, _scalar(c(x, a, ell)))
                    except TypeError as exc:
                        raise ConfigurationError(f"unsupported field expression: {exc}") \
                            from None
                total += f * memo[k][1]
            terms[m] = total
        return GradedScalar(self.model.fiber, terms)


def _product(f1, f2):
    return Coeff(lambda x, a, ell: f1(x, a, ell) * f2(x, a, ell))


# coefficient building blocks, all polynomial in (x, a, ell)
def const_coeff(c):
    c = float(c)
    return lambda x, a, ell: c


def poly_coeff(c0, b, Q):
    """c0 + b.x + x^T Q x."""
    b, Q = np.asarray(b, dtype=float), np.asarray(Q, dtype=float)

    def fn(x, a, ell):
        out = c0
        for i in range(len(b)):
            out = out + b[i] * x[i]
            for j in range(len(b)):
                if Q[i, j]:
                    out = out + Q[i, j] * x[i] * x[j]
        return out

    return fn


def a_entry_coeff(i, j):
    return lambda x, a, ell: _entry(a, i, j)


def ell_coeff(k):
    return lambda x, a, ell: ell[k]


# --- derivatives of coefficient functions ------------------------------------------------
def _dual(k):
    return dual_algebra().gen(f"e{k}")


def _strip(v, k):
    if isinstance(v, GradedScalar):
        return v.left_coefficient(f"e{k}")
    return 0.0


def _shift_vec(v, i, eps):
    out = np.array(v, dtype=object)
    out[i] = out[i] + eps
    return out


def _derive(c: Coeff, model: BundleModel, g):
    """The derivative of a coefficient along the frame field of generator g."""
    return Coeff(c.fn, (g,) + c.path, model)


def _derivative_at(fn, model: BundleModel, g, x, a, ell):
    k = _free_generator(x, a, ell)
    if g < model.g_offset:
        return _strip(fn(_shift_vec(x, g, _dual(k)), a, ell), k)
    if g < model.e_offset:
        u = model.module.G.algebra.basis[g - model.g_offset]
        step = GradedMatrix(dual_algebra(), {(k,): u, (): np.eye(u.shape[0])}, u.shape)
        return _strip(fn(x, a @ step, ell), k)
    U = model.module.E.algebra.basis[g - model.e_offset]
    delta = model.e_coords(model.mu_dot(a, U))
    eps = _dual(k)
    new = np.array(ell, dtype=object)
    for c in range(len(new)):
        dc = delta.entry(c) if isinstance(delta, GradedMatrix) else float(delta[c])
        new[c] = new[c] + eps * dc
    return _strip(fn(x, a, new), k)


# --- the operation -----------------------------------------------------------------------------
def d_form(f: FormField) -> FormField:
    model = f.model
    fib = model.fiber
    n = len(model.fiber_names)
    C = model.structure
    out = {}
    for mono, coeffs in f.terms.items():
        # d of the coefficient, generator placed in front
        for g in range(n):
            s, m = fib.mul_monomials((g,), mono)
            if not s:
                continue
            for fac, fn in coeffs:
                f._add_term(out, m, s * fac, _derive(fn, model, g))
        # d of the generators, w^c -> -1/2 C^c_AB w^A w^B
        for pos, gen in enumerate(mono):
            if gen < model.g_offset:
                continue
            c = gen - model.g_offset
            sign_pos = -1.0 if pos % 2 else 1.0
            for A in range(C.shape[1]):
                for B in range(A + 1, C.shape[2]):
                    k = C[c, A, B]
                    if abs(k) < 1e-14:
                        continue
                    idx = list(mono[:pos]) + [A + model.g_offset, B + model.g_offset] + \
                        list(mono[pos + 1:])
                    s, m = fib.normalize(idx)
                    if not s:
                        continue
                    for fac, fn in coeffs:
                        f._add_term(out, m, -k * s * sign_pos * fac, fn)
    return FormField(model, out)


def j_form(Z: DerivedAlgebraElement, f: FormField) -> FormField:
    model = f.model
    comps = model.components(Z)
    if model.flip_contraction:
        comps = -comps
    out = {}
    for mono, coeffs in f.terms.items():
        for pos, gen in enumerate(mono):
            if gen < model.g_offset:
                continue
            z = comps[gen - model.g_offset]
            if not z:
                continue
            sign = -1.0 if pos % 2 else 1.0
            m = mono[:pos] + mono[pos + 1:]
            for fac, fn in coeffs:
                f._add_term(out, m, sign * z * fac, fn)
    return FormField(model, out)


def l_form(Z, f):
    """The Lie derivative, defined as the graded commutator [d, j_Z]."""
    return d_form(j_form(Z, f)) + j_form(Z, d_form(f))


@dataclass(frozen=True, eq=False)
class DerivationHandle:
    kind: str
    Z: Optional[DerivedAlgebraElement] = None

    @property
    def degree(self):
        return {"deRham": 1, "contraction": -1, "lie": 0}[self.kind]

    def __call__(self, f):
        if self.kind == "deRham":
            return d_form(f)
        if self.Z is None:
            raise ConfigurationError(f"{self.kind} needs an algebra element")
        if self.kind == "contraction":
            return j_form(self.Z, f)
        if self.kind == "lie":
            return l_form(self.Z, f)
        raise ConfigurationError(f"unknown derivation {self.kind!r}")


def apply_derivation(D: DerivationHandle, f: FormField, at: SyntheticPoint) -> GradedScalar:
    return D(f).evaluate(at)


def vertical_field(Z: DerivedAlgebraElement, f: FormField, at: SyntheticPoint,
                   step=DEFAULT_STEP) -> GradedScalar:
    """Derivative of the coefficients of f along the right action of exp(t Z).

    The g-part is a central difference; the e-part is exact, read off an
    auxiliary odd generator.
    """
    model = f.model
    x, a, ell = np.asarray(at.x, dtype=float), np.asarray(at.a, dtype=float), at.ell
    sig_alg = aux_algebra()
    sigma = sig_alg.gen("sigma")
    delta = model.e_coords(model.mu_dot(a, Z.U)) if model.e_dim else np.zeros(0)
    ell_s = np.array([e + sigma * float(d) for e, d in zip(ell, delta)], dtype=object)
    terms = {}
    for mono, coeffs in f.terms.items():
        total = 0.0
        for fac, fn in coeffs:
            du = central_difference(lambda t: _scalar(fn(x, a @ mexp(t * Z.u), ell)), step)
            v = fn(x, a, ell_s) if len(ell_s) else 0.0
            dU = v.left_coefficient("sigma").body if isinstance(v, GradedScalar) else 0.0
            total += fac * (du + dU)
        terms[mono] = total
    return GradedScalar(model.fiber, terms)


# --- checks --------------------------------------------------------------------------------------
def _diff(f1: FormField, f2: FormField, V, memo=None):
    return (f1 - f2).evaluate(V, memo).norm()


def cartan_residuals(Z, W, f: FormField, V: SyntheticPoint):
    """Residual of each Cartan relation for one (Z, W, f, point) sample.

    dd: d^2 = 0; l_is_dj: l_Z = [d, j_Z]; dl: [d, l_Z] = 0; jj: [j_Z, j_W] = 0;
    lj: [l_Z, j_W] = j_[Z,W]; ll: [l_Z, l_W] = l_[Z,W].
    """
    df = d_form(f)
    jZ = lambda g: j_form(Z, g)
    jW = lambda g: j_form(W, g)
    lZ = lambda g: l_form(Z, g)
    lW = lambda g: l_form(W, g)
    ZW = dbracket(Z, W)
    lWf = lW(f)
    jWf = jW(f)
    zero = FormField.zero(f.model)
    memo = {}
    return {
        "dd": _diff(d_form(df), zero, V, memo),
        "l_is_dj": _diff(lZ(f), d_form(jZ(f)) + jZ(df), V, memo),
        "dl": _diff(d_form(lZ(f)), lZ(df), V, memo),
        "jj": _diff(jZ(jWf) + jW(jZ(f)), zero, V, memo),
        "lj": _diff(lZ(jWf) - jW(lZ(f)), j_form(ZW, f), V, memo),
        "ll": _diff(lZ(lWf) - lW(lZ(f)), l_form(ZW, f), V, memo),
    }


CARTAN = ("dd", "l_is_dj", "dl", "jj", "lj", "ll")


def cartan_check(model: BundleModel, Zs, fs, points, Ws=None):
    """Max residual per relation over the zipped samples."""
    if not Zs or not fs or not points:
        raise ValueError("samples must be nonempty")
    Ws = Ws if Ws is not None else Zs[1:] + Zs[:1]
    rep = {k: 0.0 for k in CARTAN}
    n = max(len(Zs), len(fs), len(points))
    for i in range(n):
        res = cartan_residuals(Zs[i % len(Zs)], Ws[i % len(Ws)], fs[i % len(fs)],
                               points[i % len(points)])
        for k, v in res.items():
            rep[k] = max(rep[k], v)
    return rep


def basic_residual(f: FormField, Zs, points):
    worst = 0.0
    for Z in Zs:
        jf, lf = j_form(Z, f), l_form(Z, f)
        for V in points:
            worst = max(worst, jf.evaluate(V).norm(), lf.evaluate(V).norm())
    return worst


def basic_check(f: FormField, model: BundleModel, Zs, points, tol=1e-6):
    r = basic_residual(f, Zs, points)
    return r <= tol, r


def restrict(f: FormField, target: BundleModel) -> FormField:
    """Pull back along the inclusion of the L = 0 slice."""
    src = f.model
    n0 = src.e_offset
    zeros = np.zeros(src.e_dim)
    out = {}
    for mono, coeffs in f.terms.items():
        if any(g >= n0 for g in mono):
            continue
        out[mono] = [(fac, Coeff((lambda c: lambda x, a, ell: c(x, a, zeros))(c)))
                     for fac, c in coeffs]
    return FormField(target, out)


def restriction_residuals(model: BundleModel, model0: BundleModel, Z0, f, V0):
    """Restriction to the L = 0 slice against d, j_Z0 and l_Z0 at one object-space point."""
    model0.components(Z0)  # rejects Z outside m0
    If = restrict(f, model0)
    memo = {}
    return {
        "restrict_d": _diff(restrict(d_form(f), model0), d_form(If), V0, memo),
        "restrict_j": _diff(restrict(j_form(Z0, f), model0), j_form(Z0, If), V0, memo),
        "restrict_l": _diff(restrict(l_form(Z0, f), model0), l_form(Z0, If), V0, memo),
    }


def restriction_morphism_check(model: BundleModel, samples=20, seed=0, fields=None):
    from .crossed_module import sample_rng

    model0 = model.object_model()
    rep = {"restrict_d": 0.0, "restrict_j": 0.0, "restrict_l": 0.0}
    for i in range(samples):
        rng = sample_rng(seed, "restriction", i)
        fs = fields if fields is not None else sample_fields(model, rng)
        f = fs[i % len(fs)]
        Z0 = model.sample_Z(rng, "g")
        V = model0.sample_point(rng)
        for k, v in restriction_residuals(model, model0, Z0, f, V).items():
            rep[k] = max(rep[k], v)
    return rep


# --- sample families ---------------------------------------------------------------------
def _rand_poly(model, rng):
    d = model.base_dim
    Q = rng.uniform(-1, 1, (d, d))
    return poly_coeff(rng.uniform(-1, 1), rng.uniform(-1, 1, d), (Q + Q.T) / 2)


def pullback_fields(model: BundleModel, rng):
    """pi-pullbacks: polynomials in x times products of dx."""
    d = model.base_dim
    out = [FormField.make(model, _rand_poly(model, rng))]
    for i in range(d):
        out.append(FormField.make(model, _rand_poly(model, rng), (f"dx{i + 1}",)))
    if d >= 2:
        out.append(FormField.make(model, _rand_poly(model, rng), ("dx1", "dx2")))
    return out


def witness_fields(model: BundleModel, rng):
    """Fields that are not basic: entries of a, components of L, coframe forms."""
    n = model.module.G.size
    i, j = rng.integers(0, n, 2)
    out = [FormField.make(model, a_entry_coeff(i, j)),
           FormField.make(model, const_coeff(1.0), ("w1",))]
    if model.e_dim:
        out.append(FormField.make(model, ell_coeff(int(rng.integers(0, model.e_dim)))))
        out.append(FormField.make(model, const_coeff(1.0), ("h1",)))
    return out


def _times_one_plus(p, q):
    return lambda x, a, ell: p(x, a, ell) + q(x, a, ell) * p(x, a, ell)


def sample_fields(model: BundleModel, rng):
    """Mixed family spanning degrees 0-2 in both kinds of fiber generators."""
    names = model.fiber_names
    n = model.module.G.size
    out = []
    for k in range(3):
        i, j = (int(v) for v in rng.integers(0, n, 2))
        coeff = _product(_rand_poly(model, rng), a_entry_coeff(i, j))
        if model.e_dim:
            c2 = ell_coeff(int(rng.integers(0, model.e_dim)))
            coeff = _times_one_plus(coeff, c2)
        gens = tuple(rng.choice(names, size=k, replace=False)) if k else ()
        out.append(FormField.make(model, coeff, gens))
    return out
