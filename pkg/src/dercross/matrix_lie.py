"""Matrix Lie groups and algebras, exp/log, adjoint maps and Lie differentiation.

Group and algebra elements are plain float arrays in the hot paths and
GradedMatrix instances wherever Grassmann generators are involved.  The thin
MatrixGroupElement / MatrixAlgebraElement wrappers carry a tag and know how to
validate themselves; every function here accepts either form.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import DomainError, MembershipError, ShapeError
from .graded import GradedAlgebra, GradedMatrix, body

MEMBERSHIP_TOL = 1e-9
SAMPLE_RANGE = 0.8


# --- small helpers -----------------------------------------------------------
def hat(v):
    """so(3) matrix of a 3-vector."""
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def vee(m):
    return np.array([m[2, 1], m[0, 2], m[1, 0]])


def commutator(x, y):
    return x @ y - y @ x


# quaternions (w, x, y, z) realized as real 4x4 left-multiplication matrices
def _left_basis():
    e = np.eye(4)
    mats = []
    for k in range(4):
        cols = [quat_mul(e[k], e[j]) for j in range(4)]
        mats.append(np.array(cols).T)
    return mats


def _right_basis():
    e = np.eye(4)
    mats = []
    for k in range(4):
        cols = [quat_mul(e[j], e[k]) for j in range(4)]
        mats.append(np.array(cols).T)
    return mats


def quat_mul(p, q):
    w1, x1, y1, z1 = p
    w2, x2, y2, z2 = q
    return np.array([
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ])


QL = _left_basis()
QR = _right_basis()
_CONJ = np.diag([1.0, -1.0, -1.0, -1.0])


def quat_left(q):
    return sum(q[k] * QL[k] for k in range(4))


def quat_right(q):
    return sum(q[k] * QR[k] for k in range(4))


def su2_from_vector(v):
    """Left-multiplication matrix of the imaginary quaternion v (an su(2) element)."""
    return quat_left(np.concatenate([[0.0], v]))


def su2_to_vector(m):
    return np.asarray(m)[1:, 0].copy()


def quat_to_rotation(a):
    """Rotation q v q* as a 3x3 block; works for plain and graded 4x4 matrices.

    Entries are quadratic in q, so graded inputs are handled by building the
    right multiplication by q* linearly from the first column.
    """
    def right_conj(m):
        return quat_right(_CONJ @ m[:, 0])

    if isinstance(a, GradedMatrix):
        rc = a.map_linear(right_conj)
        return (a @ rc)[1:, 1:]
    a = np.asarray(a, dtype=float)
    return (a @ right_conj(a))[1:, 1:]


def rotation_to_quat(r):
    """Unit quaternion with nonnegative scalar part mapping to the rotation r."""
    r = np.asarray(r, dtype=float)
    tr = np.trace(r)
    cands = [1 + tr, 1 + 2 * r[0, 0] - tr, 1 + 2 * r[1, 1] - tr, 1 + 2 * r[2, 2] - tr]
    k = int(np.argmax(cands))
    q = np.zeros(4)
    s = 2.0 * np.sqrt(max(cands[k], 0.0))
    if k == 0:
        q = [s / 4, (r[2, 1] - r[1, 2]) / s, (r[0, 2] - r[2, 0]) / s, (r[1, 0] - r[0, 1]) / s]
    elif k == 1:
        q = [(r[2, 1] - r[1, 2]) / s, s / 4, (r[0, 1] + r[1, 0]) / s, (r[0, 2] + r[2, 0]) / s]
    elif k == 2:
        q = [(r[0, 2] - r[2, 0]) / s, (r[0, 1] + r[1, 0]) / s, s / 4, (r[1, 2] + r[2, 1]) / s]
    else:
        q = [(r[1, 0] - r[0, 1]) / s, (r[0, 2] + r[2, 0]) / s, (r[1, 2] + r[2, 1]) / s, s / 4]
    q = np.asarray(q)
    if q[0] < 0:
        q = -q
    return q / np.linalg.norm(q)


# --- algebra and group descriptors ------------------------------------------
@dataclass(frozen=True, eq=False)
class MatrixAlgebra:
    """A matrix Lie algebra given by a basis of real matrices."""

    name: str
    basis: tuple
    size: int

    @property
    def dim(self):
        return len(self.basis)

    @property
    def _frame(self):
        return _frame_matrix(self)

    def coords(self, x):
        """Basis coordinates (least squares) of a plain matrix."""
        if self.dim == 0:
            return np.zeros(0)
        return np.linalg.lstsq(self._frame, np.asarray(x, dtype=float).ravel(), rcond=None)[0]

    def from_coords(self, c):
        out = np.zeros((self.size, self.size))
        for ci, b in zip(c, self.basis):
            out = out + ci * b
        return out

    def zero(self):
        return np.zeros((self.size, self.size))

    def sample(self, rng, scale=SAMPLE_RANGE):
        return self.from_coords(rng.uniform(-scale, scale, self.dim))

    def contains(self, x, tol=MEMBERSHIP_TOL):
        x = body(x)
        if x.shape != (self.size, self.size):
            return False
        if self.dim == 0:
            return bool(np.max(np.abs(x), initial=0.0) <= tol)
        return bool(np.max(np.abs(self.from_coords(self.coords(x)) - x)) <= tol)


_FRAMES = {}


def _frame_matrix(alg):
    key = id(alg)
    hit = _FRAMES.get(key)
    if hit is None or hit[0] is not alg:
        mat = np.array([b.ravel() for b in alg.basis]).T if alg.basis else np.zeros((alg.size ** 2, 0))
        hit = (alg, mat)
        _FRAMES[key] = hit
    return hit[1]


@dataclass(frozen=True, eq=False)
class MatrixGroup:
    """A connected matrix Lie group with its algebra and a membership test."""

    name: str
    algebra: MatrixAlgebra
    member: Callable = field(repr=False, compare=False, default=None)

    @property
    def size(self):
        return self.algebra.size

    def identity(self):
        return np.eye(self.size)

    def sample(self, rng, scale=SAMPLE_RANGE):
        return scipy.linalg.expm(self.algebra.sample(rng, scale))

    def contains(self, g, tol=MEMBERSHIP_TOL):
        g = body(g)
        if g.shape != (self.size, self.size):
            return False
        if abs(np.linalg.det(g)) < tol:
            return False
        return True if self.member is None else bool(self.member(g, tol))


def _orthogonal(g, tol):
    n = g.shape[0]
    return np.max(np.abs(g.T @ g - np.eye(n))) <= 10 * tol and np.linalg.det(g) > 0


def _su2_member(g, tol):
    q = g[:, 0]
    return _orthogonal(g, tol) and np.max(np.abs(quat_left(q) - g)) <= 10 * tol


def _unipotent_block(g, tol):
    n = g.shape[0] - 1
    target = np.eye(n + 1)
    target[:n, n] = g[:n, n]
    return np.max(np.abs(g - target)) <= tol


def so3():
    alg = MatrixAlgebra("so3", tuple(hat(e) for e in np.eye(3)), 3)
    return MatrixGroup("SO3", alg, _orthogonal)


def su2():
    alg = MatrixAlgebra("su2", tuple(su2_from_vector(e) for e in np.eye(3)), 4)
    return MatrixGroup("SU2", alg, _su2_member)


def gl(n):
    basis = []
    for i in range(n):
        for j in range(n):
            b = np.zeros((n, n))
            b[i, j] = 1.0
            basis.append(b)
    return MatrixGroup(f"GL{n}", MatrixAlgebra(f"gl{n}", tuple(basis), n), None)


def vector_group(n):
    """R^n as the additive group of unipotent blocks [[1, v], [0, 1]]."""
    basis = []
    for i in range(n):
        b = np.zeros((n + 1, n + 1))
        b[i, n] = 1.0
        basis.append(b)
    return MatrixGroup(f"R{n}", MatrixAlgebra(f"r{n}", tuple(basis), n + 1), _unipotent_block)


def trivial_group(size):
    def member(g, tol):
        return np.max(np.abs(g - np.eye(size))) <= tol

    return MatrixGroup("1", MatrixAlgebra("0", (), size), member)


# --- element wrappers --------------------------------------------------------
@dataclass(frozen=True, eq=False)
class MatrixGroupElement:
    entries: object
    group_tag: str = ""

    def validate(self, group: MatrixGroup, tol=MEMBERSHIP_TOL):
        if not group.contains(self.entries, tol):
            raise MembershipError(f"body not in {group.name}")
        return self


@dataclass(frozen=True, eq=False)
class MatrixAlgebraElement:
    entries: object
    algebra_tag: str = ""
    degree_tag: int = 0

    def validate(self, algebra: MatrixAlgebra, tol=MEMBERSHIP_TOL):
        if not algebra.contains(self.entries, tol):
            raise MembershipError(f"body not in {algebra.name}")
        x = self.entries
        if isinstance(x, GradedMatrix):
            d = x.degree()
            if x.terms and d != self.degree_tag:
                raise MembershipError(f"entries have degree {d}, tag says {self.degree_tag}")
        return self


def _unwrap(x):
    if isinstance(x, (MatrixGroupElement, MatrixAlgebraElement)):
        return x.entries
    return x


def _square(x):
    shape = x.shape if isinstance(x, GradedMatrix) else np.shape(x)
    if len(shape) != 2 or shape[0] != shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {shape}")
    return shape[0]


# --- exp / log ---------------------------------------------------------------
def _closure(alg, monos):
    found = {()} | set(monos)
    frontier = set(found)
    while frontier:
        new = set()
        for m in monos:
            for k in frontier:
                s, mk = alg.mul_monomials(m, k)
                if s and mk not in found:
                    new.add(mk)
        found |= new
        frontier = new
    return sorted(found, key=lambda k: (len(k), k))


def _regular(x: GradedMatrix):
    """Left-multiplication representation of x on (algebra)^n as a real matrix."""
    alg = x.algebra
    monos = _closure(alg, list(x.terms))
    index = {m: i for i, m in enumerate(monos)}
    n = x.shape[0]
    big = np.zeros((len(monos) * n, len(monos) * n))
    for m, a in x.terms.items():
        for k in monos:
            s, mk = alg.mul_monomials(m, k)
            if s:
                r, c = index[mk] * n, index[k] * n
                big[r:r + n, c:c + n] += s * a
    return big, monos, index


def _read_column(alg, big, monos, index, n):
    c = index[()] * n
    terms = {m: big[index[m] * n:(index[m] + 1) * n, c:c + n] for m in monos}
    return GradedMatrix(alg, terms, (n, n))


def _nilpotent_series(x: GradedMatrix, log=False):
    n = x.shape[0]
    alg = x.algebra
    total = GradedMatrix.constant(alg, np.zeros((n, n)) if log else np.eye(n))
    power = GradedMatrix.constant(alg, np.eye(n))
    k = 0
    while True:
        k += 1
        power = power @ x
        if not power.terms:
            return total
        if log:
            total = total + power * ((-1) ** (k + 1) / k)
        else:
            power = power * (1.0 / k)
            total = total + power


def mexp(x):
    """Matrix exponential for plain or graded square matrices.

    A purely nilpotent graded argument uses the terminating series, so
    mexp(abar*L) is exactly 1 + abar*L.  A plain body uses scaling and
    squaring; a mixed body/soul argument goes through the regular
    representation of the Grassmann algebra, which is again scaling and
    squaring on a larger real matrix.
    """
    wrapped = isinstance(x, MatrixAlgebraElement)
    tag = x.algebra_tag if wrapped else ""
    x = _unwrap(x)
    n = _square(x)
    if isinstance(x, GradedMatrix):
        if not x.terms:
            out = GradedMatrix.constant(x.algebra, np.eye(n))
        elif x.is_nilpotent():
            out = _nilpotent_series(x)
        elif len(x.terms) == 1:
            out = GradedMatrix.constant(x.algebra, scipy.linalg.expm(x.body))
        else:
            big, monos, index = _regular(x)
            out = _read_column(x.algebra, scipy.linalg.expm(big), monos, index, n)
    else:
        out = scipy.linalg.expm(np.asarray(x, dtype=float))
    return MatrixGroupElement(out, tag) if wrapped else out


def mlog(g):
    """Inverse of mexp near the identity.

    Raises DomainError when the spectral radius of body - 1 is at least 1,
    where the logarithm series stops converging.
    """
    wrapped = isinstance(g, MatrixGroupElement)
    tag = g.group_tag if wrapped else ""
    g = _unwrap(g)
    n = _square(g)
    b = body(g)
    rho = max(abs(np.linalg.eigvals(b - np.eye(n))), default=0.0)
    if rho >= 1.0:
        raise DomainError(f"spectral distance {rho:.3g} from identity is not below 1")
    if isinstance(g, GradedMatrix):
        if np.array_equal(b, np.eye(n)):
            out = _nilpotent_series(g - np.eye(n), log=True)
        elif len(g.terms) == 1:
            out = GradedMatrix.constant(g.algebra, np.real(scipy.linalg.logm(b)))
        else:
            big, monos, index = _regular(g)
            out = _read_column(g.algebra, np.real(scipy.linalg.logm(big)), monos, index, n)
    else:
        out = np.real(scipy.linalg.logm(np.asarray(g, dtype=float)))
    return MatrixAlgebraElement(out, tag) if wrapped else out


def minv(g):
    g = _unwrap(g)
    if isinstance(g, GradedMatrix):
        return g.inv()
    return np.linalg.inv(g)


def adjoint_group(g, x):
    """g x g^-1."""
    wrapped = isinstance(x, MatrixAlgebraElement)
    gv, xv = _unwrap(g), _unwrap(x)
    ng, nx = _square(gv), _square(xv)
    if ng != nx:
        raise ShapeError(f"cannot conjugate a {nx}x{nx} matrix by a {ng}x{ng} one")
    out = gv @ xv @ minv(gv)
    if wrapped:
        return MatrixAlgebraElement(out, x.algebra_tag, x.degree_tag)
    return out


def ad_series(y, x, terms=30):
    """exp(ad y)(x) summed as a series; an independent check on Ad(exp y)."""
    total = np.array(x, dtype=float)
    term = total
    for k in range(1, terms):
        term = commutator(y, term) / k
        total = total + term
    return total


def taylor_exp(x, terms=20):
    total = np.eye(x.shape[0])
    term = np.eye(x.shape[0])
    for k in range(1, terms):
        term = term @ x / k
        total = total + term
    return total


# --- Lie differentiation -----------------------------------------------------
@lru_cache(maxsize=None)
def aux_algebra(name="sigma", degree=1):
    return GradedAlgebra([(name, degree, "auxiliary")])


def central_difference(fn, step, richardson=False):
    """Derivative at 0 of a scalar-parameter map with plain or graded values."""
    def d(h):
        return (fn(h) - fn(-h)) * (0.5 / h)

    if not richardson:
        return d(step)
    return (d(step / 2) * 4.0 - d(step)) * (1.0 / 3.0)


def fd_differential(f, at, direction, step=1e-5, *, target="group", richardson=False,
                    odd=False):
    """Directional derivative of f along t -> at @ mexp(t * direction) at t = 0.

    target="group": returns (d/dt f) f(at)^-1, an algebra element.
    target="algebra": returns d/dt f.
    odd=True: the direction is not differenced at all; an auxiliary odd
    generator s is adjoined, f is evaluated at at @ (1 + s*direction) and the
    s coefficient is read off.  Exact, but f must accept graded matrices.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    at = np.asarray(_unwrap(at), dtype=float)
    direction = np.asarray(_unwrap(direction), dtype=float)
    if odd:
        alg = aux_algebra()
        shifted = GradedMatrix(alg, {(): at, (0,): at @ direction}, at.shape)
        val = f(shifted)
        if not isinstance(val, GradedMatrix):
            deriv = np.zeros(np.shape(val))
        else:
            deriv = val.left_coefficient("sigma").body
        base = body(val)
    else:
        def curve(t):
            return np.asarray(body(f(at @ scipy.linalg.expm(t * direction))), dtype=float)

        deriv = central_difference(curve, step, richardson)
        base = None
    if target == "algebra":
        return deriv
    if target != "group":
        raise ValueError(f"unknown target {target!r}")
    if base is None:
        base = np.asarray(body(f(at)), dtype=float)
    return deriv @ np.linalg.inv(base)


def curve_derivative(fn, t0=0.0, step=1e-5, richardson=False):
    return central_difference(lambda h: fn(t0 + h), step, richardson)


def max_abs(x) -> float:
    if isinstance(x, GradedMatrix):
        return x.norm()
    x = np.asarray(x, dtype=float)
    return float(np.max(np.abs(x))) if x.size else 0.0
