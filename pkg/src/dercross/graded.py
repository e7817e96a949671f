"""Finite Grassmann algebras with Z-graded generators.

Elements are stored in canonical form: a dict from monomials (sorted tuples of
generator indices) to nonzero real coefficients.  Swapping two odd generators
costs a sign; any generator appearing twice kills the monomial.  For odd
generators that is nilpotence, for even ones it makes them square-zero
infinitesimals (dual numbers), which is what the derivative machinery needs.

GradedMatrix stores a matrix with graded entries the other way round, as a
dict from monomial to a real coefficient array.  Matrix products then reduce
to a handful of dense matmuls.
"""
from __future__ import annotations

import numbers
from typing import Iterable, NamedTuple

import numpy as np

from .errors import ConfigurationError, ShapeError

ORIGINS = ("internal", "form", "auxiliary")
INHOMOGENEOUS = "inhomogeneous"


class GeneratorSpec(NamedTuple):
    name: str
    degree: int
    origin: str = "internal"

    @property
    def parity(self):
        return self.degree % 2


class GradedAlgebra:
    """The generator set of a finite graded commutative algebra."""

    def __init__(self, generators: Iterable, max_generators: int = 8):
        specs = []
        for g in generators:
            if not isinstance(g, GeneratorSpec):
                g = GeneratorSpec(*g)
            if g.origin not in ORIGINS:
                raise ConfigurationError(f"unknown origin tag {g.origin!r}")
            specs.append(GeneratorSpec(str(g.name), int(g.degree), g.origin))
        names = [g.name for g in specs]
        if len(set(names)) != len(names):
            raise ConfigurationError("generator names must be unique")
        if len(specs) > max_generators:
            raise ConfigurationError(
                f"{len(specs)} generators exceed the cap of {max_generators}")
        self.generators = tuple(specs)
        self.max_generators = max_generators
        self.index = {g.name: i for i, g in enumerate(specs)}
        self._deg = tuple(g.degree for g in specs)
        self._odd = tuple(g.degree % 2 == 1 for g in specs)
        self._mul_cache = {}

    def __repr__(self):
        gens = ", ".join(f"{g.name}:{g.degree}" for g in self.generators)
        return f"GradedAlgebra({gens})"

    def __eq__(self, other):
        return isinstance(other, GradedAlgebra) and (
            self is other or self.generators == other.generators)

    def __hash__(self):
        return hash(self.generators)

    def __len__(self):
        return len(self.generators)

    # -- monomial bookkeeping -------------------------------------------------
    def normalize(self, indices):
        """Sort a generator word. Returns (sign, monomial); sign 0 if it vanishes."""
        word = list(indices)
        if len(set(word)) != len(word):
            return 0, None
        sign = 1
        odd = self._odd
        # insertion sort, counting odd-odd transpositions
        for i in range(1, len(word)):
            j = i
            while j > 0 and word[j - 1] > word[j]:
                if odd[word[j - 1]] and odd[word[j]]:
                    sign = -sign
                word[j - 1], word[j] = word[j], word[j - 1]
                j -= 1
        return sign, tuple(word)

    def mul_monomials(self, m1, m2):
        key = (m1, m2)
        hit = self._mul_cache.get(key)
        if hit is None:
            if not m1 or not m2:
                hit = (1, m1 + m2)
            else:
                hit = self.normalize(m1 + m2)
            self._mul_cache[key] = hit
        return hit

    def degree(self, monomial):
        return sum(self._deg[i] for i in monomial)

    def parity(self, monomial):
        return sum(1 for i in monomial if self._odd[i]) % 2

    def monomial(self, names):
        """Canonical (sign, monomial) for a word given by generator names."""
        if isinstance(names, str):
            names = (names,)
        try:
            idx = [self.index[n] for n in names]
        except KeyError as exc:
            raise ConfigurationError(f"unknown generator {exc.args[0]!r}") from None
        return self.normalize(idx)

    # -- constructors ---------------------------------------------------------
    def gen(self, name, coeff=1.0):
        _, mono = self.monomial((name,))
        return GradedScalar(self, {mono: float(coeff)})

    def scalar(self, value):
        return GradedScalar(self, {(): float(value)})

    def zero(self):
        return GradedScalar(self, {})

    def check_same(self, other):
        if not (self is other or self == other):
            raise ConfigurationError("operands live over different generator sets")


def _check_monomial_input(algebra, monomial):
    if isinstance(monomial, (int, float)) and monomial == 1:
        return 1, ()
    if isinstance(monomial, str):
        monomial = (monomial,)
    monomial = tuple(monomial)
    if monomial and isinstance(monomial[0], str):
        return algebra.monomial(monomial)
    return algebra.normalize(monomial)


class GradedScalar:
    """Element of a finite Grassmann algebra, immutable."""

    __slots__ = ("algebra", "terms")
    __array_ufunc__ = None

    def __init__(self, algebra: GradedAlgebra, terms=None):
        self.algebra = algebra
        clean = {}
        if terms:
            for m, c in terms.items():
                c = float(c)
                if c != 0.0:
                    clean[m] = c
        self.terms = clean

    @classmethod
    def _raw(cls, algebra, terms):
        obj = cls.__new__(cls)
        obj.algebra = algebra
        obj.terms = terms
        return obj

    def _coerce(self, other):
        if isinstance(other, GradedScalar):
            self.algebra.check_same(other.algebra)
            return other
        if isinstance(other, numbers.Real):
            return GradedScalar._raw(self.algebra, {(): float(other)} if other else {})
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0.0) + c
            if v == 0.0:
                out.pop(m, None)
            else:
                out[m] = v
        return GradedScalar._raw(self.algebra, out)

    __radd__ = __add__

    def __neg__(self):
        return GradedScalar._raw(self.algebra, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, numbers.Real):
            if other == 0:
                return GradedScalar._raw(self.algebra, {})
            return GradedScalar._raw(
                self.algebra, {m: c * other for m, c in self.terms.items()})
        if isinstance(other, GradedMatrix):
            return NotImplemented
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        alg = self.algebra
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                s, m = alg.mul_monomials(m1, m2)
                if s:
                    v = out.get(m, 0.0) + s * c1 * c2
                    out[m] = v
        return GradedScalar(alg, out)

    def __rmul__(self, other):
        if isinstance(other, numbers.Real):
            return self.__mul__(other)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other.__mul__(self)

    def __truediv__(self, other):
        if isinstance(other, numbers.Real):
            return self * (1.0 / other)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, numbers.Real):
            other = GradedScalar._raw(self.algebra, {(): float(other)} if other else {})
        if not isinstance(other, GradedScalar):
            return NotImplemented
        return self.algebra == other.algebra and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "0"
        names = [g.name for g in self.algebra.generators]
        parts = []
        for m in sorted(self.terms, key=lambda k: (len(k), k)):
            c = self.terms[m]
            word = "*".join(names[i] for i in m)
            parts.append(f"{c:g}" + (f"*{word}" if word else ""))
        return " + ".join(parts)

    @property
    def body(self):
        return self.terms.get((), 0.0)

    @property
    def soul(self):
        return GradedScalar._raw(self.algebra, {m: c for m, c in self.terms.items() if m})

    def coefficient(self, monomial):
        return extract_coefficient(self, monomial)

    def left_coefficient(self, name):
        """x such that self = g*x + (terms free of g), for the generator g."""
        alg = self.algebra
        g = alg.index[name]
        odd = alg._odd
        out = {}
        for m, c in self.terms.items():
            if g in m:
                pos = m.index(g)
                s = -1 if odd[g] and sum(odd[i] for i in m[:pos]) % 2 else 1
                rest = m[:pos] + m[pos + 1:]
                out[rest] = out.get(rest, 0.0) + s * c
        return GradedScalar(alg, out)

    def drop(self, name):
        """The part of self not containing the generator."""
        g = self.algebra.index[name]
        return GradedScalar._raw(self.algebra,
                                 {m: c for m, c in self.terms.items() if g not in m})

    def degree(self):
        return degree_of(self)

    def norm(self):
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def __float__(self):
        if any(self.terms.keys() - {()}):
            raise ValueError("graded scalar has a nonzero soul")
        return self.body


def algebra_arithmetic(a: GradedScalar, b: GradedScalar, op: str) -> GradedScalar:
    if not isinstance(a, GradedScalar) or not isinstance(b, GradedScalar):
        raise TypeError("both operands must be GradedScalar")
    a.algebra.check_same(b.algebra)
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def extract_coefficient(a: GradedScalar, monomial) -> float:
    """Real coefficient of a monomial, which may be given in any order.

    extract(y1*y2, ('y2', 'y1')) == -1 since y2*y1 = -y1*y2.
    """
    sign, mono = _check_monomial_input(a.algebra, monomial)
    if sign == 0:
        return 0.0
    return sign * a.terms.get(mono, 0.0)


def degree_of(a):
    """Common degree of all monomials, or INHOMOGENEOUS."""
    if isinstance(a, numbers.Real):
        return 0
    alg = a.algebra
    degs = {alg.degree(m) for m in a.terms}
    if not degs:
        return 0
    if len(degs) == 1:
        return degs.pop()
    return INHOMOGENEOUS


class GradedMatrix:
    """Matrix (or any array) with entries in a GradedAlgebra."""

    __slots__ = ("algebra", "terms", "shape")
    __array_ufunc__ = None

    def __init__(self, algebra: GradedAlgebra, terms, shape=None):
        self.algebra = algebra
        clean = {}
        for m, arr in terms.items():
            arr = np.asarray(arr, dtype=float)
            if shape is None:
                shape = arr.shape
            elif arr.shape != tuple(shape):
                raise ShapeError("inconsistent coefficient shapes")
            if np.any(arr):
                clean[m] = arr
        if shape is None:
            raise ShapeError("shape required for an empty graded matrix")
        self.terms = clean
        self.shape = tuple(shape)

    @classmethod
    def _raw(cls, algebra, terms, shape):
        obj = cls.__new__(cls)
        obj.algebra = algebra
        obj.terms = terms
        obj.shape = shape
        return obj

    @classmethod
    def constant(cls, algebra, array):
        array = np.asarray(array, dtype=float)
        return cls(algebra, {(): array}, array.shape)

    @classmethod
    def from_entries(cls, algebra, entries):
        """Build from an object array of GradedScalar / float."""
        entries = np.asarray(entries, dtype=object)
        terms = {}
        for idx, v in np.ndenumerate(entries):
            if isinstance(v, GradedScalar):
                algebra.check_same(v.algebra)
                items = v.terms.items()
            else:
                items = [((), float(v))]
            for m, c in items:
                if m not in terms:
                    terms[m] = np.zeros(entries.shape)
                terms[m][idx] += c
        return cls(algebra, terms, entries.shape)

    def to_entries(self):
        out = np.empty(self.shape, dtype=object)
        for idx in np.ndindex(*self.shape):
            out[idx] = self.entry(*idx)
        return out

    def entry(self, *idx):
        return GradedScalar(self.algebra, {m: arr[idx] for m, arr in self.terms.items()})

    def __repr__(self):
        return f"GradedMatrix(shape={self.shape}, monomials={sorted(self.terms)})"

    def _coerce(self, other):
        if isinstance(other, GradedMatrix):
            self.algebra.check_same(other.algebra)
            return other
        if isinstance(other, np.ndarray):
            return GradedMatrix._raw(self.algebra, {(): other.astype(float)}, other.shape)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.shape != self.shape:
            raise ShapeError(f"shape mismatch {self.shape} vs {other.shape}")
        out = dict(self.terms)
        for m, arr in other.terms.items():
            out[m] = out[m] + arr if m in out else arr
        return GradedMatrix._raw(self.algebra, out, self.shape)

    __radd__ = __add__

    def __neg__(self):
        return GradedMatrix._raw(self.algebra, {m: -a for m, a in self.terms.items()},
                                 self.shape)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def _times(self, other, left):
        # graded scalar times matrix; `left` says the scalar sits on the left
        alg = self.algebra
        out = {}
        for m1, c in other.terms.items():
            for m2, arr in self.terms.items():
                s, m = alg.mul_monomials(m1, m2) if left else alg.mul_monomials(m2, m1)
                if s:
                    v = (s * c) * arr
                    out[m] = out[m] + v if m in out else v
        return GradedMatrix(alg, out, self.shape)

    def __mul__(self, other):
        if isinstance(other, numbers.Real):
            return GradedMatrix._raw(self.algebra,
                                     {m: a * other for m, a in self.terms.items()},
                                     self.shape) if other else self.zeros_like()
        if isinstance(other, GradedScalar):
            self.algebra.check_same(other.algebra)
            return self._times(other, left=False)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, numbers.Real):
            return self.__mul__(other)
        if isinstance(other, GradedScalar):
            self.algebra.check_same(other.algebra)
            return self._times(other, left=True)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, numbers.Real):
            return self * (1.0 / other)
        return NotImplemented

    def __matmul__(self, other):
        if isinstance(other, np.ndarray):
            return GradedMatrix(self.algebra,
                                {m: a @ other for m, a in self.terms.items()},
                                (self.shape[0],) + other.shape[1:])
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        alg = self.algebra
        out = {}
        for m1, a in self.terms.items():
            for m2, b in other.terms.items():
                s, m = alg.mul_monomials(m1, m2)
                if s:
                    v = a @ b
                    if s < 0:
                        v = -v
                    out[m] = out[m] + v if m in out else v
        shape = (self.shape[0],) + other.shape[1:]
        return GradedMatrix(alg, out, shape)

    def __rmatmul__(self, other):
        if isinstance(other, np.ndarray):
            return GradedMatrix(self.algebra,
                                {m: other @ a for m, a in self.terms.items()},
                                other.shape[:1] + self.shape[1:])
        return NotImplemented

    def __getitem__(self, idx):
        if isinstance(idx, tuple) and len(idx) == len(self.shape) and \
                all(isinstance(i, (int, np.integer)) for i in idx):
            return self.entry(*idx)
        return self.map_linear(lambda a: a[idx])

    @property
    def T(self):
        return self.map_linear(lambda a: a.T)

    def map_linear(self, fn):
        """Apply a real-linear array map coefficientwise."""
        terms = {m: np.asarray(fn(a), dtype=float) for m, a in self.terms.items()}
        if terms:
            shape = next(iter(terms.values())).shape
        else:
            shape = np.asarray(fn(np.zeros(self.shape))).shape
        return GradedMatrix(self.algebra, terms, shape)

    def zeros_like(self):
        return GradedMatrix._raw(self.algebra, {}, self.shape)

    @property
    def body(self):
        arr = self.terms.get(())
        return np.zeros(self.shape) if arr is None else arr

    @property
    def soul(self):
        return GradedMatrix._raw(self.algebra, {m: a for m, a in self.terms.items() if m},
                                 self.shape)

    def is_nilpotent(self):
        return () not in self.terms

    def coefficient(self, monomial):
        sign, mono = _check_monomial_input(self.algebra, monomial)
        if sign == 0 or mono not in self.terms:
            return np.zeros(self.shape)
        return sign * self.terms[mono]

    def left_coefficient(self, name):
        alg = self.algebra
        g = alg.index[name]
        odd = alg._odd
        out = {}
        for m, arr in self.terms.items():
            if g in m:
                pos = m.index(g)
                s = -1 if odd[g] and sum(odd[i] for i in m[:pos]) % 2 else 1
                rest = m[:pos] + m[pos + 1:]
                v = s * arr
                out[rest] = out[rest] + v if rest in out else v
        return GradedMatrix(alg, out, self.shape)

    def drop(self, name):
        g = self.algebra.index[name]
        return GradedMatrix._raw(self.algebra,
                                 {m: a for m, a in self.terms.items() if g not in m},
                                 self.shape)

    def degree(self):
        alg = self.algebra
        degs = {alg.degree(m) for m in self.terms}
        if not degs:
            return 0
        return degs.pop() if len(degs) == 1 else INHOMOGENEOUS

    def parity(self):
        alg = self.algebra
        pars = {alg.parity(m) for m in self.terms}
        if len(pars) > 1:
            return INHOMOGENEOUS
        return pars.pop() if pars else 0

    def norm(self):
        return max((float(np.max(np.abs(a))) for a in self.terms.values()), default=0.0)

    def inv(self):
        """Inverse via body inverse and the terminating Neumann series."""
        if len(self.shape) != 2 or self.shape[0] != self.shape[1]:
            raise ShapeError("inverse needs a square matrix")
        binv = np.linalg.inv(self.body)
        n = self.soul
        step = -(binv @ n)  # -B^{-1} S, nilpotent
        total = GradedMatrix.constant(self.algebra, np.eye(self.shape[0]))
        power = total
        while True:
            power = power @ step
            if not power.terms:
                break
            total = total + power
        return total @ binv


def as_graded(x, algebra):
    if isinstance(x, GradedMatrix):
        algebra.check_same(x.algebra)
        return x
    return GradedMatrix.constant(algebra, np.asarray(x, dtype=float))


def graded_linear(fn, x):
    """Apply a real-linear map to a plain or graded array."""
    if isinstance(x, GradedMatrix):
        return x.map_linear(fn)
    return fn(x)


def graded_bilinear(fn, x, y):
    """Lift a real-bilinear map: fn(sum_m x_m m, sum_n y_n n) = sum (m n) fn(x_m, y_n)."""
    gx, gy = isinstance(x, GradedMatrix), isinstance(y, GradedMatrix)
    if not gx and not gy:
        return fn(x, y)
    alg = x.algebra if gx else y.algebra
    xt = x.terms if gx else {(): np.asarray(x, dtype=float)}
    yt = y.terms if gy else {(): np.asarray(y, dtype=float)}
    if gx and gy:
        alg.check_same(y.algebra)
    out = {}
    shape = None
    for m1, a in xt.items():
        for m2, b in yt.items():
            s, m = alg.mul_monomials(m1, m2)
            if s:
                v = s * np.asarray(fn(a, b), dtype=float)
                out[m] = out[m] + v if m in out else v
    if not out:
        zx = np.zeros(x.shape) if gx else np.asarray(x, dtype=float)
        zy = np.zeros(y.shape) if gy else np.asarray(y, dtype=float)
        shape = np.asarray(fn(zx, zy)).shape
    return GradedMatrix(alg, out, shape)


def body(x):
    return x.body if isinstance(x, GradedMatrix) else np.asarray(x, dtype=float)
