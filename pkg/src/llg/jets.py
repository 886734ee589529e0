"""Second-order forward-mode differentiation.

A :class:`Jet2` carries a value together with its gradient and Hessian with
respect to ``d`` seeded chart coordinates.  All arithmetic obeys the product,
quotient and chain rules truncated at order two, so evaluating an expression
on lifted coordinates yields exact (to roundoff) first and second partials.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DivisionByZero, DomainError, SeedError, SingularFraming, DomainBoundary

PIVOT_THRESHOLD = 1e-12


class Jet2:
    __slots__ = ("value", "grad", "hess")

    def __init__(self, value, grad, hess):
        self.value = float(value)
        self.grad = grad
        self.hess = hess

    @property
    def dim(self):
        return self.grad.shape[0]

    def __repr__(self):
        return f"Jet2({self.value!r}, grad={self.grad.tolist()}, hess={self.hess.tolist()})"

    def __add__(self, other):
        if not isinstance(other, Jet2):
            return Jet2(self.value + other, self.grad, self.hess)
        return Jet2(self.value + other.value, self.grad + other.grad, self.hess + other.hess)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.value, -self.grad, -self.hess)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if not isinstance(other, Jet2):
            return Jet2(self.value - other, self.grad, self.hess)
        return Jet2(self.value - other.value, self.grad - other.grad, self.hess - other.hess)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet2):
            return Jet2(self.value * other, self.grad * other, self.hess * other)
        a, b = self, other
        outer = np.outer(a.grad, b.grad)
        # group each symmetric piece so the sum stays bitwise symmetric
        return Jet2(
            a.value * b.value,
            a.grad * b.value + a.value * b.grad,
            (a.hess * b.value + a.value * b.hess) + (outer + outer.T),
        )

    __rmul__ = __mul__

    def reciprocal(self):
        v = self.value
        if v == 0.0:
            raise DivisionByZero("division by a jet with zero value")
        inv = 1.0 / v
        return _chain(self, inv, -inv * inv, 2.0 * inv * inv * inv)

    def __truediv__(self, other):
        if not isinstance(other, Jet2):
            if other == 0:
                raise DivisionByZero("division by zero")
            return Jet2(self.value / other, self.grad / other, self.hess / other)
        q = self * other.reciprocal()
        q.value = self.value / other.value
        return q

    def __rtruediv__(self, other):
        q = self.reciprocal() * other
        q.value = other / self.value
        return q

    def __pow__(self, exponent):
        return power(self, exponent)

    def __rpow__(self, base):
        return power(base, self)


def _chain(a: Jet2, f0, f1, f2) -> Jet2:
    """Compose a scalar function with values f(a), f'(a), f''(a) onto ``a``."""
    return Jet2(f0, f1 * a.grad, f2 * np.outer(a.grad, a.grad) + f1 * a.hess)


def lift(value, seed=None, d=1) -> Jet2:
    """Lift a real into the jet algebra, optionally as coordinate ``seed``."""
    grad = np.zeros(d)
    if seed is not None:
        if not 0 <= seed < d:
            raise SeedError(f"seed {seed} out of range for {d} coordinates")
        grad[seed] = 1.0
    return Jet2(value, grad, np.zeros((d, d)))


def lift_point(point) -> list[Jet2]:
    d = len(point)
    return [lift(float(v), k, d) for k, v in enumerate(point)]


def arith(op, a, b):
    """Binary arithmetic by name; ``op`` is one of add, sub, mul, div, pow."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if not isinstance(b, Jet2) and b == 0:
            raise DivisionByZero("division by zero")
        return a / b
    if op == "pow":
        return power(a, b)
    raise ValueError(f"unknown operation {op!r}")


MAX_INT_EXPONENT = 15


def _int_power(a, k):
    result = a
    for _ in range(k - 1):
        result = result * a
    return result


def power(base, exponent):
    """``base ** exponent``.

    Integer exponents with magnitude up to 15 use repeated multiplication so
    results are exact; anything else goes through exp(e*log(b)) and needs a
    positive base.
    """
    if not isinstance(exponent, Jet2):
        e = float(exponent)
        if e.is_integer() and abs(e) <= MAX_INT_EXPONENT:
            k = int(e)
            if k == 0:
                return lift(1.0, None, base.dim) if isinstance(base, Jet2) else 1.0
            if not isinstance(base, Jet2):
                if base == 0 and k < 0:
                    raise DivisionByZero("zero raised to a negative power")
                r = _int_power(float(base), abs(k))
                return 1.0 / r if k < 0 else r
            r = _int_power(base, abs(k))
            return r.reciprocal() if k < 0 else r
    bval = base.value if isinstance(base, Jet2) else float(base)
    if bval <= 0.0:
        raise DomainError("pow", bval)
    return exp(exponent * log(base))


def sin(a):
    if not isinstance(a, Jet2):
        return math.sin(a)
    s, c = math.sin(a.value), math.cos(a.value)
    return _chain(a, s, c, -s)


def cos(a):
    if not isinstance(a, Jet2):
        return math.cos(a)
    s, c = math.sin(a.value), math.cos(a.value)
    return _chain(a, c, -s, -c)


def tan(a):
    v = a.value if isinstance(a, Jet2) else float(a)
    if math.cos(v) == 0.0:
        raise DomainError("tan", v)
    t = math.tan(v)
    if not isinstance(a, Jet2):
        return t
    sec2 = 1.0 + t * t
    return _chain(a, t, sec2, 2.0 * t * sec2)


def exp(a):
    if not isinstance(a, Jet2):
        try:
            return math.exp(a)
        except OverflowError:
            raise DomainError("exp", a) from None
    try:
        e = math.exp(a.value)
    except OverflowError:
        raise DomainError("exp", a.value) from None
    return _chain(a, e, e, e)


def log(a):
    v = a.value if isinstance(a, Jet2) else float(a)
    if v <= 0.0:
        raise DomainError("log", v)
    if not isinstance(a, Jet2):
        return math.log(v)
    return _chain(a, math.log(v), 1.0 / v, -1.0 / (v * v))


def sqrt(a):
    v = a.value if isinstance(a, Jet2) else float(a)
    if v < 0.0:
        raise DomainError("sqrt", v)
    if not isinstance(a, Jet2):
        return math.sqrt(v)
    if v == 0.0:
        # derivatives blow up at the origin
        raise DomainError("sqrt", v)
    r = math.sqrt(v)
    return _chain(a, r, 0.5 / r, -0.25 / (r * v))


def sinh(a):
    if not isinstance(a, Jet2):
        return math.sinh(a)
    s, c = math.sinh(a.value), math.cosh(a.value)
    return _chain(a, s, c, s)


def cosh(a):
    if not isinstance(a, Jet2):
        return math.cosh(a)
    s, c = math.sinh(a.value), math.cosh(a.value)
    return _chain(a, c, s, c)


def tanh(a):
    if not isinstance(a, Jet2):
        return math.tanh(a)
    t = math.tanh(a.value)
    d1 = 1.0 - t * t
    return _chain(a, t, d1, -2.0 * t * d1)


def atan(a):
    if not isinstance(a, Jet2):
        return math.atan(a)
    v = a.value
    q = 1.0 / (1.0 + v * v)
    return _chain(a, math.atan(v), q, -2.0 * v * q * q)


ELEMENTARY = {
    "sin": sin,
    "cos": cos,
    "tan": tan,
    "exp": exp,
    "log": log,
    "sqrt": sqrt,
    "sinh": sinh,
    "cosh": cosh,
    "tanh": tanh,
    "atan": atan,
}


def elem(fn, a):
    try:
        f = ELEMENTARY[fn]
    except KeyError:
        raise ValueError(f"unknown elementary function {fn!r}") from None
    return f(a)


class JetMatrix:
    """Square matrix of :class:`Jet2` entries sharing one seed dimension."""

    def __init__(self, entries):
        self.entries = [list(row) for row in entries]
        n = len(self.entries)
        if any(len(row) != n for row in self.entries):
            raise ValueError("JetMatrix must be square")

    @property
    def n(self):
        return len(self.entries)

    @classmethod
    def from_arrays(cls, value, grad, hess):
        n = value.shape[0]
        return cls([[Jet2(value[i, j], grad[i, j].copy(), hess[i, j].copy())
                     for j in range(n)] for i in range(n)])

    def value(self) -> np.ndarray:
        return np.array([[e.value for e in row] for row in self.entries])

    def grad(self) -> np.ndarray:
        """Array ``G[i, j, k] = d entry[i][j] / dx^k``."""
        return np.array([[e.grad for e in row] for row in self.entries])

    def hess(self) -> np.ndarray:
        return np.array([[e.hess for e in row] for row in self.entries])

    def __matmul__(self, other: "JetMatrix") -> "JetMatrix":
        n = self.n
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = self.entries[i][0] * other.entries[0][j]
                for a in range(1, n):
                    acc = acc + self.entries[i][a] * other.entries[a][j]
                row.append(acc)
            out.append(row)
        return JetMatrix(out)


def _as_jet(x, d):
    return x if isinstance(x, Jet2) else lift(float(x), None, d)


def jet_matrix_inverse(W: JetMatrix, point=None) -> JetMatrix:
    """Gauss-Jordan inverse over the jet ring with partial pivoting.

    Pivots are chosen on the magnitude of the value part; a pivot below
    ``PIVOT_THRESHOLD`` raises :class:`SingularFraming`.
    """
    n = W.n
    d = next((e.dim for row in W.entries for e in row if isinstance(e, Jet2)), 1)
    a = [[_as_jet(e, d) for e in row] for row in W.entries]
    inv = [[lift(1.0 if i == j else 0.0, None, d) for j in range(n)] for i in range(n)]
    where = point if point is not None else ()
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(a[r][col].value))
        if abs(a[piv][col].value) < PIVOT_THRESHOLD:
            raise SingularFraming(where)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            inv[col], inv[piv] = inv[piv], inv[col]
        r = a[col][col].reciprocal()
        a[col] = [e * r for e in a[col]]
        inv[col] = [e * r for e in inv[col]]
        for row in range(n):
            if row == col:
                continue
            factor = a[row][col]
            if factor.value == 0.0 and not factor.grad.any() and not factor.hess.any():
                continue
            a[row] = [x - factor * y for x, y in zip(a[row], a[col])]
            inv[row] = [x - factor * y for x, y in zip(inv[row], inv[col])]
    return JetMatrix(inv)


def default_step(xk):
    return 1e-4 * (1.0 + abs(xk))


def _check_inside(x, domain):
    if domain is None:
        return
    for v, (lo, hi) in zip(x, domain):
        if v < lo or v > hi:
            raise DomainBoundary(x, domain)


def fd_derivative(f, x, k, h=None, domain=None):
    """Central-difference first partial of scalar field ``f`` along coordinate ``k``."""
    x = np.asarray(x, dtype=float)
    h = default_step(x[k]) if h is None else h
    xp, xm = x.copy(), x.copy()
    xp[k] += h
    xm[k] -= h
    _check_inside(xp, domain)
    _check_inside(xm, domain)
    return (f(xp) - f(xm)) / (2.0 * h)


def fd_second(f, x, k, l, h=None, domain=None):
    """Central-difference second partial d^2 f / dx^k dx^l."""
    x = np.asarray(x, dtype=float)
    hk = default_step(x[k]) if h is None else h
    hl = default_step(x[l]) if h is None else h
    if k == l:
        xp, xm = x.copy(), x.copy()
        xp[k] += hk
        xm[k] -= hk
        _check_inside(xp, domain)
        _check_inside(xm, domain)
        return (f(xp) - 2.0 * f(x) + f(xm)) / (hk * hk)
    vals = []
    for sk, sl in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
        y = x.copy()
        y[k] += sk * hk
        y[l] += sl * hl
        _check_inside(y, domain)
        vals.append(f(y))
    return (vals[0] - vals[1] - vals[2] + vals[3]) / (4.0 * hk * hl)
