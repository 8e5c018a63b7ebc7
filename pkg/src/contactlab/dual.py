"""Tagged dual numbers over numpy arrays.

A :class:`Dual` carries a value and a first-order perturbation for one
infinitesimal, identified by an integer tag. Values and perturbations may
themselves be duals with *smaller* tags, which gives exact higher derivatives
by nesting: the most recently created perturbation is always the outermost
layer, so nested differentiation never confuses two infinitesimals.

Payloads are plain floats or numpy arrays, so one pass differentiates a whole
batch of sample points at once.
"""

import itertools

import numpy as np

from .errors import DomainError

_tags = itertools.count(1)


def new_tag():
    return next(_tags)


class Dual:
    __slots__ = ("tag", "val", "der")
    __array_ufunc__ = None  # make numpy defer to our reflected operators

    def __init__(self, tag, val, der):
        self.tag = tag
        self.val = val
        self.der = der

    def __repr__(self):
        return f"Dual(tag={self.tag}, val={self.val!r}, der={self.der!r})"

    # arithmetic

    def __add__(self, other):
        t, a0, a1, b0, b1 = _lift(self, other)
        return Dual(t, a0 + b0, a1 + b1)

    __radd__ = __add__

    def __sub__(self, other):
        t, a0, a1, b0, b1 = _lift(self, other)
        return Dual(t, a0 - b0, a1 - b1)

    def __rsub__(self, other):
        t, a0, a1, b0, b1 = _lift(other, self)
        return Dual(t, a0 - b0, a1 - b1)

    def __mul__(self, other):
        t, a0, a1, b0, b1 = _lift(self, other)
        return Dual(t, a0 * b0, a0 * b1 + a1 * b0)

    __rmul__ = __mul__

    def __truediv__(self, other):
        t, a0, a1, b0, b1 = _lift(self, other)
        q = a0 / b0
        return Dual(t, q, (a1 - q * b1) / b0)

    def __rtruediv__(self, other):
        t, a0, a1, b0, b1 = _lift(other, self)
        q = a0 / b0
        return Dual(t, q, (a1 - q * b1) / b0)

    def __neg__(self):
        return Dual(self.tag, -self.val, -self.der)

    def __pos__(self):
        return self

    def __pow__(self, k):
        if not isinstance(k, (int, np.integer)):
            raise TypeError("dual numbers support integer exponents only")
        k = int(k)
        if k == 0:
            return 1.0
        if k == 1:
            return self
        return Dual(self.tag, self.val ** k, k * self.val ** (k - 1) * self.der)

    def __getitem__(self, idx):
        return Dual(self.tag, self.val[idx], self.der[idx])

    @property
    def shape(self):
        return np.shape(real(self))


def tag_of(x):
    return x.tag if isinstance(x, Dual) else 0


def split(x, tag):
    """Value and perturbation of ``x`` with respect to ``tag``."""
    if isinstance(x, Dual) and x.tag == tag:
        return x.val, x.der
    return x, 0.0


def split_full(x, tag):
    """Like :func:`split` but the zero perturbation has the shape of ``x``."""
    if isinstance(x, Dual) and x.tag == tag:
        return x.val, _broadcast_to(x.der, np.shape(real(x)))
    return x, np.zeros(np.shape(real(x)))


def _broadcast_to(x, shape):
    if isinstance(x, Dual):
        return Dual(x.tag, _broadcast_to(x.val, shape), _broadcast_to(x.der, shape))
    return np.broadcast_to(x, shape)


def _lift(a, b):
    t = max(tag_of(a), tag_of(b))
    a0, a1 = split(a, t)
    b0, b1 = split(b, t)
    return t, a0, a1, b0, b1


def real(x):
    while isinstance(x, Dual):
        x = x.val
    return x


def derivative(y, tag):
    """Perturbation part of ``y`` for ``tag`` (zero when ``y`` does not depend on it)."""
    if isinstance(y, Dual) and y.tag == tag:
        return y.der
    return 0.0 * real(y) if np.ndim(real(y)) else 0.0


# elementary functions

def _unary(x, f, df):
    if isinstance(x, Dual):
        return Dual(x.tag, _unary(x.val, f, df), df(x.val) * x.der)
    return f(x)


def sin(x):
    return _unary(x, np.sin, cos)


def cos(x):
    return _unary(x, np.cos, lambda v: -sin(v))


def tan(x):
    if np.any(np.cos(real(x)) == 0.0):
        raise DomainError("tan evaluated at a pole")
    return _unary(x, np.tan, lambda v: 1.0 / cos(v) ** 2)


def sinh(x):
    return _unary(x, np.sinh, cosh)


def cosh(x):
    return _unary(x, np.cosh, sinh)


def exp(x):
    return _unary(x, np.exp, exp)


def log(x):
    if np.any(real(x) <= 0.0):
        raise DomainError("ln of a non-positive number")
    return _unary(x, np.log, lambda v: 1.0 / v)


def sqrt(x):
    r = real(x)
    if np.any(r < 0.0):
        raise DomainError("sqrt of a negative number")
    if isinstance(x, Dual) and np.any(r == 0.0):
        raise DomainError("sqrt is not differentiable at 0")
    return _unary(x, np.sqrt, lambda v: 0.5 / sqrt(v))


def absolute(x):
    return _unary(x, np.abs, lambda v: np.sign(real(v)))


def divide(a, b):
    if np.any(real(b) == 0.0):
        raise DomainError("division by zero")
    return a / b


def power(a, k):
    if isinstance(a, float) and (k >= 0 or a != 0.0):
        return a ** k
    if k < 0 and np.any(real(a) == 0.0):
        raise DomainError("negative power of zero")
    if isinstance(a, Dual):
        return a ** k
    return np.power(np.asarray(a, dtype=float), k) if np.ndim(a) else float(a) ** k


# arrays of duals

def stack(items, axis=-1):
    """``np.stack`` for sequences whose entries may be duals of mixed tags."""
    items = list(items)
    t = max(tag_of(x) for x in items)
    if t == 0:
        arrs = [np.asarray(x, dtype=float) for x in items]
        shape = np.broadcast_shapes(*[a.shape for a in arrs])
        if not shape:
            return np.array(arrs)
        return np.stack([a if a.shape == shape else np.broadcast_to(a, shape) for a in arrs], axis=axis)
    pairs = [split(x, t) for x in items]
    val = stack([p[0] for p in pairs], axis)
    der = stack([p[1] for p in pairs], axis)
    shape = np.broadcast_shapes(np.shape(real(val)), np.shape(real(der)))
    return Dual(t, _broadcast_to(val, shape), _broadcast_to(der, shape))


def unstack(x, axis=-1):
    n = np.shape(real(x))[axis]
    idx = [slice(None)] * len(np.shape(real(x)))
    out = []
    for i in range(n):
        idx[axis] = i
        out.append(x[tuple(idx)])
    return out


def matvec(a, x):
    """Batched ``a @ x`` for a matrix ``(..., m, n)`` and vector ``(..., n)``."""
    t = max(tag_of(a), tag_of(x))
    if t == 0:
        return np.einsum("...ij,...j->...i", a, x)
    a0, a1 = split_full(a, t)
    x0, x1 = split_full(x, t)
    return Dual(t, matvec(a0, x0), matvec(a0, x1) + matvec(a1, x0))


def lstsq(a, b):
    """Batched least-squares solve differentiated through the dual layers.

    For a consistent system with full column rank the perturbation obeys
    ``x' = a^+ (b' - a' x)``, which is applied recursively per tag.
    """
    t = max(tag_of(a), tag_of(b))
    if t == 0:
        return np.einsum("...ij,...j->...i", np.linalg.pinv(a), b)
    a0, a1 = split_full(a, t)
    b0, b1 = split_full(b, t)
    x0 = lstsq(a0, b0)
    x1 = lstsq(a0, b1 - matvec(a1, x0))
    return Dual(t, x0, x1)


def det(rows):
    """Determinant of a small square matrix given as nested lists (dual-safe)."""
    k = len(rows)
    if k == 0:
        return 1.0
    if k == 1:
        return rows[0][0]
    if k == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = 0.0
    minor_rows = rows[1:]
    for j in range(k):
        entry = rows[0][j]
        if _is_zero(entry):
            continue
        minor = [r[:j] + r[j + 1:] for r in minor_rows]
        term = entry * det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def _is_zero(x):
    return not isinstance(x, Dual) and np.ndim(x) == 0 and x == 0.0
