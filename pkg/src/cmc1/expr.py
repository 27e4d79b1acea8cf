"""Expression trees for secondary Gauss maps that are not rational.

Functions are built from ``z``, constants, ``+ - * /``, integer powers,
complex powers, ``log``, ``exp``, ``tan`` and ``sqrt``.  Evaluation comes in
two flavours: plain complex values and truncated Taylor jets (forward-mode
automatic differentiation), which is how Schwarzian derivatives of these
functions are computed.

Multivalued nodes (``log``, ``pow``, ``sqrt``) are all routed through a
logarithm.  Each such node keeps a reference imaginary part in a branch
state; a new evaluation picks the branch of ``log`` nearest that reference.
Starting from no state gives principal values.

Prefix grammar (used by catalog files)::

    expr   := "z" | "i" | number | "(" op expr* ")"
    number := integer | p/q | decimal
    op     := + | - | * | / | ^ | pow | log | exp | tan | sqrt | c

``(^ e n)`` is an integer power, ``(pow e c)`` raises to a constant complex
exponent, ``(c re im)`` is a complex constant and ``(- e)`` negates.
"""

from __future__ import annotations

import cmath
import math
import re
from fractions import Fraction
from typing import Sequence

import numpy as np

from .gaussian import GaussianRational, is_exact

TWO_PI = 2 * math.pi


class Jet:
    """Truncated Taylor series c[0] + c[1] t + ... + c[n] t**n."""

    __slots__ = ("c",)

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs, dtype=complex)

    @property
    def order(self) -> int:
        return len(self.c) - 1

    @classmethod
    def const(cls, v: complex, order: int) -> "Jet":
        c = np.zeros(order + 1, dtype=complex)
        c[0] = v
        return cls(c)

    @classmethod
    def variable(cls, z: complex, order: int) -> "Jet":
        c = np.zeros(order + 1, dtype=complex)
        c[0] = z
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    def derivatives(self) -> np.ndarray:
        """f, f', f'', ... recovered from the Taylor coefficients."""
        return np.array([math.factorial(k) * v for k, v in enumerate(self.c)])

    def __add__(self, o: "Jet") -> "Jet":
        return Jet(self.c + o.c)

    def __sub__(self, o: "Jet") -> "Jet":
        return Jet(self.c - o.c)

    def __neg__(self) -> "Jet":
        return Jet(-self.c)

    def __mul__(self, o: "Jet") -> "Jet":
        n = len(self.c)
        return Jet(np.convolve(self.c, o.c)[:n])

    def __truediv__(self, o: "Jet") -> "Jet":
        a, b = self.c, o.c
        n = len(a)
        if b[0] == 0:
            raise ZeroDivisionError("jet division by a series vanishing at the base point")
        q = np.zeros(n, dtype=complex)
        for k in range(n):
            s = a[k] - sum(b[j] * q[k - j] for j in range(1, k + 1))
            q[k] = s / b[0]
        return Jet(q)

    def scale(self, s: complex) -> "Jet":
        return Jet(self.c * s)

    def ipow(self, n: int) -> "Jet":
        if n < 0:
            return Jet.const(1.0, self.order) / self.ipow(-n)
        result, base = Jet.const(1.0, self.order), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def exp(self) -> "Jet":
        a = self.c
        n = len(a)
        e = np.zeros(n, dtype=complex)
        e[0] = cmath.exp(a[0])
        for k in range(1, n):
            e[k] = sum(j * a[j] * e[k - j] for j in range(1, k + 1)) / k
        return Jet(e)

    def log(self, l0: complex) -> "Jet":
        """Logarithm with the constant term supplied (branch chosen by caller)."""
        a = self.c
        n = len(a)
        out = np.zeros(n, dtype=complex)
        out[0] = l0
        for k in range(1, n):
            s = a[k] - sum(j * out[j] * a[k - j] for j in range(1, k)) / k
            out[k] = s / a[0]
        return Jet(out)

    def sincos(self) -> tuple["Jet", "Jet"]:
        a = self.c
        n = len(a)
        s = np.zeros(n, dtype=complex)
        c = np.zeros(n, dtype=complex)
        s[0], c[0] = cmath.sin(a[0]), cmath.cos(a[0])
        for k in range(1, n):
            s[k] = sum(j * a[j] * c[k - j] for j in range(1, k + 1)) / k
            c[k] = -sum(j * a[j] * s[k - j] for j in range(1, k + 1)) / k
        return Jet(s), Jet(c)


class _Ctx:
    """Branch bookkeeping for one evaluation."""

    __slots__ = ("refs", "out")

    def __init__(self, refs: Sequence[float] | None, n: int):
        self.refs = refs
        self.out = [0.0] * n

    def log(self, idx: int, a: complex) -> complex:
        if a == 0:
            raise ZeroDivisionError("logarithm of zero")
        L = cmath.log(a)
        if self.refs is not None:
            k = round((self.refs[idx] - L.imag) / TWO_PI)
            L = complex(L.real, L.imag + TWO_PI * k)
        self.out[idx] = L.imag
        return L


# --------------------------------------------------------------------------
# nodes
# --------------------------------------------------------------------------


class Node:
    branchy = False

    def children(self) -> tuple:
        return ()

    # building helpers
    def __add__(self, o):
        return Add((self, _lift(o)))

    def __radd__(self, o):
        return Add((_lift(o), self))

    def __sub__(self, o):
        return Sub(self, _lift(o))

    def __rsub__(self, o):
        return Sub(_lift(o), self)

    def __mul__(self, o):
        return Mul((self, _lift(o)))

    def __rmul__(self, o):
        return Mul((_lift(o), self))

    def __truediv__(self, o):
        return Div(self, _lift(o))

    def __rtruediv__(self, o):
        return Div(_lift(o), self)

    def __neg__(self):
        return Neg(self)

    def __pow__(self, n):
        if isinstance(n, int):
            return IPow(self, n)
        return Pow(self, _lift(n))


def _lift(x) -> Node:
    if isinstance(x, Node):
        return x
    return Const(x)


class Var(Node):
    def value(self, z, ctx):
        return z

    def jet(self, z, order, ctx):
        return Jet.variable(z, order)

    def prefix(self):
        return "z"


class Const(Node):
    def __init__(self, v):
        self.v = GaussianRational.coerce(v) if is_exact(v) else complex(v)
        self.cv = complex(self.v)

    def value(self, z, ctx):
        return self.cv

    def jet(self, z, order, ctx):
        return Jet.const(self.cv, order)

    def prefix(self):
        v = self.v
        if isinstance(v, GaussianRational):
            if v.im == 0:
                return str(v.re)
            return f"(c {v.re} {v.im})"
        if v.imag == 0:
            return repr(v.real)
        return f"(c {v.real!r} {v.imag!r})"


class Add(Node):
    def __init__(self, args):
        self.args = tuple(args)

    def children(self):
        return self.args

    def value(self, z, ctx):
        return sum((a.value(z, ctx) for a in self.args), 0j)

    def jet(self, z, order, ctx):
        out = Jet.const(0, order)
        for a in self.args:
            out = out + a.jet(z, order, ctx)
        return out

    def prefix(self):
        return "(+ " + " ".join(a.prefix() for a in self.args) + ")"


class Sub(Node):
    def __init__(self, a, b):
        self.a, self.b = a, b

    def children(self):
        return (self.a, self.b)

    def value(self, z, ctx):
        return self.a.value(z, ctx) - self.b.value(z, ctx)

    def jet(self, z, order, ctx):
        return self.a.jet(z, order, ctx) - self.b.jet(z, order, ctx)

    def prefix(self):
        return f"(- {self.a.prefix()} {self.b.prefix()})"


class Neg(Node):
    def __init__(self, a):
        self.a = a

    def children(self):
        return (self.a,)

    def value(self, z, ctx):
        return -self.a.value(z, ctx)

    def jet(self, z, order, ctx):
        return -self.a.jet(z, order, ctx)

    def prefix(self):
        return f"(- {self.a.prefix()})"


class Mul(Node):
    def __init__(self, args):
        self.args = tuple(args)

    def children(self):
        return self.args

    def value(self, z, ctx):
        out = 1 + 0j
        for a in self.args:
            out *= a.value(z, ctx)
        return out

    def jet(self, z, order, ctx):
        out = Jet.const(1, order)
        for a in self.args:
            out = out * a.jet(z, order, ctx)
        return out

    def prefix(self):
        return "(* " + " ".join(a.prefix() for a in self.args) + ")"


class Div(Node):
    def __init__(self, a, b):
        self.a, self.b = a, b

    def children(self):
        return (self.a, self.b)

    def value(self, z, ctx):
        return self.a.value(z, ctx) / self.b.value(z, ctx)

    def jet(self, z, order, ctx):
        return self.a.jet(z, order, ctx) / self.b.jet(z, order, ctx)

    def prefix(self):
        return f"(/ {self.a.prefix()} {self.b.prefix()})"


class IPow(Node):
    def __init__(self, a, n: int):
        self.a, self.n = a, int(n)

    def children(self):
        return (self.a,)

    def value(self, z, ctx):
        return self.a.value(z, ctx) ** self.n

    def jet(self, z, order, ctx):
        return self.a.jet(z, order, ctx).ipow(self.n)

    def prefix(self):
        return f"(^ {self.a.prefix()} {self.n})"


class _Branchy(Node):
    branchy = True
    idx = -1


class Log(_Branchy):
    def __init__(self, a):
        self.a = a

    def children(self):
        return (self.a,)

    def value(self, z, ctx):
        return ctx.log(self.idx, self.a.value(z, ctx))

    def jet(self, z, order, ctx):
        a = self.a.jet(z, order, ctx)
        return a.log(ctx.log(self.idx, a.c[0]))

    def prefix(self):
        return f"(log {self.a.prefix()})"


class Pow(_Branchy):
    """a ** c = exp(c log a) for a constant exponent c."""

    def __init__(self, a, c):
        self.a = a
        c = _lift(c)
        if not isinstance(c, Const):
            if _has_var(c) or any(n.branchy for n in _walk(c)):
                raise ValueError("pow exponent must be a constant")
            c = Const(c.value(0j, _Ctx(None, 0)))
        self.c = c

    def children(self):
        return (self.a,)

    def value(self, z, ctx):
        return cmath.exp(self.c.cv * ctx.log(self.idx, self.a.value(z, ctx)))

    def jet(self, z, order, ctx):
        a = self.a.jet(z, order, ctx)
        return a.log(ctx.log(self.idx, a.c[0])).scale(self.c.cv).exp()

    def prefix(self):
        return f"(pow {self.a.prefix()} {self.c.prefix()})"


class Sqrt(_Branchy):
    def __init__(self, a):
        self.a = a

    def children(self):
        return (self.a,)

    def value(self, z, ctx):
        return cmath.exp(0.5 * ctx.log(self.idx, self.a.value(z, ctx)))

    def jet(self, z, order, ctx):
        a = self.a.jet(z, order, ctx)
        return a.log(ctx.log(self.idx, a.c[0])).scale(0.5).exp()

    def prefix(self):
        return f"(sqrt {self.a.prefix()})"


class Exp(Node):
    def __init__(self, a):
        self.a = a

    def children(self):
        return (self.a,)

    def value(self, z, ctx):
        return cmath.exp(self.a.value(z, ctx))

    def jet(self, z, order, ctx):
        return self.a.jet(z, order, ctx).exp()

    def prefix(self):
        return f"(exp {self.a.prefix()})"


class Tan(Node):
    def __init__(self, a):
        self.a = a

    def children(self):
        return (self.a,)

    def value(self, z, ctx):
        return cmath.tan(self.a.value(z, ctx))

    def jet(self, z, order, ctx):
        s, c = self.a.jet(z, order, ctx).sincos()
        return s / c

    def prefix(self):
        return f"(tan {self.a.prefix()})"


class Rational(Node):
    """A RationalMap embedded in an expression."""

    def __init__(self, R):
        self.R = R

    def value(self, z, ctx):
        return self.R.num(z) / self.R.den(z)

    def jet(self, z, order, ctx):
        n = self.R.num.to_float().taylor_shift(z).coeffs
        d = self.R.den.to_float().taylor_shift(z).coeffs
        pad = lambda cs: [complex(c) for c in cs[: order + 1]] + [0j] * (order + 1 - len(cs[: order + 1]))
        return Jet(pad(n)) / Jet(pad(d))

    def prefix(self):
        raise ValueError("rational maps serialize through their coefficients, not the prefix grammar")


def _walk(node: Node):
    yield node
    for ch in node.children():
        yield from _walk(ch)


def _has_var(node: Node) -> bool:
    return any(isinstance(n, (Var, Rational)) for n in _walk(node))


def log(a):
    return Log(_lift(a))


def exp(a):
    return Exp(_lift(a))


def tan(a):
    return Tan(_lift(a))


def sqrt(a):
    return Sqrt(_lift(a))


def power(a, c):
    return Pow(_lift(a), c)


z = Var()


# --------------------------------------------------------------------------
# function wrapper
# --------------------------------------------------------------------------


class ExprFunction:
    """A holomorphic function of z given by an expression tree.

    ``state`` arguments are branch states as returned by :meth:`track`;
    ``None`` means principal branches.
    """

    def __init__(self, root: Node | str):
        if isinstance(root, str):
            root = parse(root)
        self.root = _lift(root)
        self._branch_nodes = []
        self._index(self.root)

    def _index(self, node):
        if node.branchy:
            node.idx = len(self._branch_nodes)
            self._branch_nodes.append(node)
        for ch in node.children():
            self._index(ch)

    @property
    def n_branches(self) -> int:
        return len(self._branch_nodes)

    @property
    def multivalued(self) -> bool:
        return bool(self._branch_nodes)

    def __call__(self, z: complex, state=None) -> complex:
        return self.root.value(complex(z), _Ctx(state, self.n_branches))

    def evaluate(self, z: complex, state=None) -> tuple[complex, tuple]:
        """Value at z and the branch state read off at z."""
        ctx = _Ctx(state, self.n_branches)
        v = self.root.value(complex(z), ctx)
        return v, tuple(ctx.out)

    def track(self, z: complex, state=None) -> tuple:
        return self.evaluate(z, state)[1]

    def jet(self, z: complex, order: int = 3, state=None) -> Jet:
        return self.root.jet(complex(z), order, _Ctx(state, self.n_branches))

    def derivative_value(self, z: complex, state=None) -> complex:
        return complex(self.jet(z, 1, state).c[1])

    def eval_array(self, zs: np.ndarray) -> np.ndarray:
        """Principal-branch values on an array (for contouring)."""
        flat = np.asarray(zs, dtype=complex).ravel()
        out = np.empty_like(flat)
        for i, v in enumerate(flat):
            try:
                out[i] = self(v)
            except (ZeroDivisionError, OverflowError, ValueError):
                out[i] = complex("nan")
        return out.reshape(np.shape(zs))

    def prefix(self) -> str:
        return self.root.prefix()

    def __repr__(self) -> str:
        try:
            return f"ExprFunction({self.prefix()!r})"
        except ValueError:
            return "ExprFunction(<rational>)"


def schwarzian_value(f: ExprFunction, z: complex, state=None) -> complex:
    """S(f)(z) = f'''/f' - (3/2) (f''/f')**2 from a third-order jet."""
    d = f.jet(z, 3, state).derivatives()
    if d[1] == 0:
        raise ZeroDivisionError("Schwarzian undefined where f' = 0")
    r = d[2] / d[1]
    return d[3] / d[1] - 1.5 * r * r


# --------------------------------------------------------------------------
# prefix parser
# --------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(\(|\)|[^\s()]+)")
_UNARY = {"log": Log, "exp": Exp, "tan": Tan, "sqrt": Sqrt}


def _tokens(s: str) -> list[str]:
    pos, out = 0, []
    s = s.strip()
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m:
            raise ValueError(f"bad token at {pos} in {s!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


def _number(tok: str):
    try:
        return GaussianRational(Fraction(tok))
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"unknown atom {tok!r}") from None


def parse(text: str) -> Node:
    """Parse the prefix grammar into an expression tree."""
    toks = _tokens(text)
    node, pos = _parse(toks, 0)
    if pos != len(toks):
        raise ValueError(f"trailing input in {text!r}")
    return node


def _parse(toks: list[str], pos: int) -> tuple[Node, int]:
    if pos >= len(toks):
        raise ValueError("unexpected end of expression")
    t = toks[pos]
    if t == ")":
        raise ValueError("unexpected ')'")
    if t != "(":
        if t == "z":
            return Var(), pos + 1
        if t == "i":
            return Const(GaussianRational(0, 1)), pos + 1
        return Const(_number(t)), pos + 1
    if pos + 1 >= len(toks):
        raise ValueError("unexpected end of expression")
    op = toks[pos + 1]
    pos += 2
    args = []
    if op == "c":
        if len(toks) < pos + 3 or toks[pos + 2] != ")" or "(" in toks[pos : pos + 2]:
            raise ValueError("(c re im) takes two numbers")
        re_t, im_t = toks[pos], toks[pos + 1]
        if re_t == ")" or im_t == ")":
            raise ValueError("(c re im) takes two numbers")
        v = _number(re_t) + _number(im_t) * GaussianRational(0, 1)
        return Const(v), pos + 3
    while toks[pos] != ")":
        a, pos = _parse(toks, pos)
        args.append(a)
        if pos >= len(toks):
            raise ValueError("missing ')'")
    pos += 1
    if op == "+":
        return Add(args), pos
    if op == "*":
        return Mul(args), pos
    if op == "-":
        if len(args) == 1:
            return Neg(args[0]), pos
        if len(args) == 2:
            return Sub(*args), pos
    elif op == "/" and len(args) == 2:
        return Div(*args), pos
    elif op == "^" and len(args) == 2:
        n = args[1]
        if not (isinstance(n, Const) and isinstance(n.v, GaussianRational) and n.v.im == 0 and n.v.re.denominator == 1):
            raise ValueError("^ needs an integer exponent; use pow for other exponents")
        return IPow(args[0], int(n.v.re)), pos
    elif op == "pow" and len(args) == 2:
        return Pow(args[0], args[1]), pos
    elif op in _UNARY and len(args) == 1:
        return _UNARY[op](args[0]), pos
    raise ValueError(f"bad use of operator {op!r} with {len(args)} argument(s)")
