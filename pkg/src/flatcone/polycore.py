"""Exact sparse multivariate polynomials over the rationals.

A :class:`RingContext` fixes an ordered list of variable names split into
fiber, parameter and auxiliary blocks.  Polynomials store a map from exponent
tuples (one entry per context variable) to nonzero ``gmpy2.mpq`` coefficients.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from gmpy2 import mpq

MAX_EXPONENT = 2**31 - 1


class ContextMismatch(ValueError):
    pass


class PolySyntaxError(ValueError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.message = message
        self.position = position


def _as_mpq(c):
    if isinstance(c, Fraction):
        return mpq(c.numerator, c.denominator)
    return mpq(c)


@dataclass(frozen=True)
class RingContext:
    fiber_vars: tuple = ()
    param_vars: tuple = ()
    aux_vars: tuple = ()
    variables: tuple = field(init=False, repr=False, compare=False)
    index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("fiber_vars", "param_vars", "aux_vars"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        names = self.fiber_vars + self.param_vars + self.aux_vars
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        for v in names:
            if not _IDENT.fullmatch(v):
                raise ValueError(f"bad variable name {v!r}")
        object.__setattr__(self, "variables", names)
        object.__setattr__(self, "index", {v: i for i, v in enumerate(names)})

    @property
    def nvars(self):
        return len(self.variables)

    def var(self, name):
        i = self.index[name]
        e = [0] * self.nvars
        e[i] = 1
        return Polynomial(self, {tuple(e): mpq(1)})

    def gens(self):
        return tuple(self.var(v) for v in self.variables)

    def const(self, c):
        c = _as_mpq(c)
        if not c:
            return Polynomial(self, {})
        return Polynomial(self, {(0,) * self.nvars: c})

    def zero(self):
        return Polynomial(self, {})

    def one(self):
        return self.const(1)

    def fresh_name(self, stem):
        """A variable name not yet used in this context."""
        if stem not in self.index:
            return stem
        i = 0
        while f"{stem}{i}" in self.index:
            i += 1
        return f"{stem}{i}"

    def extend(self, fiber=(), params=(), aux=()):
        return RingContext(self.fiber_vars + tuple(fiber),
                           self.param_vars + tuple(params),
                           self.aux_vars + tuple(aux))

    def __str__(self):
        s = "ring " + " ".join(self.fiber_vars) + " ;"
        if self.param_vars:
            s += " params " + " ".join(self.param_vars) + " ;"
        if self.aux_vars:
            s += " aux " + " ".join(self.aux_vars) + " ;"
        return s


class Polynomial:
    """Immutable sparse polynomial with rational coefficients."""

    __slots__ = ("ctx", "terms", "__dict__")

    def __init__(self, ctx, terms):
        self.ctx = ctx
        self.terms = terms

    @classmethod
    def from_terms(cls, ctx, items):
        terms = {}
        n = ctx.nvars
        for e, c in items:
            e = tuple(e)
            if len(e) != n:
                raise ValueError("exponent length does not match context")
            if any(x < 0 for x in e):
                raise ValueError("negative exponent")
            if any(x > MAX_EXPONENT for x in e):
                raise OverflowError("exponent exceeds machine width")
            c = _as_mpq(c) + terms.get(e, 0)
            if c:
                terms[e] = c
            else:
                terms.pop(e, None)
        return cls(ctx, terms)

    # -- basic queries -------------------------------------------------
    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    @cached_property
    def degree(self):
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    @cached_property
    def _max_exponent(self):
        return max((max(e, default=0) for e in self.terms), default=0)

    def degree_in(self, names):
        idx = [self.ctx.index[v] for v in names]
        if not self.terms:
            return -1
        return max(sum(e[i] for i in idx) for e in self.terms)

    def variables_used(self):
        used = [False] * self.ctx.nvars
        for e in self.terms:
            for i, x in enumerate(e):
                if x:
                    used[i] = True
        return tuple(v for v, u in zip(self.ctx.variables, used) if u)

    def involves(self, names):
        idx = [self.ctx.index[v] for v in names]
        return any(e[i] for e in self.terms for i in idx)

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.ctx.nvars, mpq(0))

    def is_homogeneous(self, names=None, weights=None):
        if names is None:
            names = self.ctx.variables
        idx = [self.ctx.index[v] for v in names]
        w = weights or [1] * len(idx)
        degs = {sum(wi * e[i] for wi, i in zip(w, idx)) for e in self.terms}
        return len(degs) <= 1

    # -- arithmetic ----------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.ctx != self.ctx:
                raise ContextMismatch("polynomials from different ring contexts")
            return other
        if isinstance(other, (int, Fraction)) or type(other) is type(mpq(0)):
            return self.ctx.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(other.terms) > len(self.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        terms = dict(a)
        for e, c in b.items():
            s = terms.get(e, 0) + c
            if s:
                terms[e] = s
            else:
                del terms[e]
        return Polynomial(self.ctx, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.ctx, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self._max_exponent + other._max_exponent > MAX_EXPONENT:
            raise OverflowError("exponent exceeds machine width")
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple([a + b for a, b in zip(e1, e2)])
                s = terms.get(e, 0) + c1 * c2
                if s:
                    terms[e] = s
                else:
                    del terms[e]
        return Polynomial(self.ctx, terms)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = self.ctx.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, c):
        c = _as_mpq(c)
        if not c:
            return self.ctx.zero()
        return Polynomial(self.ctx, {e: c * v for e, v in self.terms.items()})

    def mul_monomial(self, mono, c=1):
        c = _as_mpq(c)
        return Polynomial(self.ctx, {tuple([a + b for a, b in zip(e, mono)]): c * v
                                     for e, v in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ctx == other.ctx and self.terms == other.terms
        if isinstance(other, (int, Fraction)) or type(other) is type(mpq(0)):
            return self == self.ctx.const(other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- structure -----------------------------------------------------
    def content_cleared(self):
        """Integer-coefficient primitive associate with positive leading coefficient."""
        if not self.terms:
            return self
        import math
        den = 1
        for c in self.terms.values():
            den = den * c.denominator // math.gcd(den, c.denominator)
        nums = [int(c * den) for c in self.terms.values()]
        g = 0
        for v in nums:
            g = math.gcd(g, v)
        lead = self.terms[self.sorted_monomials()[0]]
        sign = -1 if lead < 0 else 1
        factor = mpq(den * sign, g)
        return self.scale(factor)

    def sorted_monomials(self, order=None):
        order = order or grevlex(self.ctx)
        return sorted(self.terms, key=order.key, reverse=True)

    def leading_monomial(self, order=None):
        order = order or grevlex(self.ctx)
        return max(self.terms, key=order.key)

    def leading_coefficient(self, order=None):
        return self.terms[self.leading_monomial(order)]

    def monic(self, order=None):
        return self.scale(1 / self.leading_coefficient(order))

    def subs(self, values):
        """Substitute polynomials (or numbers) for variables given by name."""
        ctx = self.ctx
        repl = {}
        for name, val in values.items():
            i = ctx.index[name]
            if not isinstance(val, Polynomial):
                val = ctx.const(val)
            repl[i] = val
        result = ctx.zero()
        cache = {}
        for e, c in self.terms.items():
            kept = list(e)
            term = None
            for i, val in repl.items():
                if e[i]:
                    kept[i] = 0
                    key = (i, e[i])
                    if key not in cache:
                        cache[key] = val ** e[i]
                    term = cache[key] if term is None else term * cache[key]
            base = Polynomial(ctx, {tuple(kept): c})
            result = result + (base if term is None else base * term)
        return result

    def specialize(self, names, value=0):
        return self.subs({v: value for v in names})

    def evaluate(self, point):
        """Evaluate at a full point given as name -> number; returns mpq."""
        ctx = self.ctx
        vals = [_as_mpq(point[v]) for v in ctx.variables]
        total = mpq(0)
        for e, c in self.terms.items():
            t = c
            for v, x in zip(vals, e):
                if x:
                    t *= v ** x
            total += t
        return total

    def to_context(self, ctx):
        """Re-embed into another context by variable name."""
        if ctx == self.ctx:
            return self
        src = self.ctx.variables
        pos = []
        for i, v in enumerate(src):
            if v in ctx.index:
                pos.append((i, ctx.index[v]))
        n = ctx.nvars
        terms = {}
        for e, c in self.terms.items():
            if any(e[i] for i, v in enumerate(src) if v not in ctx.index):
                raise ContextMismatch("polynomial uses a variable missing from target context")
            ne = [0] * n
            for i, j in pos:
                ne[j] = e[i]
            terms[tuple(ne)] = c
        return Polynomial(ctx, terms)

    # -- printing ------------------------------------------------------
    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        names = self.ctx.variables
        for k, e in enumerate(self.sorted_monomials()):
            c = self.terms[e]
            neg = c < 0
            a = -c if neg else c
            factors = []
            for v, x in zip(names, e):
                if x == 1:
                    factors.append(v)
                elif x:
                    factors.append(f"{v}^{x}")
            if a != 1 or not factors:
                factors.insert(0, _fmt_rational(a))
            body = "*".join(factors)
            if k == 0:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def __repr__(self):
        return f"Polynomial({str(self)!r})"


def _fmt_rational(c):
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


# ---------------------------------------------------------------------------
# Monomial orders

@dataclass(frozen=True)
class MonomialOrder:
    """A monomial order on a fixed context.

    ``kind`` is one of ``lex``, ``grevlex``, ``block`` or ``weighted``.  For
    ``block`` orders, ``blocks`` is a tuple of ``(names, inner_kind)`` pairs,
    earlier blocks dominating.  For ``weighted`` orders, ``weights`` is the
    weight vector and ``tiebreak`` the order used on ties.
    """

    ctx: RingContext
    kind: str
    blocks: tuple = ()
    weights: tuple = ()
    tiebreak: "MonomialOrder | None" = None

    def __post_init__(self):
        if self.kind not in ("lex", "grevlex", "block", "weighted"):
            raise ValueError(f"unknown order kind {self.kind}")
        if self.kind == "block":
            seen = []
            for names, inner in self.blocks:
                if inner not in ("lex", "grevlex"):
                    raise ValueError("block inner orders must be lex or grevlex")
                seen.extend(names)
            if sorted(seen) != sorted(self.ctx.variables):
                raise ValueError("blocks must partition the context variables")
        if self.kind == "weighted" and len(self.weights) != self.ctx.nvars:
            raise ValueError("weight vector length mismatch")

    @cached_property
    def key(self):
        """Return a function mapping exponent tuples to int tuples; larger is bigger."""
        if self.kind == "lex":
            return lambda e: e
        if self.kind == "grevlex":
            def k(e):
                return (sum(e),) + tuple([-x for x in reversed(e)])
            return k
        if self.kind == "weighted":
            w = self.weights
            tb = self.tiebreak.key if self.tiebreak else grevlex(self.ctx).key
            return lambda e: (sum(a * b for a, b in zip(w, e)),) + tb(e)
        parts = []
        for names, inner in self.blocks:
            idx = tuple(self.ctx.index[v] for v in names)
            parts.append((idx, inner))

        def k(e):
            out = []
            for idx, inner in parts:
                sub = [e[i] for i in idx]
                if inner == "lex":
                    out.extend(sub)
                else:
                    out.append(sum(sub))
                    out.extend(-x for x in reversed(sub))
            return tuple(out)
        return k

    def __hash__(self):
        return hash((self.ctx, self.kind, self.blocks, self.weights, self.tiebreak))

    def __getstate__(self):
        d = dict(self.__dict__)
        d.pop("key", None)
        return d


def lex(ctx):
    return MonomialOrder(ctx, "lex")


def grevlex(ctx):
    return _GREVLEX_CACHE.setdefault(ctx, MonomialOrder(ctx, "grevlex"))


_GREVLEX_CACHE = {}


def block_order(ctx, *blocks, inner="grevlex"):
    """Block order with the given name groups, first group largest.

    Variables not named in any group form a final grevlex block.
    """
    named = [v for b in blocks for v in b]
    rest = tuple(v for v in ctx.variables if v not in named)
    spec = [(tuple(b), inner) for b in blocks if b]
    if rest:
        spec.append((rest, inner))
    return MonomialOrder(ctx, "block", blocks=tuple(spec))


def weighted_order(ctx, weights, tiebreak=None):
    return MonomialOrder(ctx, "weighted", weights=tuple(weights), tiebreak=tiebreak)


def compare(m1, m2, order):
    """Three-way comparison of exponent tuples: -1, 0 or 1."""
    k1, k2 = order.key(tuple(m1)), order.key(tuple(m2))
    return (k1 > k2) - (k1 < k2)


# ---------------------------------------------------------------------------
# Differentiation

def differentiate(p, var):
    ctx = p.ctx
    if var not in ctx.index:
        raise KeyError(f"unknown variable {var!r}")
    i = ctx.index[var]
    terms = {}
    for e, c in p.terms.items():
        if e[i]:
            ne = list(e)
            ne[i] -= 1
            terms[tuple(ne)] = c * e[i]
    return Polynomial(ctx, terms)


# ---------------------------------------------------------------------------
# Parsing

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def _tokenize(src):
    pos = 0
    out = []
    n = len(src)
    while pos < n:
        m = _TOKEN.match(src, pos)
        if m is None:
            break
        if m.group(1) is not None:
            out.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            out.append(("name", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise PolySyntaxError(f"unexpected character {ch!r}", m.start(3))
            out.append(("op", ch, m.start(3)))
        pos = m.end()
    out.append(("end", "", len(src)))
    return out


class _Parser:
    def __init__(self, src, ctx):
        self.toks = _tokenize(src)
        self.i = 0
        self.ctx = ctx

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value):
        t = self.take()
        if t[1] != value:
            raise PolySyntaxError(f"expected {value!r}, found {t[1] or 'end of input'!r}", t[2])
        return t

    def parse(self):
        if self.peek()[0] == "end":
            raise PolySyntaxError("empty expression", 0)
        p = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise PolySyntaxError(f"unexpected token {t[1]!r}", t[2])
        return p

    def expr(self):
        p = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            op = self.take()
            if op[1] == "*":
                p = p * self.unary()
            else:
                q = self.unary()
                if not q.is_constant() or q.is_zero():
                    raise PolySyntaxError("division only by nonzero constants", op[2])
                p = p.scale(1 / q.constant_term())
        return p

    def unary(self):
        t = self.peek()
        if t[0] == "op" and t[1] in ("-", "+"):
            self.take()
            p = self.unary()
            return -p if t[1] == "-" else p
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            t = self.take()
            if t[0] != "int":
                raise PolySyntaxError("exponent must be a nonnegative integer", t[2])
            k = int(t[1])
            if k > MAX_EXPONENT:
                raise OverflowError("exponent exceeds machine width")
            base = base ** k
        return base

    def atom(self):
        t = self.take()
        if t[0] == "int":
            return self.ctx.const(int(t[1]))
        if t[0] == "name":
            if t[1] not in self.ctx.index:
                raise PolySyntaxError(f"unknown variable {t[1]!r}", t[2])
            return self.ctx.var(t[1])
        if t[0] == "op" and t[1] == "(":
            p = self.expr()
            self.expect(")")
            return p
        raise PolySyntaxError(f"unexpected token {t[1] or 'end of input'!r}", t[2])


def parse_poly(src, ctx):
    """Parse ``src`` into a polynomial of ``ctx``.

    >>> ctx = RingContext(("x", "y", "z"))
    >>> str(parse_poly("x^3 + x*y^2*z", ctx))
    'x*y^2*z + x^3'
    """
    return _Parser(src, ctx).parse()
