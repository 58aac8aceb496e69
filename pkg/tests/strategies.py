"""Hypothesis strategies for polynomials over small contexts."""

from hypothesis import strategies as st

from flatcone.polycore import Polynomial
from gmpy2 import mpq


def polynomials(ctx, max_degree=3, max_terms=4, coeffs=st.integers(-3, 3)):
    n = ctx.nvars
    expo = st.lists(st.integers(0, n - 1), max_size=max_degree).map(
        lambda vs: tuple(vs.count(i) for i in range(n)))
    return st.dictionaries(expo, coeffs.filter(bool), max_size=max_terms).map(
        lambda d: Polynomial(ctx, {e: mpq(c) for e, c in d.items()}))


def nonzero_polynomials(ctx, **kw):
    return polynomials(ctx, **kw).filter(lambda p: not p.is_zero())
