"""Exact linear-algebra oracles, independent of the Groebner engine."""

from fractions import Fraction
from itertools import combinations_with_replacement


def monomials(nvars, degree):
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return out


def monomials_upto(nvars, degree):
    return [m for d in range(degree + 1) for m in monomials(nvars, d)]


def rref(rows):
    """Row-reduce a list of Fraction rows in place; returns (rows, pivot columns)."""
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rank(rows):
    if not rows:
        return 0
    return len(rref(rows)[1])


def nullspace(columns, nrows):
    """Basis of {a : sum a_j * columns[j] = 0}; columns are dicts row -> value."""
    ncols = len(columns)
    if ncols == 0:
        return []
    mat = [[Fraction(0)] * ncols for _ in range(nrows)]
    for j, col in enumerate(columns):
        for i, v in col.items():
            mat[i][j] = Fraction(v)
    red, pivots = rref(mat) if nrows else ([], [])
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        a = [Fraction(0)] * ncols
        a[f] = Fraction(1)
        for row, p in zip(red, pivots):
            a[p] = -row[f]
        basis.append(a)
    return basis


def solve(columns, target, nrows):
    """Some a with sum a_j * columns[j] = target, or None."""
    ncols = len(columns)
    mat = [[Fraction(0)] * (ncols + 1) for _ in range(nrows)]
    for j, col in enumerate(columns):
        for i, v in col.items():
            mat[i][j] = Fraction(v)
    for i, v in target.items():
        mat[i][ncols] = Fraction(v)
    if not mat:
        return []
    red, pivots = rref(mat)
    if ncols in pivots:
        return None
    a = [Fraction(0)] * ncols
    for row, p in zip(red, pivots):
        a[p] = row[ncols]
    return a


def _shift(e, m):
    return tuple(a + b for a, b in zip(e, m))


def membership_by_linear_algebra(p, gens, bound):
    """Whether p = sum a_i g_i with every deg a_i <= bound."""
    n = p.ctx.nvars
    mult = monomials_upto(n, bound)
    index = {}
    columns = []
    for g in gens:
        for m in mult:
            col = {}
            for e, c in g.terms.items():
                k = index.setdefault(_shift(e, m), len(index))
                col[k] = c
            columns.append(col)
    target = {}
    for e, c in p.terms.items():
        target[index.setdefault(e, len(index))] = c
    return solve(columns, target, len(index)) is not None


def _graded_columns(vectors, vdegs, nvars, k, rank_):
    """Columns of (a_i) -> sum a_i v_i in degree k, with row index (component, monomial)."""
    rows = {m: i for i, m in enumerate(monomials(nvars, k))}
    cols, labels = [], []
    for v, d in zip(vectors, vdegs):
        if k - d < 0:
            continue
        for m in monomials(nvars, k - d):
            col = {}
            for s in range(rank_):
                for e, c in v[s].terms.items():
                    key = s * len(rows) + rows[_shift(e, m)]
                    col[key] = col.get(key, 0) + c
            cols.append({i: c for i, c in col.items() if c != 0})
            labels.append((len(labels), m))
    return cols, len(rows) * rank_


def tor1_by_resolution(relations, rel_degrees, rank_, fiber_idx, param_idx, k):
    """dim of Tor_1 over Q[params] of R^rank/(relations), residue field, in degree k.

    Uses the graded pieces of the presentation: the kernel of the specialized
    matrix modulo the specialization of the degree-k syzygies over R.
    """
    nvars = len(fiber_idx) + len(param_idx)
    nx = len(fiber_idx)
    # kernel of the specialized map over Q[x]
    spec = []
    for v in relations:
        spec.append(tuple({tuple(e[i] for i in fiber_idx): c
                           for e, c in p.terms.items() if all(e[j] == 0 for j in param_idx)}
                          for p in v))
    spec_cols = []
    rows_x = {m: i for i, m in enumerate(monomials(nx, k))}
    src_x = []
    for v, d in zip(spec, rel_degrees):
        if k - d < 0:
            continue
        for m in monomials(nx, k - d):
            col = {}
            for s in range(rank_):
                for e, c in v[s].items():
                    key = s * len(rows_x) + rows_x[_shift(e, m)]
                    col[key] = col.get(key, 0) + c
            spec_cols.append({i: c for i, c in col.items() if c != 0})
            src_x.append((len(src_x), m))
    ker_dim = len(nullspace(spec_cols, len(rows_x) * rank_)) if spec_cols else 0
    # syzygies over R in degree k, then set the parameters to zero
    cols, nrows = _graded_columns(relations, rel_degrees, nvars, k, rank_)
    syz = nullspace(cols, nrows) if cols else []
    # map each R-source coordinate (generator i, monomial m) to its x-coordinate or drop it
    coord = []
    for v, d in zip(relations, rel_degrees):
        if k - d < 0:
            continue
        xpos = {m: j for j, m in enumerate(monomials(nx, k - d))}
        for m in monomials(nvars, k - d):
            if any(m[j] for j in param_idx):
                coord.append(None)
            else:
                coord.append((v, xpos[tuple(m[i] for i in fiber_idx)]))
    offsets = {}
    off = 0
    for v, d in zip(relations, rel_degrees):
        if k - d < 0:
            continue
        offsets[id(v)] = off
        off += len(monomials(nx, k - d))
    images = []
    for a in syz:
        row = [Fraction(0)] * off
        for val, c in zip(a, coord):
            if c is not None and val != 0:
                row[offsets[id(c[0])] + c[1]] += val
        images.append(row)
    return ker_dim - rank(images)
