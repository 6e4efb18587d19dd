"""Dense matrices of rational functions and fraction-free elimination.

Matrices are plain lists of rows.  Elimination clears denominators row by
row and then runs Bareiss-style Gauss-Jordan over the polynomial ring: every
update ``(piv*a_ij - a_ic*a_rj) / prev`` is an exact polynomial division, so
no fractions appear until the final back-substitution.
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

from .poly import MultiPoly, NotDivisible
from .ratfunc import RatFunc, rf_equals

Matrix = List[List[RatFunc]]


class SingularMatrix(ArithmeticError):
    pass


def zeros(variables: Sequence[str], rows: int, cols: int | None = None) -> Matrix:
    cols = rows if cols is None else cols
    return [[RatFunc.const(variables, 0) for _ in range(cols)] for _ in range(rows)]


def identity(variables: Sequence[str], n: int) -> Matrix:
    m = zeros(variables, n)
    for i in range(n):
        m[i][i] = RatFunc.const(variables, 1)
    return m


def shape(m: Matrix) -> Tuple[int, int]:
    return len(m), (len(m[0]) if m else 0)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n, k = shape(a)
    k2, p = shape(b)
    if k != k2:
        raise ValueError(f"shape mismatch {n}x{k} * {k2}x{p}")
    zero = RatFunc.const((a[0][0] if a and k else b[0][0]).vars, 0) if (a and k) or (b and p) else None
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = None
            for l in range(k):
                x, y = a[i][l], b[l][j]
                if x.is_zero() or y.is_zero():
                    continue
                t = x * y
                acc = t if acc is None else acc + t
            row.append(acc if acc is not None else zero)
        out.append(row)
    return out


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    if shape(a) != shape(b):
        raise ValueError("shape mismatch in addition")
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    if shape(a) != shape(b):
        raise ValueError("shape mismatch in subtraction")
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a: Matrix, c) -> Matrix:
    return [[x * c for x in row] for row in a]


def mat_neg(a: Matrix) -> Matrix:
    return [[-x for x in row] for row in a]


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)]


def mat_map(a: Matrix, f) -> Matrix:
    return [[f(x) for x in row] for row in a]


def mat_equal(a: Matrix, b: Matrix) -> bool:
    if shape(a) != shape(b):
        return False
    return all(rf_equals(x, y) for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def is_identity(a: Matrix) -> bool:
    n, m = shape(a)
    if n != m:
        return False
    for i in range(n):
        for j in range(n):
            x = a[i][j]
            if i == j:
                if not (x.num == x.den):
                    return False
            elif not x.is_zero():
                return False
    return True


def kron(a: Matrix, b: Matrix) -> Matrix:
    n, m = shape(a)
    p, q = shape(b)
    return [[a[i // p][j // q] * b[i % p][j % q] for j in range(m * q)] for i in range(n * p)]


def block_diag(*blocks: Matrix, variables: Sequence[str] | None = None) -> Matrix:
    if variables is None:
        for blk in blocks:
            if blk:
                variables = blk[0][0].vars
                break
    total = sum(len(blk) for blk in blocks)
    out = zeros(variables, total)
    off = 0
    for blk in blocks:
        k = len(blk)
        for i in range(k):
            for j in range(k):
                out[off + i][off + j] = blk[i][j]
        off += k
    return out


# -- fraction-free elimination ----------------------------------------------

def _clear_row(row: Sequence[RatFunc]) -> Tuple[List[MultiPoly], MultiPoly]:
    """Multiply a row by a common denominator; returns (entries, denominator)."""
    dens: List[MultiPoly] = []
    for x in row:
        d = x.den
        if d.is_one() or x.is_zero():
            continue
        if any(d == e for e in dens):
            continue
        dens.append(d)
    common = MultiPoly.one(row[0].vars)
    for d in dens:
        if common.try_div(d) is None:
            common = common * d
    out = []
    for x in row:
        if x.is_zero():
            out.append(MultiPoly.zero(x.vars))
        else:
            out.append(x.num * common.exact_div(x.den))
    return out, common


def fraction_free_rref(rows: List[List[MultiPoly]], ncols: int | None = None):
    """Bareiss Gauss-Jordan in place on polynomial rows.

    Only the first ``ncols`` columns are used as pivot candidates.  Returns
    ``(pivot_cols, d, sign)`` where after the call the pivot rows satisfy
    ``rows[i][pivot_cols[k]] == d`` for i == k and 0 otherwise, and ``sign``
    records the parity of the row swaps.
    """
    if not rows:
        return [], None, 1
    width = len(rows[0])
    ncols = width if ncols is None else ncols
    variables = rows[0][0].vars
    prev = MultiPoly.one(variables)
    r = 0
    pivots: List[int] = []
    sign = 1
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        best = None
        for i in range(r, nrows):
            e = rows[i][c]
            if not e.is_zero() and (best is None or len(e.terms) < len(rows[best][c].terms)):
                best = i
                if len(e.terms) == 1:
                    break
        if best is None:
            continue
        if best != r:
            rows[r], rows[best] = rows[best], rows[r]
            sign = -sign
        piv = rows[r][c]
        prow = rows[r]
        for i in range(nrows):
            if i == r:
                continue
            row = rows[i]
            f = row[c]
            new = []
            for j in range(width):
                t = piv * row[j]
                if not f.is_zero() and not prow[j].is_zero():
                    t = t - f * prow[j]
                if not prev.is_one() and not t.is_zero():
                    q = t.try_div(prev)
                    if q is None:
                        raise NotDivisible("fraction-free step was not exact")
                    t = q
                new.append(t)
            rows[i] = new
        prev = piv
        pivots.append(c)
        r += 1
    return pivots, prev, sign


def det(m: Matrix) -> RatFunc:
    n, k = shape(m)
    if n != k:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        raise ValueError("determinant of an empty matrix")
    variables = m[0][0].vars
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    scale = MultiPoly.one(variables)
    rows = []
    for row in m:
        prow, common = _clear_row(row)
        scale = scale * common
        rows.append(prow)
    pivots, d, sign = fraction_free_rref(rows)
    if len(pivots) < n:
        return RatFunc.const(variables, 0)
    # Gauss-Jordan leaves d on the diagonal; d is the determinant of the
    # scaled matrix (up to the swap sign), by the Bareiss invariant.
    return RatFunc(d * sign, scale)


def mat_inverse(m: Matrix) -> Matrix:
    n, k = shape(m)
    if n != k or n == 0:
        raise ValueError("inverse of a non-square or empty matrix")
    variables = m[0][0].vars
    if n == 1:
        if m[0][0].is_zero():
            raise SingularMatrix("singular 1x1 matrix")
        return [[m[0][0].inverse()]]
    if n == 2:
        dt = det(m)
        if dt.is_zero():
            raise SingularMatrix("singular 2x2 matrix")
        inv = dt.inverse()
        return [[m[1][1] * inv, -m[0][1] * inv], [-m[1][0] * inv, m[0][0] * inv]]
    one = RatFunc.const(variables, 1)
    zero = RatFunc.const(variables, 0)
    aug = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(m)]
    rows = [_clear_row(r)[0] for r in aug]
    pivots, d, _ = fraction_free_rref(rows, n)
    if len(pivots) < n:
        raise SingularMatrix("matrix is singular")
    dd = RatFunc(d, normalize=False)
    return [[RatFunc(rows[i][n + j]) / dd for j in range(n)] for i in range(n)]


def linear_solve(a: Matrix, b: Sequence[RatFunc]):
    """Solve a*x = b.

    Returns ``(x0, basis)`` with a particular solution and a basis of the
    nullspace of ``a``, or ``None`` when the system is inconsistent.
    """
    n, k = shape(a)
    if len(b) != n:
        raise ValueError("right-hand side has the wrong length")
    if n == 0:
        raise ValueError("empty system")
    variables = (a[0][0] if k else b[0]).vars
    aug = [list(row) + [b[i]] for i, row in enumerate(a)]
    rows = [_clear_row(r)[0] for r in aug]
    x0, basis = _solve_poly_rows(rows, k, variables)
    return None if x0 is None else (x0, basis)


def _solve_poly_rows(rows: List[List[MultiPoly]], k: int, variables):
    pivots, d, _ = fraction_free_rref(rows, k)
    r = len(pivots)
    for i in range(r, len(rows)):
        if not rows[i][k].is_zero():
            return None, None
    zero = RatFunc.const(variables, 0)
    x0 = [zero] * k
    if r:
        dd = RatFunc(d, normalize=False)
        for i, c in enumerate(pivots):
            x0[c] = RatFunc(rows[i][k]) / dd
    basis = []
    pivset = set(pivots)
    for f in range(k):
        if f in pivset:
            continue
        v = [zero] * k
        v[f] = RatFunc(d) if r else RatFunc.const(variables, 1)
        for i, c in enumerate(pivots):
            v[c] = RatFunc(-rows[i][f])
        basis.append(v)
    return x0, basis


def nullspace_poly(rows: List[List[MultiPoly]], variables) -> List[List[MultiPoly]]:
    """Polynomial nullspace basis of a homogeneous polynomial system."""
    if not rows:
        return []
    k = len(rows[0])
    work = [list(r) for r in rows]
    pivots, d, _ = fraction_free_rref(work, k)
    basis = []
    pivset = set(pivots)
    for f in range(k):
        if f in pivset:
            continue
        v = [MultiPoly.zero(variables)] * k
        v[f] = d if pivots else MultiPoly.one(variables)
        for i, c in enumerate(pivots):
            v[c] = -work[i][f]
        basis.append(v)
    return basis


def mat_apply(m: Matrix, v: Sequence[RatFunc]) -> List[RatFunc]:
    return [r[0] for r in mat_mul(m, [[x] for x in v])]
