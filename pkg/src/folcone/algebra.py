"""Exact linear algebra over Q and over polynomial rings.

Rational matrices are plain ``list[list[Fraction]]``; polynomial matrices are
``list[list[Polynomial]]``.  Everything here is deterministic and exact:
Gauss-Jordan with Fractions over Q, and fraction-free (Bareiss, exact-division
form) elimination over polynomial entries, so ranks and kernels over the
fraction field Q(x) or Q(t) are certified rather than estimated.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

from .expr import Polynomial, PolyVectorField

Vec = tuple[Fraction, ...]
Matrix = list[list[Fraction]]
PolyMatrix = list[list[Polynomial]]


def fracs(row: Sequence) -> list[Fraction]:
    return [Fraction(x) for x in row]


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [fracs(r) for r in rows]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def transpose(m: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*m)] if m else []


def mat_vec(m: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> Vec:
    return tuple(sum((row[j] * v[j] for j in range(len(v))), Fraction(0)) for row in m)


# ---------------------------------------------------------------------------
# Vector fields
# ---------------------------------------------------------------------------


def lie_bracket(X: PolyVectorField, Y: PolyVectorField) -> PolyVectorField:
    """[X, Y] with components sum_j (X_j dY_i/dx_j - Y_j dX_i/dx_j)."""
    if X.vars != Y.vars:
        raise ValueError("variable-set mismatch")
    comps = tuple(X.apply_to(Yi) - Y.apply_to(Xi) for Xi, Yi in zip(X.components, Y.components))
    return PolyVectorField(X.vars, comps)


# ---------------------------------------------------------------------------
# Gauss-Jordan over Q
# ---------------------------------------------------------------------------


def rref(rows: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns (exact, canonical)."""
    m = as_matrix(rows)
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    pr = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(pr, len(m)):
            if m[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        m[pr], m[pivot_row] = m[pivot_row], m[pr]
        inv = 1 / m[pr][c]
        m[pr] = [x * inv for x in m[pr]]
        for i in range(len(m)):
            if i != pr and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[pr])]
        pivots.append(c)
        pr += 1
        if pr == len(m):
            break
    return m, pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def kernel_basis(rows: Sequence[Sequence], ncols: int | None = None) -> list[Vec]:
    """Canonical (reduced echelon) basis of the right kernel of a matrix."""
    m = as_matrix(rows)
    if ncols is None:
        if not m:
            raise ValueError("ncols required for an empty matrix")
        ncols = len(m[0])
    red, pivots = rref(m)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    vectors = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -red[i][f]
        vectors.append(v)
    if not vectors:
        return []
    canon, _ = rref(vectors)
    return [tuple(r) for r in canon[: len(vectors)]]


def solve_linear(rows: Sequence[Sequence], b: Sequence) -> Vec | None:
    """One exact solution of A x = b in canonical form, or None if inconsistent."""
    a = as_matrix(rows)
    rhs = fracs(b)
    if len(a) != len(rhs):
        raise ValueError("right-hand side has wrong length")
    ncols = len(a[0]) if a else 0
    aug = [row + [rhs[i]] for i, row in enumerate(a)]
    red, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        x[c] = red[i][ncols]
    return tuple(x)


# ---------------------------------------------------------------------------
# Sparse Gauss-Jordan (for large, very sparse syzygy systems)
# ---------------------------------------------------------------------------

SparseRow = dict[int, Fraction]


def sparse_rref(rows: Iterable[SparseRow]) -> dict[int, SparseRow]:
    """Full reduction of sparse rows; returns {pivot_col: normalized row}.

    Every returned row has coefficient 1 at its pivot column and 0 at every
    other pivot column, so standard kernel vectors read off directly.
    """
    pivots: dict[int, SparseRow] = {}
    for row in rows:
        r = {c: v for c, v in row.items() if v != 0}
        # eliminate every pivot column present in the row, not only the leading one
        while True:
            hit = next((c for c in r if c in pivots), None)
            if hit is None:
                break
            coef = r[hit]
            for k, v in pivots[hit].items():
                s = r.get(k, Fraction(0)) - coef * v
                if s == 0:
                    r.pop(k, None)
                else:
                    r[k] = s
        if not r:
            continue
        c = min(r)
        inv = 1 / r[c]
        r = {k: v * inv for k, v in r.items()}
        for p in pivots.values():
            coef = p.get(c)
            if coef is not None:
                for k, v in r.items():
                    s = p.get(k, Fraction(0)) - coef * v
                    if s == 0:
                        p.pop(k, None)
                    else:
                        p[k] = s
        pivots[c] = r
    return pivots


def sparse_kernel_projection(
    pivots: Mapping[int, SparseRow], ncols: int, coords: Sequence[int]
) -> list[Vec]:
    """Projections onto ``coords`` of the standard kernel basis of the system."""
    out: list[Vec] = []
    coord_list = list(coords)
    for f in range(ncols):
        if f in pivots:
            continue
        vec = []
        for c in coord_list:
            if c == f:
                vec.append(Fraction(1))
            elif c in pivots:
                vec.append(-pivots[c].get(f, Fraction(0)))
            else:
                vec.append(Fraction(0))
        out.append(tuple(vec))
    return out


# ---------------------------------------------------------------------------
# Polynomial matrices
# ---------------------------------------------------------------------------


def eval_poly_matrix(m: PolyMatrix, point: Sequence) -> Matrix:
    return [[entry.eval(point) for entry in row] for row in m]


def subs_poly_matrix(m: PolyMatrix, mapping: Mapping[str, Polynomial]) -> PolyMatrix:
    return [[entry.subs(mapping) for entry in row] for row in m]


def _poly_zero_like(m: PolyMatrix) -> Polynomial:
    return Polynomial.zero(m[0][0].vars)


def bareiss_echelon(m: PolyMatrix) -> tuple[PolyMatrix, list[int], list[int]]:
    """Fraction-free forward elimination over a polynomial ring.

    Returns (nonzero echelon rows, pivot column indices, original indices of
    the pivot rows).  The echelon rows span the row space of ``m`` over the
    fraction field, with exact polynomial entries.
    """
    if not m:
        return [], [], []
    work = [list(row) for row in m]
    n_rows, n_cols = len(work), len(work[0])
    idx = list(range(n_rows))
    zero = _poly_zero_like(m)
    pivot_cols: list[int] = []
    prev: Polynomial | None = None
    pr = 0
    for c in range(n_cols):
        cand = [i for i in range(pr, n_rows) if not work[i][c].is_zero()]
        if not cand:
            continue
        best = min(cand, key=lambda i: len(work[i][c].terms))
        work[pr], work[best] = work[best], work[pr]
        idx[pr], idx[best] = idx[best], idx[pr]
        p = work[pr][c]
        for i in range(pr + 1, n_rows):
            # Bareiss: update every lower row, even with a zero head entry,
            # to keep the exact-division invariant for later pivots.
            head = work[i][c]
            for j in range(c + 1, n_cols):
                num = work[i][j] * p - head * work[pr][j]
                work[i][j] = num.exact_div(prev) if prev is not None else num
            work[i][c] = zero
        pivot_cols.append(c)
        prev = p
        pr += 1
        if pr == n_rows:
            break
    return work[:pr], pivot_cols, idx[:pr]


def generic_rank(m: PolyMatrix) -> int:
    """Rank over the fraction field of the polynomial ring."""
    if not m or not m[0]:
        return 0
    return len(bareiss_echelon(m)[1])


def bareiss_det(m: PolyMatrix) -> Polynomial:
    """Exact determinant of a square polynomial matrix (fraction-free)."""
    n = len(m)
    if n == 0:
        raise ValueError("empty matrix has no determinant here")
    vars = m[0][0].vars
    if n == 1:
        return m[0][0]
    work = [list(row) for row in m]
    sign = 1
    prev: Polynomial | None = None
    for k in range(n - 1):
        if work[k][k].is_zero():
            swap = None
            for i in range(k + 1, n):
                if not work[i][k].is_zero():
                    swap = i
                    break
            if swap is None:
                return Polynomial.zero(vars)
            work[k], work[swap] = work[swap], work[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = work[i][j] * work[k][k] - work[i][k] * work[k][j]
                work[i][j] = num.exact_div(prev) if prev is not None else num
        prev = work[k][k]
    det = work[n - 1][n - 1]
    return -det if sign < 0 else det


def rational_det(rows: Sequence[Sequence]) -> Fraction:
    """Determinant of a square rational matrix via exact elimination."""
    m = as_matrix(rows)
    n = len(m)
    det = Fraction(1)
    for k in range(n):
        pivot = None
        for i in range(k, n):
            if m[i][k] != 0:
                pivot = i
                break
        if pivot is None:
            return Fraction(0)
        if pivot != k:
            m[k], m[pivot] = m[pivot], m[k]
            det = -det
        det *= m[k][k]
        inv = 1 / m[k][k]
        for i in range(k + 1, n):
            if m[i][k] != 0:
                f = m[i][k] * inv
                m[i] = [a - f * b for a, b in zip(m[i], m[k])]
    return det


# ---------------------------------------------------------------------------
# Univariate content normalization (for kernel vectors over Q[t])
# ---------------------------------------------------------------------------


def poly_gcd_1d(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic gcd of univariate polynomials (Euclid over Q[t])."""
    if a.vars != b.vars or len(a.vars) != 1:
        raise ValueError("poly_gcd_1d expects univariate polynomials over one ring")
    while not b.is_zero():
        a, b = b, _poly_mod_1d(a, b)
    if a.is_zero():
        return a
    lead = max(a.terms, key=lambda e: e[0])
    return a * (1 / a.terms[lead])


def _poly_mod_1d(a: Polynomial, b: Polynomial) -> Polynomial:
    lead_b = max(b.terms, key=lambda e: e[0])
    db = lead_b[0]
    cb = b.terms[lead_b]
    r = a
    while not r.is_zero():
        lead_r = max(r.terms, key=lambda e: e[0])
        dr = lead_r[0]
        if dr < db:
            break
        c = r.terms[lead_r] / cb
        shift = Polynomial.monomial((dr - db,), c, a.vars)
        r = r - shift * b
    return r


def normalize_poly_vector(vec: Sequence[Polynomial]) -> tuple[Polynomial, ...]:
    """Divide by the content (gcd over Q[t]) and scale to a primitive-integer,
    sign-normalized form: first nonzero entry has positive leading coefficient."""
    nz = [p for p in vec if not p.is_zero()]
    if not nz:
        return tuple(vec)
    g = nz[0]
    for p in nz[1:]:
        if g.total_degree() == 0:
            break
        g = poly_gcd_1d(g, p)
    if g.total_degree() > 0:
        vec = [p.exact_div(g) for p in vec]
    coeffs = [c for p in vec for c in p.terms.values()]
    if not coeffs:
        return tuple(vec)
    den_lcm = 1
    for c in coeffs:
        den_lcm = lcm(den_lcm, c.denominator)
    num_gcd = 0
    for c in coeffs:
        num_gcd = gcd(num_gcd, c.numerator * (den_lcm // c.denominator))
    scale = Fraction(den_lcm, num_gcd) if num_gcd else Fraction(den_lcm)
    vec = [p * scale for p in vec]
    for p in vec:
        if p.is_zero():
            continue
        lead = max(p.terms, key=lambda e: e[0])
        if p.terms[lead] < 0:
            vec = [-q for q in vec]
        break
    return tuple(vec)


def kernel_basis_over_curve(m_t: PolyMatrix) -> list[tuple[Polynomial, ...]]:
    """Basis of the right kernel of a matrix over Q(t), cleared of denominators.

    Cramer construction on the pivot submatrix found by fraction-free
    elimination; each returned vector is a polynomial vector of content 1.
    """
    if not m_t or not m_t[0]:
        return []
    n_cols = len(m_t[0])
    _, pivot_cols, pivot_rows = bareiss_echelon(m_t)
    r = len(pivot_cols)
    free_cols = [c for c in range(n_cols) if c not in set(pivot_cols)]
    if not free_cols:
        return []
    zero = _poly_zero_like(m_t)
    sub_rows = [m_t[i] for i in pivot_rows]
    det_p = bareiss_det([[row[c] for c in pivot_cols] for row in sub_rows]) if r else None
    basis = []
    for f in free_cols:
        v = [zero] * n_cols
        if r == 0:
            v[f] = Polynomial.one(zero.vars)
        else:
            v[f] = det_p
            for i in range(r):
                cols = list(pivot_cols)
                cols[i] = f
                d = bareiss_det([[row[c] for c in cols] for row in sub_rows])
                v[pivot_cols[i]] = -d
        basis.append(normalize_poly_vector(v))
    return basis


# ---------------------------------------------------------------------------
# Univariate helpers for limits in t
# ---------------------------------------------------------------------------


def t_valuation(p: Polynomial) -> int | None:
    """Order of vanishing at t = 0 of a univariate polynomial; None for zero."""
    if p.is_zero():
        return None
    return min(e[0] for e in p.terms)


def t_shift_down(p: Polynomial, v: int) -> Polynomial:
    """Divide a univariate polynomial by t^v (exact)."""
    if v == 0 or p.is_zero():
        return p
    terms = {}
    for e, c in p.terms.items():
        if e[0] < v:
            raise ValueError("valuation shift below zero")
        terms[(e[0] - v,)] = c
    return Polynomial(p.vars, terms)
