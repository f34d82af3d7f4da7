"""Foliation presentations, pointwise kernels, strong kernels, isotropy algebras.

A presentation is an anchored module of polynomial vector fields: generators
X_1..X_N over base variables x_1..x_n, together with (optional) structure
functions c with [X_i, X_j] = sum_k c_ij^k X_k as exact polynomial identities.

The strong kernel at a point m is approximated by degree-bounded syzygies:
values f(m) of polynomial vectors f with sum_j f_j X_j = 0 identically and
deg f <= D.  The isotropy algebra at m is ker(anchor at m) modulo that
approximation, with the bracket induced by constant-coefficient lifts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from . import algebra
from .algebra import Matrix, PolyMatrix, Vec
from .expr import Polynomial, PolyVectorField
from .grassmann import Subspace, make_subspace


class MissingStructureFunctions(RuntimeError):
    """Raised when an operation needs structure functions that are absent."""


StructureArray = tuple[tuple[tuple[Polynomial, ...], ...], ...]  # c[i][j] = vector over generators


@dataclass
class FoliationPresentation:
    """Generators of a polynomial singular foliation, as an anchored bundle."""

    vars: tuple[str, ...]
    generators: tuple[PolyVectorField, ...]
    structure_functions: StructureArray | None = None
    name: str = ""
    structure_bound_used: int | None = None

    def __post_init__(self):
        self.vars = tuple(self.vars)
        self.generators = tuple(self.generators)
        for g in self.generators:
            if g.vars != self.vars:
                raise ValueError("generator over wrong variable set")
        if self.structure_functions is not None:
            self.structure_functions = _normalize_structure(self)
            err = structure_defect(self)
            if err is not None:
                raise ValueError(err)
        self._anchor: PolyMatrix | None = None
        self._generic_rank: int | None = None

    # -- basic data ---------------------------------------------------------

    @property
    def num_generators(self) -> int:
        return len(self.generators)

    @property
    def dim(self) -> int:
        return len(self.vars)

    def max_generator_degree(self) -> int:
        return max((g.max_degree() for g in self.generators), default=0)

    def anchor(self) -> PolyMatrix:
        if self._anchor is None:
            self._anchor = anchor_matrix(self)
        return self._anchor

    def anchor_at(self, m: Sequence) -> Matrix:
        return algebra.eval_poly_matrix(self.anchor(), m)

    def generic_rank(self) -> int:
        if self._generic_rank is None:
            self._generic_rank = algebra.generic_rank(self.anchor())
        return self._generic_rank

    def bracket(self, i: int, j: int) -> PolyVectorField:
        return algebra.lie_bracket(self.generators[i], self.generators[j])

    def has_structure(self) -> bool:
        return self.structure_functions is not None

    def ensure_structure(self, degree_bound: int | None = None) -> "FoliationPresentation":
        """Solve for structure functions if absent; raises when none found."""
        if self.structure_functions is None:
            c = solve_structure_functions(self, degree_bound)
            if c is None:
                raise MissingStructureFunctions(
                    f"no polynomial structure functions found at bound {degree_bound}"
                )
        return self

    def structure_at(self, i: int, j: int, m: Sequence) -> Vec:
        if self.structure_functions is None:
            raise MissingStructureFunctions("structure functions unavailable")
        return tuple(p.eval(m) for p in self.structure_functions[i][j])


def _normalize_structure(p: FoliationPresentation) -> StructureArray:
    n = p.num_generators
    c = p.structure_functions
    if len(c) != n or any(len(row) != n for row in c):
        raise ValueError("structure array must be N x N")
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            vec = tuple(c[i][j])
            if len(vec) != n:
                raise ValueError("structure vectors must have one entry per generator")
            row.append(vec)
        out.append(tuple(row))
    return tuple(out)


def structure_defect(p: FoliationPresentation) -> str | None:
    """None when the stored structure functions satisfy all identities exactly."""
    c = p.structure_functions
    n = p.num_generators
    zero = Polynomial.zero(p.vars)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if not (c[i][j][k] + c[j][i][k]).is_zero():
                    return f"structure functions not antisymmetric at ({i},{j},{k})"
    for i in range(n):
        for j in range(i + 1, n):
            combo = PolyVectorField(p.vars, tuple(zero for _ in p.vars))
            for k in range(n):
                if not c[i][j][k].is_zero():
                    combo = combo + c[i][j][k] * p.generators[k]
            diff = p.bracket(i, j) + (-1) * combo
            if not diff.is_zero():
                return (
                    f"identity fails for pair ({i},{j}): "
                    f"[X_{i+1},X_{j+1}] - sum_k c*X_k = {diff}"
                )
    return None


# ---------------------------------------------------------------------------
# Anchor and pointwise ranks
# ---------------------------------------------------------------------------


def anchor_matrix(p: FoliationPresentation) -> PolyMatrix:
    """n x N matrix whose j-th column holds generator j's components."""
    return [[g.components[i] for g in p.generators] for i in range(p.dim)]


def leaf_dimension_at(p: FoliationPresentation, m: Sequence) -> int:
    return algebra.rank(p.anchor_at(m))


def regular_data(p: FoliationPresentation) -> tuple[int, Callable[[Sequence], bool]]:
    """(generic rank r, predicate telling whether a point attains it)."""
    r = p.generic_rank()

    def is_regular(m: Sequence) -> bool:
        return algebra.rank(p.anchor_at(m)) == r

    return r, is_regular


def kernel_at(p: FoliationPresentation, m: Sequence) -> Subspace:
    rows = algebra.kernel_basis(p.anchor_at(m), ncols=p.num_generators)
    return Subspace(p.num_generators, tuple(rows))


# ---------------------------------------------------------------------------
# Monomial bookkeeping
# ---------------------------------------------------------------------------


def monomials_up_to(n_vars: int, degree: int) -> list[tuple[int, ...]]:
    """All exponent tuples of total degree <= degree, graded-lex ascending."""
    out: list[tuple[int, ...]] = []
    for d in range(degree + 1):
        out.extend(sorted(_monomials_of_degree(n_vars, d)))
    return out


def _monomials_of_degree(n_vars: int, d: int) -> list[tuple[int, ...]]:
    if n_vars == 1:
        return [(d,)]
    out = []
    for first in range(d + 1):
        for rest in _monomials_of_degree(n_vars - 1, d - first):
            out.append((first,) + rest)
    return out


def default_strong_kernel_bound(p: FoliationPresentation) -> int:
    return max(p.max_generator_degree(), 0) + p.dim


# ---------------------------------------------------------------------------
# Strong kernel via degree-bounded syzygies
# ---------------------------------------------------------------------------


def strong_kernel_at(
    p: FoliationPresentation, m: Sequence, degree_bound: int | None = None
) -> Subspace:
    """span{ f(m) : deg f <= D, sum_j f_j X_j = 0 identically }.

    Monotone non-decreasing in D and always contained in ker(anchor at m).
    The system is recentred at m so the evaluation is the constant coefficient,
    then solved as one sparse exact linear system over the monomial unknowns.
    """
    if degree_bound is None:
        degree_bound = default_strong_kernel_bound(p)
    if degree_bound < 0:
        raise ValueError("degree bound must be non-negative")
    point = [Fraction(x) for x in m]
    n, big_n = p.dim, p.num_generators
    shifted = [
        [entry.shift(point) for entry in row] for row in p.anchor()
    ]  # rows: base components, cols: generators, recentred at m
    monos = monomials_up_to(n, degree_bound)
    mono_index = {mu: k for k, mu in enumerate(monos)}
    n_monos = len(monos)

    def unknown(j: int, mu_idx: int) -> int:
        return j * n_monos + mu_idx

    equations: dict[tuple[int, tuple[int, ...]], dict[int, Fraction]] = {}
    for l in range(n):
        for j in range(big_n):
            entry = shifted[l][j]
            if entry.is_zero():
                continue
            for alpha, coeff in entry.terms.items():
                for mu_idx, mu in enumerate(monos):
                    key = (l, tuple(a + b for a, b in zip(alpha, mu)))
                    row = equations.setdefault(key, {})
                    col = unknown(j, mu_idx)
                    row[col] = row.get(col, Fraction(0)) + coeff
    pivots = algebra.sparse_rref(equations.values())
    const_idx = mono_index[(0,) * n]
    coords = [unknown(j, const_idx) for j in range(big_n)]
    values = algebra.sparse_kernel_projection(pivots, big_n * n_monos, coords)
    return make_subspace(values, big_n)


# ---------------------------------------------------------------------------
# Structure functions by linear solving
# ---------------------------------------------------------------------------


def solve_structure_functions(
    p: FoliationPresentation, degree_bound: int | None = None
) -> StructureArray | None:
    """Fill c_ij^k (degree <= bound) with [X_i,X_j] = sum_k c X_k, or None.

    Bounds are tried in increasing order so that constant solutions are
    preferred when they exist; per-pair systems are solved independently and
    ties are broken by the canonical echelon solution.  On success the array
    is stored on the presentation.
    """
    if degree_bound is None:
        degree_bound = max(p.max_generator_degree(), 0)
    n, big_n = p.dim, p.num_generators
    zero = Polynomial.zero(p.vars)
    zero_row = tuple(zero for _ in range(big_n))
    c: list[list[tuple[Polynomial, ...] | None]] = [
        [None] * big_n for _ in range(big_n)
    ]
    for i in range(big_n):
        c[i][i] = zero_row
    bound_used = 0
    for i in range(big_n):
        for j in range(i + 1, big_n):
            bracket = p.bracket(i, j)
            sol = None
            for bound in range(degree_bound + 1):
                sol = _solve_membership(p, bracket, bound)
                if sol is not None:
                    bound_used = max(bound_used, bound)
                    break
            if sol is None:
                return None
            c[i][j] = sol
            c[j][i] = tuple(-q for q in sol)
    result: StructureArray = tuple(tuple(row) for row in c)  # type: ignore[arg-type]
    p.structure_functions = result
    p.structure_bound_used = bound_used
    return result


def _solve_membership(
    p: FoliationPresentation, target: PolyVectorField, bound: int
) -> tuple[Polynomial, ...] | None:
    """Solve sum_k c_k X_k = target with deg c_k <= bound (canonical solution)."""
    n, big_n = p.dim, p.num_generators
    monos = monomials_up_to(n, bound)
    n_monos = len(monos)
    eq_keys: dict[tuple[int, tuple[int, ...]], int] = {}
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []

    def eq_row(key) -> int:
        if key not in eq_keys:
            eq_keys[key] = len(rows)
            rows.append([Fraction(0)] * (big_n * n_monos))
            rhs.append(Fraction(0))
        return eq_keys[key]

    for l in range(n):
        for k in range(big_n):
            comp = p.generators[k].components[l]
            for alpha, coeff in comp.terms.items():
                for mu_idx, mu in enumerate(monos):
                    r = eq_row((l, tuple(a + b for a, b in zip(alpha, mu))))
                    rows[r][k * n_monos + mu_idx] += coeff
        for alpha, coeff in target.components[l].terms.items():
            r = eq_row((l, alpha))
            rhs[r] += coeff
    sol = algebra.solve_linear(rows, rhs)
    if sol is None:
        return None
    out = []
    for k in range(big_n):
        terms = {
            monos[mu_idx]: sol[k * n_monos + mu_idx]
            for mu_idx in range(n_monos)
            if sol[k * n_monos + mu_idx] != 0
        }
        out.append(Polynomial(p.vars, terms))
    return tuple(out)


def jacobi_flag(p: FoliationPresentation) -> bool:
    """True when the stored structure functions satisfy the Jacobi identity.

    The cyclic sum of [[e_i,e_j],e_k]-expansions through c and anchor
    derivatives must vanish identically; almost-Lie structures may fail this.
    The Jacobiator is alternating (given antisymmetric c), so distinct
    index triples suffice.
    """
    if p.structure_functions is None:
        raise MissingStructureFunctions("structure functions unavailable")
    c = p.structure_functions
    n = p.num_generators
    zero = Polynomial.zero(p.vars)
    nonzero = [
        [[(l, c[a][b][l]) for l in range(n) if not c[a][b][l].is_zero()] for b in range(n)]
        for a in range(n)
    ]
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                acc = [zero] * n
                for (a, b, cc) in ((i, j, k), (j, k, i), (k, i, j)):
                    # [[e_a,e_b],e_c] = sum_l c_ab^l [e_l,e_c] - X_c[c_ab^m] e_m
                    for l, cab_l in nonzero[a][b]:
                        for m_out, v in nonzero[l][cc]:
                            acc[m_out] = acc[m_out] + cab_l * v
                    for m_out, cab_m in nonzero[a][b]:
                        acc[m_out] = acc[m_out] - p.generators[cc].apply_to(cab_m)
                if any(not q.is_zero() for q in acc):
                    return False
    return True


# ---------------------------------------------------------------------------
# Isotropy Lie algebra
# ---------------------------------------------------------------------------


@dataclass
class IsotropyAlgebra:
    """ker(anchor at m) modulo the strong-kernel approximation, with bracket."""

    point: tuple[Fraction, ...]
    ambient: Subspace           # ker(anchor at m) inside Q^N
    sker: Subspace              # degree-bounded strong kernel at m
    quotient_basis: tuple[Vec, ...]  # representatives, complementary to sker
    bracket_table: tuple[tuple[Vec, ...], ...]  # coords of [q_a, q_b] in quotient basis
    degree_bound: int

    @property
    def dim(self) -> int:
        return len(self.quotient_basis)

    def class_coordinates(self, v: Sequence) -> Vec:
        """Coordinates of the class of v (must lie in ker) in the quotient basis."""
        target = [Fraction(x) for x in v]
        cols = [list(q) for q in self.quotient_basis] + [list(s) for s in self.sker.basis]
        rows = [[col[i] for col in cols] for i in range(len(target))]
        sol = algebra.solve_linear(rows, target)
        if sol is None:
            raise ValueError("vector does not lie in the kernel at this point")
        return tuple(sol[: self.dim])

    def project_subspace(self, v: Subspace) -> Subspace:
        """Image of a subspace of ker in the quotient, as a subspace of Q^dim."""
        if self.dim == 0:
            return Subspace(0, ())
        vecs = [self.class_coordinates(row) for row in v.basis]
        return make_subspace(vecs, self.dim)

    def bracket_coords(self, u: Sequence[Fraction], v: Sequence[Fraction]) -> Vec:
        """Bracket of two quotient classes given in quotient-basis coordinates."""
        out = [Fraction(0)] * self.dim
        for a, ua in enumerate(u):
            if ua == 0:
                continue
            for b, vb in enumerate(v):
                if vb == 0:
                    continue
                for k, w in enumerate(self.bracket_table[a][b]):
                    out[k] += ua * vb * w
        return tuple(out)


def isotropy_algebra(
    p: FoliationPresentation, m: Sequence, degree_bound: int | None = None
) -> IsotropyAlgebra:
    """Quotient ker/Sker_D at m with the constant-coefficient-lift bracket."""
    if p.structure_functions is None:
        raise MissingStructureFunctions(
            "isotropy bracket needs structure functions (given or solved)"
        )
    if degree_bound is None:
        degree_bound = default_strong_kernel_bound(p)
    point = tuple(Fraction(x) for x in m)
    ker = kernel_at(p, point)
    sker = strong_kernel_at(p, point, degree_bound)
    if not ker.contains_subspace(sker):
        raise RuntimeError("strong kernel escaped the kernel; inconsistent data")
    # representatives: kernel basis reduced modulo sker, re-echelonized
    reduced = []
    for row in ker.basis:
        r = list(row)
        for s in sker.basis:
            lead = next(i for i, x in enumerate(s) if x != 0)
            if r[lead] != 0:
                f = r[lead]
                r = [a - f * b for a, b in zip(r, s)]
        if any(x != 0 for x in r):
            reduced.append(r)
    quotient = make_subspace(reduced, p.num_generators) if reduced else Subspace(p.num_generators, ())
    reps = quotient.basis
    g_dim = len(reps)
    table: list[list[Vec]] = [[() for _ in range(g_dim)] for _ in range(g_dim)]
    helper = IsotropyAlgebra(point, ker, sker, reps, (), degree_bound)
    for a in range(g_dim):
        for b in range(g_dim):
            w = _constant_lift_bracket_value(p, reps[a], reps[b], point)
            table[a][b] = helper.class_coordinates(w)
    return IsotropyAlgebra(
        point, ker, sker, reps, tuple(tuple(row) for row in table), degree_bound
    )


def _constant_lift_bracket_value(
    p: FoliationPresentation, u: Sequence[Fraction], v: Sequence[Fraction], m: Sequence
) -> Vec:
    """Value at m of [sum u_i e_i, sum v_j e_j] via structure functions."""
    n = p.num_generators
    out = [Fraction(0)] * n
    for i, ui in enumerate(u):
        if ui == 0:
            continue
        for j, vj in enumerate(v):
            if vj == 0:
                continue
            cij = p.structure_at(i, j, m)
            for k in range(n):
                out[k] += ui * vj * cij[k]
    return tuple(out)
