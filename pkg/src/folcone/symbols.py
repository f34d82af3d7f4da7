"""Operator words, their realization as differential operators, and symbols.

Formal elements are sums of words f(x) * g_{i1}. ... .g_{ik}.  The product of
two elements rewrites coefficients to the left through the module relation
a.(f b) = (f a).b + X_a[f] b, so realization is an algebra morphism onto
composed differential operators in normal form (coefficients left, partial
derivatives right).

The top symbol of an element of degree k replaces each letter with a
commuting fiber variable xi_i; restricted to a sampled cone fiber it depends
only on the realized operator, which the test suites check exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

import numpy as np

from . import algebra
from .expr import OperatorWord, Polynomial, PolyVectorField, merge_words
from .foliation import FoliationPresentation
from .grassmann import Subspace
from .hncone import hn_fiber


class OddDegreeWarning(ValueError):
    """Positivity verdicts need an even degree; pass force_odd to use |symbol|."""


# ---------------------------------------------------------------------------
# Formal elements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UEAElement:
    """A merged, canonically ordered list of operator words."""

    vars: tuple[str, ...]
    words: tuple[OperatorWord, ...]

    @classmethod
    def from_words(cls, words: Sequence[OperatorWord], vars: Sequence[str]) -> "UEAElement":
        return cls(tuple(vars), tuple(merge_words(words, vars)))

    @property
    def degree(self) -> int:
        return max((len(w.letters) for w in self.words), default=0)

    def is_zero(self) -> bool:
        return not self.words

    def __add__(self, other: "UEAElement") -> "UEAElement":
        if self.vars != other.vars:
            raise ValueError("variable-set mismatch")
        return UEAElement.from_words(self.words + other.words, self.vars)

    def __sub__(self, other: "UEAElement") -> "UEAElement":
        return self + other.scale(Fraction(-1))

    def scale(self, c) -> "UEAElement":
        if isinstance(c, Polynomial):
            scaled = [OperatorWord(c * w.coefficient, w.letters) for w in self.words]
        else:
            scaled = [OperatorWord(w.coefficient * Fraction(c), w.letters) for w in self.words]
        return UEAElement.from_words(scaled, self.vars)


def uea_product(p: FoliationPresentation, a: UEAElement, b: UEAElement) -> UEAElement:
    """Product in the enveloping algebra modulo the module relation.

    Words multiply by moving the right factor's coefficient to the left:
    (f, u+[i]) * (g, w)  ->  (f, u) * (g, [i]+w)  +  (f, u) * (X_i[g], w).
    """
    if a.vars != b.vars or a.vars != p.vars:
        raise ValueError("variable-set mismatch")
    out: list[OperatorWord] = []

    def word_product(f: Polynomial, u: tuple[int, ...], g: Polynomial, w: tuple[int, ...]):
        if f.is_zero() or g.is_zero():
            return
        if not u:
            out.append(OperatorWord(f * g, w))
            return
        head, last = u[:-1], u[-1]
        word_product(f, head, g, (last,) + w)
        word_product(f, head, p.generators[last].apply_to(g), w)

    for wa in a.words:
        for wb in b.words:
            word_product(wa.coefficient, wa.letters, wb.coefficient, wb.letters)
    return UEAElement.from_words(out, a.vars)


# ---------------------------------------------------------------------------
# Differential operators in normal form
# ---------------------------------------------------------------------------


class DiffOperator:
    """sum_alpha f_alpha(x) * d^alpha, canonical: no zero coefficients."""

    __slots__ = ("vars", "terms")

    def __init__(self, vars: Sequence[str], terms=None):
        self.vars = tuple(vars)
        clean: dict[tuple[int, ...], Polynomial] = {}
        if terms:
            for alpha, f in terms.items():
                if not f.is_zero():
                    alpha = tuple(alpha)
                    clean[alpha] = clean[alpha] + f if alpha in clean else f
        self.terms = {a: f for a, f in clean.items() if not f.is_zero()}

    @classmethod
    def identity(cls, vars: Sequence[str]) -> "DiffOperator":
        vars = tuple(vars)
        return cls(vars, {(0,) * len(vars): Polynomial.one(vars)})

    @property
    def order(self) -> int:
        return max((sum(a) for a in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return (
            isinstance(other, DiffOperator)
            and self.vars == other.vars
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def __add__(self, other: "DiffOperator") -> "DiffOperator":
        if self.vars != other.vars:
            raise ValueError("variable-set mismatch")
        terms = dict(self.terms)
        for a, f in other.terms.items():
            terms[a] = terms[a] + f if a in terms else f
        return DiffOperator(self.vars, terms)

    def scale(self, f: Polynomial) -> "DiffOperator":
        return DiffOperator(self.vars, {a: f * g for a, g in self.terms.items()})

    def field_compose_left(self, x_field: PolyVectorField) -> "DiffOperator":
        """X o D for a vector field X = sum g_i d_i."""
        terms: dict[tuple[int, ...], Polynomial] = {}

        def add(alpha, f):
            if f.is_zero():
                return
            terms[alpha] = terms[alpha] + f if alpha in terms else f

        for alpha, h in self.terms.items():
            for i, (name, g) in enumerate(zip(self.vars, x_field.components)):
                if g.is_zero():
                    continue
                add(alpha, g * h.diff(name))
                bumped = list(alpha)
                bumped[i] += 1
                add(tuple(bumped), g * h)
        return DiffOperator(self.vars, terms)

    def compose(self, other: "DiffOperator") -> "DiffOperator":
        """self o other, renormalized."""
        if self.vars != other.vars:
            raise ValueError("variable-set mismatch")
        result = DiffOperator(self.vars, {})
        for alpha, f in self.terms.items():
            part = other
            for i, e in enumerate(alpha):
                for _ in range(e):
                    part = part._partial_left(i)
            result = result + part.scale(f)
        return result

    def _partial_left(self, i: int) -> "DiffOperator":
        terms: dict[tuple[int, ...], Polynomial] = {}

        def add(alpha, f):
            if f.is_zero():
                return
            terms[alpha] = terms[alpha] + f if alpha in terms else f

        name = self.vars[i]
        for alpha, g in self.terms.items():
            add(alpha, g.diff(name))
            bumped = list(alpha)
            bumped[i] += 1
            add(tuple(bumped), g)
        return DiffOperator(self.vars, terms)

    def apply(self, f: Polynomial) -> Polynomial:
        if f.vars != self.vars:
            raise ValueError("variable-set mismatch")
        out = Polynomial.zero(self.vars)
        for alpha, coeff in self.terms.items():
            g = f
            for name, e in zip(self.vars, alpha):
                for _ in range(e):
                    g = g.diff(name)
                    if g.is_zero():
                        break
            if not g.is_zero():
                out = out + coeff * g
        return out

    def __repr__(self):
        if not self.terms:
            return "DiffOperator(0)"
        bits = []
        for alpha in sorted(self.terms, key=lambda a: (sum(a), a), reverse=True):
            d = "".join(f" d{v}^{e}" if e > 1 else f" d{v}" for v, e in zip(self.vars, alpha) if e)
            bits.append(f"({self.terms[alpha]}){d}")
        return "DiffOperator(" + " + ".join(bits) + ")"


def realize(element: UEAElement, p: FoliationPresentation) -> DiffOperator:
    """Algebra morphism: compose the generator fields of each word, in order."""
    if element.vars != p.vars:
        raise ValueError("variable-set mismatch")
    total = DiffOperator(p.vars, {})
    for w in element.words:
        op = DiffOperator.identity(p.vars)
        for letter in reversed(w.letters):
            if letter < 0 or letter >= p.num_generators:
                raise ValueError(f"unknown generator index {letter}")
            op = op.field_compose_left(p.generators[letter])
        total = total + op.scale(w.coefficient)
    return total


def apply_operator(d: DiffOperator, f: Polynomial) -> Polynomial:
    return d.apply(f)


# ---------------------------------------------------------------------------
# Symbols
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SymbolPolynomial:
    """Polynomial in base variables and fiber variables, fiber-homogeneous.

    ``terms`` maps a fiber exponent tuple (length fiber_dim, total degree
    exactly ``degree``) to a polynomial coefficient in the base variables.
    """

    base_vars: tuple[str, ...]
    fiber_dim: int
    degree: int
    terms: tuple[tuple[tuple[int, ...], Polynomial], ...]

    @classmethod
    def build(cls, base_vars, fiber_dim, degree, term_map) -> "SymbolPolynomial":
        clean = []
        for exp, f in sorted(term_map.items()):
            if f.is_zero():
                continue
            if len(exp) != fiber_dim or sum(exp) != degree:
                raise ValueError("symbol terms must be homogeneous of the stated degree")
            clean.append((tuple(exp), f))
        return cls(tuple(base_vars), fiber_dim, degree, tuple(clean))

    def is_zero(self) -> bool:
        return not self.terms

    def eval(self, m: Sequence, xi: Sequence) -> Fraction:
        """Exact evaluation at a rational base point and fiber covector."""
        vals = [Fraction(x) for x in xi]
        if len(vals) != self.fiber_dim:
            raise ValueError("fiber dimension mismatch")
        total = Fraction(0)
        for exp, f in self.terms:
            term = f.eval(m)
            for v, e in zip(vals, exp):
                if e:
                    term *= v ** e
            total += term
        return total

    def eval_float(self, m: Sequence[float], xi: Sequence[float]) -> float:
        total = 0.0
        for exp, f in self.terms:
            term = f.eval_float(m)
            for v, e in zip(xi, exp):
                if e:
                    term *= v ** e
            total += term
        return total

    def as_string(self, fiber_prefix: str = "xi") -> str:
        combined = self.as_combined_polynomial(fiber_prefix)
        return str(combined)

    def as_combined_polynomial(self, fiber_prefix: str = "xi") -> Polynomial:
        names = tuple(self.base_vars) + tuple(
            f"{fiber_prefix}{i+1}" for i in range(self.fiber_dim)
        )
        out = Polynomial.zero(names)
        for exp, f in self.terms:
            for bexp, c in f.terms.items():
                out = out + Polynomial.monomial(tuple(bexp) + tuple(exp), c, names)
        return out


def symbol_top(element: UEAElement, k: int | None = None, fiber_dim: int | None = None) -> SymbolPolynomial:
    """Top symbol: words of length k contribute coeff(x) * xi_{i1}...xi_{ik}."""
    if k is None:
        k = element.degree
    if fiber_dim is None:
        fiber_dim = max((max(w.letters) + 1 for w in element.words if w.letters), default=0)
    term_map: dict[tuple[int, ...], Polynomial] = {}
    for w in element.words:
        if len(w.letters) != k:
            continue
        exp = [0] * fiber_dim
        for letter in w.letters:
            if letter >= fiber_dim:
                raise ValueError("letter outside the declared fiber dimension")
            exp[letter] += 1
        key = tuple(exp)
        term_map[key] = term_map[key] + w.coefficient if key in term_map else w.coefficient
    return SymbolPolynomial.build(element.vars, fiber_dim, k, term_map)


def classical_principal_symbol(d: DiffOperator, k: int | None = None) -> SymbolPolynomial:
    """sum_{|alpha| = k} f_alpha(x) eta^alpha from the normal form."""
    if k is None:
        k = d.order
    n = len(d.vars)
    term_map = {alpha: f for alpha, f in d.terms.items() if sum(alpha) == k}
    return SymbolPolynomial.build(d.vars, n, k, term_map)


def symbol_on_fiber(sigma: SymbolPolynomial, m: Sequence, v_dual: Subspace) -> Polynomial:
    """Restrict to a covector space: substitute xi = B^T u for the canonical
    basis B of the space; returns an exact polynomial in u_1..u_r."""
    if v_dual.ambient_dim != sigma.fiber_dim:
        raise ValueError("fiber dimension mismatch")
    r = v_dual.dim
    u_vars = tuple(f"u{i+1}" for i in range(r))
    forms = []
    for j in range(sigma.fiber_dim):
        terms = {}
        for a in range(r):
            coeff = v_dual.basis[a][j]
            if coeff != 0:
                exp = [0] * r
                exp[a] = 1
                terms[tuple(exp)] = coeff
        forms.append(Polynomial(u_vars, terms))
    out = Polynomial.zero(u_vars)
    for exp, f in sigma.terms:
        c = f.eval(m)
        if c == 0:
            continue
        term = Polynomial.const(c, u_vars)
        for j, e in enumerate(exp):
            for _ in range(e):
                term = term * forms[j]
                if term.is_zero():
                    break
        out = out + term
    return out


# ---------------------------------------------------------------------------
# Pullback consistency at regular points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PullbackReport:
    point: tuple[Fraction, ...]
    trials: int
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def pullback_consistency(
    element: UEAElement,
    p: FoliationPresentation,
    m: Sequence,
    trials: int = 20,
    seed: int = 0,
) -> PullbackReport:
    """classical symbol of the realization at (m, eta) vs top symbol at
    (m, rho*_m eta), exactly, for seeded random rational eta."""
    point = tuple(Fraction(x) for x in m)
    k = element.degree
    d = realize(element, p)
    classical = classical_principal_symbol(d, k)
    top = symbol_top(element, k, fiber_dim=p.num_generators)
    anchor_at = p.anchor_at(point)
    rng = random.Random(seed)
    failures = []
    for trial in range(trials):
        eta = [Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(p.dim)]
        pulled = algebra.mat_vec(algebra.transpose(anchor_at), eta)
        lhs = classical.eval(point, eta)
        rhs = top.eval(point, pulled)
        if lhs != rhs:
            failures.append(f"trial {trial}: eta={eta}: {lhs} != {rhs}")
    return PullbackReport(point, trials, tuple(failures))


# ---------------------------------------------------------------------------
# Longitudinal ellipticity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiberVerdict:
    space: Subspace
    min_value: float
    exact_min: Fraction | None
    restricted_zero: bool
    positive: bool


@dataclass(frozen=True)
class PointVerdict:
    point: tuple[Fraction, ...]
    fibers: tuple[FiberVerdict, ...]
    elliptic: bool
    witness: Subspace | None  # a fiber space violating positivity, if any


@dataclass(frozen=True)
class EllipticityReport:
    degree: int
    tolerance: float
    points: tuple[PointVerdict, ...]

    @property
    def elliptic(self) -> bool:
        return all(pv.elliptic for pv in self.points)


def _divisors(n: int) -> list[int]:
    n = abs(n)
    return [d for d in range(1, n + 1) if n % d == 0] or [1]


def _rational_roots(coeffs: Sequence[Fraction]) -> list[Fraction] | None:
    """All roots, with multiplicity, when the polynomial splits over Q; else None.

    ``coeffs`` are ascending.  Rational-root search on the primitive integer
    form, deflating by (x - root) until the degree is exhausted.
    """
    work = [Fraction(c) for c in coeffs]
    while work and work[-1] == 0:
        work.pop()
    if len(work) <= 1:
        return None
    roots: list[Fraction] = []
    while len(work) > 1:
        if work[0] == 0:
            roots.append(Fraction(0))
            work = work[1:]
            continue
        den = 1
        for c in work:
            den = lcm(den, c.denominator)
        ints = [int(c * den) for c in work]
        g = 0
        for v in ints:
            g = gcd(g, v)
        ints = [v // g for v in ints]
        found = None
        for pnum in _divisors(ints[0]):
            for qden in _divisors(ints[-1]):
                for cand in (Fraction(pnum, qden), Fraction(-pnum, qden)):
                    val = Fraction(0)
                    for c in reversed(ints):
                        val = val * cand + c
                    if val == 0:
                        found = cand
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            return None
        roots.append(found)
        # deflate: p = (x - root) * q with q[i] = p[i+1] + root * q[i+1]
        q = [Fraction(0)] * (len(work) - 1)
        q[-1] = Fraction(ints[-1])
        for i in range(len(work) - 3, -1, -1):
            q[i] = Fraction(ints[i + 1]) + found * q[i + 1]
        work = q
    return roots


def _gram_of_quadratic(q: Polynomial, r: int) -> list[list[Fraction]]:
    g = [[Fraction(0)] * r for _ in range(r)]
    for exp, c in q.terms.items():
        idx = [i for i, e in enumerate(exp) for _ in range(e)]
        if len(idx) != 2:
            raise ValueError("not a quadratic form")
        a, b = idx
        if a == b:
            g[a][a] += c
        else:
            g[a][b] += c / 2
            g[b][a] += c / 2
    return g


def _sylvester_positive_definite(m: list[list[Fraction]]) -> bool:
    n = len(m)
    for k in range(1, n + 1):
        minor = algebra.rational_det([row[:k] for row in m[:k]])
        if minor <= 0:
            return False
    return True


def _pencil_minimum(
    g: list[list[Fraction]], gram: list[list[Fraction]], tol: Fraction
) -> tuple[float, Fraction | None, bool]:
    """(float min, exact min if the pencil splits over Q, verdict min > tol).

    Minimizes u^T G u over the ellipsoid u^T M u = 1 (M = Gram of the basis),
    i.e. the smallest generalized eigenvalue of (G, M).
    """
    r = len(g)
    lam_vars = ("lam",)
    lam = Polynomial.var("lam", lam_vars)
    entries = [
        [Polynomial.const(g[i][j], lam_vars) - lam * Polynomial.const(gram[i][j], lam_vars) for j in range(r)]
        for i in range(r)
    ]
    char = algebra.bareiss_det(entries)
    coeffs = [Fraction(0)] * (char.total_degree() + 1)
    for exp, c in char.terms.items():
        coeffs[exp[0]] = c
    roots = _rational_roots(list(coeffs))
    exact_min = min(roots) if roots else None
    g_np = np.array([[float(x) for x in row] for row in g])
    m_np = np.array([[float(x) for x in row] for row in gram])
    chol = np.linalg.cholesky(m_np)
    inv = np.linalg.inv(chol)
    reduced = inv @ g_np @ inv.T
    float_min = float(np.linalg.eigvalsh((reduced + reduced.T) / 2).min())
    if exact_min is not None:
        positive = exact_min > tol
        float_min = float(exact_min)
    else:
        shifted = [
            [g[i][j] - tol * gram[i][j] for j in range(r)] for i in range(r)
        ]
        positive = _sylvester_positive_definite(shifted)
    return float_min, exact_min, positive


def ellipticity_check(
    element: UEAElement,
    p: FoliationPresentation,
    points: Sequence[Sequence],
    *,
    tolerance: float = 1e-9,
    sphere_samples: int = 8,
    seed: int = 0,
    direction_count: int | None = None,
    arc_degree: int = 2,
    curves_by_point: Sequence[Sequence] | None = None,
    convention: str = "positive",
    force_odd: bool = False,
) -> EllipticityReport:
    """Minimize the restricted symbol on the unit sphere of each sampled
    cone fiber space; elliptic at a point iff every minimum exceeds tolerance.

    Quadratic symbols get an exact generalized-eigenvalue minimum (the sphere
    lives in the ambient covector space); higher even degrees use seeded
    sphere sampling with descent refinement.  ``convention`` is "positive"
    (strict positivity off the zero section) or "nonvanishing" (judge
    |symbol|, so negative-definite symbols also count as elliptic); odd
    degrees are only meaningful under "nonvanishing" (``force_odd`` is a
    shorthand for switching to it).
    """
    if convention not in ("positive", "nonvanishing"):
        raise ValueError("convention must be 'positive' or 'nonvanishing'")
    if force_odd:
        convention = "nonvanishing"
    nonvanishing = convention == "nonvanishing"
    k = element.degree
    if k % 2 == 1 and not nonvanishing:
        raise OddDegreeWarning(
            "odd-degree symbol: strict positivity is inapplicable "
            "(use the nonvanishing convention to judge |symbol|)"
        )
    sigma = symbol_top(element, k, fiber_dim=p.num_generators)
    tol_exact = Fraction(tolerance).limit_denominator(10**12)
    verdicts = []
    for idx, m in enumerate(points):
        point = tuple(Fraction(x) for x in m)
        curves = list(curves_by_point[idx]) if curves_by_point is not None else None
        sample = hn_fiber(
            p, point, curves, direction_count=direction_count, arc_degree=arc_degree, seed=seed
        )
        fibers = []
        for space in sample.spaces:
            restricted = symbol_on_fiber(sigma, point, space)
            if restricted.is_zero():
                fv = FiberVerdict(space, 0.0, Fraction(0), True, False)
            elif k == 2:
                gram_symbol = _gram_of_quadratic(restricted, space.dim)
                gram_basis = [
                    [
                        sum(
                            (space.basis[a][j] * space.basis[b][j] for j in range(space.ambient_dim)),
                            Fraction(0),
                        )
                        for b in range(space.dim)
                    ]
                    for a in range(space.dim)
                ]
                fmin, emin, pos = _pencil_minimum(gram_symbol, gram_basis, tol_exact)
                if nonvanishing and not pos:
                    # negative-definite restrictions are nonvanishing too; the
                    # sphere minimum of |symbol| is then the pencil minimum of
                    # the negated form
                    neg = [[-x for x in row] for row in gram_symbol]
                    neg_fmin, neg_emin, neg_pos = _pencil_minimum(neg, gram_basis, tol_exact)
                    if neg_pos:
                        fmin, emin, pos = neg_fmin, neg_emin, True
                fv = FiberVerdict(space, fmin, emin, False, pos)
            else:
                # seeded sampling on the Euclidean unit sphere of the space
                q_ortho, _ = np.linalg.qr(space.basis_floats().T)
                fmin = _sphere_minimum_on_space(
                    sigma, point, q_ortho, sphere_samples, seed, nonvanishing
                )
                fv = FiberVerdict(space, fmin, None, False, fmin > tolerance)
            fibers.append(fv)
        # prefer a vanishing-restriction witness when reporting failure
        failing = [fv for fv in fibers if not fv.positive]
        witness = None
        if failing:
            witness = next((fv.space for fv in failing if fv.restricted_zero), failing[0].space)
        verdicts.append(PointVerdict(point, tuple(fibers), witness is None, witness))
    return EllipticityReport(k, tolerance, tuple(verdicts))


def _sphere_minimum_on_space(
    sigma: SymbolPolynomial,
    m: Sequence[Fraction],
    q_ortho: np.ndarray,
    samples: int,
    seed: int,
    use_abs: bool,
) -> float:
    mf = [float(x) for x in m]
    r = q_ortho.shape[1]
    rng = np.random.default_rng(seed)
    count = max(10 * r * samples, 8)
    best = float("inf")
    best_c = None
    for _ in range(count):
        c = rng.normal(size=r)
        norm = np.linalg.norm(c)
        if norm == 0:
            continue
        c = c / norm
        xi = q_ortho @ c
        val = sigma.eval_float(mf, xi)
        if use_abs:
            val = abs(val)
        if val < best:
            best, best_c = val, c
    if best_c is None:
        return 0.0
    # light descent refinement with numeric gradients
    c = best_c
    step = 0.1
    eps = 1e-6
    for _ in range(100):
        grad = np.zeros(r)
        base = sigma.eval_float(mf, q_ortho @ c)
        if use_abs:
            base = abs(base)
        for i in range(r):
            cc = c.copy()
            cc[i] += eps
            cc = cc / np.linalg.norm(cc)
            v = sigma.eval_float(mf, q_ortho @ cc)
            if use_abs:
                v = abs(v)
            grad[i] = (v - base) / eps
        if np.linalg.norm(grad) < 1e-12:
            break
        cand = c - step * grad
        cand = cand / np.linalg.norm(cand)
        val = sigma.eval_float(mf, q_ortho @ cand)
        if use_abs:
            val = abs(val)
        if val < best:
            best, c = val, cand
        else:
            step *= 0.5
            if step < 1e-10:
                break
    return float(best)
