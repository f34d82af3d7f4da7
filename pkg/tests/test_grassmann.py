import math
import random
from fractions import Fraction

import numpy as np
import pytest

from folcone import algebra
from folcone.expr import Polynomial, parse_vector_field
from folcone.grassmann import (
    Curve,
    CurveNotGeneric,
    Subspace,
    annihilator,
    limit_along_curve,
    limit_along_curve_detailed,
    make_subspace,
    normalize_plucker,
    reconstruct_from_plucker,
    subspace_distance,
)

XYZ = ("x", "y", "z")
XY = ("x", "y")


def so3_anchor():
    gens = [
        parse_vector_field("z*d/dy - y*d/dz", XYZ),
        parse_vector_field("x*d/dz - z*d/dx", XYZ),
        parse_vector_field("y*d/dx - x*d/dy", XYZ),
    ]
    return [[g.components[i] for g in gens] for i in range(3)]


def order2_anchor():
    texts = ["x^2*d/dx", "y^2*d/dx", "x*y*d/dx", "x^2*d/dy", "y^2*d/dy", "x*y*d/dy"]
    gens = [parse_vector_field(t, XY) for t in texts]
    return [[g.components[i] for g in gens] for i in range(2)]


class TestMakeSubspace:
    def test_coordinate_plane(self):
        s = make_subspace([(2, 0, 0), (0, 3, 0)])
        assert s.basis == ((Fraction(1), 0, 0), (0, Fraction(1), 0))
        assert s.plucker == (Fraction(1), Fraction(0), Fraction(0))

    def test_dependent_input(self):
        s = make_subspace([(1, 1), (2, 2)])
        assert s.dim == 1
        assert s.plucker == (Fraction(1), Fraction(1))

    def test_already_reduced(self):
        rows = [(1, 1, 1, 0, 0, 0), (0, 0, 0, 1, 1, 1)]
        s = make_subspace(rows)
        assert s.basis == tuple(tuple(Fraction(x) for x in r) for r in rows)
        # spot-check two minors against hand expansion
        idx = {cols: k for k, cols in enumerate(__import__("itertools").combinations(range(6), 2))}
        assert s.plucker[idx[(0, 3)]] == 1
        assert s.plucker[idx[(0, 1)]] == 0

    def test_idempotent(self):
        s = make_subspace([(1, 2, 3), (4, 5, 6)])
        again = make_subspace(s.basis)
        assert again == s and again.plucker == s.plucker

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            make_subspace([(1, 0), (1, 0, 0)])

    def test_zero_subspace(self):
        s = make_subspace([(0, 0, 0)], ambient_dim=3)
        assert s.dim == 0 and s.plucker == (Fraction(1),)


class TestPlucker:
    def test_basis_independence(self):
        rng = random.Random(21)
        for _ in range(15):
            rows = [[Fraction(rng.randint(-4, 4)) for _ in range(4)] for _ in range(2)]
            s = make_subspace(rows, 4)
            if s.dim != 2:
                continue
            # random invertible combination of the rows spans the same space
            a, b, c, d = (rng.randint(-3, 3) for _ in range(4))
            if a * d - b * c == 0:
                continue
            mixed = [
                [a * rows[0][j] + b * rows[1][j] for j in range(4)],
                [c * rows[0][j] + d * rows[1][j] for j in range(4)],
            ]
            assert make_subspace(mixed, 4).plucker == s.plucker

    def test_normalization_primitive_and_sign(self):
        p = normalize_plucker((Fraction(-2, 3), Fraction(4, 3), Fraction(0)))
        assert p == (Fraction(1), Fraction(-2), Fraction(0))

    def test_reconstruction_round_trip(self):
        rng = random.Random(22)
        for _ in range(15):
            k = rng.randint(1, 3)
            rows = [[Fraction(rng.randint(-3, 3)) for _ in range(5)] for _ in range(k)]
            s = make_subspace(rows, 5)
            if s.dim == 0:
                continue
            rebuilt = reconstruct_from_plucker(s.plucker, 5, s.dim)
            assert rebuilt == s

    def test_equality_iff_plucker_equality(self):
        a = make_subspace([(1, 0, 1), (0, 1, 1)])
        b = make_subspace([(1, 1, 2), (1, -1, 0)])
        c = make_subspace([(1, 0, 0), (0, 1, 1)])
        assert a == b and a.plucker == b.plucker
        assert a != c and a.plucker != c.plucker


class TestAnnihilator:
    def test_line_in_three_space(self):
        v = annihilator(make_subspace([(1, 0, 0)]))
        assert v.basis == ((0, Fraction(1), 0), (0, 0, Fraction(1)))

    def test_zero_space(self):
        full = annihilator(make_subspace([], ambient_dim=3))
        assert full.dim == 3

    def test_biduality(self):
        rng = random.Random(23)
        for _ in range(15):
            rows = [[Fraction(rng.randint(-3, 3)) for _ in range(4)] for _ in range(2)]
            s = make_subspace(rows, 4)
            assert annihilator(annihilator(s)) == s

    def test_pairings_vanish(self):
        s = make_subspace([(1, 2, 3), (0, 1, 1)])
        a = annihilator(s)
        assert a.dim == 1
        for row in a.basis:
            for b in s.basis:
                assert sum(x * y for x, y in zip(row, b)) == 0


class TestCurve:
    def test_constant(self):
        c = Curve.constant((1, 2))
        assert c.is_constant() and c.eval(Fraction(5)) == (1, 2)

    def test_ray_and_arc(self):
        c = Curve.ray((0, 0), (1, 2))
        assert c.eval(Fraction(1, 2)) == (Fraction(1, 2), Fraction(1))
        a = Curve.arc((0, 0), (1, 0), (0, 1))
        assert a.eval(Fraction(2)) == (Fraction(2), Fraction(4))

    def test_center_mismatch(self):
        t = Polynomial.var("t", ("t",))
        with pytest.raises(ValueError):
            Curve((1,), (t,))


class TestLimits:
    def test_so3_scaled_direction(self):
        curve = Curve.ray((0, 0, 0), (0, 0, 1))
        lim = limit_along_curve(so3_anchor(), curve, 1, XYZ)
        assert lim.basis == ((0, 0, Fraction(1)),)

    def test_order2_diagonal(self):
        curve = Curve.ray((0, 0), (1, 1))
        lim = limit_along_curve(order2_anchor(), curve, 4, XY)
        expected = annihilator(make_subspace([(1, 1, 1, 0, 0, 0), (0, 0, 0, 1, 1, 1)]))
        assert lim == expected

    def test_constant_curve_at_regular_point(self):
        m = (1, 0, 0)
        curve = Curve.constant(m)
        lim = limit_along_curve(so3_anchor(), curve, 1, XYZ)
        rows = algebra.kernel_basis(algebra.eval_poly_matrix(so3_anchor(), m))
        assert lim == Subspace(3, tuple(rows))

    def test_singular_constant_curve_rejected(self):
        with pytest.raises(CurveNotGeneric):
            limit_along_curve(so3_anchor(), Curve.constant((0, 0, 0)), 1, XYZ)

    def test_sides_agree(self):
        # image-side computation must match a kernel-side recomputation
        curve = Curve.arc((0, 0), (1, 0), (0, 1))
        detail = limit_along_curve_detailed(order2_anchor(), curve, 4, XY)
        assert detail.side == "image" and detail.limit.dim == 4
        m_t = algebra.subs_poly_matrix(order2_anchor(), curve.substitution(XY))
        kernel_rows = algebra.kernel_basis_over_curve(m_t)
        from folcone.grassmann import _poly_rows_pluecker
        from folcone import algebra as alg

        pl = _poly_rows_pluecker(kernel_rows, 6)
        v0 = min(alg.t_valuation(p) for p in pl if not p.is_zero())
        limit_vec = [alg.t_shift_down(p, v0).constant_term() if not p.is_zero() else Fraction(0) for p in pl]
        rebuilt = reconstruct_from_plucker(normalize_plucker(limit_vec), 6, 4)
        assert rebuilt == detail.limit

    def test_float_cross_check(self):
        curve = Curve.arc((0, 0), (0, 1), (1, 0))
        detail = limit_along_curve_detailed(order2_anchor(), curve, 4, XY)
        t = 1e-4
        float_vec = np.array([p.eval_float([t]) for p in detail.plucker_polys])
        exact_vec = np.array([float(p.eval([Fraction(1, 10000)])) for p in detail.plucker_polys])
        cosang = abs(float_vec @ exact_vec) / (
            np.linalg.norm(float_vec) * np.linalg.norm(exact_vec)
        )
        assert math.acos(min(1.0, cosang)) < 1e-6

    def test_scalar_stability_of_annihilators(self):
        lim = limit_along_curve(so3_anchor(), Curve.ray((0, 0, 0), (1, 2, 2)), 1, XYZ)
        dual = annihilator(lim)
        rng = random.Random(25)
        for _ in range(10):
            coeffs = [Fraction(rng.randint(-3, 3)) for _ in range(dual.dim)]
            xi = [
                sum((coeffs[a] * dual.basis[a][j] for a in range(dual.dim)), Fraction(0))
                for j in range(3)
            ]
            for lam in (Fraction(2), Fraction(-7, 3), Fraction(0)):
                assert dual.contains_vector([lam * x for x in xi])


class TestDistance:
    def test_identical(self):
        s = make_subspace([(1, 2), (0, 1)])
        assert subspace_distance(s, s) == 0.0

    def test_orthogonal_lines(self):
        d = subspace_distance(make_subspace([(1, 0)]), make_subspace([(0, 1)]))
        assert abs(d - math.pi / 2) < 1e-12

    def test_small_angle(self):
        eps = 1e-3
        d = subspace_distance(
            make_subspace([(1, 0)]), make_subspace([(Fraction(1), Fraction(1, 1000))])
        )
        assert abs(d - math.atan(eps)) < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            subspace_distance(make_subspace([(1, 0)]), make_subspace([(1, 0), (0, 1)]))
