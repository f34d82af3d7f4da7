from fractions import Fraction

import pytest

from folcone.expr import Polynomial, parse_polynomial, parse_vector_field
from folcone.foliation import (
    FoliationPresentation,
    MissingStructureFunctions,
    anchor_matrix,
    isotropy_algebra,
    jacobi_flag,
    kernel_at,
    leaf_dimension_at,
    monomials_up_to,
    regular_data,
    solve_structure_functions,
    strong_kernel_at,
    structure_defect,
)
from folcone.presets import load_preset

XYZ = ("x", "y", "z")
XY = ("x", "y")


def fresh_so3():
    gens = tuple(
        parse_vector_field(t, XYZ)
        for t in ("z*d/dy - y*d/dz", "x*d/dz - z*d/dx", "y*d/dx - x*d/dy")
    )
    return FoliationPresentation(XYZ, gens, name="so3")


def fresh_gl2():
    gens = tuple(
        parse_vector_field(t, ("x1", "x2"))
        for t in ("x1*d/dx1", "x1*d/dx2", "x2*d/dx1", "x2*d/dx2")
    )
    return FoliationPresentation(("x1", "x2"), gens, name="gl2")


def fresh_order2():
    texts = ["x^2*d/dx", "y^2*d/dx", "x*y*d/dx", "x^2*d/dy", "y^2*d/dy", "x*y*d/dy"]
    return FoliationPresentation(XY, tuple(parse_vector_field(t, XY) for t in texts), name="order2")


class TestAnchor:
    def test_so3_matrix(self):
        a = anchor_matrix(fresh_so3())
        expected = [
            ["0", "-z", "y"],
            ["z", "0", "-x"],
            ["-y", "x", "0"],
        ]
        for i in range(3):
            for j in range(3):
                assert a[i][j] == parse_polynomial(expected[i][j], XYZ)

    def test_order2_matrix(self):
        a = anchor_matrix(fresh_order2())
        row0 = ["x^2", "y^2", "x*y", "0", "0", "0"]
        row1 = ["0", "0", "0", "x^2", "y^2", "x*y"]
        for j in range(6):
            assert a[0][j] == parse_polynomial(row0[j], XY)
            assert a[1][j] == parse_polynomial(row1[j], XY)

    def test_single_generator_line(self):
        p = FoliationPresentation(("x",), (parse_vector_field("d/dx", ("x",)),))
        a = anchor_matrix(p)
        assert len(a) == 1 and len(a[0]) == 1 and a[0][0] == Polynomial.one(("x",))


class TestRegularData:
    def test_so3(self):
        r, is_regular = regular_data(fresh_so3())
        assert r == 2
        assert is_regular((1, 0, 0)) and not is_regular((0, 0, 0))

    def test_line_all_regular(self):
        p = FoliationPresentation(("x",), (parse_vector_field("d/dx", ("x",)),))
        r, is_regular = regular_data(p)
        assert r == 1 and is_regular((0,)) and is_regular((5,))

    def test_gl2(self):
        r, is_regular = regular_data(fresh_gl2())
        assert r == 2
        assert not is_regular((0, 0)) and is_regular((1, 0))

    def test_leaf_dimension(self):
        so3 = fresh_so3()
        assert leaf_dimension_at(so3, (1, 2, 2)) == 2
        assert leaf_dimension_at(so3, (0, 0, 0)) == 0
        line = FoliationPresentation(("x",), (parse_vector_field("d/dx", ("x",)),))
        assert leaf_dimension_at(line, (3,)) == 1


class TestStrongKernel:
    def test_so3_at_origin(self):
        s = strong_kernel_at(fresh_so3(), (0, 0, 0), 1)
        assert s.dim == 0

    def test_so3_at_regular_point(self):
        s = strong_kernel_at(fresh_so3(), (1, 0, 0), 1)
        assert s.basis == ((Fraction(1), 0, 0),)
        assert s == kernel_at(fresh_so3(), (1, 0, 0))

    def test_monotone_in_degree_and_inside_kernel(self):
        so3 = fresh_so3()
        for m in ((0, 0, 0), (1, 0, 0), (1, 2, -1), (0, 1, 1)):
            ker = kernel_at(so3, m)
            previous = None
            for bound in range(4):
                s = strong_kernel_at(so3, m, bound)
                assert ker.contains_subspace(s)
                if previous is not None:
                    assert s.contains_subspace(previous)
                previous = s

    def test_gl2_origin_trivial(self):
        assert strong_kernel_at(fresh_gl2(), (0, 0), 3).dim == 0

    def test_shifted_point_uses_recentered_system(self):
        # at (0,1) the syzygy (y,0,-x,...) of the order-two columns evaluates
        # to (1,0,0,...): hand computation
        o2 = fresh_order2()
        s = strong_kernel_at(o2, (0, 1), 2)
        assert s.contains_vector((1, 0, 0, 0, 0, 0))
        assert s == kernel_at(o2, (0, 1))


class TestStructureFunctions:
    def test_so3_preset_ships_valid_structure(self):
        p = load_preset("so3_r3").presentation
        assert p.has_structure()
        assert structure_defect(p) is None

    def test_so3_solved_constants(self):
        so3 = fresh_so3()
        c = solve_structure_functions(so3)
        assert c is not None and so3.structure_bound_used == 0
        one = Polynomial.one(XYZ)
        zero = Polynomial.zero(XYZ)
        assert c[0][1] == (zero, zero, one)
        assert c[1][2] == (one, zero, zero)
        assert c[2][0] == (zero, one, zero)

    def test_commuting_generators(self):
        p = FoliationPresentation(
            XY, (parse_vector_field("d/dx", XY), parse_vector_field("d/dy", XY))
        )
        c = solve_structure_functions(p)
        assert all(q.is_zero() for row in c for vec in row for q in vec)

    def test_gl2_table(self):
        gl2 = fresh_gl2()
        c = solve_structure_functions(gl2)
        assert gl2.structure_bound_used == 0

        def vec(*entries):
            return tuple(Polynomial.const(e, gl2.vars) for e in entries)

        # [E11,E12]=E12, [E11,E21]=-E21, [E11,E22]=0,
        # [E12,E21]=E11-E22, [E12,E22]=E12, [E21,E22]=-E21   (hand computation)
        assert c[0][1] == vec(0, 1, 0, 0)
        assert c[0][2] == vec(0, 0, -1, 0)
        assert c[0][3] == vec(0, 0, 0, 0)
        assert c[1][2] == vec(1, 0, 0, -1)
        assert c[1][3] == vec(0, 1, 0, 0)
        assert c[2][3] == vec(0, 0, -1, 0)

    def test_order2_needs_degree_one(self):
        o2 = fresh_order2()
        assert solve_structure_functions(o2, 0) is None
        o2 = fresh_order2()
        c = solve_structure_functions(o2, 2)
        assert c is not None and o2.structure_bound_used == 1
        assert structure_defect(o2) is None

    def test_invalid_structure_rejected(self):
        gens = tuple(
            parse_vector_field(t, XYZ)
            for t in ("z*d/dy - y*d/dz", "x*d/dz - z*d/dx", "y*d/dx - x*d/dy")
        )
        one = Polynomial.one(XYZ)
        zero = Polynomial.zero(XYZ)
        bad = [[(zero,) * 3 for _ in range(3)] for _ in range(3)]
        bad[0][1] = (one, zero, zero)  # wrong: [g1,g2] = g3, not g1
        bad[1][0] = (-one, zero, zero)
        with pytest.raises(ValueError):
            FoliationPresentation(XYZ, gens, tuple(tuple(r) for r in bad))


class TestJacobiFlag:
    def test_so3_true(self):
        p = load_preset("so3_r3").presentation
        assert jacobi_flag(p) is True

    def test_gl2_true(self):
        gl2 = fresh_gl2()
        solve_structure_functions(gl2)
        assert jacobi_flag(gl2) is True

    def test_order2_false(self):
        # frozen: the canonical degree-1 structure choice fails Jacobi
        o2 = fresh_order2()
        solve_structure_functions(o2)
        assert jacobi_flag(o2) is False

    def test_requires_structure(self):
        with pytest.raises(MissingStructureFunctions):
            jacobi_flag(fresh_so3())


class TestIsotropy:
    def test_missing_structure_raises(self):
        with pytest.raises(MissingStructureFunctions):
            isotropy_algebra(fresh_so3(), (0, 0, 0))

    def test_so3_origin_table(self):
        so3 = fresh_so3()
        solve_structure_functions(so3)
        iso = isotropy_algebra(so3, (0, 0, 0))
        assert iso.dim == 3 and iso.sker.dim == 0
        eps = {
            (0, 1): (0, 0, 1),
            (1, 2): (1, 0, 0),
            (2, 0): (0, 1, 0),
        }
        for (a, b), expected in eps.items():
            assert iso.bracket_table[a][b] == tuple(Fraction(x) for x in expected)
            assert iso.bracket_table[b][a] == tuple(-Fraction(x) for x in expected)

    def test_so3_regular_point_trivial(self):
        so3 = fresh_so3()
        solve_structure_functions(so3)
        iso = isotropy_algebra(so3, (1, 0, 0))
        assert iso.dim == 0 and iso.ambient.dim == 1 and iso.sker.dim == 1

    def test_gl2_origin_is_the_matrix_algebra(self):
        gl2 = fresh_gl2()
        solve_structure_functions(gl2)
        iso = isotropy_algebra(gl2, (0, 0))
        assert iso.dim == 4
        # bracket of classes must be the matrix commutator (hand oracle)
        def as_matrix(v):
            return [[v[0], v[1]], [v[2], v[3]]]

        def commutator(u, v):
            a, b = as_matrix(u), as_matrix(v)
            prod1 = [
                [sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2)] for i in range(2)
            ]
            prod2 = [
                [sum(b[i][k] * a[k][j] for k in range(2)) for j in range(2)] for i in range(2)
            ]
            return tuple(
                Fraction(prod1[i][j] - prod2[i][j]) for i in range(2) for j in range(2)
            )

        import random

        rng = random.Random(31)
        for _ in range(10):
            u = tuple(Fraction(rng.randint(-3, 3)) for _ in range(4))
            v = tuple(Fraction(rng.randint(-3, 3)) for _ in range(4))
            assert iso.bracket_coords(iso.class_coordinates(u), iso.class_coordinates(v)) == commutator(u, v)

    def test_bracket_well_defined_modulo_strong_kernel(self):
        # augmented rotation preset: the redundant zero generator creates a
        # nonzero strong kernel at the origin, so representative changes matter
        so3 = fresh_so3()
        x, y, z = (Polynomial.var(v, XYZ) for v in XYZ)
        extra = x * so3.generators[0] + y * so3.generators[1] + z * so3.generators[2]
        aug = FoliationPresentation(XYZ, so3.generators + (extra,), name="so3_aug")
        solve_structure_functions(aug)
        iso = isotropy_algebra(aug, (0, 0, 0))
        assert iso.sker.dim == 1 and iso.dim == 3
        sker_vec = iso.sker.basis[0]
        for a in range(iso.dim):
            for b in range(iso.dim):
                rep = iso.quotient_basis[a]
                shifted = tuple(r + s for r, s in zip(rep, sker_vec))
                from folcone.foliation import _constant_lift_bracket_value

                w1 = _constant_lift_bracket_value(aug, rep, iso.quotient_basis[b], iso.point)
                w2 = _constant_lift_bracket_value(aug, shifted, iso.quotient_basis[b], iso.point)
                delta = tuple(q2 - q1 for q1, q2 in zip(w1, w2))
                assert iso.sker.contains_vector(delta)

    def test_class_coordinates_reject_outside_kernel(self):
        so3 = fresh_so3()
        solve_structure_functions(so3)
        iso = isotropy_algebra(so3, (1, 0, 0))
        with pytest.raises(ValueError):
            iso.class_coordinates((0, 1, 0))


def test_monomials_up_to_counts():
    assert len(monomials_up_to(2, 2)) == 6
    assert len(monomials_up_to(3, 1)) == 4
    assert monomials_up_to(2, 1)[0] == (0, 0)


def test_membership_identity_for_stored_structure():
    p = load_preset("so3_r3").presentation
    c = p.structure_functions
    for i in range(3):
        for j in range(3):
            combo_components = []
            for comp_idx in range(3):
                acc = Polynomial.zero(p.vars)
                for k in range(3):
                    acc = acc + c[i][j][k] * p.generators[k].components[comp_idx]
                combo_components.append(acc)
            bracket = p.bracket(i, j)
            for lhs, rhs in zip(combo_components, bracket.components):
                assert lhs == rhs
