import math
from fractions import Fraction

import pytest

from folcone.expr import Polynomial
from folcone.foliation import FoliationPresentation, isotropy_algebra, solve_structure_functions
from folcone.grassmann import Curve, annihilator, make_subspace
from folcone.hncone import (
    curve_family,
    hn_fiber,
    hn_membership_distance,
    limit_subalgebra_check,
    nash_fiber,
    sandwich_check,
)
from folcone.presets import load_preset

XYZ = ("x", "y", "z")


def so3():
    return load_preset("so3_r3").presentation


class TestCurveFamily:
    def test_axis_rays_always_included(self):
        family = curve_family((0, 0, 0), direction_count=3, arc_degree=1)
        labels = {c.label for c in family}
        for d in ("(1,0,0)", "(0,1,0)", "(0,0,1)"):
            assert f"ray d={d}" in labels

    def test_constant_curve_included(self):
        family = curve_family((1, 0, 0))
        assert any(c.is_constant() for c in family)

    def test_degree_two_arcs_present(self):
        family = curve_family((0, 0), arc_degree=2)
        labels = {c.label for c in family}
        assert "arc d=(1,0) e=(0,1) pow=2" in labels
        assert "arc d=(0,1) e=(1,0) pow=2" in labels

    def test_deterministic_from_seed(self):
        f1 = curve_family((0, 0, 0), direction_count=15, seed=5)
        f2 = curve_family((0, 0, 0), direction_count=15, seed=5)
        assert [c.label for c in f1] == [c.label for c in f2]

    def test_default_family_size(self):
        # n axis + 2n diagonal rays + n(n-1) arcs + constant
        family = curve_family((0, 0, 0))
        rays = [c for c in family if c.label.startswith("ray")]
        arcs = [c for c in family if c.label.startswith("arc")]
        assert len(rays) == 9 and len(arcs) == 6


class TestNashFiber:
    def test_regular_point_collapses(self):
        sample = nash_fiber(so3(), (1, 0, 0))
        assert len(sample.limits) == 1
        assert sample.limits[0].basis == ((Fraction(1), 0, 0),)
        assert all(r.accepted for r in sample.curves_used)

    def test_origin_axis_rays(self):
        curves = [Curve.ray((0, 0, 0), d) for d in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
        sample = nash_fiber(so3(), (0, 0, 0), curves)
        expected = {make_subspace([d], 3) for d in ((1, 0, 0), (0, 1, 0), (0, 0, 1))}
        assert set(sample.limits) == expected

    def test_rejected_curves_logged(self):
        curves = [Curve.constant((0, 0, 0)), Curve.ray((0, 0, 0), (1, 0, 0))]
        sample = nash_fiber(so3(), (0, 0, 0), curves)
        flags = {r.label: r.accepted for r in sample.curves_used}
        assert flags["constant"] is False and len(sample.limits) == 1
        reason = next(r.reason for r in sample.curves_used if not r.accepted)
        assert "CurveNotGeneric" in reason

    def test_off_center_curve_rejected(self):
        sample = nash_fiber(so3(), (0, 0, 0), [Curve.ray((1, 0, 0), (1, 0, 0))])
        assert not sample.limits
        assert "not centered" in sample.curves_used[0].reason

    def test_determinism(self):
        a = nash_fiber(so3(), (0, 0, 0), seed=3)
        b = nash_fiber(so3(), (0, 0, 0), seed=3)
        assert a.limits == b.limits
        assert [r.label for r in a.curves_used] == [r.label for r in b.curves_used]

    def test_order2_distinct_limit_count(self):
        o2 = load_preset("order2_r2").presentation
        curves = [Curve.ray((0, 0), (1, c)) for c in (0, 1, 2)] + [Curve.arc((0, 0), (0, 1), (1, 0))]
        sample = nash_fiber(o2, (0, 0), curves)
        assert len(sample.limits) == 4
        assert all(v.dim == 4 for v in sample.limits)

    def test_non_empty_across_presets(self):
        suites = [
            ("so3_r3", (0, 0, 0)),
            ("vanishing_origin_2", (0, 0)),
            ("order2_r2", (0, 0)),
            ("debord_line", (0,)),
        ]
        for name, point in suites:
            p = load_preset(name).presentation
            sample = nash_fiber(p, point)
            assert sample.limits, name


class TestHNFiber:
    def test_regular_points_give_orthogonal_planes(self):
        for v in ((1, 0, 0), (0, 2, 0), (1, 1, 1)):
            sample = hn_fiber(so3(), v)
            assert len(sample.spaces) == 1
            assert sample.spaces[0] == annihilator(make_subspace([v], 3))

    def test_dimension_law(self):
        samples = [
            hn_fiber(so3(), (0, 0, 0)),
            hn_fiber(load_preset("vanishing_origin_2").presentation, (0, 0)),
            hn_fiber(load_preset("order2_r2").presentation, (0, 0)),
        ]
        for sample in samples:
            p_rank = {3: 2, 4: 2, 6: 2}[sample.spaces[0].ambient_dim]
            for space in sample.spaces:
                assert space.dim == p_rank

    def test_gl2_rank_one_matrices(self):
        gl2 = load_preset("vanishing_origin_2").presentation
        sample = hn_fiber(gl2, (0, 0))
        from folcone import algebra

        for space in sample.spaces:
            for row in space.basis:
                matrix = [[row[0], row[1]], [row[2], row[3]]]
                assert algebra.rank(matrix) <= 1

    def test_debord_full_dual(self):
        deb = load_preset("debord_line").presentation
        sample = hn_fiber(deb, (2,))
        assert len(sample.spaces) == 1 and sample.spaces[0].dim == 1


class TestChecks:
    def test_sandwich_so3_origin(self):
        p = so3()
        sample = nash_fiber(p, (0, 0, 0))
        report = sandwich_check(p, sample)
        assert report.ok and report.sker_dim == 0 and report.ker_dim == 3

    def test_sandwich_regular_point(self):
        p = so3()
        sample = nash_fiber(p, (1, 0, 0))
        report = sandwich_check(p, sample)
        assert report.ok and report.sker_dim == report.ker_dim == 1

    def test_subalgebra_so3_origin(self):
        p = so3()
        sample = nash_fiber(p, (0, 0, 0))
        iso = isotropy_algebra(p, (0, 0, 0))
        report = limit_subalgebra_check(p, sample, iso)
        assert report.ok and report.expected_codim == 2
        assert all(v.dim == 1 for v in report.images)

    def test_subalgebra_gl2_origin(self):
        p = load_preset("vanishing_origin_2").presentation
        if not p.has_structure():
            solve_structure_functions(p)
        sample = nash_fiber(p, (0, 0))
        iso = isotropy_algebra(p, (0, 0))
        report = limit_subalgebra_check(p, sample, iso)
        assert report.ok and report.expected_codim == 2
        assert all(v.dim == 2 for v in report.images)

    def test_point_mismatch_rejected(self):
        p = so3()
        sample = nash_fiber(p, (0, 0, 0))
        iso = isotropy_algebra(p, (1, 0, 0))
        with pytest.raises(ValueError):
            limit_subalgebra_check(p, sample, iso)


class TestMembershipDistance:
    def test_member_is_zero(self):
        sample = hn_fiber(so3(), (1, 0, 0))
        xi = sample.spaces[0].basis[0]
        assert hn_membership_distance(sample, [float(x) for x in xi]) < 1e-14

    def test_axis_sample_diagonal_covector(self):
        curves = [Curve.ray((0, 0, 0), d) for d in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
        sample = hn_fiber(so3(), (0, 0, 0), curves)
        xi = [1 / math.sqrt(3)] * 3
        assert abs(hn_membership_distance(sample, xi) - 1 / math.sqrt(3)) < 1e-12

    def test_zero_covector(self):
        sample = hn_fiber(so3(), (0, 0, 0))
        assert hn_membership_distance(sample, [0.0, 0.0, 0.0]) == 0.0


class TestPresentationIndependence:
    def test_nonzero_redundant_generator(self):
        base = so3()
        x, y = Polynomial.var("x", XYZ), Polynomial.var("y", XYZ)
        extra = x * base.generators[0] + y * base.generators[1]
        aug = FoliationPresentation(XYZ, base.generators + (extra,), name="so3_aug_nonzero")
        for point in ((0, 0, 0), (1, 1, 1)):
            point = tuple(Fraction(q) for q in point)
            iso = isotropy_algebra(base, point)
            base_images = {
                iso.project_subspace(v).basis for v in nash_fiber(base, point).limits
            }
            h_at = (x.eval(point), y.eval(point), Fraction(0))
            aug_images = set()
            for v in nash_fiber(aug, point).limits:
                mapped = [
                    tuple(row[i] + row[3] * h_at[i] for i in range(3)) for row in v.basis
                ]
                image = make_subspace(mapped, 3)
                aug_images.add(iso.project_subspace(image).basis)
            assert base_images == aug_images
