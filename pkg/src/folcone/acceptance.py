"""The acceptance suite: eleven exactly-specified checks over the builtin presets.

Each criterion function returns a CriterionResult and is cached, so the CLI
``selftest`` command and the pytest acceptance module share one computation.
Tolerances are pinned here; everything rational is compared exactly.
"""

from __future__ import annotations

import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import algebra
from .expr import Polynomial
from .foliation import (
    FoliationPresentation,
    isotropy_algebra,
    monomials_up_to,
    regular_data,
    solve_structure_functions,
)
from .grassmann import Curve, Subspace, annihilator, make_subspace
from .hncone import hn_fiber, limit_subalgebra_check, nash_fiber, sandwich_check
from .poisson import cotangent_lift_check, hamiltonian_field, hamiltonian_identity_defect, hn_invariance_test
from .presets import load_preset
from .symbols import (
    UEAElement,
    classical_principal_symbol,
    ellipticity_check,
    realize,
    symbol_on_fiber,
    symbol_top,
)


@dataclass(frozen=True)
class CriterionResult:
    criterion: int
    title: str
    passed: bool
    detail: str


def _result(num: int, title: str, failures: list[str], detail: str = "") -> CriterionResult:
    if failures:
        return CriterionResult(num, title, False, "; ".join(failures[:5]))
    return CriterionResult(num, title, True, detail)


def _preset(name: str):
    return load_preset(name)


def _sample_regular_points(p: FoliationPresentation, count: int, seed: int):
    _, is_regular = regular_data(p)
    rng = random.Random(seed)
    points = []
    guard = 0
    while len(points) < count and guard < 1000 * count:
        guard += 1
        m = tuple(Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(p.dim))
        if is_regular(m):
            points.append(m)
    if len(points) < count:
        raise RuntimeError("could not sample enough regular points")
    return points


# ---------------------------------------------------------------------------
# Criterion 1: regular cone fibers of the rotation preset
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def criterion_1() -> CriterionResult:
    title = "so3 regular fiber equals the orthogonal plane of the base point"
    so3 = _preset("so3_r3").presentation
    failures = []
    for v in ((1, 0, 0), (0, 2, 0), (1, 1, 1)):
        sample = hn_fiber(so3, v, seed=0)
        expected = annihilator(make_subspace([tuple(Fraction(x) for x in v)]))
        if len(sample.spaces) != 1:
            failures.append(f"point {v}: {len(sample.spaces)} covector spaces, expected 1")
            continue
        if sample.spaces[0].plucker != expected.plucker:
            failures.append(f"point {v}: Pluecker mismatch {sample.spaces[0].plucker} vs {expected.plucker}")
    return _result(1, title, failures, "3 regular points, singleton fibers, exact Pluecker equality")


# ---------------------------------------------------------------------------
# Criterion 2: the singular fiber at the origin covers the dual space
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def criterion_2() -> CriterionResult:
    title = "so3 fiber at the origin covers every covector via an orthogonal ray"
    so3 = _preset("so3_r3").presentation
    rng = random.Random(2)
    failures = []
    covered = 0
    for trial in range(10):
        xi = tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 3)) for _ in range(3))
        if all(x == 0 for x in xi):
            xi = (Fraction(1), Fraction(0), Fraction(0))
        d = algebra.kernel_basis([list(xi)], ncols=3)[0]
        sample = hn_fiber(so3, (0, 0, 0), [Curve.ray((0, 0, 0), d)])
        if len(sample.spaces) != 1:
            failures.append(f"trial {trial}: ray rejected")
            continue
        if not sample.spaces[0].contains_vector(xi):
            failures.append(f"trial {trial}: xi={xi} not in the fiber element")
        else:
            covered += 1
    if covered != 10 and not failures:
        failures.append(f"coverage {covered}/10")
    return _result(2, title, failures, "10 seeded covectors, all covered exactly")


# ---------------------------------------------------------------------------
# Criterion 3: linear-action presets give rank-<=-1 covector matrices
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def criterion_3() -> CriterionResult:
    title = "vanishing_origin_d fibers at 0 are made of rank-<=-1 matrices (d=2,3)"
    failures = []
    rng = random.Random(3)
    for d in (2, 3):
        p = _preset(f"vanishing_origin_{d}").presentation
        origin = tuple(Fraction(0) for _ in range(d))
        sample = hn_fiber(p, origin, seed=0)
        if not sample.spaces:
            failures.append(f"d={d}: empty fiber sample")
            continue
        for s_idx, space in enumerate(sample.spaces):
            vectors = [row for row in space.basis]
            for _ in range(50):
                combo = [Fraction(rng.randint(-5, 5), rng.randint(1, 2)) for _ in range(space.dim)]
                vec = [
                    sum((combo[a] * space.basis[a][q] for a in range(space.dim)), Fraction(0))
                    for q in range(space.ambient_dim)
                ]
                vectors.append(tuple(vec))
            for vec in vectors:
                matrix = [[vec[i * d + j] for j in range(d)] for i in range(d)]
                if algebra.rank(matrix) > 1:
                    failures.append(f"d={d}, space {s_idx}: rank > 1 element {vec}")
                    break
    return _result(3, title, failures, "basis covectors and 50 seeded elements per space, exact rank")


# ---------------------------------------------------------------------------
# Criterion 4: the order-two preset's fiber planes satisfy the cone equations
# ---------------------------------------------------------------------------


def _order2_curves() -> list[Curve]:
    origin = (0, 0)
    curves = [Curve.ray(origin, (1, c), label=f"ray (1,{c})") for c in (0, 1, 2, 3)]
    curves.append(Curve.arc(origin, (1, 0), (0, 1), label="arc (t,t^2)"))
    curves.append(Curve.arc(origin, (0, 1), (1, 0), label="arc (t^2,t)"))
    return curves


@lru_cache(maxsize=None)
def criterion_4() -> CriterionResult:
    title = "order2 fiber planes satisfy xi1*xi2 = xi3^2 and xi4*xi5 = xi6^2; >= 5 planes"
    p = _preset("order2_r2").presentation
    sample = hn_fiber(p, (0, 0), _order2_curves())
    failures = []
    if len(sample.spaces) < 5:
        failures.append(f"only {len(sample.spaces)} distinct planes")
    for idx, space in enumerate(sample.spaces):
        if space.dim != 2:
            failures.append(f"plane {idx}: dimension {space.dim}")
        for row in space.basis:
            if row[0] * row[1] - row[2] ** 2 != 0 or row[3] * row[4] - row[5] ** 2 != 0:
                failures.append(f"plane {idx}: cone equation fails on {row}")
    return _result(4, title, failures, f"{len(sample.spaces)} distinct planes, cone equations exact")


# ---------------------------------------------------------------------------
# Criterion 5: the degree-2 word with zero realization but nonzero symbol
# ---------------------------------------------------------------------------


def _r4_fiber_points():
    origin = (0, 0, 0, 0)
    curves_origin = [
        Curve.ray(origin, (1, 0, 0, 0)),
        Curve.ray(origin, (0, 1, 0, 0)),
        Curve.ray(origin, (0, 0, 1, 0)),
        Curve.ray(origin, (0, 0, 0, 1)),
        Curve.ray(origin, (1, 1, 1, 1)),
        Curve.arc(origin, (1, 0, 0, 0), (0, 1, 0, 0)),
        Curve.arc(origin, (0, 0, 1, 0), (0, 0, 0, 1)),
    ]
    regulars = [(1, 1, 1, 1), (1, 2, 1, 3)]
    return origin, curves_origin, regulars


@lru_cache(maxsize=None)
def criterion_5() -> CriterionResult:
    title = "r4 word realizes to zero, has nonzero symbol, and vanishes on all cone fibers"
    preset = _preset("r4_counterexample")
    p = preset.presentation
    element = UEAElement.from_words(preset.operators["p"], p.vars)
    op = realize(element, p)
    failures = []
    for mono in monomials_up_to(4, 4):
        f = Polynomial.monomial(mono, 1, p.vars)
        if not op.apply(f).is_zero():
            failures.append(f"realization does not annihilate x^{mono}")
            break
    sigma = symbol_top(element, 2, fiber_dim=p.num_generators)
    if sigma.is_zero():
        failures.append("top symbol unexpectedly zero")
    origin, curves_origin, regulars = _r4_fiber_points()
    samples = [hn_fiber(p, origin, curves_origin)]
    samples += [hn_fiber(p, m, [Curve.constant(m)]) for m in regulars]
    for sample in samples:
        if not sample.spaces:
            failures.append(f"empty fiber sample at {sample.point}")
        for space in sample.spaces:
            if not symbol_on_fiber(sigma, sample.point, space).is_zero():
                failures.append(f"nonzero restriction at {sample.point}")
                break
    return _result(5, title, failures, "70 monomials annihilated; restrictions vanish on every sampled space")


# ---------------------------------------------------------------------------
# Criterion 6: classical symbol vs top symbol through the transposed anchor
# ---------------------------------------------------------------------------


def _random_element(p: FoliationPresentation, rng: random.Random) -> UEAElement:
    from .expr import OperatorWord

    words = []
    for _ in range(rng.randint(1, 3)):
        length = rng.randint(0, 3)
        letters = tuple(rng.randrange(p.num_generators) for _ in range(length))
        terms = {}
        for _ in range(rng.randint(1, 2)):
            exp = tuple(rng.randint(0, 1) for _ in range(p.dim))
            terms[exp] = Fraction(rng.randint(-3, 3))
        coeff = Polynomial(p.vars, terms)
        if coeff.is_zero():
            coeff = Polynomial.one(p.vars)
        words.append(OperatorWord(coeff, letters))
    element = UEAElement.from_words(words, p.vars)
    if element.is_zero() or element.degree == 0:
        letters = (0,) if p.num_generators else ()
        element = UEAElement.from_words([OperatorWord(Polynomial.one(p.vars), (0,))], p.vars)
    return element


@lru_cache(maxsize=None)
def criterion_6() -> CriterionResult:
    title = "pullback consistency: classical vs top symbol at 20 regular samples per preset"
    names = (
        "debord_line",
        "so3_r3",
        "vanishing_origin_2",
        "vanishing_origin_3",
        "order2_r2",
        "r4_counterexample",
    )
    failures = []
    for name in names:
        p = _preset(name).presentation
        rng = random.Random(6)
        elements = [_random_element(p, rng) for _ in range(5)]
        points = _sample_regular_points(p, 20, seed=60)
        eta_rng = random.Random(61)
        pairs = [
            (m, tuple(Fraction(eta_rng.randint(-9, 9), eta_rng.randint(1, 3)) for _ in range(p.dim)))
            for m in points
        ]
        for e_idx, element in enumerate(elements):
            k = element.degree
            classical = classical_principal_symbol(realize(element, p), k)
            top = symbol_top(element, k, fiber_dim=p.num_generators)
            for m, eta in pairs:
                pulled = algebra.mat_vec(algebra.transpose(p.anchor_at(m)), eta)
                if classical.eval(m, eta) != top.eval(m, pulled):
                    failures.append(f"{name}: element {e_idx} fails at m={m}")
                    break
            else:
                continue
            break
    return _result(6, title, failures, "6 presets x 5 elements x 20 samples, exact equality")


# ---------------------------------------------------------------------------
# Criterion 7: sandwich inclusions and limit subalgebras at singular points
# ---------------------------------------------------------------------------


_SINGULAR_SUITES: tuple[tuple[str, tuple, object], ...] = (
    ("so3_r3", (0, 0, 0), None),
    ("vanishing_origin_2", (0, 0), None),
    ("vanishing_origin_3", (0, 0, 0), None),
    ("order2_r2", (0, 0), None),
    ("r4_counterexample", (0, 0, 0, 0), "small"),
)


def _singular_sample(name: str, point, family):
    p = _preset(name).presentation
    if family == "small":
        origin, curves, _ = _r4_fiber_points()
        return p, nash_fiber(p, point, curves)
    return p, nash_fiber(p, point, seed=0)


@lru_cache(maxsize=None)
def criterion_7() -> CriterionResult:
    title = "sandwich inclusions and bracket-closed limit images of expected codimension"
    failures = []
    for name, point, family in _SINGULAR_SUITES:
        p, sample = _singular_sample(name, point, family)
        if not sample.limits:
            failures.append(f"{name}: empty sample")
            continue
        sw = sandwich_check(p, sample)
        if not sw.ok:
            failures.append(f"{name}: {sw.violations[0]}")
        if not p.has_structure():
            solve_structure_functions(p)
        iso = isotropy_algebra(p, point)
        sub = limit_subalgebra_check(p, sample, iso)
        if not sub.ok:
            failures.append(f"{name}: {sub.violations[0]}")
    return _result(7, title, failures, "5 presets at their singular point, all inclusions exact")


# ---------------------------------------------------------------------------
# Criterion 8: Poisson invariance of the cone under Hamiltonian flows
# ---------------------------------------------------------------------------


_POISSON_SCENARIOS = {
    "so3_r3": (
        ((1, 0, 0), 1, (1, 1, 1)),
        ((0, 0, 1), 0, (1, -1, 2)),
        ((1, 1, 0), 2, (2, 1, 1)),
    ),
    "vanishing_origin_2": (
        ((1, 0), 1, (1, 1)),
        ((1, 2), 0, (1, -1)),
        ((0, 1), 2, (2, 1)),
    ),
}


@lru_cache(maxsize=None)
def criterion_8() -> CriterionResult:
    title = "cone membership drift and cotangent-lift deviation <= 1e-6 over RK4 flows"
    failures = []
    for name, scenarios in _POISSON_SCENARIOS.items():
        p = _preset(name).presentation
        if not p.has_structure():
            solve_structure_functions(p)
        for idx, (m, gen, eta) in enumerate(scenarios):
            h = hamiltonian_field(p, gen)
            defects = hamiltonian_identity_defect(p, h)
            if defects:
                failures.append(f"{name} scenario {idx}: identities {defects}")
                continue
            inv = hn_invariance_test(p, m, gen, 1.0, 1000, eta=eta, tol=1e-6)
            if not inv.passed:
                failures.append(f"{name} scenario {idx}: drift {inv.max_drift:.3e}")
            lift = cotangent_lift_check(p, m, eta, gen, 1.0, 1000, tol=1e-6)
            if not lift.passed:
                failures.append(f"{name} scenario {idx}: lift deviation {lift.max_deviation:.3e}")
    return _result(8, title, failures, "2 presets x 3 scenarios, T=1, 1000 steps")


# ---------------------------------------------------------------------------
# Criterion 9: ellipticity verdicts
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def criterion_9() -> CriterionResult:
    title = "sum-of-squares elliptic with exact minimum 1; single-square not; line elliptic"
    failures = []
    so3p = _preset("so3_r3")
    so3 = so3p.presentation
    sos = UEAElement.from_words(so3p.operators["sos"], so3.vars)
    rep = ellipticity_check(sos, so3, [(0, 0, 0), (1, 0, 0), (1, 1, 1)], tolerance=1e-9, seed=0)
    if not rep.elliptic:
        failures.append("sum of squares not judged elliptic")
    for pv in rep.points:
        for fv in pv.fibers:
            if fv.exact_min != Fraction(1):
                failures.append(f"fiber minimum {fv.exact_min} != 1 at {pv.point}")
                break
    g1sq = UEAElement.from_words(so3p.operators["g1sq"], so3.vars)
    rep2 = ellipticity_check(g1sq, so3, [(0, 0, 0)], tolerance=1e-9, seed=0)
    if rep2.elliptic:
        failures.append("single square wrongly judged elliptic at the origin")
    witness = rep2.points[0].witness
    if witness is None:
        failures.append("no witness plane reported")
    else:
        sigma = symbol_top(g1sq, 2, fiber_dim=3)
        if not symbol_on_fiber(sigma, (0, 0, 0), witness).is_zero():
            failures.append("witness plane does not annihilate the symbol")
    debp = _preset("debord_line")
    dsq = UEAElement.from_words(debp.operators["g1sq"], debp.presentation.vars)
    rep3 = ellipticity_check(dsq, debp.presentation, [(0,), (2,)], tolerance=1e-9, seed=0)
    if not rep3.elliptic:
        failures.append("line preset square not judged elliptic")
    return _result(9, title, failures, "verdicts and exact minima as expected")


# ---------------------------------------------------------------------------
# Criterion 10: float cross-check of the exact limit pipeline
# ---------------------------------------------------------------------------


def _limit_details():
    """All LimitDetail records produced while reproducing criteria 1-4."""
    out = []
    so3 = _preset("so3_r3").presentation
    for v in ((1, 0, 0), (0, 2, 0), (1, 1, 1)):
        out.extend(nash_fiber(so3, v, seed=0).details)
    rng = random.Random(2)
    for _ in range(10):
        xi = tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 3)) for _ in range(3))
        if all(x == 0 for x in xi):
            xi = (Fraction(1), Fraction(0), Fraction(0))
        d = algebra.kernel_basis([list(xi)], ncols=3)[0]
        out.extend(nash_fiber(so3, (0, 0, 0), [Curve.ray((0, 0, 0), d)]).details)
    for dd in (2, 3):
        p = _preset(f"vanishing_origin_{dd}").presentation
        out.extend(nash_fiber(p, tuple(Fraction(0) for _ in range(dd)), seed=0).details)
    o2 = _preset("order2_r2").presentation
    out.extend(nash_fiber(o2, (0, 0), _order2_curves()).details)
    return out


def _angle(u: np.ndarray, v: np.ndarray) -> float:
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return float("inf")
    c = abs(float(u @ v)) / (nu * nv)
    return float(np.arccos(min(1.0, c)))


@lru_cache(maxsize=None)
def criterion_10() -> CriterionResult:
    title = "exact-vs-float agreement of the Pluecker pipeline at t=1e-4"
    t_float = 1e-4
    t_exact = Fraction(1, 10**4)
    failures = []
    max_pipeline = 0.0
    max_convergence = 0.0
    for detail in _limit_details():
        float_vec = np.array([p.eval_float([t_float]) for p in detail.plucker_polys])
        exact_vec = np.array([float(p.eval([t_exact])) for p in detail.plucker_polys])
        a = _angle(float_vec, exact_vec)
        max_pipeline = max(max_pipeline, a)
        if not (a < 1e-6):
            failures.append(f"pipeline angle {a:.3e} for {detail.side} side")
        limit_vec = np.array([float(x) for x in detail.side_limit_plucker])
        b = _angle(float_vec, limit_vec)
        max_convergence = max(max_convergence, b)
        if not (b < 1e-2):
            failures.append(f"convergence angle {b:.3e} for {detail.side} side")
    return _result(
        10,
        title,
        failures,
        f"max float-vs-exact angle {max_pipeline:.2e}; max distance-to-limit angle {max_convergence:.2e}",
    )


# ---------------------------------------------------------------------------
# Criterion 11: independence of the presentation under a redundant generator
# ---------------------------------------------------------------------------


def _augmented_so3() -> FoliationPresentation:
    """so3 plus the redundant combination x*g1 + y*g2 + z*g3 (the radial
    syzygy, which is the zero field) as a fourth generator."""
    so3 = _preset("so3_r3").presentation
    x, y, z = (Polynomial.var(v, so3.vars) for v in so3.vars)
    extra = (
        x * so3.generators[0]
        + y * so3.generators[1]
        + z * so3.generators[2]
    )
    return FoliationPresentation(so3.vars, so3.generators + (extra,), name="so3_aug")


@lru_cache(maxsize=None)
def criterion_11() -> CriterionResult:
    title = "fiber images in the isotropy quotient ignore a redundant generator"
    so3 = _preset("so3_r3").presentation
    aug = _augmented_so3()
    failures = []
    # combination coefficients of the redundant generator, for the bundle map
    combo = ("x", "y", "z")
    for point in ((0, 0, 0), (1, 0, 0), (1, 1, 1)):
        point = tuple(Fraction(x) for x in point)
        iso = isotropy_algebra(so3, point)
        base_images = {
            iso.project_subspace(v).basis for v in nash_fiber(so3, point, seed=0).limits
        }
        h_at = [Polynomial.var(v, so3.vars).eval(point) for v in combo]
        aug_images = set()
        for v in nash_fiber(aug, point, seed=0).limits:
            mapped = []
            for row in v.basis:
                vec = [row[i] + row[3] * h_at[i] for i in range(3)]
                mapped.append(tuple(vec))
            image = make_subspace(mapped, 3) if any(any(x != 0 for x in r) for r in mapped) else Subspace(3, ())
            aug_images.add(iso.project_subspace(image).basis)
        if base_images != aug_images:
            failures.append(f"point {tuple(map(str, point))}: image sets differ")
    return _result(11, title, failures, "image sets agree exactly at 3 points")


# ---------------------------------------------------------------------------
# Runner
# ---------------------------------------------------------------------------

CRITERIA = (
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
    criterion_11,
)


def run_all(verbose: bool = False) -> list[CriterionResult]:
    results = []
    for fn in CRITERIA:
        res = fn()
        results.append(res)
        if verbose:
            status = "PASS" if res.passed else "FAIL"
            print(f"{status} C{res.criterion:02d}: {res.title} -- {res.detail}", file=sys.stderr)
    return results
