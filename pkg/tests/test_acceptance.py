"""Acceptance suite: one test per criterion, printing a pass/fail line each.

The criterion implementations live in folcone.acceptance (shared with the
``folcone selftest`` command); every tolerance is pinned there.
"""

from folcone import acceptance


def _check(result):
    status = "PASS" if result.passed else "FAIL"
    print(f"{status} C{result.criterion:02d}: {result.title} -- {result.detail}")
    assert result.passed, result.detail


def test_criterion_01_so3_regular_fibers():
    _check(acceptance.criterion_1())


def test_criterion_02_so3_singular_fiber_covers_dual():
    _check(acceptance.criterion_2())


def test_criterion_03_linear_action_rank_one_matrices():
    _check(acceptance.criterion_3())


def test_criterion_04_order_two_cone_equations():
    _check(acceptance.criterion_4())


def test_criterion_05_realization_non_injectivity():
    _check(acceptance.criterion_5())


def test_criterion_06_pullback_consistency():
    _check(acceptance.criterion_6())


def test_criterion_07_sandwich_and_subalgebras():
    _check(acceptance.criterion_7())


def test_criterion_08_poisson_invariance():
    _check(acceptance.criterion_8())


def test_criterion_09_ellipticity_verdicts():
    _check(acceptance.criterion_9())


def test_criterion_10_exact_vs_float_oracle():
    _check(acceptance.criterion_10())


def test_criterion_11_presentation_independence():
    _check(acceptance.criterion_11())
