import numpy as np
import pytest

from helpers import (
    GEOMETRY_CHECKS,
    cluster_violations,
    geometry_suite,
    rectangle_law_violations,
    recthull_violations,
)
from mpma.approximation import IntervalModule


@pytest.fixture(scope="module")
def suite():
    return geometry_suite(200, seed=7)


@pytest.mark.parametrize("check", GEOMETRY_CHECKS)
def test_geometry_check_has_no_violations(suite, check):
    bad, instances = suite[check]
    assert instances >= 190, "check was vacuous on too many instances"
    assert bad == 0


def test_rectangle_law_catches_non_convex_support():
    # Two disjoint boxes glued as one "interval" break convexity; the check must notice.
    class TwoBoxes:
        n = 2

        def finite_bounds(self):
            return IntervalModule([(0, 0)], [(3, 3)]).finite_bounds()

        def contains_many(self, X, tol):
            X = np.asarray(X)
            a = np.all((X >= 0) & (X <= 1), axis=1)
            b = np.all((X >= 2) & (X <= 3), axis=1)
            return a | b

    bad, checked = rectangle_law_violations(TwoBoxes(), np.random.default_rng(0))
    assert checked > 0 and bad > 0


def test_cluster_and_recthull_on_rectangle():
    I = IntervalModule([(0.1, 0.2)], [(1.2, 0.9)])
    assert cluster_violations(I, 0.1)[0] == 0
    bad, checked = recthull_violations(I, np.random.default_rng(1), 0.1)
    assert checked > 0 and bad == 0
