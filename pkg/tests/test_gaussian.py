from fractions import Fraction as F

import numpy as np
import pytest

from k3verify.analysis import QuadratureConfig
from k3verify.analysis.gaussian import (ROUNDOFF_FLOOR, check_positive_definite, gauss_normalized,
                                        gh_convergence, wick_check, wick_closed_forms, wick_moments)
from k3verify.errors import NotPositiveDefinite
from k3verify.report import Status


def spd(n, seed):
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return Q @ np.diag(rng.uniform(0.5, 2.0, n)) @ Q.T


def sym(n, rng):
    M = rng.standard_normal((n, n))
    return (M + M.T) / 2


def test_normalization_examples():
    assert gauss_normalized([[1]]) == pytest.approx(1, rel=1e-13)
    assert gauss_normalized([[F(4)]]) == pytest.approx(0.5, rel=1e-13)
    assert gauss_normalized(np.eye(3)) == pytest.approx(1, rel=1e-13)
    assert gauss_normalized(np.diag([4.0, 4.0])) == pytest.approx(0.25, rel=1e-13)
    A = spd(3, 0)
    assert gauss_normalized(A) == pytest.approx(np.linalg.det(A) ** -0.5, rel=1e-6)


def test_one_dimensional_wick():
    ql = QuadratureConfig(order=30)
    m1, m2 = wick_moments([[2.0]], [[3.0]], q=ql)
    # (Bu, Au) = 6 u^2, E-weighted with exp(-u^2): 6 * 2^{-1/2} / 2
    assert m1 == pytest.approx(3 * 2 ** -0.5, rel=1e-12)
    assert m2 == pytest.approx((9 + 18) * 2 ** -0.5, rel=1e-12)
    m1, m2 = wick_moments([[2.0]], [[0.0]], q=ql)
    assert m1 == 0 and m2 == 0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_wick_relations_with_compatible_B(n):
    rng = np.random.default_rng(n)
    A = spd(n, n)
    S = np.linalg.inv(A)
    B, C = S @ sym(n, rng), S @ sym(n, rng)
    rep = wick_check(A, B, C, QuadratureConfig(order=40))
    assert rep.status is Status.PASS, rep.checks
    assert rep.max_deviation <= 1e-5


def test_symmetric_B_commuting_with_A():
    A = np.diag([1.0, 2.0])
    B = np.diag([0.5, -1.0])
    rep = wick_check(A, B, None, QuadratureConfig(order=20))
    assert rep.status is Status.PASS


def test_generic_symmetric_B_breaks_second_relation():
    """For generic symmetric B, C the trace form is not the Gaussian moment."""
    rng = np.random.default_rng(7)
    A = spd(3, 7)
    B, C = sym(3, rng), sym(3, rng)
    rep = wick_check(A, B, C, QuadratureConfig(order=30))
    status = {c["name"]: c["status"] for c in rep.checks}
    assert status["second_relation"] == "fail"
    assert status["isserlis_second"] == "pass"
    assert status["gauss"] == "pass"
    cf = wick_closed_forms(A, B, C)
    assert not cf["AB_symmetric"]
    assert cf["second"] != pytest.approx(cf["isserlis_second"], rel=1e-3)


def test_gauss_hermite_convergence():
    n = 2
    rng = np.random.default_rng(1)
    A = np.array([[1.0, 0.6], [0.6, 1.3]])
    B = np.linalg.inv(A) @ sym(n, rng)
    conv = gh_convergence(A, B, None, QuadratureConfig(order=40))
    assert conv["monotone"]
    e = conv["errors"]
    assert all(b <= max(a / 2, ROUNDOFF_FLOOR) for a, b in zip(e, e[1:]))
    assert e[-1] < 1e-10


def test_monte_carlo_scheme_is_seeded():
    A = spd(2, 3)
    B = np.linalg.inv(A)
    q = QuadratureConfig("monte-carlo", 20000, seed=5, tolerance=5e-2)
    r1 = wick_check(A, B, None, q)
    r2 = wick_check(A, B, None, q)
    assert r1.to_json(with_timestamp=False) == r2.to_json(with_timestamp=False)
    assert r1.seed == 5


def test_preconditions():
    with pytest.raises(NotPositiveDefinite):
        check_positive_definite([[F(1), F(2)], [F(2), F(1)]])
    with pytest.raises(NotPositiveDefinite):
        wick_check(np.array([[1.0, 0], [0, -1.0]]), np.eye(2))
    with pytest.raises(NotPositiveDefinite):
        check_positive_definite([[1, 2], [0, 1]])
    A = spd(2, 4)
    with pytest.raises(ValueError):
        wick_check(A, np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        QuadratureConfig("simpson")
    with pytest.raises(ValueError):
        QuadratureConfig(order=0)
