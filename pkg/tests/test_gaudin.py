from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from k3verify.algebra import Field, MultiPoly
from k3verify.errors import DegenerateConfig
from k3verify.gaudin import (GaudinSpec, commutativity_check, commutator_check, family_vars,
                             gaudin_apply_poly, intertwining_check, omega_all_copies, omega_direct,
                             random_poly, weight)
from k3verify.kernel import PointConfig, build_A, det_exact, draw_nonsingular, trial_rng
from k3verify.report import Status


def ring(n, copy="y"):
    names = family_vars(copy, n)
    return names, [MultiPoly.var(v, names) for v in names]


def test_weights_differ_by_sign():
    t = (F(0), F(1), F(3))
    assert weight(t, 0, 1, "paper_s3") == -1
    assert weight(t, 0, 1, "paper_s2") == 1
    with pytest.raises(ValueError):
        weight(t, 0, 1, "other")
    with pytest.raises(DegenerateConfig):
        weight((F(0), F(0)), 0, 1)


def test_gaudin_on_constants(three_point_cfg):
    names, _ = ring(3)
    one = MultiPoly.constant(F(1), names)
    spec = GaudinSpec(0, "y", include_constant=False)
    assert gaudin_apply_poly(spec, one, three_point_cfg).is_zero()
    spec = GaudinSpec(0, "y", include_constant=True, convention="paper_s3")
    expected = sum(weight(three_point_cfg.t, 0, s, "paper_s3") for s in (1, 2)) / 2
    assert gaudin_apply_poly(spec, one, three_point_cfg) == expected


def test_gaudin_on_product_two_points(two_point_cfg):
    names, (y0, y1) = ring(2)
    out = gaudin_apply_poly(GaudinSpec(0, "y", convention="paper_s2"), y0 * y1, two_point_cfg)
    assert out == (y0 - y1) * (y0 - y1) * (-2)


def test_gaudin_input_validation(three_point_cfg):
    names, (y0, *_) = ring(3)
    with pytest.raises(IndexError):
        gaudin_apply_poly(GaudinSpec(5), y0, three_point_cfg)
    xs, (x0, *_) = ring(3, "x")
    with pytest.raises(ValueError):
        gaudin_apply_poly(GaudinSpec(0, "y"), x0, three_point_cfg)
    with pytest.raises(ValueError):
        GaudinSpec(0, "w")
    with pytest.raises(ValueError):
        commutator_check(1, 1, y0, three_point_cfg)


def test_twist_minus_one_is_plain_operator(three_point_cfg):
    names, _ = ring(3)
    f = random_poly(trial_rng(0, 0, "t"), names, 3)
    for const in (False, True):
        plain = gaudin_apply_poly(GaudinSpec(1, include_constant=const), f, three_point_cfg)
        tw = gaudin_apply_poly(GaudinSpec(1, include_constant=const, twist=(-1, -1, -1)), f, three_point_cfg)
        assert plain == tw


def test_commutator_vanishes_twisted(three_point_cfg):
    names, _ = ring(3)
    f = random_poly(trial_rng(1, 0, "t"), names, 3)
    lam = (F(1, 2), F(-2), F(3))
    for const in (False, True):
        assert commutator_check(0, 2, f, three_point_cfg, twist=lam, include_constant=const).is_zero()


def test_commutativity_batch():
    for n in (3, 4):
        rep = commutativity_check(n, trials=2, seed=5)
        assert rep.status is Status.PASS
        assert rep.diagnostics["commutators_checked"] == 2 * n * (n - 1)


def test_omega_hand_example(three_point_cfg):
    vals = [omega_all_copies(three_point_cfg, r) for r in range(3)]
    assert vals[0] == {"x": F(5, 16), "y": F(5, 16), "z": F(5, 16)}
    assert vals[1]["y"] == F(-1, 6) and vals[2]["y"] == F(-7, 48)


def test_omega_sum_over_r_vanishes(three_point_cfg):
    # antisymmetric weights against a symmetric pair bracket
    assert sum(omega_direct(three_point_cfg, r) for r in range(3)) == 0


def test_omega_conventions_and_constant(three_point_cfg):
    for r in range(3):
        s3 = omega_direct(three_point_cfg, r, convention="paper_s3")
        s2 = omega_direct(three_point_cfg, r, convention="paper_s2")
        assert s2 == -s3
        with_c = omega_direct(three_point_cfg, r, include_constant=True)
        shift = sum(weight(three_point_cfg.t, r, s) for s in range(3) if s != r) / 2
        assert with_c - s3 == shift


def _numeric_omega(cfg, r, copy, h=1e-3):
    """det^{1/2} G_r det^{-1/2} by central differences in float arithmetic."""
    base = [float(v) for v in cfg.family(copy)]
    fcfg = cfg.convert(Field("f64"))

    def g(vals):
        return abs(det_exact(build_A(fcfg, **{copy: vals}))) ** -0.5

    def shifted(**d):
        v = list(base)
        for k, dv in d.items():
            v[int(k[1:])] += dv
        return g(v)

    g0 = g(base)
    total = 0.0
    for s in range(cfg.n):
        if s == r:
            continue
        kr, ks = f"i{r}", f"i{s}"
        dr = (shifted(**{kr: h}) - shifted(**{kr: -h})) / (2 * h)
        ds = (shifted(**{ks: h}) - shifted(**{ks: -h})) / (2 * h)
        drs = (shifted(**{kr: h, ks: h}) - shifted(**{kr: h, ks: -h})
               - shifted(**{kr: -h, ks: h}) + shifted(**{kr: -h, ks: -h})) / (4 * h * h)
        d = base[r] - base[s]
        w = 1.0 / float(cfg.t[r] - cfg.t[s])
        total += w * (-(d * d) * drs + d * (dr - ds))
    return total / g0


@pytest.mark.parametrize("copy", ["x", "y", "z"])
def test_omega_matches_finite_differences(three_point_cfg, copy):
    for r in range(3):
        exact = float(omega_direct(three_point_cfg, r, copy))
        assert _numeric_omega(three_point_cfg, r, copy) == pytest.approx(exact, rel=1e-5, abs=1e-6)


def test_float_and_bigfloat_agree_with_exact():
    cfg, _ = draw_nonsingular(trial_rng(3, 0, "fx"), 4)
    for r in range(4):
        exact = float(omega_direct(cfg, r))
        assert omega_direct(cfg.convert(Field("f64")), r) == pytest.approx(exact, rel=1e-9)
        big = omega_direct(cfg.convert(Field("bigfloat", 200)), r)
        assert float(big) == pytest.approx(exact, rel=1e-14)


def test_intertwining_reports():
    rep = intertwining_check(3, trials=5, seed=1)
    assert rep.status is Status.PASS and rep.max_deviation == 0
    rep = intertwining_check(4, trials=3, seed=1, mode="f64")
    assert rep.status is Status.PASS and rep.max_deviation < 1e-9
    rep = intertwining_check(3, trials=2, seed=1, mode="bigfloat", precision=256, tolerance=1e-60)
    assert rep.status is Status.PASS
    rep = intertwining_check(cfg=PointConfig((0, 1, 2), (0, 1, 3), (0, 2, 5), (0, 1, 4)),
                             include_constant=True)
    assert rep.status is Status.PASS and rep.trials == 1


small = st.fractions(min_value=-8, max_value=8, max_denominator=5)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(small, small, small, small), min_size=3, max_size=4,
                unique_by=lambda p: p[3]))
def test_intertwining_property(points):
    cfg = PointConfig(*(tuple(p[i] for p in points) for i in range(4)))
    if det_exact(build_A(cfg)) == 0:
        return
    for r in range(cfg.n):
        v = omega_all_copies(cfg, r)
        assert v["x"] == v["y"] == v["z"]


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_commutator_property(seed):
    rng = trial_rng(seed, 0, "hyp")
    n = 3
    t = (F(0), F(rng.randint(1, 5)), F(-rng.randint(1, 5), rng.randint(1, 3)))
    cfg = PointConfig((0,) * n, (0,) * n, (0,) * n, t)
    f = random_poly(rng, family_vars("y", n), 3)
    assert commutator_check(0, 1, f, cfg).is_zero()
    assert commutator_check(1, 2, f, cfg, include_constant=True).is_zero()
