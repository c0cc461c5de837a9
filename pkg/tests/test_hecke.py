import math
from fractions import Fraction as F

import numpy as np
import pytest

from k3verify.errors import DegenerateConfig, UnconvergedError
from k3verify.hecke import (HeckeSpec, bump, hecke_apply, hecke_intertwining_probe, hecke_on_kernel,
                            k3_slot_integrand, monte_carlo_plane, patch_radii, polar_disk_integral)
from k3verify.kernel import PointConfig, eval_K3
from k3verify.report import Status

Y = (0, 1, 1j)
SPEC = HeckeSpec(5, (0, 1, 2))


def one(args):
    return np.ones(args.shape[1])


def soft(args):
    return 1.0 / (1.0 + np.abs(args[0]) ** 2)


@pytest.fixture(scope="module")
def h_one():
    return hecke_apply(SPEC, one, Y)


def test_polar_patch_integrates_inverse_distance_exactly():
    c, rho, y = 2.5, 0.7, 0.3 - 0.2j
    val = polar_disk_integral(lambda s: c / np.abs(s - y), y, rho, nr=8, nt=16)
    assert val == pytest.approx(2 * math.pi * rho * c, rel=1e-14)


def test_bump_and_patch_radii():
    assert bump(0.0, 1.0) == 1 and bump(0.5, 1.0) == 1 and bump(1.0, 1.0) == 0
    assert 0 < bump(0.75, 1.0) < 1
    assert patch_radii([0, 0.25, 5], 0.3) == pytest.approx([0.1, 0.1, 0.3])


def test_constant_function_against_monte_carlo(h_one):
    assert h_one.converged
    assert h_one.decay_exponent == pytest.approx(3, abs=0.05)
    pref = SPEC.prefactor
    yv = np.array(Y)[:, None]
    f = lambda s: pref / np.prod(np.abs(np.asarray(s)[None, :] - yv), axis=0)
    mc, se = monte_carlo_plane(f, Y, samples=2 * 10 ** 6, seed=1)
    assert abs(mc - h_one.value) <= 1e-2 * h_one.value
    assert abs(mc - h_one.value) <= 5 * se + h_one.error


def test_truncation_radius_doubling(h_one):
    wide = hecke_apply(SPEC.with_radius(80.0), one, Y)
    assert abs(wide.value - h_one.value) <= h_one.error + wide.error


def test_density_reduces_error_estimate(h_one):
    fine = hecke_apply(SPEC.with_density(2), one, Y)
    assert fine.discretization < h_one.discretization
    assert abs(fine.value - h_one.value) <= h_one.error + fine.error


def test_linearity():
    # soft -> 1 only like 1 - 25/|s|^2, so the tail fit needs a large radius
    spec = SPEC.with_radius(320.0)
    h1, hs = hecke_apply(spec, one, Y), hecke_apply(spec, soft, Y)
    combo = hecke_apply(spec, lambda a: 2 * one(a) + 3 * soft(a), Y)
    assert combo.value == pytest.approx(2 * h1.value + 3 * hs.value, rel=1e-6)
    assert abs(combo.value - 2 * h1.value - 3 * hs.value) <= combo.error + 2 * h1.error + 3 * hs.error


def test_growing_function_is_unconverged():
    grow = lambda a: 1.0 / np.abs(a[0])  # integrand ~ |s|^-2: no convergent tail
    with pytest.raises(UnconvergedError):
        hecke_apply(SPEC, grow, Y)
    res = hecke_apply(SPEC, grow, Y, strict=False)
    assert not res.converged and math.isinf(res.error)


def test_spec_validation():
    with pytest.raises(DegenerateConfig):
        HeckeSpec(5, (0, 1))
    with pytest.raises(DegenerateConfig):
        HeckeSpec(1, (0, 1, 2))
    with pytest.raises(DegenerateConfig):
        HeckeSpec(5, (0, 1, 1))
    with pytest.raises(DegenerateConfig):
        hecke_apply(SPEC, one, (0, 0, 1))
    with pytest.raises(ValueError):
        hecke_apply(SPEC, one, (0, 1))


CFG = PointConfig(tuple(map(F, (0, 1, 2))), tuple(map(F, (0, 1, 3))),
                  tuple(map(F, (0, 2, 5))), tuple(map(F, (0, 1, 4))))


def test_projective_integrand_matches_direct_kernel():
    spec = HeckeSpec(7, CFG.t)
    f, roots, leading = k3_slot_integrand(CFG, "x", spec)
    s = 0.37 + 0.81j
    w = np.array([s - complex(v) for v in CFG.x])
    xs = [(complex(ti) - 7) / wi for ti, wi in zip(CFG.t, w)]
    fcfg = PointConfig(tuple(xs), CFG.y, CFG.z, tuple(complex(v) for v in CFG.t))
    direct = spec.prefactor * float(eval_K3(fcfg)) / np.prod(np.abs(w))
    assert f(np.array([s]))[0] == pytest.approx(direct, rel=1e-10)
    assert len(roots) == 3
    far = f(np.array([1e6 + 1e6j]))[0]
    assert far == pytest.approx(leading, rel=1e-4)


def test_kernel_order_swap_is_identical():
    spec = HeckeSpec(7, CFG.t, patch_radius=0.3)
    a = hecke_on_kernel(CFG, "x", spec, "xyz")
    b = hecke_on_kernel(CFG, "x", spec, "xzy")
    assert a.diagnostics["truncated_value"] == pytest.approx(b.diagnostics["truncated_value"], rel=1e-12)
    with pytest.raises(ValueError):
        k3_slot_integrand(CFG, "x", spec, "xxy")


def test_probe_reports_divergence_as_inconclusive():
    rep = hecke_intertwining_probe(CFG, 7)
    assert rep.status is Status.INCONCLUSIVE
    assert rep.exit_code == 2
    assert "diverges" in rep.message
    assert rep.diagnostics["leading_constant_ratio"] > 0
    assert all(c["status"] == "inconclusive" for c in rep.checks)
    # non-distinct coordinates are refused rather than guessed
    bad = CFG.with_family("y", (F(0), F(0), F(3)))
    with pytest.raises(DegenerateConfig):
        hecke_intertwining_probe(bad, 7)
