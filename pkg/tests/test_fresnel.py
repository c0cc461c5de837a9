import cmath
import math

import pytest

from k3verify.analysis import QuadratureConfig, chirp_transform, fit_constant, gaussian_fourier_check
from k3verify.analysis.fresnel import truncated_transform
from k3verify.report import Status

ROOT_PI = math.sqrt(math.pi)


def test_fresnel_integral_value():
    F, err = chirp_transform(0.0, 1)
    assert abs(F - ROOT_PI * cmath.exp(1j * math.pi / 4)) < 1e-10
    assert err < 1e-10
    G, _ = chirp_transform(0.0, -1)
    assert abs(G - F.conjugate()) < 1e-10


def test_constants_fitted_and_y_independent():
    fit = fit_constant((0, 1, 2.5, 4), 1)
    assert abs(abs(fit["constant"]) - ROOT_PI) < 1e-3
    assert fit["spread"] < 1e-3
    fit2 = fit_constant((0, -1, 3), -1)
    assert abs(fit2["constant"] - fit["constant"].conjugate()) < 1e-8


def test_phase_law():
    F0, _ = chirp_transform(0.0)
    for y in (1.0, 2.0, -3.0):
        Fy, _ = chirp_transform(y)
        assert abs(Fy / F0 - cmath.exp(-1j * y * y / 4)) < 1e-8


def test_check_report():
    rep = gaussian_fourier_check()
    assert rep.status is Status.PASS
    names = [c["name"] for c in rep.checks]
    assert names == ["C1_modulus", "C1_y_independent", "C1_extrapolation",
                     "C2_modulus", "C2_y_independent", "C2_extrapolation", "phase_ratio_y2_y0"]


def test_truncation_alone_converges_slowly():
    """Without extrapolation the [-R, R] integral only improves like 1/R."""
    exact, _ = chirp_transform(0.0)
    errs = [abs(truncated_transform(0.0, R) - exact) for R in (5.0, 10.0, 20.0)]
    assert errs[0] > errs[1] > errs[2] > 1e-3


def test_coarse_settings_still_accurate():
    q = QuadratureConfig("adaptive-polar", order=16, radius=8.0)
    F, _ = chirp_transform(1.0, 1, q)
    assert abs(abs(F) - ROOT_PI) < 1e-6


def test_invalid_sigma():
    with pytest.raises(ValueError):
        chirp_transform(0.0, 2)
