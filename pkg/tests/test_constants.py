"""Limit constants against closed forms and pre-registered quadrature values.

Golden values were frozen from an independent high-precision route (mpmath
nested quadrature plus a Gauss-Legendre rule in the cube-root variable)
before this module existed; see the acceptance suite for the re-derivation.
"""
import math

import numpy as np
import pytest

from randschrod import (MediumSpec, RegimeLabel, big_d, big_d_quadrature,
                        big_d_txi, classify_regime, exponents, k1,
                        k1_quadrature, k2, predict_moment)
from randschrod.media import CutoffSpec, Regime

A = MediumSpec(d=1, gamma=0.75, beta=0.5, mu=1.0)
B = MediumSpec(d=1, gamma=0.5, beta=0.75, mu=1.0)

D_A = 8.0 / (3.0 * math.sqrt(math.pi))          # 1.5045055561273497
D_B = 1.2930873815347401
GOLDEN_D_TXI_B_11 = 1.1970197824005             # pre-registered, rel ~1e-12
GOLDEN_D_TXI_B = {(1.0, 5.0): 0.54597349491910,
                  (1.0, 20.0): 0.14856601083754,
                  (1.0, 60.0): 0.04991248804788,
                  (0.5, 1.0): 1.23037022001734,
                  (2.0, 1.0): 1.14863913062017}


def test_k1_closed_forms():
    assert k1(A) == pytest.approx(2.0 * math.sqrt(math.pi), rel=1e-14)
    assert k1(B) == pytest.approx(4.0 / 3.0 * math.gamma(2.0 / 3.0), rel=1e-14)


def test_k1_closed_vs_quadrature_sweep():
    rng = np.random.default_rng(5)
    specs = [A, B]
    while len(specs) < 20:
        g, b = rng.uniform(0.05, 0.95, 2)
        if g + b > 1.05:
            specs.append(MediumSpec(d=int(rng.integers(1, 4)), gamma=g, beta=b,
                                    mu=float(rng.uniform(0.2, 5.0))))
    for spec in specs:
        closed, quad = k1(spec), k1_quadrature(spec)
        assert abs(closed - quad) <= 1e-10 * abs(closed)


def test_k1_mu_scaling():
    # mu -> 4 mu halves K1 for (gamma, beta) = (3/4, 1/2)
    quad = MediumSpec(d=1, gamma=0.75, beta=0.5, mu=4.0)
    assert k1(quad) == pytest.approx(0.5 * k1(A), rel=1e-14)


def test_k2_at_zero_frequency_is_k1_over_2pi_d():
    for spec in (A, B):
        for lam in (0.1, 0.37, 2.0):
            assert k2(spec, lam, 0.0) == pytest.approx(
                k1(spec) / (2 * math.pi) ** spec.d, rel=1e-9)


def test_k2_medium_a_closed_form():
    # beta = 1/2 kills the lambda dependence; xi = 1 has the closed form
    # Re Gamma(1/2) (1 - i)^(-1/2) / pi = 2^(-1/4) cos(pi/8) / sqrt(pi)
    expect = 2.0**-0.25 * math.cos(math.pi / 8.0) / math.sqrt(math.pi)
    for lam in (0.2, 1.0, 3.0):
        assert k2(A, lam, 1.0) == pytest.approx(expect, rel=1e-10)


def test_k2_bounded_by_zero_frequency_value():
    rng = np.random.default_rng(1)
    for spec in (A, B):
        top = k2(spec, 1.0, 0.0)
        for _ in range(20):
            lam = float(rng.uniform(0.05, 3.0))
            xi = float(rng.uniform(-8.0, 8.0))
            assert abs(k2(spec, lam, xi)) <= top * (1 + 1e-9)


def test_k2_rejects_nonpositive_lambda():
    with pytest.raises(ValueError):
        k2(A, 0.0, 1.0)
    with pytest.raises(ValueError):
        k2(A, -1.0, 1.0)


def test_big_d_values_and_quadrature():
    assert big_d(A) == pytest.approx(D_A, rel=1e-14)
    assert big_d(B) == pytest.approx(D_B, rel=1e-12)
    for spec in (A, B):
        assert abs(big_d(spec) - big_d_quadrature(spec)) <= 1e-10 * big_d(spec)


def test_kappa_identity_against_simplex_form():
    # kappa^2/(2-kappa) == 2/((1-a)(2-a)) for the singularity exponent a
    rng = np.random.default_rng(9)
    count = 0
    while count < 20:
        g, b = rng.uniform(0.05, 0.95, 2)
        if g + b <= 1.05:
            continue
        ex = exponents(MediumSpec(d=1, gamma=g, beta=b))
        lhs = ex.kappa**2 / (2.0 - ex.kappa)
        rhs = 2.0 / ((1.0 - ex.a_sing) * (2.0 - ex.a_sing))
        assert abs(lhs - rhs) <= 1e-12 * abs(lhs)
        count += 1


def test_big_d_txi_reduces_to_big_d_at_zero_frequency():
    for spec in (A, B):
        for t in (0.5, 1.0, 2.0):
            assert abs(big_d_txi(spec, t, 0.0) - big_d(spec)) <= 1e-8


def test_big_d_txi_golden_value():
    assert big_d_txi(B, 1.0, 1.0) == pytest.approx(GOLDEN_D_TXI_B_11, abs=1e-6)


def test_big_d_txi_more_goldens():
    for (t, xi), val in GOLDEN_D_TXI_B.items():
        assert big_d_txi(B, t, xi) == pytest.approx(val, abs=2e-6)


def test_big_d_txi_bounded_and_decaying():
    vals = [big_d_txi(B, 1.0, xi) for xi in (0.0, 1.0, 5.0, 20.0, 60.0)]
    assert all(abs(v) <= big_d(B) * (1 + 1e-9) for v in vals)
    assert all(a > b for a, b in zip(vals, vals[1:]))
    # decay is slow (~1/xi); by xi = 60 it is below 0.1 D, but NOT yet at 20
    assert abs(vals[-1]) < 0.1 * big_d(B)
    assert abs(big_d_txi(B, 1.0, 20.0)) > 0.1 * big_d(B)


def test_big_d_txi_beta_half_degeneracy():
    # at beta = 1/2 the K2 argument loses its lambda dependence, so D(t, xi)
    # is time-independent
    v1 = big_d_txi(A, 0.5, 1.0)
    v2 = big_d_txi(A, 2.0, 1.0)
    assert v1 == pytest.approx(v2, rel=1e-12)


def test_big_d_txi_rejections():
    with pytest.raises(ValueError):
        big_d_txi(B, 0.0, 1.0)
    with pytest.raises(ValueError):
        big_d_txi(B, -1.0, 1.0)
    low_beta = MediumSpec(d=1, gamma=0.8, beta=0.4)
    with pytest.raises(ValueError):
        big_d_txi(low_beta, 1.0, 1.0)
    # xi = 0 works for any admissible beta
    assert big_d_txi(low_beta, 1.0, 0.0) == pytest.approx(big_d(low_beta),
                                                          rel=1e-10)


def test_predict_moment_homogenized():
    reg = classify_regime(A, 3.0)
    assert reg.label is RegimeLabel.HOMOGENIZED
    val = predict_moment(A, reg, 1, 0, 1.0, 1.0, 1.0)
    assert val == pytest.approx(math.exp(-0.5 * D_A), rel=1e-12)
    val2 = predict_moment(A, reg, 1, 1, 1.0, 1.0, 1.0)
    assert val2 == pytest.approx(math.exp(-D_A), rel=1e-12)


def test_predict_moment_phase_regimes():
    reg = classify_regime(A, 0.5)
    assert predict_moment(A, reg, 1, 1, 1.0, 1.0, 1.0 + 0.0j) == \
        pytest.approx(1.0, rel=1e-12)               # M = N: no decay
    assert predict_moment(A, reg, 1, 0, 1.0, 1.0, 1.0) == \
        pytest.approx(math.exp(-0.5 * D_A), rel=1e-12)
    assert predict_moment(A, reg, 2, 0, 1.0, 1.0, 1.0) == \
        pytest.approx(math.exp(-2.0 * D_A), rel=1e-12)
    regiv = classify_regime(B, 0.5)
    assert regiv.label is RegimeLabel.FRACTIONAL_PHASE_XI
    got = predict_moment(B, regiv, 1, 0, 1.0, 1.0, 1.0)
    assert got == pytest.approx(math.exp(-0.5 * GOLDEN_D_TXI_B_11), rel=1e-6)


def test_predict_moment_discriminates_regimes():
    # at (1,1) the homogenized prediction decays, the phase regime does not
    hom = predict_moment(A, classify_regime(A, 3.0), 1, 1, 1.0, 1.0, 1.0)
    phs = predict_moment(A, classify_regime(A, 0.5), 1, 1, 1.0, 1.0, 1.0)
    assert abs(hom) < abs(phs)


def test_predict_moment_errors():
    out = Regime(RegimeLabel.OUT_OF_THEORY, 0.3)
    with pytest.raises(ValueError):
        predict_moment(B, out, 1, 0, 1.0, 1.0, 1.0)
    crit = classify_regime(A, 4.0 / 3.0)
    with pytest.raises(ValueError, match="sampler"):
        predict_moment(A, crit, 1, 1, 1.0, 1.0, 1.0)
    # critical first moment has the universal closed form
    assert predict_moment(A, crit, 1, 0, 1.0, 1.0, 1.0) == \
        pytest.approx(math.exp(-0.5 * D_A), rel=1e-12)


def test_cutoff_amplitude_scales_constants():
    amped = MediumSpec(d=1, gamma=0.75, beta=0.5, mu=1.0,
                       cutoff=CutoffSpec(amplitude_at_zero=2.0))
    assert big_d(amped) == pytest.approx(2.0 * big_d(A), rel=1e-12)
