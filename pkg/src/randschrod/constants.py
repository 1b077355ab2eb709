"""Limit constants and moment predictions.

Closed forms used throughout (a = (1-gamma)/beta, the kernel singularity
exponent; Omega_d the unit-sphere surface area):

    K1        = Omega_d/(2 beta) * mu^(-a) * Gamma(a)
    K2(l,xi)  = Omega_d/(2 pi)^d * Int_0^inf e^(-mu w^(2 beta))
                  kernel_d(w * |xi| * l^(1-1/(2 beta))) * w^(1-2 gamma) dw
    D         = a(0) K1 kappa^2 / ((2 pi)^d (2-kappa))
    D(t,xi)   = a(0) * Int_[0,1]^2 |s-u|^(-a) K2(|s-u| t, xi) ds du

with kernel_1 = cos, kernel_2 = J0, kernel_3 = sinc.  D(t,xi) carries no
extra (2 pi)^(-d): that factor already lives inside K2, which is what makes
D(t,0) = D exact (K2(l,0) = K1/(2 pi)^d).

The time integral in D(t,xi) is reduced to one dimension and evaluated after
the substitution r = v^(1/e), e = 1 - 1/(2 beta), which turns the K2 argument
into a linear function of v (analytic integrand) and moves the r^(-a)
endpoint weight into Gauss-Jacobi weights.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .media import MediumSpec, Regime, RegimeLabel, exponents

__all__ = [
    "OMEGA_D",
    "k1",
    "k1_quadrature",
    "k2",
    "big_d",
    "big_d_quadrature",
    "big_d_txi",
    "phase_variance",
    "predict_moment",
    "TheoryPrediction",
    "build_prediction",
]

OMEGA_D = {1: 2.0, 2: 2.0 * np.pi, 3: 4.0 * np.pi}

# moment orders reported by the experiment harness
MOMENT_PAIRS = ((1, 0), (1, 1), (2, 0), (2, 2))


def _a_sing(spec: MediumSpec) -> float:
    return (1.0 - spec.gamma) / spec.beta


@lru_cache(maxsize=128)
def k1(spec: MediumSpec) -> float:
    """Radial kernel mass Omega_d * Int e^(-mu rho^(2 beta)) rho^(1-2 gamma) drho."""
    a = _a_sing(spec)
    return OMEGA_D[spec.d] / (2.0 * spec.beta) * spec.mu ** (-a) * special.gamma(a)


def k1_quadrature(spec: MediumSpec) -> float:
    """Adaptive-quadrature evaluation of K1 (independent of the Gamma form).

    Uses the substitution u = mu * rho^(2 beta); the u^(a-1) endpoint weight
    is handled by the algebraic-weight Gauss-Kronrod rule on [0,1].
    """
    a = _a_sing(spec)
    head, _ = integrate.quad(lambda u: np.exp(-u), 0.0, 1.0,
                             weight="alg", wvar=(a - 1.0, 0.0))
    tail, _ = integrate.quad(lambda u: np.exp(-u) * u ** (a - 1.0), 1.0, np.inf)
    return OMEGA_D[spec.d] / (2.0 * spec.beta) * spec.mu ** (-a) * (head + tail)


def _angular_kernel(d: int, x):
    if d == 1:
        return np.cos(x)
    if d == 2:
        return special.j0(x)
    return np.sinc(x / np.pi)  # sin(x)/x with sinc(0)=1


def _w_cap(spec: MediumSpec) -> float:
    # e^{-mu w^(2 beta)} < 1e-18 beyond this point
    return (42.0 / spec.mu) ** (1.0 / (2.0 * spec.beta))


def k2(spec: MediumSpec, lam: float, xi) -> float:
    """Oscillatory kernel K2(lambda, xi); real by symmetry.

    |K2(lam, xi)| <= K2(lam, 0) = K1 / (2 pi)^d.
    """
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    r = _xi_norm(spec, xi) * lam ** (1.0 - 1.0 / (2.0 * spec.beta))
    return _radial_kernel_scalar(spec, r)


def _xi_norm(spec: MediumSpec, xi) -> float:
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if xi.size != spec.d:
        raise ValueError(f"xi must have {spec.d} component(s)")
    return float(np.sqrt(np.sum(xi * xi)))


def _radial_kernel_scalar(spec: MediumSpec, r: float) -> float:
    """(Omega_d/(2 pi)^d) Int_0^inf e^(-mu w^(2 beta)) kernel_d(w r) w^(1-2 gamma) dw."""
    d, g, mu, tb = spec.d, spec.gamma, spec.mu, 2.0 * spec.beta
    cap = _w_cap(spec)
    lim = int(max(200, 8 * abs(r) * cap / np.pi))
    head, _ = integrate.quad(
        lambda w: np.exp(-mu * w**tb) * _angular_kernel(d, w * r),
        0.0, 1.0, weight="alg", wvar=(1.0 - 2.0 * g, 0.0), limit=lim)
    tail, _ = integrate.quad(
        lambda w: np.exp(-mu * w**tb) * _angular_kernel(d, w * r) * w ** (1.0 - 2.0 * g),
        1.0, cap, limit=lim)
    return OMEGA_D[d] / (2.0 * np.pi) ** d * (head + tail)


def _radial_kernel_vec(spec: MediumSpec, r: np.ndarray, n_min: int = 256) -> np.ndarray:
    """Vectorized radial kernel at many r values (fixed-rule quadrature).

    Piece on [0,1] is integrated in u = w^(2-2*gamma) (removes the endpoint
    weight); piece on [1, w_cap] is smooth with exponential decay.  Node
    counts scale with the fastest oscillation present.
    """
    r = np.asarray(r, dtype=float)
    d, g, mu, tb = spec.d, spec.gamma, spec.mu, 2.0 * spec.beta
    cap = _w_cap(spec)
    rmax = float(np.max(np.abs(r))) if r.size else 0.0
    n1 = int(max(n_min, 6 * rmax / np.pi))
    n2 = int(max(n_min, 6 * rmax * cap / np.pi))

    p = 2.0 - 2.0 * g
    x1, w1 = np.polynomial.legendre.leggauss(min(n1, 6000))
    u = 0.5 * (x1 + 1.0)
    wgt1 = 0.5 * w1 / p
    wnode = u ** (1.0 / p)
    f1 = np.exp(-mu * wnode**tb)[None, :] * _angular_kernel(d, np.outer(r, wnode))
    head = f1 @ wgt1

    x2, w2 = np.polynomial.legendre.leggauss(min(n2, 12000))
    wn = 1.0 + 0.5 * (x2 + 1.0) * (cap - 1.0)
    wgt2 = 0.5 * (cap - 1.0) * w2 * np.exp(-mu * wn**tb) * wn ** (1.0 - 2.0 * g)
    tail = _angular_kernel(d, np.outer(r, wn)) @ wgt2

    return OMEGA_D[d] / (2.0 * np.pi) ** d * (head + tail)


@lru_cache(maxsize=128)
def big_d(spec: MediumSpec) -> float:
    """Homogenized decay constant D = a(0) K1 kappa^2 / ((2 pi)^d (2-kappa))."""
    ex = exponents(spec)
    a0 = spec.cutoff.amplitude_at_zero
    return a0 * k1(spec) * ex.kappa**2 / ((2.0 * np.pi) ** spec.d * (2.0 - ex.kappa))


def big_d_quadrature(spec: MediumSpec) -> float:
    """D via quadrature of both factors: K1 numerically and the double time
    integral Int_[0,1]^2 |s-u|^(-a) ds du reduced to 2 Int (1-l) l^(-a) dl."""
    a = _a_sing(spec)
    i2, _ = integrate.quad(lambda l: 1.0 - l, 0.0, 1.0,
                           weight="alg", wvar=(-a, 0.0))
    a0 = spec.cutoff.amplitude_at_zero
    return a0 * k1_quadrature(spec) / (2.0 * np.pi) ** spec.d * 2.0 * i2


def _jacobi_01(n: int, b: float):
    """Nodes/weights for Int_0^1 v^b f(v) dv (b > -1)."""
    if b == 0.0:
        x, w = np.polynomial.legendre.leggauss(n)
        return 0.5 * (x + 1.0), 0.5 * w
    x, w = special.roots_jacobi(n, 0.0, b)
    return 0.5 * (x + 1.0), w * 2.0 ** (-(b + 1.0))


def big_d_txi(spec: MediumSpec, t: float, xi, n_nodes: int = 96) -> float:
    """Frequency-dependent variance coefficient D(t, xi); D(t, 0) = D exactly.

    |D(t, xi)| <= D, with slow ~1/|xi| decay (the r^(-a) endpoint of the time
    kernel never oscillates).
    """
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    a = _a_sing(spec)
    a0 = spec.cutoff.amplitude_at_zero
    xin = _xi_norm(spec, xi)
    e = 1.0 - 1.0 / (2.0 * spec.beta)
    i2 = 2.0 / ((1.0 - a) * (2.0 - a))  # Int_[0,1]^2 |s-u|^(-a)

    if xin == 0.0:
        return a0 * (k1(spec) / (2.0 * np.pi) ** spec.d) * i2
    if e == 0.0:
        # beta = 1/2: K2 is lambda-independent, D(t, xi) carries no t
        return a0 * _radial_kernel_scalar(spec, xin) * i2
    if e < 0.0:
        raise ValueError("D(t, xi) at xi != 0 requires beta >= 1/2")

    c = xin * t**e
    total = 0.0
    # 2 Int_0^1 (1-r) r^(-a) K2(rt, xi) dr, split into the r^(-a) and r^(1-a)
    # pieces; r = v^(1/e) makes the kernel argument c*v, analytic in v.
    for power, sign in ((1.0 - a, 1.0), (2.0 - a, -1.0)):
        b = power / e - 1.0
        n = int(max(n_nodes, 4 * c / np.pi))
        v, w = _jacobi_01(min(n, 4000), b)
        vals = _radial_kernel_vec(spec, c * v)
        total += sign * (1.0 / e) * float(w @ vals)
    return a0 * 2.0 * total


def phase_variance(spec: MediumSpec, regime: Regime, t: float, xi) -> float | None:
    """Predicted variance of the limiting phase, stochastic regimes only."""
    ex = exponents(spec)
    if regime.label is RegimeLabel.FRACTIONAL_PHASE:
        return big_d(spec) * t ** (2.0 / ex.kappa)
    if regime.label is RegimeLabel.FRACTIONAL_PHASE_XI:
        if t == 0:
            return 0.0
        return big_d_txi(spec, t, xi) * t ** (2.0 / ex.kappa)
    return None


def predict_moment(spec: MediumSpec, regime: Regime, M: int, N: int,
                   t: float, xi, phi0_hat_value: complex) -> complex:
    """Predicted limit of E{psi^M (psi*)^N} at (t, xi).

    Raises for OutOfTheory (no prediction exists) and for critical-regime
    moments other than (1,0), which have no closed form and must be sampled.
    """
    if M < 0 or N < 0:
        raise ValueError("moment orders must be nonnegative")
    base = phi0_hat_value**M * np.conj(phi0_hat_value) ** N
    lab = regime.label
    if lab is RegimeLabel.OUT_OF_THEORY:
        raise ValueError("no prediction in the OutOfTheory regime")
    if lab is RegimeLabel.CRITICAL:
        if (M, N) != (1, 0):
            raise ValueError(
                "critical-regime moments beyond (1,0) have no closed form; "
                "use the limit-law sampler")
        ex = exponents(spec)
        return base * math.exp(-0.5 * big_d(spec) * t ** (2.0 / ex.kappa))
    ex = exponents(spec)
    if lab is RegimeLabel.HOMOGENIZED:
        return base * math.exp(-0.5 * (M + N) * big_d(spec) * t ** (2.0 / ex.kappa))
    var = phase_variance(spec, regime, t, xi)
    return base * math.exp(-0.5 * (M - N) ** 2 * var)


@dataclass(frozen=True)
class TheoryPrediction:
    """Predictions attached to one (t, xi) cell of an experiment."""

    regime: Regime
    t: float
    xi: float
    D: float
    D_txi: float | None
    predicted_moments: dict = field(default_factory=dict)
    phase_variance: float | None = None


def build_prediction(spec: MediumSpec, regime: Regime, t: float, xi,
                     phi0_hat_value: complex,
                     pairs=MOMENT_PAIRS) -> TheoryPrediction:
    """Assemble the full prediction record; unavailable entries are omitted."""
    d_txi = None
    if regime.label is RegimeLabel.FRACTIONAL_PHASE_XI and t > 0:
        d_txi = big_d_txi(spec, t, xi)
    moments = {}
    for m, n in pairs:
        try:
            moments[(m, n)] = predict_moment(spec, regime, m, n, t, xi,
                                             phi0_hat_value)
        except ValueError:
            pass
    pv = phase_variance(spec, regime, t, xi) if t > 0 else (
        0.0 if regime.stochastic else None)
    return TheoryPrediction(regime=regime, t=t, xi=_xi_norm(spec, xi),
                            D=big_d(spec), D_txi=d_txi,
                            predicted_moments=moments, phase_variance=pv)
