"""Random-medium parameters, scaling exponents and regime classification.

The medium is a stationary mean-zero Gaussian potential with spatial power
spectrum a(p)/|p|^(2*gamma+d-2) and mode relaxation rate mu*|p|^(2*beta)
(its spectral gap).  Admissible parameters satisfy 0 < gamma, beta < 1 and
gamma + beta > 1, the slow-decorrelation regime.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "CutoffSpec",
    "MediumSpec",
    "ScalingExponents",
    "Regime",
    "RegimeLabel",
    "validate",
    "exponents",
    "classify_regime",
    "spectral_data",
]

# Relative tolerance for the boundary cases alpha == alpha_c and
# alpha == kappa - alpha_c; boundary values computed in floating point must
# land on the boundary labels.
_BOUNDARY_RTOL = 1e-9


@dataclass(frozen=True)
class CutoffSpec:
    """Spatial spectral cutoff a(p): bounded, compactly supported, a(p) >= 0.

    ``sharp-ball`` is the indicator amplitude_at_zero * 1{|p| <= p_max};
    ``smooth-bump`` is amplitude_at_zero * exp(1 - 1/(1 - (|p|/p_max)^2))
    inside the ball and 0 outside.
    """

    kind: str = "sharp-ball"
    p_max: float = 1.0
    amplitude_at_zero: float = 1.0

    def __post_init__(self):
        if self.kind not in ("sharp-ball", "smooth-bump"):
            raise ValueError(f"unknown cutoff kind: {self.kind!r}")
        if not (self.p_max > 0 and math.isfinite(self.p_max)):
            raise ValueError("p_max must be positive and finite")
        if not (self.amplitude_at_zero > 0):
            raise ValueError("a(0) must be positive")

    def __call__(self, p):
        """Evaluate a(|p|); accepts scalars or arrays of |p| values."""
        p = np.abs(np.asarray(p, dtype=float))
        a0 = self.amplitude_at_zero
        if self.kind == "sharp-ball":
            return np.where(p <= self.p_max, a0, 0.0)
        x2 = np.clip((p / self.p_max) ** 2, 0.0, 1.0)
        with np.errstate(divide="ignore", over="ignore"):
            val = np.where(x2 < 1.0, a0 * np.exp(1.0 - 1.0 / (1.0 - x2)), 0.0)
        return val


@dataclass(frozen=True)
class MediumSpec:
    """Validated parameters of the random potential."""

    d: int
    gamma: float
    beta: float
    mu: float = 1.0
    cutoff: CutoffSpec = CutoffSpec()

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ValueError(f"d must be 1, 2 or 3, got {self.d}")
        if not (0.0 < self.gamma < 1.0):
            raise ValueError(f"gamma must lie in (0,1), got {self.gamma}")
        if not (0.0 < self.beta < 1.0):
            raise ValueError(f"beta must lie in (0,1), got {self.beta}")
        if self.gamma + self.beta <= 1.0:
            raise ValueError(
                "gamma + beta must exceed 1 (slow decorrelation); got "
                f"gamma+beta = {self.gamma + self.beta}"
            )
        if not (self.mu > 0 and math.isfinite(self.mu)):
            raise ValueError(f"mu must be positive, got {self.mu}")


def validate(
    d: int,
    gamma: float,
    beta: float,
    mu: float = 1.0,
    cutoff: CutoffSpec | None = None,
) -> MediumSpec:
    """Validate raw parameters; raises ValueError outside the admissible set."""
    return MediumSpec(d=d, gamma=gamma, beta=beta, mu=mu,
                      cutoff=cutoff if cutoff is not None else CutoffSpec())


@dataclass(frozen=True)
class ScalingExponents:
    """Derived exponents of the slow-decorrelation scaling.

    kappa:   time-scale exponent 2*beta/(2*beta+gamma-1), in (1,2)
    alpha_c: critical initial-data exponent 1/(2*beta+gamma-1) = kappa/(2*beta)
    a_sing:  (1-gamma)/beta, the time-kernel singularity exponent, in (0,1)
    hurst:   1/kappa, in (1/2,1)
    """

    kappa: float
    alpha_c: float
    a_sing: float
    hurst: float


def exponents(spec: MediumSpec) -> ScalingExponents:
    denom = 2.0 * spec.beta + spec.gamma - 1.0
    kappa = 2.0 * spec.beta / denom
    alpha_c = 1.0 / denom
    a_sing = (1.0 - spec.gamma) / spec.beta
    return ScalingExponents(kappa=kappa, alpha_c=alpha_c, a_sing=a_sing,
                            hurst=1.0 / kappa)


class RegimeLabel(Enum):
    HOMOGENIZED = "Homogenized (i)"
    CRITICAL = "Critical (ii)"
    FRACTIONAL_PHASE = "FractionalPhase (iii)"
    FRACTIONAL_PHASE_XI = "FractionalPhaseXi (iv)"
    OUT_OF_THEORY = "OutOfTheory"


@dataclass(frozen=True)
class Regime:
    label: RegimeLabel
    alpha: float

    @property
    def stochastic(self) -> bool:
        return self.label in (
            RegimeLabel.CRITICAL,
            RegimeLabel.FRACTIONAL_PHASE,
            RegimeLabel.FRACTIONAL_PHASE_XI,
        )


def _close(x: float, y: float) -> bool:
    return math.isclose(x, y, rel_tol=_BOUNDARY_RTOL, abs_tol=0.0)


def classify_regime(spec: MediumSpec, alpha: float) -> Regime:
    """Case split of the limit theorem for initial-data exponent alpha.

    (i)   alpha > alpha_c                           deterministic limit
    (ii)  alpha = alpha_c                           random integral functional
    (iii) beta <= 1/2, 0 < alpha < alpha_c, or
          beta  > 1/2, kappa-alpha_c < alpha < alpha_c
    (iv)  beta  > 1/2, alpha = kappa-alpha_c        frequency-dependent phase
    OutOfTheory: beta > 1/2, 0 < alpha < kappa-alpha_c (unresolved regime; runs
    are allowed there but no prediction is emitted).
    """
    if not (alpha > 0 and math.isfinite(alpha)):
        raise ValueError(f"alpha must be positive, got {alpha}")
    ex = exponents(spec)
    if _close(alpha, ex.alpha_c):
        return Regime(RegimeLabel.CRITICAL, alpha)
    if alpha > ex.alpha_c:
        return Regime(RegimeLabel.HOMOGENIZED, alpha)
    # now 0 < alpha < alpha_c
    if spec.beta <= 0.5:
        return Regime(RegimeLabel.FRACTIONAL_PHASE, alpha)
    lower = ex.kappa - ex.alpha_c
    if _close(alpha, lower):
        return Regime(RegimeLabel.FRACTIONAL_PHASE_XI, alpha)
    if alpha > lower:
        return Regime(RegimeLabel.FRACTIONAL_PHASE, alpha)
    return Regime(RegimeLabel.OUT_OF_THEORY, alpha)


def spectral_data(spec: MediumSpec, p) -> tuple:
    """Power spectrum a(p)/|p|^(2*gamma+d-2) and gap mu*|p|^(2*beta) at p.

    ``p`` is a scalar (d=1) or a length-d vector.  The spectrum has an
    infrared singularity, so querying the density at p = 0 is an error;
    gap(0) = 0 is fine.
    """
    p = np.atleast_1d(np.asarray(p, dtype=float))
    if p.size != spec.d:
        raise ValueError(f"momentum must have {spec.d} component(s)")
    r = float(np.sqrt(np.sum(p * p)))
    if r == 0.0:
        raise ValueError("spectral density is singular at p = 0")
    density = float(spec.cutoff(r)) / r ** (2.0 * spec.gamma + spec.d - 2.0)
    gap = spec.mu * r ** (2.0 * spec.beta)
    return density, gap
