#!/usr/bin/env python3
"""Walk through the medium parameters and the regime map.

The potential is a stationary Gaussian field whose spatial spectrum decays
like a power law under a compact cutoff and whose Fourier modes relax at the
rate mu |p|^(2 beta).  For 0 < gamma, beta < 1 with gamma + beta > 1 the
correlations decay slowly, and the long-time statistics of a probing wave
depend on the initial-data scale exponent alpha through a critical value
alpha_c.
"""
import numpy as np

from randschrod import MediumSpec, classify_regime, exponents, spectral_data

A = MediumSpec(d=1, gamma=0.75, beta=0.5, mu=1.0)
B = MediumSpec(d=1, gamma=0.5, beta=0.75, mu=1.0)

for name, spec in (("A", A), ("B", B)):
    ex = exponents(spec)
    print(f"Medium {name}: gamma={spec.gamma}, beta={spec.beta}")
    print(f"  kappa   = {ex.kappa:.6f}   (time scale eps^-kappa, in (1,2))")
    print(f"  alpha_c = {ex.alpha_c:.6f} (critical initial-data exponent)")
    print(f"  a_sing  = {ex.a_sing:.6f}  (time-kernel singularity)")
    print(f"  hurst   = {ex.hurst:.6f}   (limit phase process)")

print("\nSpectral data of Medium A at p = 0.5 and p = 2:")
for p in (0.5, 2.0):
    dens, gap = spectral_data(A, p)
    print(f"  p={p}: density={dens:.6f}, gap={gap:.6f}")

print("\nRegime map (Medium B, beta > 1/2):")
for alpha in (0.3, 0.5, 0.7, 1.0, 1.5):
    print(f"  alpha={alpha}: {classify_regime(B, alpha).label.value}")

print("\nRegime map (Medium A, beta <= 1/2):")
for alpha in (0.4, 4.0 / 3.0, 2.5):
    print(f"  alpha={alpha}: {classify_regime(A, alpha).label.value}")
