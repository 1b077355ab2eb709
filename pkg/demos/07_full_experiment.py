#!/usr/bin/env python3
"""End-to-end: config -> ensemble -> statistics -> CSV/JSON report.

A small homogenized-regime ensemble (300 realizations, eps = 0.2) compared
against the predicted moments, written to demos_out/ in the harness schema.
The plotting frontend can render the result:

    plots render --in demos_out --kind moment-decay --out demos_out
"""
import math

import numpy as np

from randschrod import (ExperimentConfig, GridSpec, InitialPacket, MediumSpec,
                        big_d, emit, exponents, run_experiment)

A = MediumSpec(d=1, gamma=0.75, beta=0.5, mu=1.0)
packet = InitialPacket()

cfg = ExperimentConfig(
    medium=A, alpha=2.0 * exponents(A).alpha_c, eps=(0.4, 0.2),
    grid=GridSpec(d=1, n=1024, length=8 * np.pi),
    packet=packet, probes=(1.0,), times=(0.5, 1.0),
    n_realizations=300, master_seed=77,
    variance_rule="cell", ir_fold=True)

report = run_experiment(cfg, progress=False)
paths = emit(report, "demos_out")
print(f"experiment {report.experiment_id}: {len(report.rows)} rows")
print(f"wrote {paths['csv']} and {paths['json']}")

target = packet.fourier(1.0) * math.exp(-0.5 * big_d(A))
print(f"\nfirst moment at t=1 vs homogenized limit {target.real:.4f}:")
for r in report.rows:
    if (r["M"], r["N"]) == (1, 0) and r["t"] == 1.0:
        print(f"  eps={r['eps']}: {r['re_mean']:+.4f}{r['im_mean']:+.4f}j "
              f"(SE {r['stderr']:.4f}, prediction {r['re_pred']:.4f})")
print("\nthe gap shrinks with eps at the eps^(2/3) rate set by the spectral")
print("cutoff; the acceptance suite quantifies the full trend.")
