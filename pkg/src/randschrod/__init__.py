"""Monte Carlo laboratory for the weakly random Schrodinger equation with
slowly decorrelating Gaussian potentials.

Subpackages by responsibility:

  media      medium parameters, scaling exponents, regime classification
  constants  limit constants K1, K2, D, D(t,xi) and moment predictions
  randfield  spectral synthesis of the potential, exact OU dynamics
  solver     Strang-split integrator and compensated probes
  limitlaw   samplers for the limiting laws (fBm phase, critical functional)
  wickoracle pairing enumeration and the independent series oracle
  harness    seeded experiments, statistics, CSV/JSON reports
"""
from ._version import __version__
from .media import (CutoffSpec, MediumSpec, Regime, RegimeLabel,
                    classify_regime, exponents, spectral_data, validate)
from .constants import (big_d, big_d_quadrature, big_d_txi, build_prediction,
                        k1, k1_quadrature, k2, phase_variance, predict_moment)
from .randfield import (EffectiveMedium, FieldState, GridSpec, advance,
                        draw_stationary, dump_field, empirical_covariance,
                        load_field, model_covariance, physical_medium,
                        real_space, rescaled_medium)
from .solver import (InitialPacket, ProbeRecord, WaveState, compensated_probe,
                     init_wave, strang_step)
from .limitlaw import (FbmEnsemble, FbmPath, build_limit_modes,
                       critical_ensemble, sample_critical_limit, sample_fbm,
                       sample_phase, var_theta)
from .wickoracle import (Pairing, finite_eps_first_term, limit_term,
                         limit_term_xi, moment_partial_sum, pairings,
                         resummed_moment, uniform_bound_integral)
from .harness import (CSV_HEADER, DtRule, ExperimentConfig, KsResult,
                      MomentEstimate, Report, SCHEMA_VERSION, config_hash,
                      emit, estimate_moments, load_config, load_report,
                      normality_test, run_experiment, run_realization,
                      unwrap_phases)

__all__ = [name for name in dir() if not name.startswith("_")]
