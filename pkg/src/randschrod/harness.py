"""Experiment orchestration: seeded ensembles, statistics, reports.

A run is a deterministic function of (config, master_seed): every
realization draws from its own counter-based substream and the reduction
happens in realization-index order, so thread counts and completion order
cannot change a single output bit.

Output contract (consumed by the plotting frontend):
  * CSV with the exact header
    experiment_id,eps,alpha,regime,t,xi,M,N,re_mean,im_mean,stderr,n_samples,re_pred,im_pred,phase_var,phase_var_pred,ks_stat,ks_pass
  * JSON report carrying the schema version, full config, config hash and
    the same rows; runtime metadata lives under its own key and is excluded
    from determinism guarantees.
"""
from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import special, stats

from ._version import __version__
from .constants import MOMENT_PAIRS, build_prediction
from .media import (CutoffSpec, MediumSpec, Regime, RegimeLabel,
                    classify_regime, exponents)
from .randfield import GridSpec, advance, draw_stationary, rescaled_medium
from .rng import DOMAIN_REALIZATION, substream
from .solver import (InitialPacket, ProbeRecord, build_step_plan,
                     compensated_probe, init_wave, strang_step)

__all__ = [
    "DtRule",
    "ExperimentConfig",
    "load_config",
    "config_hash",
    "MomentEstimate",
    "Report",
    "run_realization",
    "run_experiment",
    "estimate_moments",
    "unwrap_phases",
    "normality_test",
    "KsResult",
    "emit",
    "load_report",
    "CSV_HEADER",
    "SCHEMA_VERSION",
]

SCHEMA_VERSION = "1"

CSV_HEADER = ("experiment_id,eps,alpha,regime,t,xi,M,N,re_mean,im_mean,"
              "stderr,n_samples,re_pred,im_pred,phase_var,phase_var_pred,"
              "ks_stat,ks_pass")


@dataclass(frozen=True)
class DtRule:
    """Time-step selection.

    dt = safety * min( 1 / (v_sup_factor * std V_eps),   potential phase
                       eps^(kappa-2 alpha) / |xi_max|^2,  probe phase
                       field_rate_factor/safety / g_max ) field resolution

    The field term keeps g(q) dt small for every retained mode: a midpoint
    sample of an OU mode with g dt = O(1) no longer represents its step
    average.  ``max_dt`` caps the result.
    """

    safety: float = 0.1
    v_sup_factor: float = 4.0
    field_rate_factor: float = 0.5
    max_dt: float | None = 0.05


@dataclass(frozen=True)
class ExperimentConfig:
    medium: MediumSpec
    alpha: float
    eps: tuple
    grid: GridSpec
    packet: InitialPacket
    probes: tuple
    times: tuple
    n_realizations: int
    master_seed: int
    dt_rule: DtRule = DtRule()
    variance_rule: str = "midpoint"
    ir_fold: bool = False
    experiment_id: str = ""
    out_dir: str | None = None

    def __post_init__(self):
        if not self.eps:
            raise ValueError("need at least one eps value")
        for e in self.eps:
            if not 0 < e <= 1:
                raise ValueError(f"eps must lie in (0,1], got {e}")
        if self.n_realizations < 1:
            raise ValueError("need at least one realization")
        tt = np.asarray(self.times, dtype=float)
        if tt.size == 0 or np.any(np.diff(tt) <= 0) or tt[0] < 0:
            raise ValueError("times must be strictly increasing and >= 0")
        for xi in self.probes:
            self.grid.index_of_mode(xi)          # grid alignment check
        classify_regime(self.medium, self.alpha)  # validates alpha
        if not self.experiment_id:
            object.__setattr__(self, "experiment_id", config_hash(self)[:12])


def _config_dict(cfg: ExperimentConfig) -> dict:
    d = dataclasses.asdict(cfg)
    d.pop("experiment_id", None)
    d.pop("out_dir", None)
    return json.loads(json.dumps(d))   # tuples -> lists, canonical types


def config_hash(cfg: ExperimentConfig) -> str:
    blob = json.dumps(_config_dict(cfg), sort_keys=True,
                      separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def load_config(path) -> ExperimentConfig:
    """Parse a TOML experiment file; table names mirror the config fields."""
    try:
        import tomllib
    except ImportError:                      # python < 3.11
        import tomli as tomllib
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    med = raw["medium"]
    cut = med.get("cutoff", {})
    medium = MediumSpec(
        d=int(med.get("d", 1)), gamma=float(med["gamma"]),
        beta=float(med["beta"]), mu=float(med.get("mu", 1.0)),
        cutoff=CutoffSpec(
            kind=cut.get("kind", "sharp-ball"),
            p_max=float(cut.get("p_max", 1.0)),
            amplitude_at_zero=float(cut.get("amplitude_at_zero", 1.0))))
    g = raw["grid"]
    grid = GridSpec(d=int(g.get("d", medium.d)), n=int(g["n"]),
                    length=float(g["length"]))
    p = raw.get("packet", {})
    packet = InitialPacket(kind=p.get("kind", "gaussian"),
                           width=float(p.get("width", 1.0)),
                           center=float(p.get("center", 0.0)),
                           amplitude=float(p.get("amplitude", 1.0)))
    dr = raw.get("dt_rule", {})
    dt_rule = DtRule(safety=float(dr.get("safety", 0.1)),
                     v_sup_factor=float(dr.get("v_sup_factor", 4.0)),
                     field_rate_factor=float(dr.get("field_rate_factor", 0.5)),
                     max_dt=dr.get("max_dt", 0.05))
    out = raw.get("output", {})
    return ExperimentConfig(
        medium=medium, alpha=float(raw["alpha"]),
        eps=tuple(float(e) for e in raw["eps"]),
        grid=grid, packet=packet,
        probes=tuple(float(x) for x in raw["probes"]),
        times=tuple(float(t) for t in raw["times"]),
        n_realizations=int(raw["n_realizations"]),
        master_seed=int(raw["master_seed"]),
        dt_rule=dt_rule,
        variance_rule=raw.get("variance_rule", "midpoint"),
        ir_fold=bool(raw.get("ir_fold", False)),
        experiment_id=raw.get("experiment_id", ""),
        out_dir=out.get("out_dir"))


# ---------------------------------------------------------------------------
# realizations
# ---------------------------------------------------------------------------

def choose_dt(cfg: ExperimentConfig, eps: float, medium) -> float:
    """Apply the dt rule to one eps; the result is logged in the report."""
    rule = cfg.dt_rule
    ex_osc = None
    ximax2 = max(float(np.sum(np.atleast_1d(np.asarray(x)) ** 2))
                 for x in cfg.probes)
    ex = exponents(cfg.medium)
    if ximax2 > 0:
        ex_osc = eps ** (ex.kappa - 2.0 * cfg.alpha) / ximax2
    v_std = math.sqrt(max(medium.total_variance, 1e-300))
    candidates = [1.0 / (rule.v_sup_factor * v_std)]
    if ex_osc is not None:
        candidates.append(ex_osc)
    gmax = medium.max_rate
    if gmax > 0:
        candidates.append(rule.field_rate_factor / rule.safety / gmax)
    dt = rule.safety * min(candidates)
    if rule.max_dt is not None:
        dt = min(dt, rule.max_dt)
    return dt


def _schedule(times, dt_max: float):
    """Per-interval substep counts so records land exactly on the grid."""
    times = np.asarray(times, dtype=float)
    t_prev = 0.0
    plan = []
    for t in times:
        span = t - t_prev
        if span == 0.0:
            plan.append((0, 0.0))
        else:
            n = max(1, int(math.ceil(span / dt_max - 1e-12)))
            plan.append((n, span / n))
        t_prev = t
    return plan


def run_realization(cfg: ExperimentConfig, eps: float, index: int,
                    medium=None, dt: float | None = None) -> ProbeRecord:
    """One seeded realization: deterministic in (master_seed, index)."""
    if medium is None:
        medium = rescaled_medium(cfg.medium, eps, cfg.alpha, cfg.grid,
                                 rule=cfg.variance_rule, ir_fold=cfg.ir_fold)
    if dt is None:
        dt = choose_dt(cfg, eps, medium)
    rng = substream(cfg.master_seed, DOMAIN_REALIZATION, index)
    field = draw_stationary(medium, rng)
    wave = init_wave(cfg.packet, cfg.grid)
    values = np.empty((len(cfg.times), len(cfg.probes)), dtype=np.complex128)
    phases = np.empty((len(cfg.times), len(cfg.probes)))
    phi0 = np.array([cfg.packet.fourier(xi) for xi in cfg.probes])
    # phase winding accumulated per solver step, where increments stay small
    prev_angle = np.zeros(len(cfg.probes))
    theta = np.zeros(len(cfg.probes))
    max_step = 0.0
    plans = {}
    try:
        for row, (n_steps, step) in enumerate(_schedule(cfg.times, dt)):
            for _ in range(n_steps):
                if step not in plans:
                    plans[step] = build_step_plan(cfg.grid, cfg.medium, eps,
                                                  cfg.alpha, step)
                advance(field, 0.5 * step)
                strang_step(wave, field, eps, cfg.alpha, step,
                            _plan=plans[step])
                advance(field, 0.5 * step)
                ang = np.angle(compensated_probe(wave, eps, cfg.alpha,
                                                 cfg.medium, cfg.probes)
                               / phi0)
                inc = (ang - prev_angle + math.pi) % (2.0 * math.pi) - math.pi
                theta += inc
                prev_angle = ang
                max_step = max(max_step, float(np.max(np.abs(inc))))
            values[row] = compensated_probe(wave, eps, cfg.alpha, cfg.medium,
                                            cfg.probes)
            phases[row] = theta
    except Exception as exc:
        raise RuntimeError(
            f"realization {index} (seed {cfg.master_seed}, eps {eps}) "
            f"failed: {exc}") from exc
    return ProbeRecord(times=np.asarray(cfg.times, dtype=float),
                       probes=np.asarray(cfg.probes, dtype=float),
                       values=values, realization=index,
                       master_seed=cfg.master_seed,
                       mass_drift=wave.mass_drift,
                       phases=phases, max_phase_step=max_step)


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MomentEstimate:
    pair: tuple
    mean: complex
    stderr: float
    n: int


def estimate_moments(samples, pairs=MOMENT_PAIRS) -> list:
    """Sample means of psi^M conj(psi)^N with Monte Carlo standard errors."""
    z = np.asarray(samples)
    if z.size == 0:
        raise ValueError("no samples")
    out = []
    for m, n in pairs:
        w = z**m * np.conj(z) ** n
        if z.size > 1 and np.ptp(w.real) + np.ptp(w.imag) > 0.0:
            mean = complex(w.mean())
            se = math.sqrt((w.real.var(ddof=1) + w.imag.var(ddof=1)) / z.size)
        else:
            mean = complex(w.flat[0])        # exact for constant inputs
            se = 0.0
        out.append(MomentEstimate(pair=(m, n), mean=mean, stderr=se, n=z.size))
    return out


def unwrap_phases(values: np.ndarray, phi0_hat: complex,
                  max_step: float = 0.5 * math.pi) -> np.ndarray:
    """Per-realization phases arg(psi/phi0_hat) unwrapped along the time axis.

    ``values`` has shape (n_realizations, n_times); the recorded grid must be
    fine enough that no unwrapped increment reaches ``max_step`` (mod-2pi
    aliasing would silently fold the phase variance), else this raises.
    """
    theta = np.unwrap(np.angle(values / phi0_hat), axis=-1)
    if theta.shape[-1] > 1:
        inc = np.abs(np.diff(theta, axis=-1))
        worst = float(inc.max())
        if worst >= max_step:
            raise ValueError(
                f"phase increment {worst:.3f} rad exceeds {max_step:.3f}; "
                "record on a finer time grid")
    return theta


@dataclass(frozen=True)
class KsResult:
    statistic: float
    critical: float
    passed: bool
    n: int


def normality_test(phases, predicted_variance: float,
                   level: float = 0.01) -> KsResult:
    """Two-sided KS test of the phases against N(0, predicted_variance)."""
    phases = np.asarray(phases, dtype=float)
    if phases.size < 100:
        raise ValueError("need at least 100 phase samples")
    if not predicted_variance > 0:
        raise ValueError("predicted variance must be positive")
    stat = float(stats.kstest(phases, "norm",
                              args=(0.0, math.sqrt(predicted_variance))).statistic)
    crit = float(special.kolmogi(level)) / math.sqrt(phases.size)
    return KsResult(statistic=stat, critical=crit, passed=stat < crit,
                    n=int(phases.size))


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

@dataclass
class Report:
    schema_version: str
    tool_version: str
    experiment_id: str
    config_hash: str
    config: dict
    rows: list
    runtime: dict = field(default_factory=dict)

    def to_json(self) -> str:
        body = {
            "schema_version": self.schema_version,
            "tool_version": self.tool_version,
            "experiment_id": self.experiment_id,
            "config_hash": self.config_hash,
            "config": self.config,
            "rows": self.rows,
            "runtime": self.runtime,
        }
        return json.dumps(body, indent=1, sort_keys=False)

    def csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER.split(","))
        for r in self.rows:
            writer.writerow([
                r["experiment_id"], _num(r["eps"]), _num(r["alpha"]),
                r["regime"], _num(r["t"]), _num(r["xi"]), r["M"], r["N"],
                _num(r["re_mean"]), _num(r["im_mean"]), _num(r["stderr"]),
                r["n_samples"], _num(r["re_pred"]), _num(r["im_pred"]),
                _num(r["phase_var"]), _num(r["phase_var_pred"]),
                _num(r["ks_stat"]), _bool(r["ks_pass"]),
            ])
        return buf.getvalue()


def _num(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


def _bool(x) -> str:
    if x is None:
        return ""
    return "true" if x else "false"


def _squeeze_xi(xi) -> float:
    return float(np.sqrt(np.sum(np.atleast_1d(np.asarray(xi)) ** 2)))


_WORKER_STATE: dict = {}


def _pool_init(cfg, eps, dt):
    _WORKER_STATE["args"] = (cfg, eps, dt)
    _WORKER_STATE["medium"] = None


def _pool_run(index: int):
    cfg, eps, dt = _WORKER_STATE["args"]
    if _WORKER_STATE["medium"] is None:
        _WORKER_STATE["medium"] = rescaled_medium(
            cfg.medium, eps, cfg.alpha, cfg.grid,
            rule=cfg.variance_rule, ir_fold=cfg.ir_fold)
    rec = run_realization(cfg, eps, index, medium=_WORKER_STATE["medium"],
                          dt=dt)
    return index, rec.values, rec.phases, rec.max_phase_step, rec.mass_drift


def run_experiment(cfg: ExperimentConfig, threads: int = 1,
                   progress: bool = False) -> Report:
    """Run the full ensemble for every eps and assemble the report."""
    started = time.time()
    rows = []
    warnings = []
    regime = classify_regime(cfg.medium, cfg.alpha)
    dts = {}
    for eps in cfg.eps:
        medium = rescaled_medium(cfg.medium, eps, cfg.alpha, cfg.grid,
                                 rule=cfg.variance_rule, ir_fold=cfg.ir_fold)
        dt = choose_dt(cfg, eps, medium)
        dts[eps] = dt
        R = cfg.n_realizations
        values = np.empty((R, len(cfg.times), len(cfg.probes)),
                          dtype=np.complex128)
        phases = np.empty((R, len(cfg.times), len(cfg.probes)))
        steps = np.empty(R)
        drifts = np.empty(R)
        if threads <= 1:
            for i in range(R):
                rec = run_realization(cfg, eps, i, medium=medium, dt=dt)
                values[i] = rec.values
                phases[i] = rec.phases
                steps[i] = rec.max_phase_step
                drifts[i] = rec.mass_drift
                if progress and (i + 1) % max(1, R // 10) == 0:
                    print(f"  eps={eps}: {i + 1}/{R}", file=sys.stderr)
        else:
            with ProcessPoolExecutor(
                    max_workers=threads, initializer=_pool_init,
                    initargs=(cfg, eps, dt)) as pool:
                for index, vals, phs, mstep, drift in pool.map(
                        _pool_run, range(R), chunksize=max(1, R // (8 * threads))):
                    values[index] = vals
                    phases[index] = phs
                    steps[index] = mstep
                    drifts[index] = drift
        new_rows, new_warnings = _reduce_ensemble(cfg, regime, eps, values,
                                                  phases, steps)
        rows.extend(new_rows)
        warnings.extend(new_warnings)
    report = Report(
        schema_version=SCHEMA_VERSION,
        tool_version=__version__,
        experiment_id=cfg.experiment_id,
        config_hash=config_hash(cfg),
        config=_config_dict(cfg),
        rows=rows,
        runtime={"elapsed_s": time.time() - started, "threads": threads,
                 "dt": {repr(k): v for k, v in dts.items()},
                 "warnings": warnings},
    )
    return report


def _reduce_ensemble(cfg: ExperimentConfig, regime: Regime, eps: float,
                     values: np.ndarray, phases: np.ndarray,
                     max_steps: np.ndarray):
    """Fixed-order reduction of one (eps) ensemble into report rows.

    Phase statistics use the per-step accumulated winding; realizations whose
    largest single-step increment reaches pi/2 (aliasing guard) are excluded
    from the phase estimates and reported as warnings.
    """
    rows = []
    warnings = []
    out_of_theory = regime.label is RegimeLabel.OUT_OF_THEORY
    ok = max_steps < 0.5 * math.pi
    n_bad = int(np.sum(~ok))
    if n_bad:
        warnings.append(
            f"eps={eps}: {n_bad}/{len(ok)} realizations excluded from phase "
            "statistics (single-step increment reached pi/2)")
    for j, xi in enumerate(cfg.probes):
        phi0 = cfg.packet.fourier(xi)
        theta = phases[ok, :, j] if not out_of_theory else None
        for it, t in enumerate(cfg.times):
            samples = values[:, it, j]
            pred = None
            if not out_of_theory:
                pred = build_prediction(cfg.medium, regime, float(t), xi, phi0)
            phase_var = None
            ks = None
            if theta is not None and theta.shape[0] > 1:
                phase_var = float(theta[:, it].var(ddof=1))
            if (pred is not None and pred.phase_variance
                    and theta is not None and theta.shape[0] >= 100):
                ks = normality_test(theta[:, it], pred.phase_variance)
            for est in estimate_moments(samples):
                m, n = est.pair
                pm = None
                if pred is not None:
                    pm = pred.predicted_moments.get((m, n))
                rows.append({
                    "experiment_id": cfg.experiment_id,
                    "eps": float(eps),
                    "alpha": float(cfg.alpha),
                    "regime": regime.label.value,
                    "t": float(t),
                    "xi": _squeeze_xi(xi),
                    "M": m, "N": n,
                    "re_mean": est.mean.real,
                    "im_mean": est.mean.imag,
                    "stderr": est.stderr,
                    "n_samples": est.n,
                    "re_pred": None if pm is None else pm.real,
                    "im_pred": None if pm is None else pm.imag,
                    "phase_var": phase_var,
                    "phase_var_pred":
                        None if pred is None else pred.phase_variance,
                    "ks_stat": None if ks is None else ks.statistic,
                    "ks_pass": None if ks is None else ks.passed,
                })
    return rows, warnings


def emit(report: Report, out_dir) -> dict:
    """Write report.csv and report.json into out_dir (idempotent overwrite)."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {"csv": os.path.join(out_dir, "report.csv"),
             "json": os.path.join(out_dir, "report.json")}
    try:
        with open(paths["csv"], "w", newline="") as fh:
            fh.write(report.csv_text())
        with open(paths["json"], "w") as fh:
            fh.write(report.to_json())
    except OSError as exc:
        raise OSError(f"cannot write report into {out_dir}: {exc}") from exc
    return paths


def load_report(path) -> Report:
    with open(path) as fh:
        body = json.load(fh)
    if body.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(
            f"report schema {body.get('schema_version')!r} does not match "
            f"expected {SCHEMA_VERSION!r}")
    return Report(schema_version=body["schema_version"],
                  tool_version=body["tool_version"],
                  experiment_id=body["experiment_id"],
                  config_hash=body["config_hash"],
                  config=body["config"], rows=body["rows"],
                  runtime=body.get("runtime", {}))
