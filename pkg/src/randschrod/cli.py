"""Command line interface.

Subcommands:
  theory        constants table (kappa, alpha_c, K1, D, D(t,xi) samples) as JSON
  simulate      run the configured Monte Carlo experiment, emit CSV + JSON
  limit-sample  draw limit-law samples (phase | fbm | critical) as CSV
  oracle        per-k series tables and the bound sweep as JSON
  report        re-emit CSV/JSON from a stored JSON report
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from ._version import __version__
from . import constants, harness, limitlaw, wickoracle
from .media import classify_regime, exponents


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", required=True, help="TOML experiment file")
    p.add_argument("--seed", type=int, default=None,
                   help="override the master seed")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--threads", type=int, default=1)


def _load(args) -> harness.ExperimentConfig:
    cfg = harness.load_config(args.config)
    if args.seed is not None:
        import dataclasses
        cfg = dataclasses.replace(cfg, master_seed=args.seed)
    return cfg


def _out_dir(args, cfg) -> str:
    out = args.out or cfg.out_dir or "out"
    os.makedirs(out, exist_ok=True)
    return out


def cmd_theory(args) -> int:
    cfg = _load(args)
    spec = cfg.medium
    ex = exponents(spec)
    regime = classify_regime(spec, cfg.alpha)
    table = {
        "kappa": ex.kappa,
        "alpha_c": ex.alpha_c,
        "a_sing": ex.a_sing,
        "hurst": ex.hurst,
        "K1": constants.k1(spec),
        "D": constants.big_d(spec),
        "alpha": cfg.alpha,
        "regime": regime.label.value,
        "D_txi": [],
    }
    for t in cfg.times:
        if t <= 0:
            continue
        for xi in cfg.probes:
            try:
                val = constants.big_d_txi(spec, float(t), xi)
            except ValueError:
                continue
            table["D_txi"].append({"t": float(t), "xi": float(np.atleast_1d(xi)[0]),
                                   "value": val})
    text = json.dumps(table, indent=1)
    print(text)
    if args.out:
        with open(os.path.join(_out_dir(args, cfg), "theory.json"), "w") as fh:
            fh.write(text)
    return 0


def cmd_simulate(args) -> int:
    cfg = _load(args)
    report = harness.run_experiment(cfg, threads=args.threads, progress=True)
    paths = harness.emit(report, _out_dir(args, cfg))
    print(json.dumps({"experiment_id": report.experiment_id,
                      "rows": len(report.rows), **paths}))
    return 0


def cmd_limit_sample(args) -> int:
    cfg = _load(args)
    spec = cfg.medium
    out = _out_dir(args, cfg)
    seed = cfg.master_seed
    t = args.t
    xi = args.xi if args.xi is not None else (cfg.probes[0] if cfg.probes else 0.0)
    meta = {"schema_version": harness.SCHEMA_VERSION, "kind": args.kind,
            "t": t, "xi": xi, "n": args.n, "seed": seed}
    if args.kind == "phase":
        samples = limitlaw.sample_phase(spec, t, args.n, seed)
        data = np.column_stack([samples, np.zeros_like(samples)])
        meta["variance_pred"] = constants.big_d(spec) * t ** (
            2.0 / exponents(spec).kappa)
    elif args.kind == "fbm":
        ens = limitlaw.sample_fbm(spec, [t], args.n, seed)
        vals = ens.values[:, 0]
        data = np.column_stack([vals, np.zeros_like(vals)])
        meta["variance_pred"] = constants.big_d(spec) * t ** (
            2.0 / exponents(spec).kappa)
    elif args.kind == "critical":
        samples = limitlaw.critical_ensemble(spec, cfg.packet, xi, t,
                                             args.n, seed)
        data = np.column_stack([samples.real, samples.imag])
        meta["mean_pred_re"] = (cfg.packet.fourier(xi)
                                * np.exp(-0.5 * constants.big_d(spec)
                                         * t ** (2.0 / exponents(spec).kappa))).real
    else:
        raise ValueError(args.kind)
    path = os.path.join(out, "samples.csv")
    with open(path, "w") as fh:
        fh.write("sample_index,re,im\n")
        for i, (re, im) in enumerate(data):
            fh.write(f"{i},{float(re)!r},{float(im)!r}\n")
    with open(os.path.join(out, "samples_meta.json"), "w") as fh:
        json.dump(meta, fh, indent=1)
    print(json.dumps({"samples": path, "n": args.n}))
    return 0


def cmd_oracle(args) -> int:
    cfg = _load(args)
    spec = cfg.medium
    t = args.t
    out = {"t": t, "terms": [], "bound_sweep": [], "finite_eps_sweep": []}
    mode = "limit-nophase"
    psum = 0.0
    for K in range(args.kmax + 1):
        val = wickoracle.moment_partial_sum(spec, 1, 0, t, K, mode)
        terms = [tm for tm in wickoracle.series_terms(spec, 1, 0, t, K, mode)
                 if tm.k == K]
        out["terms"].append({
            "k": K,
            "term": sum(tm.value for tm in terms).real,
            "partial_sum": val.real,
            "pairings": len(wickoracle.pairings(2 * K)) if K else 0,
        })
        psum = val.real
    out["resummed"] = wickoracle.resummed_moment(spec, 1, 0, t, mode).real
    out["predicted"] = float(np.exp(-0.5 * constants.big_d(spec)
                                    * t ** (2.0 / exponents(spec).kappa)))
    for eps in args.eps_sweep:
        out["bound_sweep"].append({
            "eps": eps,
            "value": wickoracle.uniform_bound_integral(spec, eps, t),
            "bound": constants.big_d(spec) * t ** (2.0 / exponents(spec).kappa),
        })
        term = wickoracle.finite_eps_first_term(spec, eps, cfg.alpha, t,
                                                cfg.probes[0], 1.0)
        out["finite_eps_sweep"].append({
            "eps": eps, "re": term.real, "im": term.imag,
            "limit": -0.5 * constants.big_d(spec)
                     * t ** (2.0 / exponents(spec).kappa),
        })
    text = json.dumps(out, indent=1)
    print(text)
    if args.out:
        with open(os.path.join(_out_dir(args, cfg), "oracle.json"), "w") as fh:
            fh.write(text)
    return 0


def cmd_report(args) -> int:
    report = harness.load_report(args.input)
    paths = harness.emit(report, args.out or "out")
    print(json.dumps({"experiment_id": report.experiment_id,
                      "rows": len(report.rows), **paths}))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="randschrod",
        description="Monte Carlo laboratory for the weakly random "
                    "Schrodinger equation in slowly decorrelating media")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("theory", help="print the constants table")
    _add_common(p)
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("simulate", help="run the Monte Carlo experiment")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("limit-sample", help="draw limit-law samples")
    _add_common(p)
    p.add_argument("--kind", choices=("phase", "fbm", "critical"),
                   default="phase")
    p.add_argument("-n", type=int, default=10000)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--xi", type=float, default=None)
    p.set_defaults(func=cmd_limit_sample)

    p = sub.add_parser("oracle", help="series tables and bound sweeps")
    _add_common(p)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--kmax", type=int, default=4)
    p.add_argument("--eps-sweep", type=float, nargs="+",
                   default=[0.5, 0.25, 0.125])
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("report", help="re-emit a stored JSON report")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_report)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
