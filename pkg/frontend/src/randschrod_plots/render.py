"""Figure builders for the four report views.

moment-decay   |E psi| vs eps with the predicted level, per (t, xi), (1,0) rows
phase-hist     histogram of phase samples with the predicted normal density
regime-panel   empirical vs predicted moments per regime row group
oracle-sweep   term-wise bound sweep and finite-eps first-term convergence

Inputs are the harness CSV/JSON files; rendering is deterministic (fixed
layout, fixed PNG metadata, no timestamps).
"""
from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

SCHEMA_VERSION = "1"

CSV_HEADER = ("experiment_id,eps,alpha,regime,t,xi,M,N,re_mean,im_mean,"
              "stderr,n_samples,re_pred,im_pred,phase_var,phase_var_pred,"
              "ks_stat,ks_pass")

KINDS = ("moment-decay", "phase-hist", "regime-panel", "oracle-sweep")

_SAVE_KW = dict(dpi=110, metadata={"Software": "randschrod-plots"})


class SchemaError(ValueError):
    pass


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    in_dir: str
    out_dir: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}")


def _read_report_csv(path):
    with open(path, newline="") as fh:
        first = fh.readline().rstrip("\n")
        if first != CSV_HEADER:
            raise SchemaError(
                f"report header does not match schema {SCHEMA_VERSION}: "
                f"{first[:60]}...")
        rows = list(csv.DictReader(fh, fieldnames=CSV_HEADER.split(",")))
    if not rows:
        raise SchemaError("no data rows in report.csv")
    out = []
    for r in rows:
        row = dict(r)
        for key in ("eps", "alpha", "t", "xi", "re_mean", "im_mean", "stderr",
                    "re_pred", "im_pred", "phase_var", "phase_var_pred",
                    "ks_stat"):
            row[key] = float(r[key]) if r[key] not in ("", None) else None
        for key in ("M", "N", "n_samples"):
            row[key] = int(r[key])
        row["ks_pass"] = {"true": True, "false": False, "": None}[r["ks_pass"]]
        out.append(row)
    return out


def _read_samples(in_dir):
    meta_path = os.path.join(in_dir, "samples_meta.json")
    try:
        with open(meta_path) as fh:
            meta = json.load(fh)
    except FileNotFoundError as exc:
        raise SchemaError(f"missing {meta_path}") from exc
    if meta.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(
            f"samples schema {meta.get('schema_version')!r} does not match "
            f"{SCHEMA_VERSION!r}")
    path = os.path.join(in_dir, "samples.csv")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["sample_index", "re", "im"]:
            raise SchemaError("samples.csv columns must be sample_index,re,im")
        re_vals, im_vals = [], []
        for r in reader:
            re_vals.append(float(r["re"]))
            im_vals.append(float(r["im"]))
    if not re_vals:
        raise SchemaError("no data rows in samples.csv")
    return meta, np.asarray(re_vals), np.asarray(im_vals)


def _figure(n_rows=1, n_cols=1, height=3.2):
    fig, axes = plt.subplots(n_rows, n_cols,
                             figsize=(4.6 * n_cols, height * n_rows),
                             squeeze=False)
    return fig, axes


def _moment_decay(spec: FigureSpec) -> str:
    rows = _read_report_csv(os.path.join(spec.in_dir, "report.csv"))
    rows = [r for r in rows if (r["M"], r["N"]) == (1, 0)]
    if not rows:
        raise SchemaError("no (1,0) rows to plot")
    groups = sorted({(r["t"], r["xi"]) for r in rows})
    fig, axes = _figure(1, 1, height=3.6)
    ax = axes[0][0]
    for t, xi in groups:
        sel = sorted((r for r in rows if (r["t"], r["xi"]) == (t, xi)),
                     key=lambda r: r["eps"])
        eps = [r["eps"] for r in sel]
        mag = [math.hypot(r["re_mean"], r["im_mean"]) for r in sel]
        err = [r["stderr"] for r in sel]
        line = ax.errorbar(eps, mag, yerr=err, marker="o", capsize=3,
                           label=f"t={t:g}, xi={xi:g}")
        preds = [r for r in sel if r["re_pred"] is not None]
        if preds:
            level = math.hypot(preds[-1]["re_pred"], preds[-1]["im_pred"])
            ax.axhline(level, color=line.lines[0].get_color(), ls="--",
                       lw=1.0)
    ax.set_xscale("log")
    ax.set_xlabel("eps")
    ax.set_ylabel("|mean psi|")
    ax.set_title("first-moment decay vs prediction (dashed)")
    ax.legend(fontsize=8)
    out = os.path.join(spec.out_dir, "moment_decay.png")
    fig.tight_layout()
    fig.savefig(out, **_SAVE_KW)
    plt.close(fig)
    return out


def _phase_hist(spec: FigureSpec) -> str:
    meta, re_vals, _ = _read_samples(spec.in_dir)
    fig, axes = _figure(1, 1, height=3.6)
    ax = axes[0][0]
    ax.hist(re_vals, bins=60, density=True, alpha=0.65, color="#4878d0",
            label=f"samples (n={len(re_vals)})")
    var = meta.get("variance_pred")
    if var:
        xs = np.linspace(re_vals.min(), re_vals.max(), 400)
        ax.plot(xs, np.exp(-xs**2 / (2 * var)) / math.sqrt(2 * math.pi * var),
                "k-", lw=1.5, label=f"N(0, {var:.4f})")
    note = []
    report_path = os.path.join(spec.in_dir, "report.csv")
    if os.path.exists(report_path):
        rows = _read_report_csv(report_path)
        match = [r for r in rows
                 if r["ks_stat"] is not None
                 and r["t"] == meta.get("t") and r["xi"] == meta.get("xi")]
        if match:
            r = match[-1]
            note.append(f"KS={r['ks_stat']:.4f} pass={r['ks_pass']}")
    ax.set_xlabel("phase")
    ax.set_ylabel("density")
    ax.set_title("limit phase vs predicted normal  " + " ".join(note))
    ax.legend(fontsize=8)
    out = os.path.join(spec.out_dir, "phase_hist.png")
    fig.tight_layout()
    fig.savefig(out, **_SAVE_KW)
    plt.close(fig)
    return out


def _regime_panel(spec: FigureSpec) -> str:
    rows = _read_report_csv(os.path.join(spec.in_dir, "report.csv"))
    tmax = max(r["t"] for r in rows)
    rows = [r for r in rows if r["t"] == tmax]
    fig, axes = _figure(1, 2, height=3.4)
    for ax, pair in zip(axes[0], ((1, 0), (1, 1))):
        sel = sorted((r for r in rows if (r["M"], r["N"]) == pair),
                     key=lambda r: (r["xi"], r["eps"]))
        if not sel:
            raise SchemaError(f"no {pair} rows to plot")
        labels = [f"{r['eps']:g}\nxi={r['xi']:g}" for r in sel]
        emp = [math.hypot(r["re_mean"], r["im_mean"]) for r in sel]
        err = [r["stderr"] for r in sel]
        x = np.arange(len(sel))
        ax.errorbar(x, emp, yerr=err, fmt="o", capsize=3, label="empirical")
        have_pred = [i for i, r in enumerate(sel) if r["re_pred"] is not None]
        if have_pred:
            ax.plot([x[i] for i in have_pred],
                    [math.hypot(sel[i]["re_pred"], sel[i]["im_pred"])
                     for i in have_pred],
                    "k_", ms=14, label="predicted")
        ax.set_xticks(x, labels, fontsize=7)
        ax.set_title(f"|moment| (M,N)={pair} at t={tmax:g}  "
                     f"[{sel[0]['regime']}]", fontsize=9)
        ax.legend(fontsize=8)
    out = os.path.join(spec.out_dir, "regime_panel.png")
    fig.tight_layout()
    fig.savefig(out, **_SAVE_KW)
    plt.close(fig)
    return out


def _oracle_sweep(spec: FigureSpec) -> str:
    path = os.path.join(spec.in_dir, "oracle.json")
    try:
        with open(path) as fh:
            data = json.load(fh)
    except FileNotFoundError as exc:
        raise SchemaError(f"missing {path}") from exc
    if not data.get("bound_sweep") and not data.get("finite_eps_sweep"):
        raise SchemaError("oracle.json carries no sweep data")
    fig, axes = _figure(1, 2, height=3.4)
    ax = axes[0][0]
    sweep = sorted(data.get("bound_sweep", []), key=lambda r: -r["eps"])
    if sweep:
        ax.plot([r["eps"] for r in sweep], [r["value"] for r in sweep],
                "o-", label="bound integral")
        ax.axhline(sweep[0]["bound"], color="k", ls="--", lw=1.0,
                   label="D t^(2/kappa)")
        ax.set_xscale("log")
        ax.invert_xaxis()
        ax.set_xlabel("eps")
        ax.legend(fontsize=8)
        ax.set_title("uniform moment bound sweep", fontsize=9)
    ax2 = axes[0][1]
    fsweep = sorted(data.get("finite_eps_sweep", []), key=lambda r: -r["eps"])
    if fsweep:
        ax2.plot([r["eps"] for r in fsweep], [r["re"] for r in fsweep],
                 "s-", label="first-order term")
        ax2.axhline(fsweep[0]["limit"], color="k", ls="--", lw=1.0,
                    label="limit")
        ax2.set_xscale("log")
        ax2.invert_xaxis()
        ax2.set_xlabel("eps")
        ax2.legend(fontsize=8)
        ax2.set_title("finite-eps first term", fontsize=9)
    out = os.path.join(spec.out_dir, "oracle_sweep.png")
    fig.tight_layout()
    fig.savefig(out, **_SAVE_KW)
    plt.close(fig)
    return out


_BUILDERS = {
    "moment-decay": _moment_decay,
    "phase-hist": _phase_hist,
    "regime-panel": _regime_panel,
    "oracle-sweep": _oracle_sweep,
}


def render(spec: FigureSpec) -> str:
    """Render one figure; returns the written image path."""
    os.makedirs(spec.out_dir, exist_ok=True)
    return _BUILDERS[spec.kind](spec)
