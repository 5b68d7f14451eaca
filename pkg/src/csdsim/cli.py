"""Command-line entry point: ``csdsim <subcommand> [--config FILE] [overrides]``.

Every run writes a resolved ``config.json`` plus CSV and JSON outputs into an
output directory (``--out``, else ``$CSDSIM_OUTPUT_ROOT/<sub>-<hash>``).
Failures print a JSON error record to stderr and exit with status 2;
``check-exponents`` exits 1 when any tuple is inadmissible.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from . import admissibility as adm
from .data import make_initial_data
from .fields import TorusGrid
from .integrator import BlowUpError, SolverConfig, fitted_order, integrate, manufactured_errors
from .io import config_hash, read_trajectory, write_csv, write_json, write_trajectory
from .model import charge, chern_simons_residual, potential_regularity_report, trilinear_l2_ratio
from .spectral import dealias
from .norms import embedding_check, hsb_norm, spacetime_transform, xsb_norm

DEFAULTS = {
    "simulate": {"n": 32, "L": 2 * np.pi, "dt": 1e-3, "T": 0.1, "mass": 0.0, "data": "eigenmode((1,0),+)",
                 "seed": 0, "sign_convention": 1, "stride": 1, "nonlinear": True, "dealias": True},
    "diagnose": {"trajectory": None, "s": 0.5, "eps": 1e-2},
    "norms": {"trajectory": None, "s": 0.0, "b": 0.5, "window": "none"},
    "check-exponents": {"tuples": None},
    "sweep-threshold": {"family": None},
    "convergence": {"n": 16, "T": 1.0, "mass": 1.0, "dts": [4e-3, 2e-3, 1e-3], "sign_convention": 1},
    "ensemble": {"ns": [32, 64], "count": 50, "s": 1 / 3 + 0.05, "amplitude": 1.0, "seed": 0,
                 "sign_convention": 1},
}


class CliError(Exception):
    pass


def _workers() -> int:
    raw = os.environ.get("CSDSIM_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise CliError(f"CSDSIM_WORKERS must be an integer, got {raw!r}") from None


def resolve_config(sub: str, args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS[sub])
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.exists():
            raise CliError(f"config file not found: {path}")
        try:
            loaded = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise CliError(f"config file {path} is not valid JSON: {exc}") from None
        unknown = set(loaded) - set(cfg)
        if unknown:
            raise CliError(f"unknown config keys for {sub}: {sorted(unknown)}")
        cfg.update(loaded)
    for key in cfg:
        val = getattr(args, key.replace("-", "_"), None)
        if val is not None:
            cfg[key] = val
    return cfg


def _outdir(sub: str, cfg: dict, args) -> Path:
    if args.out:
        return Path(args.out)
    root = Path(os.environ.get("CSDSIM_OUTPUT_ROOT", "csdsim-out"))
    return root / f"{sub}-{config_hash({'subcommand': sub, **cfg})}"


def _provenance() -> dict:
    return {"version": __version__, "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())}


def _require_file(path, what):
    if not path:
        raise CliError(f"--{what} is required")
    if not Path(path).exists():
        raise CliError(f"{what} file not found: {path}")


# ---------------------------------------------------------------------------
# subcommands; each returns (exit status, summary record)


def cmd_simulate(cfg, out: Path):
    grid = TorusGrid(int(cfg["n"]), float(cfg["L"]))
    psi0 = make_initial_data(cfg["data"], grid, int(cfg["seed"]))
    if cfg["dealias"]:
        psi0 = dealias(psi0)
    sc = SolverConfig(n=grid.n, L=grid.L, dt=float(cfg["dt"]), T=float(cfg["T"]), mass=float(cfg["mass"]),
                      dealias=bool(cfg["dealias"]), nonlinear=bool(cfg["nonlinear"]),
                      sign_convention=int(cfg["sign_convention"]), stride=int(cfg["stride"]))
    traj = integrate(sc, psi0)
    q = charge(traj)
    write_trajectory(out / "trajectory.csdtraj", traj, cfg, seed=int(cfg["seed"]))
    write_csv(out / "charge.csv", [{"t": float(t), "charge": float(c)} for t, c in zip(traj.times, q)])
    drift = float(np.max(np.abs(q - q[0])) / q[0]) if q[0] > 0 else float(np.max(np.abs(q)))
    return 0, {"frames": len(traj), "charge_initial": float(q[0]), "charge_drift": drift}


def cmd_diagnose(cfg, out: Path):
    _require_file(cfg["trajectory"], "trajectory")
    traj, header = read_trajectory(cfg["trajectory"])
    q = charge(traj)
    rows = []
    if len(traj) >= 5:
        r0, r1, r2 = chern_simons_residual(traj)
        rows += [{"quantity": f"cs_residual_{mu}", "value": r} for mu, r in enumerate((r0, r1, r2))]
    last = traj.frame(len(traj) - 1)
    if float(np.max(np.abs(last.physical))) > 0:
        reg = potential_regularity_report(last, float(cfg["s"]), float(cfg["eps"]))
        rows += [
            {"quantity": "potential_hdot_2s", "value": reg.a_hdot_2s},
            {"quantity": "potential_hdot_eps", "value": reg.a_hdot_eps},
            {"quantity": "psi_hs_squared", "value": reg.psi_hs_sq},
        ]
    rows += [{"quantity": "charge_initial", "value": float(q[0])},
             {"quantity": "charge_max_abs_change", "value": float(np.max(np.abs(q - q[0])))}]
    write_csv(out / "diagnostics.csv", rows)
    write_csv(out / "charge.csv", [{"t": float(t), "charge": float(c)} for t, c in zip(traj.times, q)])
    return 0, {"source_config_hash": header["config_hash"], **{r["quantity"]: r["value"] for r in rows}}


def cmd_norms(cfg, out: Path):
    _require_file(cfg["trajectory"], "trajectory")
    traj, header = read_trajectory(cfg["trajectory"])
    s, b = float(cfg["s"]), float(cfg["b"])
    spec = spacetime_transform(traj, cfg["window"])
    rec = {
        "s": s, "b": b, "window": spec.window,
        "l2": spec.l2(),
        "xsb_plus": xsb_norm(spec, s, b, 1),
        "xsb_minus": xsb_norm(spec, s, b, -1),
        "hsb": hsb_norm(spec, s, b),
    }
    if b >= 0 and spec.window == "none":
        rec["embedding_slack"] = embedding_check(traj, s, b).slack
    write_csv(out / "norms.csv", [rec])
    return 0, {"source_config_hash": header["config_hash"], **rec}


def cmd_check_exponents(cfg, out: Path):
    if cfg["tuples"]:
        _require_file(cfg["tuples"], "tuples")
        with open(cfg["tuples"]) as fh:
            tuples = adm.read_tuples(fh)
        labels = [adm.format_tuple(t) for t in tuples]
    else:
        cases = adm.verify_corpus(raise_on_failure=False)
        tuples = [c.report.tuple for c in cases]
        labels = [f"{c.entry} s={c.s}" for c in cases]
    rows, records = [], []
    for label, t in zip(labels, tuples):
        rep = adm.evaluate_conditions(t)
        records.append({"tuple": adm.format_tuple(t), "label": label, "admissible": rep.admissible,
                        "violated": rep.violated, "conditions": rep.records()})
        for r in rep.records():
            rows.append({"tuple": label, **r})
    write_csv(out / "conditions.csv", rows)
    write_json(out / "conditions.json", records)
    bad = [r["label"] for r in records if not r["admissible"]]
    return (1 if bad else 0), {"tuples": len(records), "inadmissible": bad}


def cmd_sweep_threshold(cfg, out: Path):
    names = [cfg["family"]] if cfg["family"] else [e.name for e in adm.CORPUS]
    rows = []
    for name in names:
        entry = adm.corpus_entry(name)
        r = adm.threshold_sweep(entry.family)
        row = {
            "family": name,
            "empty": r.empty,
            "infimum": None if r.infimum is None else str(r.infimum),
            "infimum_attained": r.infimum_attained,
            "supremum": None if r.supremum is None else str(r.supremum),
            "extended_infimum": None if r.extended_infimum is None else str(r.extended_infimum),
            "binding": "; ".join(r.binding),
            "refined_binding": "; ".join(r.refined_binding),
            "bisection": None,
        }
        if r.infimum is not None and not r.empty:
            row["bisection"] = adm.bisect_threshold(entry.family, r)
        rows.append(row)
    write_csv(out / "thresholds.csv", rows)
    return 0, {"families": rows}


def cmd_convergence(cfg, out: Path):
    dts = [float(d) for d in cfg["dts"]]
    errs = manufactured_errors(dts, n=int(cfg["n"]), T=float(cfg["T"]), mass=float(cfg["mass"]),
                               sign_convention=int(cfg["sign_convention"]))
    p = fitted_order(dts, errs)
    write_csv(out / "convergence.csv", [{"dt": d, "error": e} for d, e in zip(dts, errs)])
    return 0, {"order": p, "errors": errs, "dts": dts}


def _ensemble_member(job):
    n, seed, s, amp, sign = job
    psi = make_initial_data(f"random-hs({s!r}, {amp!r})", TorusGrid(n), seed)
    return {"n": n, "seed": seed, "ratio": trilinear_l2_ratio(psi, sign)}


def run_ensemble(ns, count, s, amplitude, seed, sign_convention=1, workers=1) -> list[dict]:
    jobs = [(int(n), int(seed) + i, float(s), float(amplitude), int(sign_convention))
            for n in ns for i in range(int(count))]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(_ensemble_member, jobs))
    return [_ensemble_member(j) for j in jobs]


def cmd_ensemble(cfg, out: Path):
    rows = run_ensemble(cfg["ns"], cfg["count"], cfg["s"], cfg["amplitude"], cfg["seed"],
                        cfg["sign_convention"], _workers())
    write_csv(out / "ensemble.csv", rows)
    maxima = {int(n): max(r["ratio"] for r in rows if r["n"] == int(n)) for n in cfg["ns"]}
    ns = sorted(maxima)
    growth = maxima[ns[-1]] / maxima[ns[0]] if len(ns) > 1 else 1.0
    return 0, {"max_ratio": {str(k): v for k, v in maxima.items()}, "growth": growth}


COMMANDS = {
    "simulate": cmd_simulate,
    "diagnose": cmd_diagnose,
    "norms": cmd_norms,
    "check-exponents": cmd_check_exponents,
    "sweep-threshold": cmd_sweep_threshold,
    "convergence": cmd_convergence,
    "ensemble": cmd_ensemble,
}


def _floats(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text):
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="csdsim", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"csdsim {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON file of parameters; flags override it")
        sp.add_argument("--out", help="output directory")
        return sp

    sp = common(sub.add_parser("simulate", help="integrate from generated initial data"))
    sp.add_argument("--n", type=int)
    sp.add_argument("--L", type=float)
    sp.add_argument("--dt", type=float)
    sp.add_argument("--T", type=float)
    sp.add_argument("--mass", type=float)
    sp.add_argument("--data", help="e.g. 'random-hs(0.4, 0.1)' or 'eigenmode((1,0),+)'")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--sign-convention", type=int, choices=(1, -1))
    sp.add_argument("--stride", type=int)
    sp.add_argument("--nonlinear", action=argparse.BooleanOptionalAction, default=None)
    sp.add_argument("--dealias", action=argparse.BooleanOptionalAction, default=None)

    sp = common(sub.add_parser("diagnose", help="residuals, charge and potential norms of a trajectory"))
    sp.add_argument("--trajectory")
    sp.add_argument("--s", type=float)
    sp.add_argument("--eps", type=float)

    sp = common(sub.add_parser("norms", help="space-time norm estimators of a trajectory"))
    sp.add_argument("--trajectory")
    sp.add_argument("--s", type=float)
    sp.add_argument("--b", type=float)
    sp.add_argument("--window", choices=("none", "smooth"))

    sp = common(sub.add_parser("check-exponents", help="evaluate exponent tuples (default: built-in corpus)"))
    sp.add_argument("--tuples", help="tuple file: s0 s1 s2 b0 b1 b2 per line")

    sp = common(sub.add_parser("sweep-threshold", help="exact threshold of corpus families"))
    sp.add_argument("--family", choices=[e.name for e in adm.CORPUS])

    sp = common(sub.add_parser("convergence", help="manufactured-solution order study"))
    sp.add_argument("--n", type=int)
    sp.add_argument("--T", type=float)
    sp.add_argument("--mass", type=float)
    sp.add_argument("--dts", type=_floats, help="comma separated")
    sp.add_argument("--sign-convention", type=int, choices=(1, -1))

    sp = common(sub.add_parser("ensemble", help="trilinear ratio over seeded random-hs data"))
    sp.add_argument("--ns", type=_ints, help="comma separated grid sizes")
    sp.add_argument("--count", type=int)
    sp.add_argument("--s", type=float)
    sp.add_argument("--amplitude", type=float)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--sign-convention", type=int, choices=(1, -1))
    return p


def _error(kind: str, message: str, out: Path | None):
    rec = {"status": "error", "kind": kind, "message": message}
    print(json.dumps(rec), file=sys.stderr)
    if out is not None:
        try:
            write_json(out / "error.json", rec)
        except OSError:
            pass
    return 2


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    sub = args.subcommand
    out = None
    try:
        cfg = resolve_config(sub, args)
        out = _outdir(sub, cfg, args)
        write_json(out / "config.json", {"subcommand": sub, "config": cfg,
                                         "config_hash": config_hash(cfg), "provenance": _provenance()})
        status, summary = COMMANDS[sub](cfg, out)
    except BlowUpError as exc:
        return _error("blow-up", f"{exc}", out)
    except (CliError, ValueError, KeyError, OSError) as exc:
        return _error(type(exc).__name__, str(exc), out)
    record = {"status": "ok" if status == 0 else "fail", "subcommand": sub, "config_hash": config_hash(cfg),
              "summary": summary}
    write_json(out / "result.json", record)
    print(json.dumps(record, default=str))
    return status


if __name__ == "__main__":
    sys.exit(main())
