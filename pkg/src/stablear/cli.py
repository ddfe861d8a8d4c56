"""Command-line interface: simulate | fit | bootstrap | diagnose | stable.

Every JSON artifact embeds a run manifest (subcommand, flags, seed, library
version, input checksum) sufficient to reproduce it bit-identically.  Exit
codes: 0 success, 1 user error (flags, files), 2 numerical failure.  Errors
go to stderr as "error[<code>]: message".
"""
from __future__ import annotations

import argparse
import hashlib
import os
import sys

import numpy as np

from . import __version__, ar_model, diagnostics, inference, optimizer, stable_dist
from .exceptions import (DomainError, InputError, NumericalError,
                         ParameterError)
from .likelihood import ParamVector

__all__ = ["main", "parse_and_dispatch", "read_series", "write_json",
           "dumps_json", "RunManifest"]


def _fmt(x: float) -> str:
    """17 significant digits: enough to round-trip any double exactly."""
    return format(float(x), ".17g")


def dumps_json(obj, indent: int = 0) -> str:
    """Minimal JSON emitter with fixed float formatting (deterministic)."""
    pad = " " * indent
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, str):
        out = obj.replace("\\", "\\\\").replace('"', '\\"')
        out = out.replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t")
        return f'"{out}"'
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if x != x or x in (float("inf"), float("-inf")):
            return "null"
        return _fmt(x)
    if isinstance(obj, (list, tuple, np.ndarray)):
        items = [dumps_json(v, indent) for v in obj]
        return "[" + ", ".join(items) + "]"
    if isinstance(obj, dict):
        items = [f'{dumps_json(str(k))}: {dumps_json(v, indent)}'
                 for k, v in obj.items()]
        return "{" + ", ".join(items) + "}"
    raise InputError(f"cannot serialize {type(obj).__name__}")


class RunManifest:
    """Reproducibility metadata embedded in every JSON artifact."""

    def __init__(self, subcommand: str, flags: dict, seed,
                 input_checksum: str | None):
        self.subcommand = subcommand
        self.flags = {k: flags[k] for k in sorted(flags)}
        self.seed = seed
        self.version = __version__
        self.input_checksum = input_checksum
        # wall-clock stamps would break byte-identical reruns; honor the
        # reproducible-builds convention instead
        sde = os.environ.get("SOURCE_DATE_EPOCH")
        self.timestamp = int(sde) if sde and sde.isdigit() else None

    def to_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "flags": self.flags,
            "seed": self.seed,
            "version": self.version,
            "input_checksum": self.input_checksum,
            "timestamp": self.timestamp,
        }


def _checksum(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def read_series(path: str) -> np.ndarray:
    """CSV series: one numeric value per line, optional single header line."""
    try:
        with open(path, "r", newline="") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read series file {path!r}: {exc}") from exc
    values = []
    start = 0
    if lines:
        try:
            float(lines[0].strip())
        except ValueError:
            start = 1
    for i in range(start, len(lines)):
        text = lines[i].strip()
        if not text and i == len(lines) - 1:
            break
        try:
            v = float(text)
        except ValueError:
            raise InputError(f"{path}: malformed value at line {i + 1}: {text!r}")
        if not np.isfinite(v):
            raise InputError(f"{path}: non-finite value at line {i + 1}")
        values.append(v)
    if not values:
        raise InputError(f"{path}: no data values found")
    return np.array(values)


def write_series(values, path: str):
    with open(path, "w", newline="") as fh:
        for v in values:
            fh.write(_fmt(v) + "\n")


def write_json(result: dict, path: str):
    with open(path, "w", newline="") as fh:
        fh.write(dumps_json(result) + "\n")


class _Parser(argparse.ArgumentParser):
    def error(self, message):           # exit 1 on bad flags, not argparse's 2
        raise InputError(message)


def _tau_from_args(args) -> stable_dist.StableParams:
    return stable_dist.StableParams(args.alpha, args.beta, args.sigma, args.mu)


def _add_tau_flags(p):
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=0.0)


def _build_parser() -> _Parser:
    ap = _Parser(prog="stablear", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    sim = sub.add_parser("simulate", help="simulate a stable AR series")
    sim.add_argument("--p", type=int, required=True)
    sim.add_argument("--s", type=int, required=True)
    sim.add_argument("--theta", type=str, required=True,
                     help="comma-separated coefficients, causal then noncausal")
    _add_tau_flags(sim)
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--burn", type=int, default=500)
    sim.add_argument("--seed", type=int, required=True)
    sim.add_argument("--out", type=str, required=True)

    fit = sub.add_parser("fit", help="maximum likelihood fit")
    fit.add_argument("--input", type=str, required=True)
    fit.add_argument("--p", type=int, required=True)
    fit.add_argument("--s", type=str, default="auto",
                     help='"auto" scans 0..p; an integer fixes s')
    fit.add_argument("--starts", type=int, default=None)
    fit.add_argument("--shortlist", type=int, default=None)
    fit.add_argument("--seed", type=int, default=0)
    fit.add_argument("--profile", choices=("full", "test"), default="full")
    fit.add_argument("--out", type=str, required=True)

    bs = sub.add_parser("bootstrap", help="m-out-of-n residual bootstrap")
    bs.add_argument("--input", type=str, required=True)
    bs.add_argument("--fit", type=str, required=True)
    bs.add_argument("--m", type=int, required=True)
    bs.add_argument("--B", type=int, required=True)
    bs.add_argument("--seed", type=int, default=0)
    bs.add_argument("--level", type=float, default=0.95)
    bs.add_argument("--out", type=str, required=True)

    dg = sub.add_parser("diagnose", help="ACF/PACF, dependence bounds, qq data")
    dg.add_argument("--input", type=str, required=True)
    dg.add_argument("--fit", type=str, required=True)
    dg.add_argument("--max-lag", type=int, default=20)
    dg.add_argument("--M", type=int, default=10_000)
    dg.add_argument("--seed", type=int, default=0)
    dg.add_argument("--out", type=str, required=True)
    dg.add_argument("--plot-dir", type=str, default=None,
                    help="directory for CSV plot data (default: out's directory)")

    st = sub.add_parser("stable", help="stable distribution utilities")
    stsub = st.add_subparsers(dest="stable_cmd", required=True)
    for name in ("pdf", "cdf"):
        q = stsub.add_parser(name)
        _add_tau_flags(q)
        q.add_argument("--z", type=float, required=True)
    q = stsub.add_parser("quantile")
    _add_tau_flags(q)
    q.add_argument("--q", type=float, required=True)
    q = stsub.add_parser("sample")
    _add_tau_flags(q)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--seed", type=int, required=True)
    q.add_argument("--out", type=str, default=None,
                   help="CSV path (default: stdout, one value per line)")
    return ap


def _flags_dict(args, skip=("cmd", "stable_cmd")) -> dict:
    return {k: v for k, v in vars(args).items() if k not in skip}


def _load_fit(path: str, x: np.ndarray) -> optimizer.FitResult:
    import json
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read fit file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc
    try:
        tau = stable_dist.StableParams(**doc["tau"])
        theta = np.array(doc["theta"], dtype=float)
        s = int(doc["s"])
        p = int(doc["p"])
        eta = ParamVector(theta=theta, tau=tau, s=s)
        res = ar_model.residuals(x, theta, p - s, s)
        return optimizer.FitResult(
            eta_hat=eta, s_hat=s, phi_hat=np.array(doc["phi"], dtype=float),
            loglik=float(doc["loglik"]),
            se_tau=np.array(doc["se_tau"], dtype=float), residuals=res,
            trace=[], seed=doc.get("seed"), n=len(x), p=p)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: malformed fit file ({exc})") from exc


def _fit_to_dict(f: optimizer.FitResult, manifest: RunManifest) -> dict:
    t = f.tau_hat
    return {
        "p": f.p,
        "s": f.s_hat,
        "theta": list(f.theta_hat),
        "phi": list(f.phi_hat),
        "tau": {"alpha": t.alpha, "beta": t.beta, "sigma": t.sigma, "mu": t.mu},
        "loglik": f.loglik,
        "se_tau": list(f.se_tau),
        "seed": f.seed,
        "trace": f.trace,
        "manifest": manifest.to_dict(),
    }


def _cmd_simulate(args) -> int:
    theta = np.array([float(v) for v in args.theta.split(",") if v.strip() != ""])
    if len(theta) != args.p:
        raise InputError(f"--theta has {len(theta)} values, expected p={args.p}")
    r = args.p - args.s
    if r < 0:
        raise InputError("--s cannot exceed --p")
    tau = _tau_from_args(args)
    rng = np.random.default_rng(args.seed)
    x = ar_model.simulate_series(theta, r, args.s, tau, args.n,
                                 burn=args.burn, rng=rng)
    write_series(x, args.out)
    manifest = RunManifest("simulate", _flags_dict(args), args.seed, None)
    sidecar = {
        "theta": list(theta), "r": r, "s": args.s,
        "tau": {"alpha": tau.alpha, "beta": tau.beta, "sigma": tau.sigma,
                "mu": tau.mu},
        "n": args.n, "burn": args.burn, "seed": args.seed,
        "manifest": manifest.to_dict(),
    }
    write_json(sidecar, args.out + ".json")
    return 0


def _cmd_fit(args) -> int:
    x = read_series(args.input)
    if args.s == "auto":
        s_range = None
    else:
        try:
            s_range = [int(args.s)]
        except ValueError:
            raise InputError(f'--s must be "auto" or an integer, got {args.s!r}')
    f = optimizer.fit(x, args.p, starts_per_s=args.starts,
                      shortlist=args.shortlist, s_range=s_range,
                      seed=args.seed, profile=args.profile)
    manifest = RunManifest("fit", _flags_dict(args), args.seed,
                           _checksum(args.input))
    write_json(_fit_to_dict(f, manifest), args.out)
    return 0


def _cmd_bootstrap(args) -> int:
    x = read_series(args.input)
    f = _load_fit(args.fit, x)
    cfg = inference.BootstrapConfig(m=args.m, B=args.B, seed=args.seed)
    boot = inference.bootstrap_run(x, f, cfg)
    theta_ci, phi_ci = inference.bootstrap_ci(boot, len(x), args.level)
    manifest = RunManifest("bootstrap", _flags_dict(args), args.seed,
                           _checksum(args.input))
    doc = {
        "m": boot.m,
        "B": args.B,
        "alpha_hat": boot.alpha_hat,
        "converged": [bool(c) for c in boot.converged],
        "theta_devs": [list(row) for row in boot.theta_devs],
        "phi_devs": [list(row) for row in boot.phi_devs],
        "level": args.level,
        "theta_ci": [list(row) for row in theta_ci],
        "phi_ci": [list(row) for row in phi_ci],
        "manifest": manifest.to_dict(),
    }
    write_json(doc, args.out)
    return 0


def _cmd_diagnose(args) -> int:
    x = read_series(args.input)
    f = _load_fit(args.fit, x)
    rep = diagnostics.build_report(x, f.residuals, f.tau_hat,
                                   max_lag=args.max_lag, M=args.M,
                                   seed=args.seed)
    manifest = RunManifest("diagnose", _flags_dict(args), args.seed,
                           _checksum(args.input))
    doc = rep.to_dict()
    doc["manifest"] = manifest.to_dict()
    write_json(doc, args.out)
    plot_dir = args.plot_dir or (os.path.dirname(os.path.abspath(args.out)))
    os.makedirs(plot_dir, exist_ok=True)
    lags = np.arange(rep.max_lag + 1)

    def panel(name, header, cols):
        path = os.path.join(plot_dir, name)
        with open(path, "w", newline="") as fh:
            fh.write(header + "\n")
            for row in zip(*cols):
                fh.write(",".join(_fmt(v) for v in row) + "\n")

    panel("acf.csv", "lag,acf", [lags, rep.acf])
    panel("pacf.csv", "lag,pacf", [lags, rep.pacf])
    panel("absacf.csv", "lag,acf,lo,hi",
          [lags[1:], rep.abs_acf, rep.abs_lo, rep.abs_hi])
    panel("sqacf.csv", "lag,acf,lo,hi",
          [lags[1:], rep.sq_acf, rep.sq_lo, rep.sq_hi])
    panel("qq.csv", "theoretical,empirical", [rep.qq[:, 0], rep.qq[:, 1]])
    return 0


def _cmd_stable(args) -> int:
    tau = _tau_from_args(args)
    if args.stable_cmd == "pdf":
        print(format(stable_dist.pdf(args.z, tau), ".10g"))
    elif args.stable_cmd == "cdf":
        print(format(stable_dist.cdf(args.z, tau), ".10g"))
    elif args.stable_cmd == "quantile":
        print(format(stable_dist.quantile(args.q, tau), ".10g"))
    elif args.stable_cmd == "sample":
        rng = np.random.default_rng(args.seed)
        vals = stable_dist.sample(args.n, tau, rng)
        if args.out:
            write_series(vals, args.out)
        else:
            for v in vals:
                print(_fmt(v))
    return 0


def parse_and_dispatch(argv) -> int:
    """Run one subcommand; returns the process exit code."""
    try:
        args = _build_parser().parse_args(argv)
        handler = {
            "simulate": _cmd_simulate,
            "fit": _cmd_fit,
            "bootstrap": _cmd_bootstrap,
            "diagnose": _cmd_diagnose,
            "stable": _cmd_stable,
        }[args.cmd]
        return handler(args)
    except (InputError,) as exc:
        print(f"error[input]: {exc}", file=sys.stderr)
        return 1
    except (ParameterError, DomainError) as exc:
        print(f"error[domain]: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"error[numerical]: {exc}", file=sys.stderr)
        return 2


def main():
    raise SystemExit(parse_and_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
