"""Command-line driver: ``pweak <command> [flags]``.

Every command writes its artifacts into ``--out`` (default ``.``) through a
temporary file and a rename.  Exit codes: 0 ok, 2 bad configuration,
3 construction failure, 4 an A_p check failed where it was expected to hold,
5 the modulus solver did not converge.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import jsonschema

from .errors import InvalidExponent, PweakError, ZeroAtCenter
from .modulus import CurveFamily, MeasureSpec, modulus_family_grid, modulus_single
from .muckenhoupt import SweepSpec, ap_scan, dyadic_sweep, stage_growth_audit
from .power_arcs import Interval, integrate_log_corrected, integrate_power
from .schemas import validate
from .weak_gradient import LipschitzSpec, np_complement, report_csv, weak_gradient_report
from .weights import ConstructionParams, build, fmt, mc_integral_nd, weight_at

EXIT_OK, EXIT_CONFIG, EXIT_CONSTRUCTION, EXIT_AP, EXIT_SOLVER = 0, 2, 3, 4, 5

DEFAULTS = {
    "alpha": 1.0,
    "stages": 50,
    "window": [0.0, 1.0],
    "p": [3.0],
    "scale_depth": 12,
    "cells": 2048,
    "measure": None,
    "function": None,
    "out": ".",
    "seed": 0,
    "epsilon_rule": "dyadic",
}


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# output helpers


def _finite_or_inf(obj):
    if isinstance(obj, float) and math.isinf(obj):
        return "inf" if obj > 0 else "-inf"
    if isinstance(obj, dict):
        return {k: _finite_or_inf(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite_or_inf(v) for v in obj]
    return obj


def write_atomic(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_json(path: Path, obj, schema: str) -> Path:
    obj = _finite_or_inf(obj)
    validate(obj, schema)
    return write_atomic(path, json.dumps(obj, indent=2, allow_nan=False) + "\n")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _ptag(p: float) -> str:
    return f"p{p:g}"


# ---------------------------------------------------------------------------
# configuration


def _load_json(path, schema: str):
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        validate(obj, schema)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"{path}: {exc.message}") from exc
    return obj


def resolve(args) -> dict:
    """Defaults, then the JSON config, then explicit flags."""
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(_load_json(args.config, "config"))
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if not isinstance(cfg["p"], list):
        cfg["p"] = [cfg["p"]]
    if any(not p > 1 for p in cfg["p"]):
        raise ConfigError(f"every p must exceed 1, got {cfg['p']}")
    if cfg["stages"] < 0:
        raise ConfigError("stages must be nonnegative")
    cfg["out"] = Path(cfg["out"])
    return cfg


def _params(cfg) -> ConstructionParams:
    try:
        return ConstructionParams(alpha=cfg["alpha"], window=Interval(*cfg["window"]),
                                  max_stages=cfg["stages"], epsilon_rule=cfg["epsilon_rule"])
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def _sequence(cfg):
    return build(_params(cfg))


def _measure(cfg):
    """The ``--measure`` file, or else the built weight as a pure density."""
    if cfg["measure"]:
        try:
            return MeasureSpec.from_json(_load_json(cfg["measure"], "measure"))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    return MeasureSpec(_sequence(cfg).final, window=Interval(*cfg["window"]))


def _function(cfg):
    if cfg["function"]:
        try:
            return LipschitzSpec.from_json(_load_json(cfg["function"], "lipschitz"))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    return LipschitzSpec.linear(1.0)


# ---------------------------------------------------------------------------
# commands


def cmd_build(cfg, args) -> int:
    seq = _sequence(cfg)
    out = cfg["out"]
    write_atomic(out / "stages.csv", seq.stage_table_csv())
    summary = {
        "alpha": seq.params.alpha,
        "window": [float(seq.params.window.lo), float(seq.params.window.hi)],
        "stages": seq.K,
        "epsilon_rule": seq.params.epsilon_rule,
        "zeros": [str(z) for z in seq.final.zeros()],
        "segments": len(seq.final),
    }
    if seq.K:
        summary["min_r"] = min(st.r for st in seq.stages)
    write_json(out / "weight.json", summary, "weight")
    return EXIT_OK


def cmd_eval(cfg, args) -> int:
    seq = _sequence(cfg)
    lo, hi = cfg["window"]
    xs = list(args.x or [])
    n = args.samples
    xs += [lo + (hi - lo) * i / (n - 1) for i in range(n)] if n > 1 else []
    level = seq.K if args.level is None else args.level
    if not 0 <= level <= seq.K:
        raise ConfigError(f"level must lie in 0..{seq.K}")
    rows = [[fmt(x), fmt(weight_at(seq, level, x))] for x in xs]
    write_atomic(cfg["out"] / "eval.csv", _csv(["x", "w"], rows))
    return EXIT_OK


def _sweep(cfg):
    return SweepSpec(window=Interval(*cfg["window"]), j_min=0, j_max=cfg["scale_depth"])


def cmd_ap_scan(cfg, args) -> int:
    seq = _sequence(cfg)
    alpha = seq.params.alpha
    code = EXIT_OK
    for p in cfg["p"]:
        rep = ap_scan(seq.final, p, _sweep(cfg))
        write_atomic(cfg["out"] / f"ap_scan_{_ptag(p)}.csv", rep.rows_csv())
        if p > 1 + alpha and rep.has_infinite:
            code = EXIT_AP
        print(f"p={p:g} sup={fmt(rep.sup)}")
    return code


def cmd_audit(cfg, args) -> int:
    seq = _sequence(cfg)
    code = EXIT_OK
    for p in cfg["p"]:
        rep = stage_growth_audit(seq, p, dyadic_sweep(Interval(*cfg["window"]),
                                                      cfg["scale_depth"]))
        write_atomic(cfg["out"] / f"audit_{_ptag(p)}.csv", rep.audit_csv())
        ok = all(rep.flags) and max(rep.stage_sups) <= rep.growth_bound()
        print(f"p={p:g} flags={'ok' if ok else 'FAILED'} C_emp={fmt(rep.c_emp)}")
        if not ok:
            code = EXIT_AP
    return code


def cmd_integrability(cfg, args) -> int:
    seq = _sequence(cfg)
    f, alpha = seq.final, seq.params.alpha
    if (args.s is None) == (args.log_theta is None):
        raise ConfigError("integrability needs exactly one of --s and --log-theta")
    sweep = dyadic_sweep(Interval(*cfg["window"]), cfg["scale_depth"])
    rows = []
    for _, iv in sweep.intervals():
        if args.s is not None:
            val = integrate_power(f, -args.s, iv)
        else:
            val = integrate_log_corrected(f, alpha, args.log_theta, iv)
        rows.append([fmt(float(iv.lo)), fmt(float(iv.hi)), fmt(val)])
    tag = f"s{args.s:g}" if args.s is not None else f"theta{args.log_theta:g}"
    write_atomic(cfg["out"] / f"integrability_{tag}.csv", _csv(["lo", "hi", "value"], rows))
    return EXIT_OK


def cmd_modulus(cfg, args) -> int:
    mu = _measure(cfg)
    if not args.interval:
        raise ConfigError("modulus needs at least one --interval a b")
    try:
        family = CurveFamily(tuple(Interval(a, b) for a, b in args.interval))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    code = EXIT_OK
    for p in cfg["p"]:
        res = modulus_family_grid(mu, family, p, cells=cfg["cells"])
        obj = res.to_json()
        if len(family) == 1:
            obj["closed_form"] = modulus_single(mu, family.intervals[0], p)
        write_json(cfg["out"] / f"modulus_{_ptag(p)}.json", obj, "modulus")
        print(f"p={p:g} value={fmt(res.value)} gap={fmt(res.gap)}")
        if not res.converged:
            code = EXIT_SOLVER
    return code


def cmd_np(cfg, args) -> int:
    mu = _measure(cfg)
    iv = Interval(*cfg["window"])
    for p in cfg["p"]:
        write_json(cfg["out"] / f"np_{_ptag(p)}.json", np_complement(mu, p, iv).to_json(), "np")
    return EXIT_OK


def cmd_gradient(cfg, args) -> int:
    mu = _measure(cfg)
    f = _function(cfg)
    iv = Interval(*cfg["window"])
    # sample the density zeros as well; the grid alone almost never hits them
    extra = [a.center for a in mu.density.arcs if a.exponent > 0 and iv.contains(a.center)]
    for p in cfg["p"]:
        rows = weak_gradient_report(mu, p, f, iv, args.samples, points=extra)
        write_atomic(cfg["out"] / f"gradient_{_ptag(p)}.csv", report_csv(rows))
    return EXIT_OK


def cmd_mc_check(cfg, args) -> int:
    seq = _sequence(cfg)
    n, beta = args.dim, 1.0 / seq.params.alpha
    lo, hi = cfg["window"]
    side = hi - lo
    ok_all = True
    for p in cfg["p"]:
        s = 1.0 - beta * p
        est, err = mc_integral_nd(seq, s, [(lo, hi)] * n, args.samples, cfg["seed"])
        one_d = integrate_power(seq.final, s, Interval(lo, hi))
        bound = n * side ** (n - 1) * one_d
        ok = est <= bound + 3.0 * err
        ok_all &= ok
        write_json(cfg["out"] / f"mc_{_ptag(p)}.json",
                   {"dimension": n, "s": s, "samples": args.samples, "seed": cfg["seed"],
                    "estimate": est, "stderr": err, "bound": bound, "ok": ok}, "mc")
        print(f"p={p:g} estimate={fmt(est)} stderr={fmt(err)} bound={fmt(bound)}")
    return EXIT_OK if ok_all else EXIT_AP


COMMANDS = {
    "build": cmd_build,
    "eval": cmd_eval,
    "ap-scan": cmd_ap_scan,
    "audit": cmd_audit,
    "integrability": cmd_integrability,
    "modulus": cmd_modulus,
    "np-classify": cmd_np,
    "gradient": cmd_gradient,
    "mc-check": cmd_mc_check,
}


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file supplying any flag")
    common.add_argument("--alpha", type=float)
    common.add_argument("--stages", type=int)
    common.add_argument("--window", type=float, nargs=2, metavar=("A", "B"))
    common.add_argument("--p", type=float, nargs="+")
    common.add_argument("--scale-depth", dest="scale_depth", type=int)
    common.add_argument("--cells", type=int)
    common.add_argument("--measure", metavar="FILE")
    common.add_argument("--function", metavar="FILE")
    common.add_argument("--out", metavar="DIR")
    common.add_argument("--seed", type=int)
    common.add_argument("--epsilon-rule", dest="epsilon_rule")

    parser = argparse.ArgumentParser(prog="pweak", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "eval":
            sp.add_argument("--x", type=float, action="append")
            sp.add_argument("--samples", type=int, default=0)
            sp.add_argument("--level", type=int)
        elif name == "integrability":
            sp.add_argument("--s", type=float, help="integrate w**-s")
            sp.add_argument("--log-theta", dest="log_theta", type=float,
                            help="integrate w**-beta |log(w/rbar)|**-theta")
        elif name == "modulus":
            sp.add_argument("--interval", type=float, nargs=2, action="append",
                            metavar=("A", "B"))
        elif name == "gradient":
            sp.add_argument("--samples", type=int, default=101)
        elif name == "mc-check":
            sp.add_argument("--dim", type=int, default=2)
            sp.add_argument("--samples", type=int, default=10**6)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = resolve(args)
        return COMMANDS[args.command](cfg, args)
    except ZeroAtCenter as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    except (ConfigError, InvalidExponent, ValueError, jsonschema.ValidationError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PweakError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
