"""Command-line driver.

Exit codes: 0 when every check passes, 1 when any check fails, 2 on usage
or configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import fields
from typing import Any, Sequence

import numpy as np

from . import deform, duality, geometry, weyl
from .arith import Weights, is_admissible, length_spectrum
from .suites import SUITES, Config, Report, run_suites

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _version() -> str:
    try:
        from importlib.metadata import version

        return version("artifact")
    except Exception:
        return "0.1.0"


class UsageError(Exception):
    pass


def parse_lambda(text: str) -> complex:
    parts = [p.strip() for p in str(text).split(",")]
    try:
        if len(parts) == 1:
            return complex(parts[0].replace("i", "j"))
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise UsageError(f"cannot parse lambda '{text}' (use re or re,im)")


def read_config_file(path: str) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            k, v = line.split("=", 1)
            out[k.strip().replace("-", "_")] = v.strip()
    return out


_TOL_KEYS = {f.name for f in fields(Config) if f.name.startswith("tol_")}


def build_config(args: argparse.Namespace) -> Config:
    vals: dict[str, Any] = {}
    if getattr(args, "config", None):
        vals.update(read_config_file(args.config))
    for key in ("weights", "lambda_", "grid", "seed", "samples", "threads", "format"):
        v = getattr(args, key, None)
        if v is not None:
            vals[key.rstrip("_")] = v
    for key in _TOL_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            vals[key] = v
    kw: dict[str, Any] = {}
    try:
        for k, v in vals.items():
            if k == "weights":
                kw["weights"] = v if isinstance(v, Weights) else Weights.parse(str(v))
            elif k == "lambda":
                kw["lam"] = v if isinstance(v, complex) else parse_lambda(v)
            elif k in ("grid", "seed", "samples", "threads"):
                kw[k] = int(v)
            elif k == "format":
                if v not in ("json", "csv"):
                    raise UsageError(f"unknown format '{v}'")
                kw["fmt"] = v
            elif k in _TOL_KEYS or k == "eps_pole":
                kw[k] = float(v)
            else:
                raise UsageError(f"unknown configuration key '{k}'")
        if "threads" not in kw:
            kw["threads"] = 1
        return Config(**kw)
    except UsageError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _num(x: Any) -> Any:
    if isinstance(x, (np.floating, np.integer)):
        x = x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def _clean(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return _num(obj)


def report_json(suite: str, reports: list[Report], cfg: Config) -> dict:
    checks = []
    for rep in reports:
        for c in rep.checks:
            d = c.as_dict()
            if len(reports) > 1:
                d["name"] = f"{rep.suite}: {d['name']}"
            checks.append(d)
    out = {"suite": suite, "weights": list(cfg.weights.as_tuple())}
    if any(rep.lam is not None for rep in reports):
        out["lambda"] = [cfg.lam.real, cfg.lam.imag]
    out["checks"] = checks
    out["meta"] = {"seed": cfg.seed, "grid": cfg.grid, "version": _version(), "rng": "PCG64",
                   "samples": cfg.samples, "elapsed_s": {r.suite: r.elapsed for r in reports}}
    return _clean(out)


def write_csv(rows: Sequence[dict], header: Sequence[str]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for row in rows:
        wr.writerow([repr(float(row[h])) if isinstance(row[h], (float, np.floating)) else row[h] for h in header])
    return buf.getvalue()


def emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj: dict) -> str:
    return json.dumps(_clean(obj), indent=2) + "\n"


# ---------------------------------------------------------------------------


def cmd_check(args, cfg: Config) -> int:
    if args.suite != "all" and args.suite not in SUITES:
        raise UsageError(f"unknown suite '{args.suite}'")
    names = list(SUITES) if args.suite == "all" else [args.suite]
    reports = run_suites(names, cfg)
    js = report_json(args.suite, reports, cfg)
    if cfg.fmt == "csv":
        text = write_csv(js["checks"], ["name", "residual", "threshold", "pass"])
    else:
        text = _dump(js)
    emit(text, args.out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_spectrum(args, cfg: Config) -> int:
    w = cfg.weights
    if not is_admissible(w):
        raise UsageError(f"weights ({w}) are not admissible")
    try:
        lspec = length_spectrum(w)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out: dict[str, Any] = {
        "weights": list(w.as_tuple()),
        "via": args.via,
        "p": lspec.p,
        "q": lspec.q,
        "lengths": {l.role: {"exact": str(l), "radians": l.radians} for l in lspec.lengths},
    }
    status = EXIT_OK
    if args.via == "duality":
        ng = weyl.natural_gauge(weyl.riemannian(geometry.chart_metric(w)), radial_fit=(0.01, math.pi - 0.01))
        fl = duality.finsler_lengths(ng, w)
        deltas = fl.deltas()
        out["lengths"] = {role: {"exact": str(lspec.by_role(role)), "radians": v} for role, v in fl.lengths.items()}
        out["residuals"] = {"deltas": deltas, "fiber_spread": fl.fiber_spread, "orientation": fl.orientation}
        if max(deltas.values()) > 1e-6:
            status = EXIT_FAIL
    else:
        out["residuals"] = {}
    if cfg.fmt == "csv":
        rows = [{"role": k, "exact": v["exact"], "radians": v["radians"]} for k, v in out["lengths"].items()]
        emit(write_csv(rows, ["role", "exact", "radians"]), args.out)
    else:
        emit(_dump(out), args.out)
    return status


def cmd_deform(args, cfg: Config) -> int:
    w = cfg.weights
    if w.c != 1 or w.a1 % 2 == 0 or w.a2 % 2 == 0:
        raise UsageError("the deformation pipeline needs coprime odd weights")
    try:
        deform.validate_lambda(cfg.lam)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    tol = deform.Tolerances(besse=cfg.tol_besse)
    res = deform.run(w, cfg.lam, tol=tol, grid=max(cfg.grid, 16), n_besse=args.besse_samples, seed=cfg.seed)
    out = {
        "weights": list(w.as_tuple()),
        "lambda": [cfg.lam.real, cfg.lam.imag],
        "stages": [s.as_dict() for s in res.stages],
        "aborted_at": res.aborted,
        "pass": res.passed,
        "meta": {"seed": cfg.seed, "grid": cfg.grid, "version": _version()},
    }
    if cfg.fmt == "csv":
        emit(write_csv([s.as_dict() for s in res.stages], ["name", "residual", "threshold", "pass"]), args.out)
    else:
        emit(_dump(out), args.out)
    return EXIT_OK if res.passed else EXIT_FAIL


def cmd_embed(args, cfg: Config) -> int:
    if args.samples < 16:
        raise UsageError("embed needs at least 16 samples")
    r, radius, height = geometry.embed_profile(cfg.weights, args.samples)
    rows = [{"r": a, "radius": b, "height": c} for a, b, c in zip(r, radius, height)]
    if args.format == "json":
        emit(_dump({"weights": list(cfg.weights.as_tuple()), "profile": rows}), args.out)
    else:
        emit(write_csv(rows, ["r", "radius", "height"]), args.out)
    return EXIT_OK


def cmd_geodesics(args, cfg: Config) -> int:
    w = cfg.weights
    rep = weyl.besse_report(geometry.fubini_study(w).christoffel_array(), n=args.count)
    ok = rep.closing and rep.spread <= cfg.tol_besse
    if cfg.fmt == "csv":
        rows = [{"clairaut": c, "return_angle": a} for c, a in zip(rep.clairaut, rep.angles)]
        emit(write_csv(rows, ["clairaut", "return_angle"]), args.out)
    else:
        out = {"weights": list(w.as_tuple()), **rep.as_dict(),
               "angles": [{"clairaut": c, "return_angle": a} for c, a in zip(rep.clairaut, rep.angles)],
               "pass": ok}
        emit(_dump(out), args.out)
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--weights", help="a1,a2")
    common.add_argument("--lambda", dest="lambda_", help="re or re,im")
    common.add_argument("--grid", type=int)
    common.add_argument("--samples", dest="samples", type=int, help="random sample count for suites")
    common.add_argument("--seed", type=int)
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--out")
    common.add_argument("--threads", type=int, help="worker processes (default 1; 0 = all cores)")
    common.add_argument("--config", help="key=value file, overridden by flags")
    for key in sorted(_TOL_KEYS):
        common.add_argument("--" + key.replace("_", "-"), dest=key, type=float)

    p = _Parser(prog="besseweyl", description="Besse-Weyl structures, Finsler duality and twistor checks")
    p.add_argument("--version", action="version", version=_version())
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    c = sub.add_parser("check", parents=[common], help="run verification suites")
    c.add_argument("--suite", required=True)
    s = sub.add_parser("spectrum", parents=[common], help="closed-geodesic length spectrum")
    s.add_argument("--via", choices=("formula", "duality"), default="formula")
    d = sub.add_parser("deform", parents=[common], help="Veronese deformation pipeline")
    d.add_argument("--besse-samples", type=int, default=20)
    e = sub.add_parser("embed", parents=[common], help="profile curve of the isometric embedding")
    e.add_argument("--n-samples", dest="samples_embed", type=int, default=64)
    g = sub.add_parser("geodesics", parents=[common], help="return angles of the chart metric")
    g.add_argument("--count", type=int, default=20)
    return p


COMMANDS = {"check": cmd_check, "spectrum": cmd_spectrum, "deform": cmd_deform, "embed": cmd_embed,
            "geodesics": cmd_geodesics}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "embed":
            args.samples, embed_n = None, args.samples_embed
        cfg = build_config(args)
        if args.threads == 0:
            cfg.threads = os.cpu_count() or 1
        if args.command == "embed":
            args.samples = embed_n
        return COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"besseweyl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"besseweyl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
