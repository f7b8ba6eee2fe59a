"""Command-line entry point: build programs to circuit-IR files, run
verification suites over sampled oracles, run dichotomy and sphere-scan
probes, and emit CSV sweep data for plotting.

Exit codes: 0 all checks passed, 1 a check failed, 2 model violation
(vanishing postselection probability), 3 input error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import constructions as co
from . import linalg as la
from . import model as mo
from . import topology as tp
from ._util import parallel_map

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_MODEL_VIOLATION = 2
EXIT_INPUT_ERROR = 3

BUILD_NAMES = sorted(co.BUILDERS) + ["power"]
SPECIAL_PROGRAMS = ("root-composed", "constant-circuit")


@dataclass
class RunConfig:
    d: int = 2
    m: int | None = None
    seed: int = 0
    samples: int = 10
    K: int = 256
    tol: float = 1e-8

    def validate(self):
        if not 2 <= self.d <= 4:
            raise ValueError("d must be in [2, 4]")
        if self.K < 16 or self.K & (self.K - 1):
            raise ValueError("K must be a power of two >= 16")
        if not 0 < self.tol <= 1e-2:
            raise ValueError("tol must lie in (0, 1e-2]")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")


def _config(args) -> RunConfig:
    cfg = RunConfig(
        d=args.d,
        m=getattr(args, "m", None),
        seed=getattr(args, "seed", 0),
        samples=getattr(args, "samples", 10),
        K=getattr(args, "K", 256),
        tol=getattr(args, "tol", 1e-8),
    )
    cfg.validate()
    return cfg


def _constant_circuit(d: int) -> mo.OracleAlgorithm:
    layout = la.RegisterLayout.of([2, d], ["control", "task"])
    eye = np.eye(2 * d, dtype=complex)
    return mo.OracleAlgorithm("constant", d, layout, (mo.FixedStep(eye, (0, 1)),))


def _load_program(source: str, cfg: RunConfig):
    if source == "root-composed":
        return co.composed_root_cU(cfg.d, lambda u: la.principal_root(u, cfg.d))
    if source == "constant-circuit":
        return _constant_circuit(cfg.d)
    return mo.from_ir(source)


def _emit(obj: dict, out: str | None):
    text = json.dumps(obj, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_build(args) -> int:
    cfg = _config(args)
    alg = co.build(args.name, cfg.d, cfg.m)
    out = args.out or f"{alg.name}.json"
    mo.write_ir(alg, out)
    print(f"wrote {out}: layout {list(alg.dims)}, "
          f"{alg.query_count} queries ({'/'.join(l.name for l in alg.query_letters)})")
    return EXIT_OK


def _verify_exact(alg, task, us, cfg: RunConfig):
    def one(iu):
        i, u = iu
        res = mo.check_exact(alg, task, u, tol=cfg.tol)
        entry = {
            "check": "exact",
            "U_seed": cfg.seed + i,
            "result": bool(res.achieved),
            "residual": float(res.residual),
            "rank_residual": float(res.rank_residual),
            "success_prob": res.success_prob,
        }
        if res.phase is not None:
            entry["phase"] = float(res.phase)
        if not res.achieved and res.rank_residual > cfg.tol:
            entry["diagnostic"] = (
                f"ancilla rank deficiency: second singular value "
                f"{res.rank_residual:.3e} exceeds tol {cfg.tol:.1e}")
        return entry
    return parallel_map(one, enumerate(us))


def _verify_eps(alg, task, us, cfg: RunConfig):
    entries = []
    for i, u in enumerate(us):
        val = mo.eps_distance_estimate(alg, task, u, n_samples=4, seed=cfg.seed)
        entries.append({"check": "eps", "U_seed": cfg.seed + i,
                        "result": bool(val <= cfg.tol), "residual": float(val)})
    return entries


def _verify_homogeneity(alg, us, cfg: RunConfig):
    delta = mo.static_homogeneity(alg.query_letters)
    rng = np.random.default_rng(cfg.seed)
    entries = []
    for i, u in enumerate(us):
        lam = np.exp(2j * np.pi * rng.random())
        resid = mo.numeric_homogeneity_check(alg, u, lam, delta)
        entries.append({"check": "homogeneity", "U_seed": cfg.seed + i,
                        "result": bool(resid <= cfg.tol), "residual": float(resid),
                        "degree": delta})
    return entries


def cmd_verify(args) -> int:
    cfg = _config(args)
    alg = _load_program(args.ir, cfg)
    check = args.check
    if check is None:
        check = "neutralise" if args.task == "neutralise" else "exact"
    us = la.haar_unitaries(cfg.d, cfg.samples, cfg.seed)

    report: dict = {"check": check, "d": cfg.d, "samples": cfg.samples,
                    "seed": cfg.seed, "tol": cfg.tol, "program": getattr(alg, "name", args.ir)}
    if check == "neutralise":
        res = mo.check_neutralises(alg, us, tol=cfg.tol)
        report["results"] = [
            {"check": "neutralise", "U_seed": cfg.seed + i, "result": res.passed,
             "residual": res.residuals[i], "r": res.r_values[i], "phase": res.phases[i]}
            for i in range(len(us))]
        report["r"] = res.r
        report["passed"] = res.passed
        if res.reason:
            report["diagnostic"] = res.reason
    else:
        task = mo.make_task(args.task, cfg.d, cfg.m)
        if check == "exact":
            entries = _verify_exact(alg, task, us, cfg)
        elif check == "eps":
            entries = _verify_eps(alg, task, us, cfg)
        elif check == "clean":
            res = mo.check_clean(alg, task, us, tol=cfg.tol)
            entries = [{"check": "clean", "U_seed": cfg.seed, "result": res.clean,
                        "residual": 0.0}]
            if res.reason:
                entries[0]["diagnostic"] = res.reason
        elif check == "homogeneity":
            entries = _verify_homogeneity(alg, us, cfg)
        else:
            raise ValueError(f"unknown check {check}")
        report["results"] = entries
        report["passed"] = all(e["result"] for e in entries)

    _emit(report, args.out)
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


def cmd_probe(args) -> int:
    cfg = _config(args)
    if cfg.m is None:
        raise ValueError("probe needs --m")
    alg = _load_program(args.ir, cfg)
    rep = tp.dichotomy_probe(alg, cfg.m, cfg.d, K=cfg.K)
    base = args.out or "probe"
    _emit(rep.to_json(), f"{base}.json")
    rep.trace.to_csv(f"{base}.csv")
    print(f"probe m={cfg.m} d={cfg.d}: valid={rep.valid} winding={rep.winding} "
          f"min|f|={rep.min_abs:.3g}" +
          (f" jump near t={rep.jump_location}" if rep.jump_location is not None else ""))
    ok = rep.valid and rep.winding_matches_m and rep.divisibility_ok
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_bu_scan(args) -> int:
    cfg = _config(args)
    if cfg.d % 2 != 0:
        raise ValueError("bu-scan needs an even oracle dimension")
    levels = []
    n = args.resolution
    for _ in range(args.refinements):
        grid = tp.sphere_grid(n)
        rep = tp.bu_scan(lambda u: complex(u[0, 0]), cfg.d, grid)
        levels.append({"resolution": n, "points": rep.n_points,
                       "min_abs": rep.min_abs,
                       "argmin": [float(x) for x in rep.argmin],
                       "oddness_residual": rep.oddness_residual})
        n *= 2
    report = {"d": cfg.d, "test_function": "zero-zero matrix element", "levels": levels}
    _emit(report, args.out)
    mins = [lv["min_abs"] for lv in levels]
    return EXIT_OK if all(b < a + 1e-12 for a, b in zip(mins, mins[1:])) else EXIT_CHECK_FAILED


def _sweep_points(kind: str, n: int, d: int) -> list[tuple[float, np.ndarray]]:
    pts = []
    for j in range(n):
        if kind == "diag":
            theta = 2 * np.pi * j / max(n, 1)
            u = np.eye(d, dtype=complex)
            u[-1, -1] = np.exp(1j * theta)
            pts.append((theta, u))
        elif kind == "loop":
            t = j / max(n, 1)
            pts.append((t, np.exp(2j * np.pi * t) * np.eye(d, dtype=complex)))
        else:
            raise ValueError(f"unknown sweep grid {kind!r} (use diag:N or loop:N)")
    return pts


def cmd_sweep(args) -> int:
    cfg = _config(args)
    alg = _load_program(args.ir, cfg)
    task = mo.make_task(args.task, cfg.d, cfg.m)
    try:
        kind, n_str = args.grid.split(":")
        n = int(n_str)
    except ValueError as exc:
        raise ValueError("grid must look like diag:64 or loop:256") from exc
    if n < 0:
        raise ValueError("grid size must not be negative")

    with_eps = args.check == "eps"
    header = ["param", "success_prob", "residual", "phase"] + (["eps"] if with_eps else [])
    rows = []
    ref_state = la.basis_state(alg.h_dim, 0)
    for param, u in _sweep_points(kind, n, cfg.d):
        res = mo.check_exact(alg, task, u, tol=cfg.tol)
        prob = mo.success_prob(alg, u, ref_state)
        row = [f"{param:.12g}", f"{prob:.17g}", f"{res.residual:.17g}",
               "" if res.phase is None else f"{res.phase:.17g}"]
        if with_eps:
            row.append(f"{mo.eps_distance_estimate(alg, task, u, n_samples=2, seed=cfg.seed):.17g}")
        rows.append(row)

    out = args.out or "sweep.csv"
    with open(out, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {out} ({len(rows)} rows)")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="uctrl", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(q, samples=10, K=256):
        q.add_argument("--d", type=int, default=2)
        q.add_argument("--m", type=int, default=None)
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--samples", type=int, default=samples)
        q.add_argument("--K", type=int, default=K)
        q.add_argument("--tol", type=float, default=1e-8)
        q.add_argument("--out", type=str, default=None)

    b = sub.add_parser("build", help="emit a named program as circuit IR")
    b.add_argument("name", choices=BUILD_NAMES)
    common(b)
    b.set_defaults(fn=cmd_build)

    v = sub.add_parser("verify", help="run a checker over sampled oracles")
    v.add_argument("ir", help="circuit IR path" + f" or one of {SPECIAL_PROGRAMS}")
    v.add_argument("--task", required=True,
                   choices=["cUm", "conjugation", "transpose", "inverse", "neutralise"])
    v.add_argument("--check", default=None,
                   choices=["exact", "eps", "neutralise", "clean", "homogeneity"])
    common(v)
    v.set_defaults(fn=cmd_verify)

    pr = sub.add_parser("probe", help="winding probe along the central loop")
    pr.add_argument("ir", help="circuit IR path" + f" or one of {SPECIAL_PROGRAMS}")
    common(pr)
    pr.set_defaults(fn=cmd_probe)

    bu = sub.add_parser("bu-scan", help="odd-map sphere scan")
    bu.add_argument("--resolution", type=int, default=8)
    bu.add_argument("--refinements", type=int, default=1)
    common(bu)
    bu.set_defaults(fn=cmd_bu_scan)

    sw = sub.add_parser("sweep", help="emit per-oracle CSV plot data")
    sw.add_argument("ir", help="circuit IR path" + f" or one of {SPECIAL_PROGRAMS}")
    sw.add_argument("--task", required=True,
                    choices=["cUm", "conjugation", "transpose", "inverse"])
    sw.add_argument("--check", default="exact", choices=["exact", "eps"])
    sw.add_argument("--grid", default="diag:32")
    common(sw)
    sw.set_defaults(fn=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; keep 2 reserved for model
        # violations and report bad flags as input errors instead
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT_ERROR
    try:
        return args.fn(args)
    except mo.ModelViolationError as exc:
        print(f"model violation: {exc}", file=sys.stderr)
        return EXIT_MODEL_VIOLATION
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
