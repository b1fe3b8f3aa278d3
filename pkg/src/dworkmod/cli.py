"""Command-line front end.

    dworkmod run CONFIG --out report.json [--csv DIR] [--timing]
    dworkmod verify [--suite acceptance | 1,2,5 | CONFIG_NAME]

Exit codes: 0 success, 2 verification failure, 3 unsupported surface, 4 input
error (including a task whose inputs do not fit the requested computation).
DWORKMOD_THREADS sets the number of task workers.
"""

from __future__ import annotations

import argparse
import ast
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path

from . import __version__
from . import analytics as an
from .config import RunConfig, parse_config
from .errors import DworkError, UnsupportedDimension
from .euler import l_euler
from .padic import PAdicContext
from .series import SigmaLift, TruncSeries
from .sigma_module import SigmaModule, direct_sum, ext_power, normalize_twist, sym_power, tensor
from .trace import l_trace
from .unitroot import hodge_newton_unit, limiting_module, unit_fiber_check, unit_root_euler, unit_root_l

EXIT_OK, EXIT_VERIFY, EXIT_UNSUPPORTED, EXIT_INPUT = 0, 2, 3, 4


def build_lift(cfg: RunConfig) -> SigmaLift:
    ctx = PAdicContext(cfg.p, cfg.W)
    fs = [TruncSeries.from_terms(ctx, cfg.n, f, deg_cap=None) if f else TruncSeries.zero(ctx, cfg.n, 0)
          for f in cfg.sigma]
    return SigmaLift(ctx, fs, a=cfg.a)


def _derive(expr: str, env: dict, lift: SigmaLift):
    def ev(node):
        if isinstance(node, ast.Name):
            return env[node.id]
        if isinstance(node, ast.Constant):
            return node.value
        args = [ev(a) for a in node.args]
        op = node.func.id
        if op == "trivial":
            return SigmaModule.trivial(lift)
        return {"sym_power": sym_power, "ext_power": ext_power, "tensor": tensor,
                "direct_sum": direct_sum}[op](*args)

    return ev(ast.parse(expr, mode="eval").body)


def build_modules(cfg: RunConfig, lift: SigmaLift) -> dict:
    env = {}
    for name, md in cfg.modules.items():
        if md.derive is not None:
            M = _derive(md.derive, env, lift)
            M.label = name
        else:
            M = SigmaModule.from_terms(lift, md.entries, name)
        env[name] = M
    return env


# ---------------------------------------------------------------------------
# tasks


def _ks(params, default=(0,)):
    return list(params.get("k", default))


def task_euler(cfg, M, params, aux):
    L = l_euler(M, cfg.cap("D_T", 6), prec=cfg.N)
    return {"lseries": L.to_json()}


def task_trace(cfg, M, params, aux, csv=None):
    res = l_trace(M, cfg.cap("D_T", 6), N=cfg.N, U=cfg.caps.get("U"), full=True)
    if csv is not None:
        for G in res.matrices:
            csv[f"{M.label}_theta{G.i}.csv"] = G.to_csv()
    return {"lseries": res.lseries.to_json(), "U": res.U, "b": str(res.b),
            "numerator": [d.to_json() for d in res.num], "denominator": [d.to_json() for d in res.den]}


def task_verify(cfg, M, params, aux):
    D_T = cfg.cap("D_T", 6)
    Le, Lt = l_euler(M, D_T, prec=cfg.N), l_trace(M, D_T, N=cfg.N, U=cfg.caps.get("U"))
    return {"agree": Le.eq_mod(Lt), "euler": Le.to_json(), "trace": Lt.to_json()}


def task_unit_root(cfg, M, params, aux):
    ur = hodge_newton_unit(M, cfg.N)
    out = {"unit_root": ur.to_json()}
    d_max = params.get("d_max", cfg.cap("L", 0))
    if d_max:
        fc = unit_fiber_check(ur, M, d_max)
        out["fiber_check"] = fc.to_json()
    return out


def task_limiting(cfg, M, params, aux):
    D_T, N = cfg.cap("D_T", 6), cfg.N
    D_f = cfg.cap("D_f", N)
    tw = normalize_twist(M)
    out = []
    for k in _ks(params):
        Lm = limiting_module(tw.module, k, D_f)
        res = unit_root_l(M, aux, k, D_T, N, D_f=D_f)
        row = {"k": k, "limiting_rank": Lm.as_module().rank, "lseries": res.lseries.to_json(),
               "numerator": res.numerator.to_json(), "denominator": res.denominator.to_json()}
        if params.get("check_euler", False):
            row["euler_agrees"] = res.lseries.eq_mod(unit_root_euler(M, aux, k, D_T, N, alpha_prec=N + 3))
        out.append(row)
    return {"twist": str(tw.a), "rows": out}


def task_polygon(cfg, M, params, aux):
    res = l_trace(M, cfg.cap("D_T", 6), N=cfg.N, U=cfg.caps.get("U"), full=True)
    q, n = M.lift.q, M.lift.n
    nums = [G for G in res.matrices if (n - G.i) % 2 == 1]
    dens = [G for G in res.matrices if (n - G.i) % 2 == 0]
    num, den = res.lseries.one(cfg.p, cfg.N, res.lseries.tcap), res.lseries.one(cfg.p, cfg.N, res.lseries.tcap)
    for d in res.num:
        num = num * d
    for d in res.den:
        den = den * d
    pn = an.newton_polygon(num, lower_bound=an.product_bound(nums, q))
    pd = an.newton_polygon(den, lower_bound=an.product_bound(dens, q))
    rep = an.slope_degrees(pn, pd, params.get("s_max", 2), strict=False)
    fits = [an.q_bound_fit(P, n, M.rank).to_json() for P in (pn, pd) if len(P.vertices) > 1]
    return {"numerator": pn.to_json(), "denominator": pd.to_json(), "fits": fits,
            "slopes": [{"slope": str(s), "d": d, "D": D, "certified": rep.is_certified(s)}
                       for s, (d, D) in sorted(rep.rows.items())]}


def task_gm_scan(cfg, M, params, aux, csv=None):
    res = an.gm_scan(M, aux, _ks(params, (0, 1)), params.get("s_max", 2), params.get("j", 1),
                     cfg.cap("D_T", 6), cfg.N)
    if csv is not None:
        csv[f"{M.label}_slopes.csv"] = res.csv() + "\n"
    return {"profile": res.profile.to_json(), "ok": res.ok,
            "pairs": [{"k1": a, "k2": b, "s_j": repr(s), "compared": c, "equal": e} for a, b, s, c, e in res.pairs],
            "table": {str(k): [[str(s), d, D] for s, (d, D) in sorted(r.rows.items())]
                      for k, r in res.table.items()}}


TASKS = {"euler": task_euler, "trace": task_trace, "verify": task_verify, "unit-root": task_unit_root,
         "limiting": task_limiting, "polygon": task_polygon, "gm-scan": task_gm_scan}
CSV_TASKS = ("trace", "gm-scan")


def _run_task(cfg, td, modules, csv_store, timing):
    t = time.perf_counter()
    entry = {"name": td.name, "kind": td.kind, "module": td.module}
    try:
        aux = modules.get(td.params["aux"]) if "aux" in td.params else None
        fn = TASKS[td.kind]
        kwargs = {"csv": csv_store} if td.kind in CSV_TASKS and csv_store is not None else {}
        entry["result"] = fn(cfg, modules[td.module], td.params, aux, **kwargs)
        entry["status"] = "ok"
        if td.kind == "verify" and not entry["result"]["agree"]:
            entry["status"] = "failed"
        if td.kind == "gm-scan" and not entry["result"]["ok"]:
            entry["status"] = "failed"
    except (UnsupportedDimension, NotImplementedError) as exc:
        entry["status"] = "unsupported"
        entry["error"] = f"{type(exc).__name__}: {exc}"
    except DworkError as exc:
        entry["status"] = "error"
        entry["error"] = f"{type(exc).__name__}: {exc}"
    if timing:
        entry["seconds"] = round(time.perf_counter() - t, 3)
    return entry


def run(cfg: RunConfig, csv: dict | None = None, timing: bool = False, threads: int | None = None) -> dict:
    """Run every task; the report is deterministic unless timing is requested."""
    lift = build_lift(cfg)
    modules = build_modules(cfg, lift)
    threads = threads or int(os.environ.get("DWORKMOD_THREADS", "1") or 1)
    stores = [({} if csv is not None else None) for _ in cfg.tasks]
    if threads > 1 and len(cfg.tasks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            futs = [ex.submit(_run_task, cfg, td, modules, st, timing) for td, st in zip(cfg.tasks, stores)]
            entries = [f.result() for f in futs]
    else:
        entries = [_run_task(cfg, td, modules, st, timing) for td, st in zip(cfg.tasks, stores)]
    if csv is not None:
        for st in stores:
            csv.update(st)
    return {
        "tool": "dworkmod", "version": __version__,
        "inputs": {"p": cfg.p, "a": cfg.a, "q": cfg.p**cfg.a, "N": cfg.N, "W": cfg.W, "n": cfg.n,
                   "caps": dict(sorted(cfg.caps.items())),
                   "sigma": [[[list(e), str(c)] for e, c in f] for f in cfg.sigma],
                   "modules": {name: modules[name].rank for name in cfg.modules}},
        "tasks": entries,
    }


def exit_code(report: dict) -> int:
    statuses = [t["status"] for t in report["tasks"]]
    if "error" in statuses:
        return EXIT_INPUT
    if "failed" in statuses:
        return EXIT_VERIFY
    if "unsupported" in statuses:
        return EXIT_UNSUPPORTED
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def shipped_configs() -> dict:
    root = resources.files("dworkmod") / "configs"
    return {p.name[:-4]: p for p in root.iterdir() if p.name.endswith(".ini")}


def _cmd_run(args) -> int:
    try:
        text = Path(args.config).read_text()
        cfg = parse_config(text)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DworkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    csv = {} if args.csv else None
    report = run(cfg, csv=csv, timing=args.timing)
    out = json.dumps(report, indent=2, sort_keys=False)
    if args.out:
        Path(args.out).write_text(out + "\n")
    else:
        print(out)
    if csv:
        d = Path(args.csv)
        d.mkdir(parents=True, exist_ok=True)
        for name in sorted(csv):
            (d / name).write_text(csv[name])
    for t in report["tasks"]:
        if t["status"] != "ok":
            print(f"{t['name']}: {t['status']} {t.get('error', '')}".rstrip(), file=sys.stderr)
    return exit_code(report)


def _cmd_verify(args) -> int:
    from .verify import CRITERIA, run_suite

    suite = args.suite
    if suite == "acceptance":
        results = run_suite(echo=print)
        return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY
    if all(part.strip().isdigit() for part in suite.split(",")):
        nums = [int(x) for x in suite.split(",")]
        bad = [k for k in nums if k not in CRITERIA]
        if bad:
            print(f"error: no criterion {bad[0]}", file=sys.stderr)
            return EXIT_INPUT
        results = run_suite(nums, echo=print)
        return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY
    configs = shipped_configs()
    if suite not in configs:
        print(f"error: unknown suite {suite!r}; choose acceptance, criterion numbers, or one of "
              f"{', '.join(sorted(configs))}", file=sys.stderr)
        return EXIT_INPUT
    report = run(parse_config(configs[suite].read_text()))
    for t in report["tasks"]:
        print(f"[{'PASS' if t['status'] == 'ok' else t['status'].upper()}] {suite}/{t['name']} ({t['kind']})")
    return exit_code(report)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="dworkmod", description="L-functions of σ-modules by Dwork's trace formula")
    ap.add_argument("--version", action="version", version=f"dworkmod {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run", help="run the tasks of a configuration")
    r.add_argument("config")
    r.add_argument("--out", help="write the JSON report here instead of stdout")
    r.add_argument("--csv", help="directory for CSV side outputs")
    r.add_argument("--timing", action="store_true", help="include wall-clock timings in the report")
    v = sub.add_parser("verify", help="run the verification suite")
    v.add_argument("--suite", default="acceptance")
    args = ap.parse_args(argv)
    if args.cmd == "run":
        return _cmd_run(args)
    return _cmd_verify(args)


if __name__ == "__main__":
    sys.exit(main())
