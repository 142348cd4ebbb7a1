"""Command-line front end: ``nlhomog {cell,solve,effective,sweep,mc,validate}``.

Every run writes into ``--out``: the experiment CSV(s), ``summary.txt``
(``key = value``), a gnuplot script, ``config.txt`` (the resolved
configuration) and ``metadata.txt`` (timestamps, timings, host details). Files
are staged and moved into place only when the run succeeds.
"""

import argparse
import logging
import os
import platform
import shutil
import sys
import tempfile
import time
from datetime import datetime, timezone

import numpy as np
import scipy.linalg
from threadpoolctl import threadpool_limits

from . import __version__, acceptance, cell, dirichlet, effective, stable
from ._validation import CoefficientError, ParameterError, SingularityError, SolverError
from .config import EXPERIMENTS, SCHEMA, ConfigError, parse_config
from .corrector import rate_sweep
from .grid import Grid1D, TorusGrid

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_ACCEPTANCE = 4

log = logging.getLogger("nlhomog")


def _summary(pairs):
    return "".join(f"{k} = {v}\n" for k, v in pairs.items())


def _grid(cfg):
    return Grid1D.uniform(cfg["domain.left"], cfg["domain.right"], cfg.h(),
                          margin=cfg["grid.margin"], R=cfg["grid.R"])


def _solution_plot(csv, title):
    return ("set datafile separator ','\nset key autotitle columnhead\n"
            f"set xlabel 'x'\nset ylabel 'u'\nset title '{title}'\n"
            f"plot '{csv}' using 1:2 with lines title 'u'\n")


def run_cell(cfg, files, seed, threads):
    sol = cell.solve_cell(cfg.theta(), TorusGrid(cfg["cell.N"]), cfg.alpha, cfg.quad(), cfg["cell.kernel"])
    files["cell.csv"] = sol.to_csv()
    files["plot_cell.gp"] = ("set datafile separator ','\nset key autotitle columnhead\n"
                             "set xlabel 'y'\nset ylabel 'chi'\n"
                             "plot 'cell.csv' using 1:2 with linespoints title 'chi'\n")
    return {"a1": sol.a1, "a2": sol.a2, "chi_max": sol.chi_max, "mean_residual": sol.mean_residual,
            "linear_residual": sol.linear_residual}


def run_solve(cfg, files, seed, threads):
    grid = _grid(cfg)
    problem = dirichlet.HeterogeneousProblem(grid, cfg.theta(), cfg["eps"], cfg.alpha,
                                             cfg["source.value"], cfg["exterior.value"], cfg.quad())
    u = dirichlet.solve_heterogeneous(problem)
    header = {"alpha": cfg.alpha, "eps": cfg["eps"], "h": grid.h}
    files["solution.csv"] = dirichlet.to_csv(u, header)
    files["plot_solution.gp"] = _solution_plot("solution.csv", f"u_eps, eps = {cfg['eps']:g}")
    interior = u.values[grid.interior]
    return {"h": grid.h, "n_nodes": grid.n_nodes, "max_u": float(interior.max()),
            "u_at_center": float(u(0.5 * (grid.d_left + grid.d_right))), "residual": u.meta["residual"]}


def run_effective(cfg, files, seed, threads):
    sol = cell.solve_cell(cfg.theta(), TorusGrid(cfg["cell.N"]), cfg.alpha, cfg.quad(), cfg["cell.kernel"])
    grid = _grid(cfg)
    model = effective.EffectiveModel.from_cell(sol, grid, int(cfg["effective.a2_sign"]), cfg.quad())
    u = effective.solve_effective(model, cfg["source.value"], cfg["exterior.value"])
    files["effective.csv"] = effective.to_csv(u, model)
    files["plot_effective.gp"] = _solution_plot("effective.csv", "homogenized solution")
    return {"a1": sol.a1, "a2": sol.a2, "a2_sign": model.a2_sign, "h": grid.h,
            "u_at_center": float(u(0.5 * (grid.d_left + grid.d_right))), "residual": u.meta["residual"]}


def run_sweep(cfg, files, seed, threads):
    def progress(e, res):
        log.info("eps = %g: %s", e, ", ".join(f"a2_sign {s:+d} |Z| = {r.vd_norm_Z:.4e}" for s, r in res.items()))

    reports = rate_sweep(cfg.theta(), cfg.alpha, cfg["sweep.eps_list"], cfg.domain, cfg["source.value"],
                         cfg["exterior.value"], cfg["grid.h_factor"], cfg.quad(), cfg["sweep.a2_sign"],
                         cfg["cell.N"], cfg["grid.margin"], cfg["sweep.control"], cfg["sweep.force"],
                         progress, h=cfg["grid.h"])
    out = {}
    for s, rep in reports.items():
        tag = "plus" if s > 0 else "minus"
        name = f"sweep_a2_{tag}.csv"
        files[name] = rep.to_csv()
        files[f"plot_sweep_a2_{tag}.gp"] = rep.plot_script(name)
        out.update({f"{tag}.{k}": v for k, v in rep.footer().items()})
        out[f"{tag}.inversions"] = rep.inversions()
    return out


def run_mc(cfg, files, seed, threads):
    ests = [stable.mc_exit_time(cfg.alpha, x0, cfg["mc.dt"], cfg["mc.n_paths"], seed, cfg.domain, threads)
            for x0 in cfg["mc.x0"]]
    files["mc.csv"] = "# nlhomog mc v1\n" + stable.to_csv(ests)
    out = {}
    for e in ests:
        out[f"x0={e.x0:g}.mean"] = e.mean
        out[f"x0={e.x0:g}.stderr"] = e.stderr
    return out


def run_validate(cfg, files, seed, threads):
    results = acceptance.run_acceptance(list(cfg["validate.criteria"]), report=lambda r: log.info(r.line()),
                                        seed=seed, threads=threads)
    rows = ["# nlhomog acceptance v1", "criterion,title,status,limit_seconds,detail"]
    for r in results:
        detail = r.detail.replace('"', "'")
        rows.append(f'{r.number},{r.title},{"PASS" if r.passed else "FAIL"},{r.limit:.0f},"{detail}"')
    files["acceptance.csv"] = "\n".join(rows) + "\n"
    out = {f"criterion_{r.number}": "PASS" if r.passed else "FAIL" for r in results}
    out["all_passed"] = all(r.passed for r in results)
    out["_timings"] = {f"criterion_{r.number}_seconds": round(r.seconds, 2) for r in results}
    return out


RUNNERS = {"cell": run_cell, "solve": run_solve, "effective": run_effective,
           "sweep": run_sweep, "mc": run_mc, "validate": run_validate}


def _parser():
    p = argparse.ArgumentParser(prog="nlhomog", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"nlhomog {__version__}")
    sub = p.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="key = value configuration file (defaults apply when omitted)")
        s.add_argument("--out", default=f"out-{name}", help="output directory")
        s.add_argument("--seed", type=int, help="overrides the config seed")
        s.add_argument("--threads", type=int, default=1, help="worker threads (BLAS and Monte Carlo)")
        s.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override one config key; may be repeated")
        s.add_argument("-q", "--quiet", action="store_true")
    return p


def _overrides(items):
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in SCHEMA:
            raise ConfigError(f"--set expects KEY=VALUE with a known key, got {item!r}", field=key or None)
        try:
            out[key] = SCHEMA[key][0](value)
        except ValueError as exc:
            raise ConfigError(f"--set cannot parse {value.strip()!r}: {exc}", field=key) from exc
    return out


def _write_outputs(out_dir, files, meta):
    os.makedirs(out_dir, exist_ok=True)
    stage = tempfile.mkdtemp(prefix=".staging-", dir=out_dir)
    try:
        for name, text in {**files, "metadata.txt": meta}.items():
            with open(os.path.join(stage, name), "w", newline="\n") as fh:
                fh.write(text)
        for name in list(files) + ["metadata.txt"]:
            os.replace(os.path.join(stage, name), os.path.join(out_dir, name))
    finally:
        shutil.rmtree(stage, ignore_errors=True)


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    started = datetime.now(timezone.utc)
    try:
        text = ""
        if args.config:
            with open(args.config) as fh:
                text = fh.read()
        cfg = parse_config(text, experiment=args.experiment, overrides=_overrides(args.set))
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1", field="threads")
        seed = cfg["seed"] if args.seed is None else args.seed
        if seed < 0:
            raise ConfigError("--seed must be nonnegative", field="seed")
    except (ConfigError, OSError) as exc:
        log.error("invalid configuration: %s", exc)
        return EXIT_VALIDATION

    files = {"config.txt": cfg.to_text().replace(f"seed = {cfg['seed']}\n", f"seed = {seed}\n")}
    t0 = time.perf_counter()
    try:
        with threadpool_limits(limits=args.threads):
            summary = RUNNERS[cfg.experiment](cfg, files, seed, args.threads)
    except (ParameterError, CoefficientError) as exc:
        log.error("validation failure: %s", exc)
        return EXIT_VALIDATION
    except (SolverError, SingularityError, scipy.linalg.LinAlgError, FloatingPointError) as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
    timings = summary.pop("_timings", {})
    files["summary.txt"] = _summary({"experiment": cfg.experiment, **summary})
    meta = _summary({"started_utc": started.isoformat(), "finished_utc": datetime.now(timezone.utc).isoformat(),
                     "wall_seconds": round(time.perf_counter() - t0, 3), **timings,
                     "nlhomog_version": __version__, "numpy": np.__version__, "python": platform.python_version(),
                     "threads": args.threads, "argv": " ".join(sys.argv if argv is None else argv)})
    _write_outputs(args.out, files, meta)
    if cfg.experiment == "validate" and not summary["all_passed"]:
        failed = [k for k, v in summary.items() if v == "FAIL"]
        log.error("acceptance failed: %s", ", ".join(failed))
        return EXIT_ACCEPTANCE
    log.info("wrote %s", args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
