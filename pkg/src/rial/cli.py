"""Batch experiment runner and utility subcommands.

``rial run config.json`` solves every (instance, seed, arm) cell of the
configured grid, writes one convergence-trace CSV per cell plus an aggregate
CSV averaged over seeds, and exits 0 on full completion, 1 on per-cell
failures, 2 on a bad config. ``rial check`` runs the built-in invariant
suite, ``rial predict`` evaluates the outer-iteration bound, and
``rial bench`` times the compiled kernels against the numpy fallback.
"""

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, RialError
from .inner import InnerConfig
from .outer import OuterConfig, predict_outer_iterations, rial_solve
from .problems import (
    CcaInstance,
    PcaInstance,
    build_nonlinear_test,
    build_sparse_cca,
    build_sparse_pca,
    generate_cca_data,
    generate_pca_data,
    sparsity,
)
from .selfcheck import run_selfcheck

OUT_DIR_ENV = "RIAL_OUT_DIR"

TOTAL_RULE = (
    "total = inner RGD steps summed over outer iterations plus one "
    "stationarity-check gradient evaluation per outer iteration; "
    "cpu = process seconds of the solve loop, 0 when timing is disabled"
)


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def emit_csv(records, path, fieldnames=None, comment=None):
    """Write dict records as RFC-4180-style CSV with UNIX newlines.

    Floats are rendered with 6 significant digits; an empty record list
    yields a header-only file (fieldnames must then be given).
    """
    if fieldnames is None:
        if not records:
            raise ParameterError("fieldnames are required for an empty record list")
        fieldnames = list(records[0].keys())
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            if comment:
                fh.write(f"# {comment}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(fieldnames)
            for rec in records:
                writer.writerow([_fmt(rec[name]) for name in fieldnames])
    except OSError as exc:
        raise RialError(f"cannot write CSV to {path}: {exc}") from exc


@dataclass
class ExperimentConfig:
    """Parsed experiment grid; see README for the JSON layout."""

    family: str
    dims: list
    mu: list
    r: list
    seeds: list
    arms: dict
    outer: dict = field(default_factory=dict)
    out_dir: str = ""
    timing: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.family not in ("pca", "cca", "nonlinear"):
            raise ParameterError(f"unknown problem family {self.family!r}")
        for name in ("dims", "mu", "r", "seeds"):
            if not getattr(self, name):
                raise ParameterError(f"config field {name!r} must be a nonempty list")
        if not self.arms:
            raise ParameterError("config needs at least one arm")
        for arm in self.arms:
            if arm not in ("classical", "damped"):
                raise ParameterError(f"unknown arm {arm!r}")
        if self.workers < 1:
            raise ParameterError("workers must be >= 1")
        required = {"pca": ("d", "N"), "cca": ("d", "p", "q"), "nonlinear": ("p",)}
        for dims in self.dims:
            missing = [key for key in required[self.family] if key not in dims]
            if missing:
                raise ParameterError(
                    f"{self.family} dims entry {dims} is missing {missing}"
                )


def load_config(path, out_override=None, arm_filter=None, seed_override=None,
                workers_override=None):
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    arms = raw.get("arms", {"classical": {}, "damped": {}})
    if isinstance(arms, list):
        arms = {name: {} for name in arms}
    if arm_filter and arm_filter != "both":
        if arm_filter not in arms:
            arms[arm_filter] = {}
        arms = {arm_filter: arms[arm_filter]}
    cfg = ExperimentConfig(
        family=raw.get("family", ""),
        dims=raw.get("dims", []),
        mu=raw.get("mu", []),
        r=raw.get("r", []),
        seeds=[seed_override] if seed_override is not None else raw.get("seeds", []),
        arms=arms,
        outer=raw.get("outer", {}),
        out_dir=out_override or raw.get("out_dir", "")
        or os.environ.get(OUT_DIR_ENV, "rial-results"),
        timing=bool(raw.get("timing", True)),
        workers=workers_override or int(raw.get("workers", 1)),
    )
    for arm, overrides in cfg.arms.items():
        _outer_config(cfg.outer, overrides, arm)  # fail fast on bad keys
    return cfg


def _outer_config(common, overrides, arm):
    merged = dict(common)
    merged.update(overrides)
    inner_kwargs = merged.pop("inner", {})
    merged["inner"] = InnerConfig(**inner_kwargs)
    merged["dual_mode"] = arm
    return OuterConfig(**merged)


def _dim_tag(family, dims):
    if family == "pca":
        return f"d{dims['d']}N{dims['N']}"
    if family == "cca":
        return f"d{dims['d']}p{dims['p']}q{dims['q']}"
    return f"p{dims['p']}"


def _build_problem(family, dims, mu, r, data_seed):
    if family == "pca":
        data = generate_pca_data(dims["d"], dims["N"], data_seed)
        return build_sparse_pca(PcaInstance(data, mu, r))
    if family == "cca":
        a, b = generate_cca_data(dims["d"], dims["p"], dims["q"], data_seed)
        return build_sparse_cca(CcaInstance(a, b, mu1=mu, mu2=mu, r=r))
    return build_nonlinear_test(dims["p"], r, data_seed, mu=mu)


def run_cell(spec):
    """Solve one (instance, seed, arm) cell; returns plain dicts only."""
    family = spec["family"]
    data_ss, init_ss = np.random.SeedSequence(spec["seed"]).spawn(2)
    problem = _build_problem(family, spec["dims"], spec["mu"], spec["r"], data_ss)
    cfg = _outer_config(spec["outer"], spec["arm_overrides"], spec["arm"])
    x0 = problem.manifold.random_point(np.random.default_rng(init_ss))

    t0 = time.process_time()
    state, records, status = rial_solve(problem, cfg, x0=x0)
    cpu = time.process_time() - t0 if spec["timing"] else 0.0

    trace = []
    for rec in records:
        counts = rec.oracle_counts
        trace.append(
            {
                "k": rec.k,
                "phi": rec.phi,
                "r_grad": rec.r_grad,
                "r_feas": rec.r_feas,
                "inner_iters": rec.inner_iterations,
                "cum_f": counts["f"],
                "cum_grad_f": counts["grad_f"],
                "cum_a": counts["a"],
                "cum_adjoint": counts["adjoint"],
                "cum_prox": counts["prox"],
                "cpu_s": rec.wall_time if spec["timing"] else 0.0,
            }
        )

    metrics = {
        "neg_phi": -records[-1].phi,
        "cpu": cpu,
        "outer": len(records),
        "total": sum(r.inner_iterations for r in records) + len(records),
        "converged": status == "converged",
    }
    if family == "cca":
        p = spec["dims"]["p"]
        metrics["sparu"] = sparsity(state.x[:p])
        metrics["sparv"] = sparsity(state.x[p:])
    else:
        metrics["spar"] = sparsity(state.x)
    return {"trace": trace, "metrics": metrics}


def _cell_specs(cfg):
    specs = []
    for dims in cfg.dims:
        for r in cfg.r:
            for mu in cfg.mu:
                for arm in sorted(cfg.arms):
                    for seed in cfg.seeds:
                        specs.append(
                            {
                                "family": cfg.family,
                                "dims": dims,
                                "r": r,
                                "mu": mu,
                                "arm": arm,
                                "seed": seed,
                                "outer": cfg.outer,
                                "arm_overrides": cfg.arms[arm],
                                "timing": cfg.timing,
                            }
                        )
    return specs


def run_experiment(cfg, printer=print):
    """Run the full grid; returns (exit_code, aggregate_path)."""
    out_dir = cfg.out_dir
    trace_dir = os.path.join(out_dir, "traces")
    os.makedirs(trace_dir, exist_ok=True)

    specs = _cell_specs(cfg)
    results = {}
    failures = []

    def finish(spec, outcome, error=None):
        key = (
            _dim_tag(cfg.family, spec["dims"]),
            spec["r"],
            spec["mu"],
            spec["arm"],
            spec["seed"],
        )
        if error is not None:
            failures.append((key, error))
            printer(f"FAIL {key}: {error}")
            return
        results[key] = outcome["metrics"]
        name = (
            f"trace_{cfg.family}_{key[0]}_r{spec['r']}_mu{spec['mu']:g}"
            f"_seed{spec['seed']}_{spec['arm']}.csv"
        )
        emit_csv(
            outcome["trace"],
            os.path.join(trace_dir, name),
            fieldnames=[
                "k", "phi", "r_grad", "r_feas", "inner_iters", "cum_f",
                "cum_grad_f", "cum_a", "cum_adjoint", "cum_prox", "cpu_s",
            ],
            comment=TOTAL_RULE,
        )

    def outcome_of(run):
        try:
            return run(), None
        except Exception as exc:  # per-cell isolation; IO errors stay fatal
            return None, str(exc)

    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [pool.submit(run_cell, spec) for spec in specs]
            for spec, future in zip(specs, futures):
                outcome, error = outcome_of(future.result)
                finish(spec, outcome, error=error)
    else:
        for spec in specs:
            outcome, error = outcome_of(lambda spec=spec: run_cell(spec))
            finish(spec, outcome, error=error)

    spar_fields = ["sparu", "sparv"] if cfg.family == "cca" else ["spar"]
    rows = []
    for dims in cfg.dims:
        tag = _dim_tag(cfg.family, dims)
        for r in cfg.r:
            for mu in cfg.mu:
                for arm in sorted(cfg.arms):
                    cells = [
                        results[(tag, r, mu, arm, seed)]
                        for seed in cfg.seeds
                        if (tag, r, mu, arm, seed) in results
                    ]
                    row = {"family": cfg.family, "dims": tag, "r": r,
                           "mu": mu, "arm": arm}
                    metric_names = ["neg_phi", *spar_fields, "cpu", "outer", "total"]
                    for name in metric_names:
                        row[name] = (
                            float(np.mean([c[name] for c in cells]))
                            if cells
                            else float("nan")
                        )
                    row["seeds"] = len(cells)
                    row["failures"] = len(cfg.seeds) - len(cells)
                    rows.append(row)

    aggregate_path = os.path.join(out_dir, "aggregate.csv")
    emit_csv(
        rows,
        aggregate_path,
        fieldnames=["family", "dims", "r", "mu", "arm", "neg_phi", *spar_fields,
                    "cpu", "outer", "total", "seeds", "failures"],
        comment=TOTAL_RULE,
    )
    printer(f"wrote {aggregate_path} ({len(rows)} rows, {len(failures)} failed cells)")
    return (1 if failures else 0), aggregate_path


def _bench_kernels(sizes, repeats, printer):
    """Time the l1 kernels on both backends; returns 0."""
    from . import _kernels_np

    backends = [("numpy", _kernels_np)]
    try:
        from . import _kernels

        backends.insert(0, ("compiled", _kernels))
    except ImportError:
        printer("compiled extension not available; timing the numpy fallback only")

    rng = np.random.default_rng(0)
    printer(f"{'size':>12} {'kernel':>10} " +
            " ".join(f"{name:>12}" for name, _ in backends) + "   speedup")
    for rows, cols in sizes:
        w = rng.standard_normal(rows * cols)
        for kernel, call in (
            ("prox", lambda impl: impl.l1_prox(w, 0.3)),
            ("moreau", lambda impl: impl.l1_moreau(w, 0.5, 0.25)),
        ):
            per_call = []
            for _, impl in backends:
                call(impl)  # warm up
                t0 = time.perf_counter()
                for _ in range(repeats):
                    call(impl)
                per_call.append((time.perf_counter() - t0) / repeats)
            speedup = per_call[-1] / per_call[0] if len(per_call) > 1 else 1.0
            printer(
                f"{rows}x{cols:<7} {kernel:>10} "
                + " ".join(f"{1e6 * t:>10.2f}us" for t in per_call)
                + f"   {speedup:6.2f}x"
            )
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="rial",
        description="Augmented-Lagrangian benchmark runner for manifold "
        "optimization problems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment config")
    run_p.add_argument("config", help="JSON experiment config")
    run_p.add_argument("--out", help="output directory (overrides config and "
                       f"${OUT_DIR_ENV})")
    run_p.add_argument("--arm", choices=["classical", "damped", "both"],
                       default="both")
    run_p.add_argument("--seed", type=int, help="run a single seed only")
    run_p.add_argument("--workers", type=int, help="parallel cell workers")

    sub.add_parser("check", help="run the built-in invariant suite")

    pred_p = sub.add_parser("predict", help="outer-iteration bound")
    pred_p.add_argument("--lh", type=float, required=True,
                        help="Lipschitz constant of h")
    pred_p.add_argument("--sigma1", type=float, default=1.5)
    pred_p.add_argument("--eps1", type=float, default=1.5)
    pred_p.add_argument("--b", type=float, default=1.5)
    pred_p.add_argument("--eps", type=float, default=1e-5)

    bench_p = sub.add_parser("bench", help="compare kernel backends")
    bench_p.add_argument("--sizes", default="200x5,1000x10,4000x50",
                         help="comma-separated ROWSxCOLS list")
    bench_p.add_argument("--repeats", type=int, default=300)

    args = parser.parse_args(argv)

    if args.command == "run":
        try:
            cfg = load_config(args.config, out_override=args.out,
                              arm_filter=args.arm, seed_override=args.seed,
                              workers_override=args.workers)
        except (OSError, ValueError, KeyError, TypeError, RialError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
        code, _ = run_experiment(cfg)
        return code

    if args.command == "check":
        return 1 if run_selfcheck() else 0

    if args.command == "predict":
        try:
            k = predict_outer_iterations(args.lh, args.sigma1, args.eps1,
                                         args.b, args.eps)
        except RialError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        print(k)
        return 0

    if args.command == "bench":
        sizes = []
        for chunk in args.sizes.split(","):
            rows, cols = chunk.lower().split("x")
            sizes.append((int(rows), int(cols)))
        return _bench_kernels(sizes, args.repeats, print)

    return 2


if __name__ == "__main__":
    sys.exit(main())
