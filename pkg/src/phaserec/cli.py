"""Command-line interface.

Every subcommand reads a flat ``key = value`` config (strict field names),
derives all randomness from one master seed, and writes fixed-header CSV
tables plus a ``manifest.json`` to the output directory.  Outputs are a
pure function of (config, master seed): per-task seeds are mixed from the
master seed and the task coordinates, so the worker count never changes a
single byte of any table.

Exit codes: 0 on success (non-converged estimates are flagged rows, not
failures), 1 when ``verify`` finds a failing criterion, 2 on usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from .experiments import (
    ConfigError,
    ExperimentConfig,
    SchemaError,
    build_manifest,
    resolve_threads,
    run_indexed,
    task_rng,
    task_seed,
    write_csv,
    write_manifest,
)
from .phases import TWO_PI

DEFAULT_SEED = 2026

COMMANDS = (
    "sample",
    "reconstruct",
    "sweep",
    "peierls",
    "theta-check",
    "sine-gordon",
    "level-line",
    "verify",
)

SAMPLE_HEADER = ["sample", "center", "min", "max", "dirichlet_energy", "task_seed"]
RECONSTRUCT_HEADER = [
    "vertex",
    "row",
    "col",
    "truth",
    "phase",
    "recon",
    "recon_var",
    "abs_error",
    "task_seed",
]
SWEEP_HEADER = [
    "T",
    "n",
    "ratio",
    "stderr",
    "rhat",
    "value",
    "green",
    "n_disorder",
    "n_excluded",
    "task_seed",
]
PEIERLS_HEADER = ["L", "survival", "T", "n", "task_seed"]
JACOBI_HEADER = ["identity", "beta", "a", "gap", "task_seed"]
RIEMANN_HEADER = ["instance", "g", "gap", "task_seed"]
SINE_GORDON_HEADER = [
    "n",
    "variance",
    "stderr",
    "mean",
    "acceptance",
    "converged",
    "n_disorder",
    "task_seed",
]
LEVEL_LINE_HEADER = ["rep", "kind", "step", "row", "col", "x", "y", "task_seed"]
VERIFY_HEADER = ["criterion", "name", "status", "task_seed"]
VERIFY_DETAILS_HEADER = ["criterion", "metric", "value", "threshold", "status", "task_seed"]


def _load_config(path: str | None) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig({})
    return ExperimentConfig.from_file(path)


def _nonneg_int(cfg: ExperimentConfig, key: str, default: int) -> int:
    value = cfg.get_int(key, default=default, positive=False)
    if value < 0:
        raise ConfigError(f"'{key}' must be >= 0, got {value}")
    return value


def _master_seed(args, cfg: ExperimentConfig, default: int | None = None) -> int:
    """Flag wins over the config ``seed`` key; a master seed is mandatory
    for stochastic commands unless a default is supplied."""
    if args.seed is not None:
        return int(args.seed)
    seed = cfg.get_int("seed", default=None, positive=False)
    if seed is not None:
        return seed
    if default is not None:
        return default
    raise ConfigError("master seed required: pass --seed or a 'seed' config key")


# ---------------------------------------------------------------------------
# subcommands


def _cmd_sample(cfg: ExperimentConfig, out: Path, seed: int, threads: int):
    from .gff import GffSampler
    from .lattice import build_lattice

    cfg.check_keys({"seed", "n", "bc", "n_samples"})
    n = cfg.require("n", "int")
    bc = cfg.get_str("bc", default="dirichlet", choices=("dirichlet", "free"))
    n_samples = cfg.require("n_samples", "int")
    lattice = build_lattice(n, bc=bc)

    def draw(i: int):
        ts = task_seed(seed, i)
        rng = task_rng(seed, i)
        phi = GffSampler(lattice).sample(rng)
        return [
            i,
            float(phi[lattice.center]),
            float(phi.min()),
            float(phi.max()),
            lattice.dirichlet_energy(phi),
            ts,
        ]

    rows = run_indexed(draw, list(range(n_samples)), threads)
    path = write_csv(out / "samples.csv", SAMPLE_HEADER, rows)
    centers = np.array([r[1] for r in rows])
    diagnostics = {
        "center_mean": float(centers.mean()),
        "center_variance": float(centers.var(ddof=1)) if n_samples > 1 else None,
        "green_center": lattice.green(lattice.center, lattice.center),
    }
    return [path], diagnostics, 0


def _cmd_reconstruct(cfg: ExperimentConfig, out: Path, seed: int, threads: int):
    from .gff import GffSampler
    from .lattice import build_lattice
    from .phases import observe
    from .recon import SamplerConfig, reconstruct

    cfg.check_keys(
        {"seed", "n", "bc", "T", "burn_in", "thinning", "n_samples", "n_chains"}
    )
    n = cfg.require("n", "int")
    bc = cfg.get_str("bc", default="dirichlet", choices=("dirichlet", "free"))
    T = cfg.require("T", "float")
    sampler_cfg = SamplerConfig(
        burn_in=_nonneg_int(cfg, "burn_in", 1000),
        thinning=cfg.get_int("thinning", default=10),
        n_samples=cfg.get_int("n_samples", default=100),
        n_chains=cfg.get_int("n_chains", default=2),
    )
    lattice = build_lattice(n, bc=bc)
    ts = task_seed(seed, 0)
    rng = task_rng(seed, 0)
    phi = GffSampler(lattice).sample(rng)
    phases = observe(lattice, phi, T)
    result = reconstruct(phases, config=sampler_cfg, rng=rng)
    rows = []
    for v in range(lattice.num_vertices):
        rows.append(
            [
                v,
                int(lattice.row[v]),
                int(lattice.col[v]),
                float(phi[v]),
                float(phases.a[v]),
                float(result.mean_field[v]),
                float(result.per_site_var[v]),
                float(abs(result.mean_field[v] - phi[v])),
                ts,
            ]
        )
    path = write_csv(out / "field.csv", RECONSTRUCT_HEADER, rows)
    err = result.mean_field[lattice.interior] - phi[lattice.interior]
    diagnostics = {
        "T": T,
        "n": n,
        "bc": bc,
        "converged": bool(result.converged),
        "rmse_interior": float(np.sqrt(np.mean(err**2))),
        **{k: float(v) for k, v in result.diagnostics.items()},
    }
    return [path], diagnostics, 0


def _cmd_sweep(cfg: ExperimentConfig, out: Path, seed: int, threads: int):
    from .ivgff import PairConfig
    from .lattice import build_lattice
    from .phases import observe
    from .recon import SamplerConfig, conditional_variance, reconstruct

    cfg.check_keys(
        {"seed", "Ts", "ns", "bc", "n_disorder", "n_pairs", "sweeps", "init2"}
    )
    Ts = cfg.require("Ts", "floats")
    ns = cfg.require("ns", "ints")
    bc = cfg.get_str("bc", default="dirichlet", choices=("dirichlet", "free"))
    n_disorder = cfg.get_int("n_disorder", default=64)
    n_pairs = cfg.get_int("n_pairs", default=4)
    sweeps = cfg.get_int("sweeps", default=300)
    init2 = cfg.get_str("init2", default="lift", choices=("lift", "zero", "ground"))
    pair_config = PairConfig(sweeps=sweeps, init2=init2)

    def cell(coords):
        ti, ni = coords
        T, n = Ts[ti], ns[ni]
        ts = task_seed(seed, ti, ni)
        rng = task_rng(seed, ti, ni)
        lattice = build_lattice(n, bc=bc)
        f = np.zeros(lattice.num_vertices)
        f[lattice.center] = 1.0
        est = conditional_variance(
            lattice,
            f,
            T,
            n_disorder=n_disorder,
            n_pairs=n_pairs,
            pair_config=pair_config,
            rng=rng,
        )
        green = lattice.green(lattice.center, lattice.center)
        # convergence health of one representative chain pair at this cell
        from .gff import GffSampler

        probe_phi = GffSampler(lattice).sample(rng)
        probe = reconstruct(
            observe(lattice, probe_phi, T),
            config=SamplerConfig(
                burn_in=sweeps, thinning=max(1, sweeps // 50), n_samples=50
            ),
            rng=rng,
        )
        return [
            float(T),
            int(n),
            est.value / green,
            est.std_error / green,
            float(probe.diagnostics["rhat_center"]),
            est.value,
            green,
            est.n_disorder,
            est.n_excluded,
            ts,
        ]

    coords = [(ti, ni) for ti in range(len(Ts)) for ni in range(len(ns))]
    rows = run_indexed(cell, coords, threads)
    path = write_csv(out / "sweep.csv", SWEEP_HEADER, rows)
    diagnostics = {
        "cells": len(rows),
        "max_rhat": max(r[4] for r in rows),
        "any_excluded": any(r[8] > 0 for r in rows),
    }
    return [path], diagnostics, 0


def _cmd_peierls(cfg: ExperimentConfig, out: Path, seed: int, threads: int):
    from .clusters import cluster_tail
    from .ivgff import PairConfig

    cfg.check_keys({"seed", "T", "n", "n_samples", "sweeps", "init2", "L_max"})
    T = cfg.require("T", "float")
    n = cfg.require("n", "int")
    n_samples = cfg.require("n_samples", "int")
    sweeps = cfg.get_int("sweeps", default=300)
    init2 = cfg.get_str("init2", default="lift", choices=("lift", "zero", "ground"))
    L_max = cfg.get_int("L_max", default=2 * n)
    ts = task_seed(seed, 0)
    tail = cluster_tail(
        T,
        n,
        n_samples,
        pair_config=PairConfig(sweeps=sweeps, init2=init2),
        rng=task_rng(seed, 0),
        Ls=np.arange(1, L_max + 1),
    )
    rows = [
        [int(L), float(s), T, n, ts] for L, s in zip(tail.Ls, tail.survival)
    ]
    path = write_csv(out / "peierls.csv", PEIERLS_HEADER, rows)
    diagnostics = {
        "slope": tail.slope,
        "varpi": tail.varpi,
        "r_squared": tail.r_squared,
        "n_samples": tail.n_samples,
        "n_excluded": tail.n_excluded,
        "n_nonempty": tail.n_nonempty,
        "rule_margin": tail.rule_margin,
        "degenerate": tail.degenerate,
    }
    return [path], diagnostics, 0


def _cmd_theta_check(cfg: ExperimentConfig, out: Path, seed: int, threads: int):
    from .experiments.acceptance import identity_grids

    cfg.check_keys({"seed"})
    grids = identity_grids()
    ts = task_seed(seed, 0)
    jacobi_rows = [
        [identity, float(beta), float(a), float(gap), ts]
        for identity, beta, a, gap in grids.grid_rows
    ]
    riemann_rows = [
        [i, 2, float(gap), ts] for i, gap in enumerate(grids.riemann_gaps)
    ]
    paths = [
        write_csv(out / "jacobi_grid.csv", JACOBI_HEADER, jacobi_rows),
        write_csv(out / "riemann_instances.csv", RIEMANN_HEADER, riemann_rows),
    ]
    diagnostics = {
        "max_primal_dual_gap": grids.max_primal_dual,
        "max_jacobi_gap": grids.max_jacobi,
        "max_riemann_gap": grids.max_riemann,
        "tolerance_primal_dual": 1e-10,
        "tolerance_jacobi": 1e-10,
        "tolerance_riemann": 1e-8,
    }
    print(f"max primal-dual gap   {grids.max_primal_dual:.3e}  (tolerance 1e-10)")
    print(f"max Jacobi gap        {grids.max_jacobi:.3e}  (tolerance 1e-10)")
    print(f"max Riemann g=2 gap   {grids.max_riemann:.3e}  (tolerance 1e-8)")
    ok = (
        grids.max_primal_dual <= 1e-10
        and grids.max_jacobi <= 1e-10
        and grids.max_riemann <= 1e-8
    )
    return paths, diagnostics, 0 if ok else 1


def _cmd_sine_gordon(cfg: ExperimentConfig, out: Path, seed: int, threads: int):
    from .sinegordon import SgConfig, variance_profile

    cfg.check_keys(
        {
            "seed",
            "beta",
            "z",
            "ns",
            "n_disorder",
            "disorder",
            "T",
            "burn_in",
            "thinning",
            "n_samples",
        }
    )
    beta = cfg.require("beta", "float")
    z = cfg.require("z", "float", positive=False)
    if z < 0:
        raise ConfigError(f"'z' must be >= 0, got {z}")
    ns = cfg.require("ns", "ints")
    n_disorder = cfg.require("n_disorder", "int")
    disorder = cfg.get_str(
        "disorder", default="uniform", choices=("uniform", "observed-phase")
    )
    T = cfg.get_float("T", default=None)
    sg = SgConfig(
        beta=beta,
        z=z,
        burn_in=_nonneg_int(cfg, "burn_in", 500),
        thinning=cfg.get_int("thinning", default=5),
        n_samples=cfg.get_int("n_samples", default=200),
    )

    def profile(i: int):
        ts = task_seed(seed, i)
        row = variance_profile(
            sg,
            ns=[ns[i]],
            n_disorder=n_disorder,
            disorder=disorder,
            T=T,
            rng=task_rng(seed, i),
        )[0]
        return [
            row["n"],
            row["variance"],
            row["std_error"],
            row["mean"],
            row["acceptance"],
            bool(row["converged"]),
            row["n_disorder"],
            ts,
        ]

    rows = run_indexed(profile, list(range(len(ns))), threads)
    path = write_csv(out / "sine_gordon.csv", SINE_GORDON_HEADER, rows)
    diagnostics = {"beta": beta, "z": z, "disorder": disorder}
    if len(ns) >= 3:
        from .stats import linear_fit

        slope, _, r2 = linear_fit(
            np.log(np.array(ns, dtype=float)), np.array([r[1] for r in rows])
        )
        diagnostics["slope_vs_log_n"] = slope
        diagnostics["r_squared"] = r2
    return [path], diagnostics, 0


def _cmd_level_line(cfg: ExperimentConfig, out: Path, seed: int, threads: int):
    from .gff import GffSampler
    from .lattice import build_lattice
    from .levellines import (
        LAMBDA,
        harmonic_boundary,
        hausdorff,
        reconstructed_level_line,
        trace_level_line,
    )
    from .phases import observe
    from .recon import SamplerConfig

    cfg.check_keys(
        {"seed", "T", "n", "lam", "n_reps", "burn_in", "thinning", "n_samples", "n_chains"}
    )
    T = cfg.require("T", "float")
    n = cfg.require("n", "int")
    lam = cfg.get_float("lam", default=LAMBDA)
    n_reps = cfg.get_int("n_reps", default=1)
    sampler_cfg = SamplerConfig(
        burn_in=_nonneg_int(cfg, "burn_in", 600),
        thinning=cfg.get_int("thinning", default=5),
        n_samples=cfg.get_int("n_samples", default=100),
        n_chains=cfg.get_int("n_chains", default=2),
    )
    if T * lam >= np.pi:
        raise ConfigError(
            f"T * lam = {T * lam:.4f} must be below pi for unambiguous phase tracing"
        )
    lattice = build_lattice(n)
    u = harmonic_boundary(lattice, lam=lam)

    def rep(i: int):
        ts = task_seed(seed, i)
        rng = task_rng(seed, i)
        phi = GffSampler(lattice).sample(rng)
        phases = observe(lattice, phi, T)
        true_path = trace_level_line(lattice, phi + u)
        rec_path, result = reconstructed_level_line(
            phases, config=sampler_cfg, lam=lam, rng=rng
        )
        rows = []
        for kind, path in (("true", true_path), ("recon", rec_path)):
            pts = path.paper_points
            for s in range(len(path.points)):
                rows.append(
                    [
                        i,
                        kind,
                        s,
                        float(path.points[s, 0]),
                        float(path.points[s, 1]),
                        float(pts[s, 0]),
                        float(pts[s, 1]),
                        ts,
                    ]
                )
        return rows, hausdorff(true_path, rec_path), bool(result.converged)

    results = run_indexed(rep, list(range(n_reps)), threads)
    rows = [row for rep_rows, _, _ in results for row in rep_rows]
    path = write_csv(out / "level_lines.csv", LEVEL_LINE_HEADER, rows)
    dists = [h for _, h, _ in results]
    diagnostics = {
        "T": T,
        "n": n,
        "lam": lam,
        "hausdorff": dists,
        "mean_hausdorff": float(np.mean(dists)),
        "all_converged": all(c for _, _, c in results),
    }
    return [path], diagnostics, 0


def _cmd_verify(cfg: ExperimentConfig, out: Path, seed: int, threads: int, quick: bool):
    from .experiments.acceptance import run_all

    cfg.check_keys({"seed"})
    results = run_all(seed=seed, threads=threads, quick=quick)
    rows = []
    detail_rows = []
    all_ok = True
    for res in results:
        ts = task_seed(seed, res.number)
        status = "skipped" if res.passed is None else ("pass" if res.passed else "fail")
        if res.passed is False:
            all_ok = False
        rows.append([res.number, res.name, status, ts])
        for metric, value, threshold, st in res.details:
            detail_rows.append([res.number, metric, value, threshold, st, ts])
        line = f"{status.upper():>7}  criterion {res.number:2d}: {res.name}"
        if res.passed is not None:
            line += f"  ({res.runtime:.1f}s)"
        print(line)
        for note in res.notes:
            print(f"         - {note}")
    paths = [
        write_csv(out / "verify.csv", VERIFY_HEADER, rows),
        write_csv(out / "verify_details.csv", VERIFY_DETAILS_HEADER, detail_rows),
    ]
    diagnostics = {
        "quick": quick,
        "criteria_run": sum(1 for r in results if r.passed is not None),
        "criteria_passed": sum(1 for r in results if r.passed),
        "runtimes": {str(r.number): r.runtime for r in results},
    }
    return paths, diagnostics, 0 if all_ok else 1


# ---------------------------------------------------------------------------
# dispatch


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="phaserec",
        description="Lattice field reconstruction from phase observations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} task")
        p.add_argument("--config", type=str, default=None, help="key = value config file")
        p.add_argument("--out", type=str, default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="master seed (unsigned 64-bit)")
        p.add_argument(
            "--threads",
            type=int,
            default=None,
            help="worker threads (default: PHASEREC_THREADS or 1)",
        )
        if name == "verify":
            p.add_argument(
                "--quick",
                action="store_true",
                help="run only the fast deterministic criteria",
            )
    args = parser.parse_args(argv)

    start = time.perf_counter()
    try:
        cfg = _load_config(args.config)
        threads = resolve_threads(args.threads)
        out = Path(args.out) if args.out is not None else Path("phaserec_out") / args.command
        if args.command == "theta-check":
            seed = _master_seed(args, cfg, default=0)
        elif args.command == "verify":
            seed = _master_seed(args, cfg, default=DEFAULT_SEED)
        else:
            seed = _master_seed(args, cfg)
        if seed < 0:
            raise ConfigError(f"master seed must be nonnegative, got {seed}")

        if args.command == "sample":
            outputs, diagnostics, code = _cmd_sample(cfg, out, seed, threads)
        elif args.command == "reconstruct":
            outputs, diagnostics, code = _cmd_reconstruct(cfg, out, seed, threads)
        elif args.command == "sweep":
            outputs, diagnostics, code = _cmd_sweep(cfg, out, seed, threads)
        elif args.command == "peierls":
            outputs, diagnostics, code = _cmd_peierls(cfg, out, seed, threads)
        elif args.command == "theta-check":
            outputs, diagnostics, code = _cmd_theta_check(cfg, out, seed, threads)
        elif args.command == "sine-gordon":
            outputs, diagnostics, code = _cmd_sine_gordon(cfg, out, seed, threads)
        elif args.command == "level-line":
            outputs, diagnostics, code = _cmd_level_line(cfg, out, seed, threads)
        else:
            outputs, diagnostics, code = _cmd_verify(
                cfg, out, seed, threads, getattr(args, "quick", False)
            )
    except (ConfigError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    manifest = build_manifest(
        command=args.command,
        config_fields=cfg.fields,
        config_hash=cfg.hash,
        seed=seed,
        threads=threads,
        outputs=[p.name for p in outputs],
        diagnostics=diagnostics,
        wall_clock_seconds=time.perf_counter() - start,
    )
    write_manifest(out / "manifest.json", manifest)
    for p in outputs:
        print(f"wrote {p}")
    return code


if __name__ == "__main__":
    sys.exit(main())
