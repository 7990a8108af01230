"""Command-line harness.

Subcommands: synth, project, em, classify, experiment. Every command is
deterministic given its --seed, and all outputs are plain CSV or JSON so
runs can be diffed and replayed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import experiments
from .classifier import (
    cluster_analysis,
    evaluate,
    ingest,
    save_cluster_analysis,
    train,
)
from .em import CovarianceRestriction, rp_em, run_em, test_loglik
from .errors import RpmixError
from .gaussians import (
    FLOAT_FMT,
    load_dataset,
    load_mixture,
    mixture_separation,
    sample,
    save_dataset,
    save_mixture,
)
from .projection import (
    load_projection,
    pca,
    project_data,
    random_orthonormal,
    random_uniform,
    save_projection,
)
from .synthesis import CovarianceMode, MixtureSpec, make_mixture

REPORT_COLUMNS_HELP = """\
experiment report CSV columns:
  row_type    'trial' for raw measurements; 'mean', 'sd', 'min', 'max',
              'median' for aggregates recomputed per parameter group
  <group...>  experiment parameters (e.g. n, k, d, E, method, i, j)
  seed        the per-trial seed (blank on aggregate rows)
  <metrics>   measured quantities, full double precision:
              separation, eccentricity, accuracy, min_separation,
              reg_/rp_ success, iterations, test_loglik, failed flags,
              exact_match, rp_beats
"""

_RESTRICTIONS = {
    "shared": CovarianceRestriction.SHARED_FULL,
    "full": CovarianceRestriction.FULL_DISTINCT,
}

_MODES = {m.value: m for m in CovarianceMode}


def _cmd_synth(args):
    spec = MixtureSpec(
        n=args.n,
        k=args.k,
        c=args.c,
        E=args.eccentricity,
        covariance_mode=_MODES[args.mode],
        seed=args.seed,
    )
    mix = make_mixture(spec)
    save_mixture(mix, args.out)
    print(f"wrote mixture (k={mix.k}, n={mix.dim}, separation="
          f"{mixture_separation(mix):.6g}) to {args.out}")
    if args.samples:
        data = sample(mix, args.samples, args.seed)
        save_dataset(data, args.data_out)
        print(f"wrote {args.samples} samples to {args.data_out}")


def _cmd_project(args):
    if args.kind == "pca":
        if not args.data:
            raise RpmixError("--data is required for kind=pca")
        data = load_dataset(args.data)
        proj = pca(data, args.d)
    else:
        gen = random_orthonormal if args.kind == "orthonormal" else random_uniform
        proj = gen(args.n, args.d, args.seed)
    save_projection(proj, args.out)
    print(f"wrote {proj.kind.value} projection {proj.target_dim}x{proj.source_dim} to {args.out}")
    if args.data and args.data_out:
        data = load_dataset(args.data)
        save_dataset(project_data(proj, data), args.data_out)
        print(f"wrote projected data to {args.data_out}")


def _cmd_em(args):
    data = load_dataset(args.data)
    restriction = _RESTRICTIONS[args.restriction]
    if args.rp_dim:
        fit, proj, fit_low = rp_em(data, args.k, args.rp_dim, restriction, args.seed)
        print(f"low-dim EM: {fit_low.iterations} iterations, "
              f"final train loglik {fit_low.loglik_trace[-1]:.6f}")
        if args.projection_out:
            save_projection(proj, args.projection_out)
    else:
        fit = run_em(data, args.k, restriction, args.seed)
    save_mixture(fit.model, args.out)
    print(f"fit: {fit.iterations} iterations, converged={fit.converged}, "
          f"train loglik {fit.loglik_trace[-1]:.6f}")
    if args.trace_out:
        with open(args.trace_out, "w") as f:
            f.write("iteration,train_loglik\n")
            for i, ll in enumerate(fit.loglik_trace):
                f.write(f"{i},{FLOAT_FMT % ll}\n")
    if args.test:
        test = load_dataset(args.test)
        print(f"test loglik {test_loglik(fit.model, test):.6f}")


def _cmd_classify(args):
    train_set = ingest(args.train)
    model = train(train_set, args.d, per_class_k=args.per_class_k, seed=args.seed)
    print(f"trained {len(model.per_class)}-class model at d={args.d}")
    if args.test:
        test_set = ingest(args.test)
        acc = evaluate(model, test_set)
        print(f"test accuracy {acc:.4f}")
    if args.analysis_out:
        analysis = cluster_analysis(train_set, model.projection)
        save_cluster_analysis(analysis, args.analysis_out)
        print(f"wrote projected cluster analysis to {args.analysis_out}")
    if args.raw_analysis_out:
        analysis = cluster_analysis(train_set)
        save_cluster_analysis(analysis, args.raw_analysis_out)
        print(f"wrote raw-space cluster analysis to {args.raw_analysis_out}")


def _cmd_experiment(args):
    cfg = {}
    if args.config:
        with open(args.config) as f:
            cfg = json.load(f)
    name = args.name or cfg.get("experiment")
    if not name:
        raise RpmixError("no experiment named (positional argument or config file)")
    overrides = dict(cfg.get("overrides", {}))
    if args.threads != 1 and "threads" in experiments.EXPERIMENTS.get(name, (None, set()))[1]:
        overrides["threads"] = args.threads
    config = experiments.ExperimentConfig(
        experiment=name,
        trials=args.trials if args.trials is not None else cfg.get("trials"),
        base_seed=args.seed if args.seed is not None else cfg.get("base_seed", 0),
        overrides=overrides,
    )
    report = experiments.run(config)
    for line in report.summary_lines():
        print(line)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, f"{name}.csv")
        report.to_csv(path)
        print(f"wrote report to {path}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rpmix",
        description="Random projection for learning mixtures of Gaussians.",
        epilog=REPORT_COLUMNS_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic mixture (and samples)")
    p.add_argument("--n", type=int, required=True, help="dimension")
    p.add_argument("--k", type=int, required=True, help="number of components")
    p.add_argument("--c", type=float, required=True, help="pairwise separation")
    p.add_argument("--eccentricity", "-E", type=float, default=1.0)
    p.add_argument("--mode", choices=sorted(_MODES), default="spherical-shared")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="mixture JSON output path")
    p.add_argument("--samples", type=int, default=0, help="also draw this many points")
    p.add_argument("--data-out", default="samples.csv", help="sample CSV output path")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("project", help="generate a projection, optionally apply it")
    p.add_argument("--kind", choices=("orthonormal", "uniform", "pca"), default="orthonormal")
    p.add_argument("--n", type=int, help="source dimension (random kinds)")
    p.add_argument("--d", type=int, required=True, help="target dimension")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--data", help="input dataset CSV (required for pca)")
    p.add_argument("--data-out", help="projected dataset CSV output")
    p.add_argument("--out", required=True, help="projection JSON output path")
    p.set_defaults(func=_cmd_project)

    p = sub.add_parser("em", help="fit a mixture by EM or the RP+EM hybrid")
    p.add_argument("--data", required=True, help="training dataset CSV")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--restriction", choices=("shared", "full"), default="full")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rp-dim", type=int, default=0,
                   help="if set, use the RP+EM hybrid with this projected dim")
    p.add_argument("--test", help="held-out dataset CSV for test log-likelihood")
    p.add_argument("--out", required=True, help="fitted mixture JSON output")
    p.add_argument("--trace-out", help="CSV of the training log-likelihood trace")
    p.add_argument("--projection-out", help="JSON of the projection used (hybrid only)")
    p.set_defaults(func=_cmd_em)

    p = sub.add_parser("classify", help="train/evaluate the per-class mixture classifier")
    p.add_argument("--train", required=True, help="label-first CSV training data")
    p.add_argument("--test", help="label-first CSV test data")
    p.add_argument("--d", type=int, required=True, help="projected dimension")
    p.add_argument("--per-class-k", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--analysis-out", help="projected-space separation/eccentricity CSV")
    p.add_argument("--raw-analysis-out", help="raw-space separation/eccentricity CSV")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser(
        "experiment",
        help="run a named experiment and write its CSV report",
        epilog=REPORT_COLUMNS_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("name", nargs="?", choices=sorted(experiments.EXPERIMENTS),
                   help="experiment to run (or set it in --config)")
    p.add_argument("--config", help="JSON config: experiment, trials, base_seed, overrides")
    p.add_argument("--seed", type=int, default=None, help="base seed (trial t uses seed+t)")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--out", help="directory for the report CSV")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (RpmixError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
