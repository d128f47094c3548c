"""Command-line interface.

Subcommands: generate, walk, laplacian, train, baseline, experiment.  Exit
codes: 0 success, 2 for validation errors (bad flags, malformed files,
violated preconditions), 1 for runtime failures.  The only environment
variable consulted is HYPERMAG_THREADS, which caps the BLAS thread count and
must act before the numeric libraries load.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path


def _apply_thread_cap() -> None:
    threads = os.environ.get("HYPERMAG_THREADS")
    if not threads:
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, threads)


def _parse_charge(text: str) -> tuple[str, float]:
    if text == "matrix":
        return "matrix", 0.25
    if text.startswith("q="):
        try:
            value = float(text[2:])
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad charge '{text}'") from None
        if value < 0:
            raise argparse.ArgumentTypeError("scalar charge must be nonnegative")
        return "scalar", value
    raise argparse.ArgumentTypeError(f"charge must be 'matrix' or 'q=<float>', got '{text}'")


def _add_data_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--hypergraph", required=True, help="line-JSON hypergraph file")
    parser.add_argument("--edvw", choices=("file", "degree", "uniform"), default="file",
                        help="EDVW source: per-line arrays, weighted degrees, or uniform")
    parser.add_argument("--features", required=True, help="vertex feature CSV")
    parser.add_argument("--labels", required=True, help="vertex label CSV")


def _add_training_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--hidden", type=int, default=64, help="hidden width per layer")
    parser.add_argument("--layers", type=int, default=2, help="number of layers")
    parser.add_argument("--epochs", type=int, default=400)
    parser.add_argument("--learning-rate", type=float, default=0.01)
    parser.add_argument("--weight-decay", type=float, default=0.01)
    parser.add_argument("--splits", type=int, default=10, help="number of random splits")
    parser.add_argument("--fraction", type=float, default=0.8, help="training fraction")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", help="directory for report.json and history.csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypermag",
        description="Hypergraph walks, magnetic Laplacians, and node classification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a planted synthetic dataset")
    gen.add_argument("--n", type=int, default=400)
    gen.add_argument("--classes", type=int, default=2)
    gen.add_argument("--edges-per-class", type=int, default=170)
    gen.add_argument("--p-within", type=float, default=0.5)
    gen.add_argument("--p-noise", type=float, default=0.05)
    gen.add_argument("--signal", type=float, default=0.8,
                     help="direction signal in [0, 1]; 0 removes the EDVW skew")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output directory")

    walk = sub.add_parser("walk", help="build a walk and print its diagnostics")
    walk.add_argument("--hypergraph", required=True)
    walk.add_argument("--edvw", choices=("file", "degree", "uniform"), default="file")
    walk.add_argument("--lazy", action="store_true",
                      help="use the lazy chain (P+I)/2 for the stationary solve")
    walk.add_argument("--out-matrix", help="write P as coordinate text")

    lap = sub.add_parser("laplacian", help="emit a magnetic Laplacian")
    lap.add_argument("--hypergraph", required=True)
    lap.add_argument("--edvw", choices=("file", "degree", "uniform"), default="file")
    lap.add_argument("--charge", type=_parse_charge, default=("scalar", 0.25),
                     help="'q=<float>' (matrix charge needs training)")
    lap.add_argument("--form", choices=("normalized", "unnormalized"), default="normalized")
    lap.add_argument("--renormalize", action="store_true")
    lap.add_argument("--out", required=True, help="coordinate-text output file")

    tr = sub.add_parser("train", help="train the complex network")
    _add_data_flags(tr)
    tr.add_argument("--charge", type=_parse_charge, default=("matrix", 0.25),
                    help="'matrix' for the learnable charge, or 'q=<float>'")
    _add_training_flags(tr)

    base = sub.add_parser("baseline", help="run a reduction baseline")
    base.add_argument("--method", choices=("hgnn", "hgnn-star", "gcn", "spectral"),
                      required=True)
    _add_data_flags(base)
    _add_training_flags(base)

    exp = sub.add_parser("experiment", help="run an experiment from a JSON config")
    exp.add_argument("--config", required=True, help="ExperimentConfig JSON file")
    exp.add_argument("--out", help="override the config's output directory")
    return parser


def _cmd_generate(args) -> int:
    from . import dataio
    from .generators import generate_planted_hypergraph

    hypergraph, edvw, features, labels = generate_planted_hypergraph(
        n=args.n, n_classes=args.classes, edges_per_class=args.edges_per_class,
        p_within=args.p_within, p_noise=args.p_noise,
        direction_signal=args.signal, seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    dataio.save_hypergraph(out / "hypergraph.jsonl", hypergraph, edvw)
    dataio.save_features(out / "features.csv", hypergraph, features)
    dataio.save_labels(out / "labels.csv", hypergraph, labels)
    print(f"wrote {out / 'hypergraph.jsonl'} ({hypergraph.n_vertices} vertices, "
          f"{hypergraph.n_edges} hyperedges)")
    return 0


def _load_walk(args):
    from . import dataio
    from .hypergraph import degree_edvw
    from .walks import edvw_transition, zhou_transition

    hypergraph, file_edvw = dataio.load_hypergraph(args.hypergraph)
    if args.edvw == "uniform":
        return hypergraph, zhou_transition(hypergraph)
    if args.edvw == "degree":
        edvw = degree_edvw(hypergraph)
    else:
        if file_edvw is None:
            raise ValueError("hypergraph file carries no EDVW; use --edvw degree|uniform")
        edvw = file_edvw
    return hypergraph, edvw_transition(hypergraph, edvw.normalize(hypergraph))


def _cmd_walk(args) -> int:
    from . import dataio
    from .walks import hitting_times, is_reversible, stationary_distribution

    _, transition = _load_walk(args)
    pi = stationary_distribution(transition, lazy=args.lazy)
    reversible, residual = is_reversible(transition, pi)
    times = hitting_times(transition)
    print(f"states: {transition.n}")
    print(f"stationary residual: {pi.residual:.3e} ({pi.method}"
          f"{', lazy' if pi.used_lazy else ''})")
    print(f"reversible: {'yes' if reversible else 'no'} "
          f"(detailed-balance residual {residual:.3e})")
    print(f"max hitting time: {times.max():.6f}")
    if args.out_matrix:
        dataio.save_real_matrix(args.out_matrix, transition.values)
        print(f"wrote {args.out_matrix}")
    return 0


def _cmd_laplacian(args) -> int:
    from . import dataio
    from .maglap import magnetic_laplacian, spectral_decomposition

    mode, value = args.charge
    if mode != "scalar":
        raise ValueError("the laplacian command takes a scalar charge 'q=<float>'")
    _, transition = _load_walk(args)
    result = magnetic_laplacian(transition, value, form=args.form,
                                renormalize=args.renormalize)
    matrix = result.renormalized if args.renormalize else result.laplacian
    dataio.save_complex_matrix(args.out, matrix)
    _, eigenvalues = spectral_decomposition(result.laplacian)
    smallest = ", ".join(f"{v:.6f}" for v in eigenvalues[:10])
    print(f"wrote {args.out}")
    if result.lambda_max is not None:
        print(f"lambda_max: {result.lambda_max:.12f}")
    else:
        print(f"lambda_max: {eigenvalues[-1]:.12f}")
    print(f"smallest eigenvalues: {smallest}")
    return 0


def _experiment_from_args(args, model: str):
    from .experiment import ExperimentConfig

    charge_mode, charge_init = getattr(args, "charge", ("matrix", 0.25))
    return ExperimentConfig(
        model=model,
        edvw=args.edvw,
        hypergraph_path=args.hypergraph,
        features_path=args.features,
        labels_path=args.labels,
        n_layers=args.layers,
        hidden_dims=args.hidden,
        learning_rate=args.learning_rate,
        weight_decay=args.weight_decay,
        epochs=args.epochs,
        charge_mode=charge_mode,
        charge_init=charge_init,
        n_splits=args.splits,
        train_fraction=args.fraction,
        seed=args.seed,
        out_dir=args.out,
    )


def _print_report(report) -> None:
    accs = ", ".join(f"{a:.4f}" for a in report.per_split_accuracy)
    print(f"model: {report.model}")
    print(f"per-split accuracy: [{accs}]")
    print(f"mean: {report.mean:.4f}  std: {report.std:.4f}")
    if report.report_path:
        print(f"wrote {report.report_path}")


def _cmd_train(args) -> int:
    from .experiment import run_experiment

    report = run_experiment(_experiment_from_args(args, "hmn"))
    _print_report(report)
    return 0


def _cmd_baseline(args) -> int:
    from .experiment import run_experiment

    report = run_experiment(_experiment_from_args(args, args.method))
    _print_report(report)
    return 0


def _cmd_experiment(args) -> int:
    from .experiment import ExperimentConfig, run_experiment

    config = ExperimentConfig.from_json(args.config)
    if args.out:
        config.out_dir = args.out
    report = run_experiment(config)
    _print_report(report)
    return 0


_HANDLERS = {
    "generate": _cmd_generate,
    "walk": _cmd_walk,
    "laplacian": _cmd_laplacian,
    "train": _cmd_train,
    "baseline": _cmd_baseline,
    "experiment": _cmd_experiment,
}


def main(argv=None) -> int:
    _apply_thread_cap()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
