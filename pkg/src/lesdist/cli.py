"""Command-line front end.

Subcommands::

    lesdist descriptor  INPUT... --out DIR
    lesdist distance    INPUT... --out FILE [--method les|imd] [--embed M]
    lesdist bench-tori  --out REPORT.json [--c-grid 1,0.8,...]

Exit codes: 0 success, 1 I/O error, 2 configuration or comparability
error, 3 numerical failure.  ``LES_THREADS`` caps the worker pool.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

from .analysis import diffusion_embed, pairwise_distance_matrix
from .bench import tori_benchmark
from .data import load_point_cloud
from .distances import DESCRIPTOR_SCHEMA, LesDescriptor, check_comparable
from .errors import ConfigurationError, DataError, LesError, NumericalError
from .pipeline import RunConfig, compute_descriptor

EXIT_OK, EXIT_IO, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def atomic_write(path, text: str) -> None:
    """Write ``text`` to a temporary file next to ``path`` and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("LES_THREADS", "") or os.cpu_count() or 1))
    except ValueError:
        return 1


def _config(args) -> RunConfig:
    return RunConfig(k=args.k, m=args.m, gamma=args.gamma, sigma_multiplier=args.sigma_mult,
                     seed=args.seed, mode=args.mode, exact_threshold=args.exact_threshold)


def _is_descriptor_file(path: Path) -> bool:
    if path.suffix.lower() != ".json":
        return False
    head = path.read_bytes()[:4096]
    return DESCRIPTOR_SCHEMA.encode() in head


def _descriptor_for(path: Path, cfg: RunConfig) -> LesDescriptor:
    try:
        cloud = load_point_cloud(path)
    except OSError as exc:
        raise CliError(f"{path}: {exc}", EXIT_IO) from exc
    try:
        return compute_descriptor(cloud, cfg)
    except ConfigurationError as exc:
        raise CliError(f"{path}: {exc}", EXIT_CONFIG) from exc
    except NumericalError as exc:
        raise CliError(f"{path}: {exc}", EXIT_NUMERIC) from exc


def _map(fn, items):
    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        return list(pool.map(fn, items))


def cmd_descriptor(args) -> int:
    cfg = _config(args)
    inputs = [Path(p) for p in args.inputs]
    descs = _map(lambda p: _descriptor_for(p, cfg), inputs)
    out = Path(args.out)
    for path, desc in zip(inputs, descs):
        atomic_write(out / f"{path.stem}.json", desc.to_json())
    return EXIT_OK


def _load_inputs(args, cfg: RunConfig):
    inputs = [Path(p) for p in args.inputs]
    if len(inputs) < 2:
        raise CliError("need at least two inputs", EXIT_CONFIG)
    raw = [p for p in inputs if not _is_descriptor_file(p)]
    computed = dict(zip(raw, _map(lambda p: _descriptor_for(p, cfg), raw)))
    if raw:
        out = Path(args.out)
        store = out.with_name(out.stem + ".descriptors")
        for p, d in computed.items():
            atomic_write(store / f"{p.stem}.json", d.to_json())
    descs = []
    for p in inputs:
        if p in computed:
            descs.append(computed[p])
        else:
            descs.append(LesDescriptor.load(p))
    return inputs, descs


def _check_pairs(inputs, descs):
    bad = []
    for i in range(len(descs)):
        for j in range(i + 1, len(descs)):
            try:
                check_comparable(descs[i], descs[j])
            except ConfigurationError as exc:
                bad.append(f"{inputs[i]} vs {inputs[j]}: {exc}")
    if bad:
        raise CliError("incomparable descriptors:\n  " + "\n  ".join(bad), EXIT_CONFIG)


def cmd_distance(args) -> int:
    cfg = _config(args)
    inputs, descs = _load_inputs(args, cfg)
    _check_pairs(inputs, descs)
    # labels come from file stems so duplicate dataset names stay distinguishable
    descs = [d if d.dataset_name == p.stem else replace(d, dataset_name=p.stem) for p, d in zip(inputs, descs)]
    method = "imd_approx" if args.method == "imd" else "les"
    D = pairwise_distance_matrix(descs, method)
    out = Path(args.out)
    atomic_write(out, D.to_json() if args.format == "json" else D.to_csv())
    if args.embed:
        emb = diffusion_embed(D, args.embed)
        suffix = ".json" if args.format == "json" else ".csv"
        atomic_write(out.with_name(out.stem + ".embedding" + suffix),
                     emb.to_json() if args.format == "json" else emb.to_csv())
    return EXIT_OK


def _floats(text: str):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str):
    return [int(v) for v in _floats(text)]


def cmd_bench_tori(args) -> int:
    cfg = _config(args)
    report = tori_benchmark(cfg, args.c_grid, args.n_points, args.trials, args.n_sweep or ())
    atomic_write(args.out, json.dumps(report, indent=1) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=int, default=200, help="number of leading eigenvalues")
    common.add_argument("--m", type=int, default=None, help="sketch width (default 2k)")
    common.add_argument("--gamma", type=float, default=1e-8, help="log regularisation")
    common.add_argument("--sigma-mult", type=float, default=2.0,
                        help="kernel scale multiplier of the median squared distance")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--mode", choices=("auto", "dense", "implicit"), default="auto")
    common.add_argument("--exact-threshold", type=int, default=2048,
                        help="largest N handled by the exact eigensolver")
    common.add_argument("--out", required=True)

    parser = argparse.ArgumentParser(prog="lesdist", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("descriptor", parents=[common], help="compute one descriptor per input file")
    p.add_argument("inputs", nargs="+")
    p.set_defaults(func=cmd_descriptor)

    p = sub.add_parser("distance", parents=[common], help="pairwise distances between datasets")
    p.add_argument("inputs", nargs="+", help="descriptor JSON files or point-cloud files")
    p.add_argument("--method", choices=("les", "imd"), default="les")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--embed", type=int, default=0, metavar="M",
                   help="also write an M-dimensional diffusion-map embedding")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("bench-tori", parents=[common], help="tori benchmark report")
    p.add_argument("--c-grid", type=_floats, default=[1.0, 0.8, 0.6, 0.4, 0.2])
    p.add_argument("--n-points", type=int, default=1000)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--n-sweep", type=_ints, default=None,
                   help="comma-separated dataset sizes for the stability sweep")
    p.set_defaults(func=cmd_bench_tori)
    return parser


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"warning: {message}", file=sys.stderr)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    previous = warnings.showwarning
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = _show_warning
            return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (OSError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, LesError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    finally:
        warnings.showwarning = previous


if __name__ == "__main__":
    sys.exit(main())
