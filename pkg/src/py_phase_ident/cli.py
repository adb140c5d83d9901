#!/usr/bin/env python3
"""
CLI tool for py-phase-ident

Usage:
    py-phase-ident synth --config feeder.env --out data/
    py-phase-ident cluster --readings r.csv --topology t.csv --feeder F --period 2021-06 --out out/
    py-phase-ident validate --assignments june.csv july.csv --topology t.csv --out reports/
    py-phase-ident embed --features features.csv --assignment assignment.csv --out embed/
    py-phase-ident report --readings r.csv --topology t.csv --feeder F \
        --period 2021-06 --period 2021-07 --out study/
    py-phase-ident spectrum --readings r.csv --topology t.csv --feeder F --period 2021-06 --out spectra/
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from pydantic import ValidationError

from .embedding import classical_mds, euclidean_distances
from .errors import USAGE_EXIT, ConfigError, EmptyDatasetError, PhaseIdentError
from .exports import (
    read_assignment,
    read_distances,
    read_features,
    staged_output,
    write_embedding,
    write_error_curve,
    write_magnitudes,
    write_manifest,
    write_purity,
    write_spectrum,
    write_stability,
    write_synthetic,
)
from .ingestion import filter_complete, load_topology, normalize_dataset, period_bounds
from .logging_config import configure_logging, get_logger, log_run_event
from .pipeline import (
    cluster_study,
    config_echo,
    embed_result,
    load_config_study,
    validate_study,
    write_period,
    write_period_embedding,
    write_validation,
)
from .schemas.config import RunConfig, SynthConfig, load_model
from .settings import settings
from .spectral import combined_magnitude, dft_real, error_curve
from .synth import generate_study
from .validation import stability, transformer_purity

logger = get_logger(__name__)

DEFAULT_CURVE_SIZES = "2,6,12,60,144,360"


def _run_config(args) -> RunConfig:
    return load_model(
        RunConfig,
        args.config,
        {
            "readings": args.readings,
            "topology": args.topology,
            "feeder": args.feeder,
            "periods": args.period,
            "mask": args.mask,
            "k": args.k,
            "out": args.out,
            "standardize": True if args.standardize else None,
            "seed": args.seed,
        },
    )


def _inputs(args, *paths) -> List[Path]:
    """Input files a run must not publish over"""
    return [Path(p) for p in (getattr(args, "config", None), *paths) if p is not None]


def synth_command(args) -> None:
    """Generate a synthetic feeder study"""
    config = load_model(
        SynthConfig,
        args.config,
        {
            "seed": args.seed,
            "feeder_id": args.feeder,
            "period_ids": args.period,
            "n_meters": args.meters,
            "n_transformers": args.transformers,
            "noise_sigma": args.noise,
            "missing_rate": args.missing_rate,
        },
    )
    for period_id in config.period_ids:
        if config.hours is not None and config.hours != period_bounds(period_id)[1]:
            raise ConfigError(
                f"hours={config.hours} does not cover {period_id}; "
                "readings files need whole calendar months"
            )

    study, truth = generate_study(config)
    with staged_output(args.out, _inputs(args)) as out:
        write_synthetic(study, truth, out, config.nominal_voltage)
        write_manifest(out / "manifest.json", "synth", config.model_dump(mode="json"))

    print(f"Synthetic feeder {config.feeder_id}: {len(truth)} meters -> {args.out}")
    log_run_event(f"Synthesized {config.feeder_id} {config.period_ids} into {args.out}")


def cluster_command(args) -> None:
    """Cluster every requested period of a feeder"""
    config = _run_config(args)
    study = load_config_study(config)
    results = cluster_study(study, config.mask, config.k, config.standardize)

    with staged_output(config.out, _inputs(args, config.readings, config.topology)) as out:
        for result in results.values():
            write_period(out, result)
        write_manifest(
            out / "manifest.json",
            "cluster",
            config_echo(config),
            meters={p: r.meter_ids for p, r in results.items()},
        )

    for period_id, result in results.items():
        print(f"{period_id}: {result.assignment.sizes()}")
    log_run_event(f"Cluster run for {config.feeder} written to {config.out}")


def validate_command(args) -> None:
    """Purity of each assignment and stability between them"""
    topology = load_topology(args.topology)
    first, second = (read_assignment(Path(p)) for p in args.assignments)
    stems = [f"purity_{a.period_id}" for a in (first, second)]
    if stems[0] == stems[1]:
        stems = ["purity_first", "purity_second"]

    reports = [transformer_purity(a, topology) for a in (first, second)]
    report = stability(first, second)

    with staged_output(args.out, _inputs(args, args.topology, *args.assignments)) as out:
        for stem, purity in zip(stems, reports):
            write_purity(out, stem, purity)
        write_stability(out, "stability", report)

    for purity in reports:
        print(f"Purity {purity.period_id}: {purity.purity:.4f}")
    print(f"Stable fraction: {report.stable_fraction:.4f}")


def embed_command(args) -> None:
    """Planar coordinates of meters from features or distances"""
    if args.features:
        meter_ids, features = read_features(Path(args.features))
        distances = euclidean_distances(features)
    else:
        meter_ids, distances = read_distances(Path(args.distances))
    assignment = read_assignment(Path(args.assignment)) if args.assignment else None

    embedding = classical_mds(distances, meter_ids=meter_ids)
    inputs = _inputs(args, args.features, args.distances, args.assignment)
    with staged_output(args.out, inputs) as out:
        write_embedding(out, embedding, assignment)
    print(f"Embedded {len(meter_ids)} meters, stress {embedding.stress:.3g}")


def report_command(args) -> None:
    """Two-period study: cluster, validate and embed in one output tree"""
    config = _run_config(args)
    if len(config.periods) != 2:
        raise ConfigError(f"report needs exactly two periods, got {config.periods}")

    study = load_config_study(config)
    results = cluster_study(study, config.mask, config.k, config.standardize)
    purity, report = validate_study(study, results)

    with staged_output(config.out, _inputs(args, config.readings, config.topology)) as out:
        for result in results.values():
            write_period(out, result)
            write_period_embedding(out, result, embed_result(result))
        write_validation(out / "validation", purity, report)
        write_manifest(
            out / "manifest.json",
            "report",
            config_echo(config),
            meters={p: r.meter_ids for p, r in results.items()},
        )

    for period_id, purity_report in purity.items():
        print(f"Purity {period_id}: {purity_report.purity:.4f}")
    print(f"Stable fraction: {report.stable_fraction:.4f}")
    log_run_event(f"Report for {config.feeder} {config.periods} written to {config.out}")


def spectrum_command(args) -> None:
    """Spectra, amplitude table and error-vs-coefficients curve of one period"""
    config = _run_config(args)
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    study = filter_complete(load_config_study(config))

    for period_id, dataset in study.datasets.items():
        if not len(dataset):
            raise EmptyDatasetError(
                f"no complete meters for feeder {config.feeder} in {period_id}"
            )

    with staged_output(config.out, _inputs(args, config.readings, config.topology)) as out:
        for period_id, dataset in study.datasets.items():
            normalized = normalize_dataset(dataset)
            spectra = [dft_real(s) for s in normalized.series]
            half = normalized.n_samples // 2
            period_sizes = [s for s in sizes if s <= half] + [half]
            for spectrum in spectra:
                write_spectrum(out / period_id / "spectra" / f"{spectrum.meter_id}.csv", spectrum)
            write_magnitudes(
                out / period_id / "magnitudes.csv",
                normalized.meter_ids,
                [combined_magnitude(s) for s in spectra],
            )
            write_error_curve(
                out / period_id / "error_curve.csv",
                {s.meter_id: error_curve(s, period_sizes) for s in normalized.series},
            )
    print(f"Spectra for {len(study.period_ids)} periods -> {config.out}")


def _add_run_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="Key-value config file")
    parser.add_argument("--readings", type=Path, help="Readings CSV")
    parser.add_argument("--topology", type=Path, help="Topology CSV")
    parser.add_argument("--feeder", help="Feeder identifier")
    parser.add_argument(
        "--period", action="append", help="Period YYYY-MM (repeat for several)"
    )
    parser.add_argument(
        "--mask", help="fixed:n1,n2,...|topk:K|threshold:T|daily[:M] (default daily)"
    )
    parser.add_argument("--k", type=int, help="Number of clusters (default 3)")
    parser.add_argument("--out", type=Path, help="Output directory")
    parser.add_argument(
        "--standardize", action="store_true", help="Z-score features before linkage"
    )
    parser.add_argument("--seed", type=int, help="Seed echoed into the manifest")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="py-phase-ident",
        description="py-phase-ident CLI tool",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--log-level", help="Override PHASE_ID_LOG_LEVEL")

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    # Synth command
    synth_parser = subparsers.add_parser("synth", help="Generate a synthetic feeder")
    synth_parser.add_argument("--config", type=Path, help="Key-value SynthConfig file")
    synth_parser.add_argument("--out", type=Path, required=True, help="Output directory")
    synth_parser.add_argument("--seed", type=int, help="RNG seed")
    synth_parser.add_argument("--feeder", help="Feeder identifier")
    synth_parser.add_argument("--period", action="append", help="Period YYYY-MM")
    synth_parser.add_argument("--meters", type=int, help="Meter count")
    synth_parser.add_argument("--transformers", type=int, help="Transformer count")
    synth_parser.add_argument("--noise", type=float, help="Noise std-dev")
    synth_parser.add_argument("--missing-rate", type=float, help="Missing-hour rate")

    # Cluster command
    cluster_parser = subparsers.add_parser("cluster", help="Cluster a feeder's meters")
    _add_run_arguments(cluster_parser)

    # Validate command
    validate_parser = subparsers.add_parser(
        "validate", help="Transformer purity and time stability"
    )
    validate_parser.add_argument(
        "--assignments", nargs=2, type=Path, required=True, help="Two assignment CSVs"
    )
    validate_parser.add_argument("--topology", type=Path, required=True)
    validate_parser.add_argument("--out", type=Path, required=True)

    # Embed command
    embed_parser = subparsers.add_parser("embed", help="2D coordinates for plotting")
    source = embed_parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--features", type=Path, help="Feature matrix CSV")
    source.add_argument("--distances", type=Path, help="Distance matrix CSV")
    embed_parser.add_argument("--assignment", type=Path, help="Assignment CSV")
    embed_parser.add_argument("--out", type=Path, required=True)

    # Report command
    report_parser = subparsers.add_parser("report", help="Two-period study")
    _add_run_arguments(report_parser)

    # Spectrum command
    spectrum_parser = subparsers.add_parser(
        "spectrum", help="Spectra and compression error curves"
    )
    _add_run_arguments(spectrum_parser)
    spectrum_parser.add_argument(
        "--sizes",
        default=DEFAULT_CURVE_SIZES,
        help="Pair counts for the error curve (full spectrum always added)",
    )

    return parser


COMMANDS = {
    "synth": synth_command,
    "cluster": cluster_command,
    "validate": validate_command,
    "embed": embed_command,
    "report": report_command,
    "spectrum": spectrum_command,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main CLI function"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.log_level:
        settings.log_level = args.log_level.upper()
    configure_logging(settings)

    if not args.command:
        parser.print_help()
        return USAGE_EXIT

    try:
        COMMANDS[args.command](args)
    except PhaseIdentError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return e.exit_code
    except ValidationError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return USAGE_EXIT
    return 0


if __name__ == "__main__":
    sys.exit(main())
