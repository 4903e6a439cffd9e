"""Command-line interface for netdisrupt."""

import argparse
import functools
import sys
from pathlib import Path

from netdisrupt.errors import NetdisruptError


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _add_pair_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("treated", help="Treated-arm network file")
    parser.add_argument("control", help="Control-arm network file")
    parser.add_argument(
        "-f",
        "--format",
        choices=["edge_list", "dense_csv", "json"],
        help="Input format (default: inferred from a .json suffix)",
    )
    parser.add_argument("--treated-labels", help="Label manifest for the treated network")
    parser.add_argument("--control-labels", help="Label manifest for the control network")
    parser.add_argument("--json", action="store_true", help="Print results as JSON")


def _add_adjust_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("--adjust", choices=["none", "reduction"], default="none")
    parser.add_argument(
        "--denoise", default="none", help="none, svt or svt:<tau> (applied to indicator matrices)"
    )


def load_pair(args):
    """Load the treated and control networks named on the command line."""
    from netdisrupt.formats.network_io import IngestOptions, load_network

    net1 = load_network(
        args.treated,
        args.format,
        IngestOptions(labels=args.treated_labels, group=1, name="treated"),
    )
    net0 = load_network(
        args.control,
        args.format,
        IngestOptions(labels=args.control_labels, group=0, name="control"),
    )
    return net1, net0


def indicator_spectra(denoise: str):
    """Spectrum cache with the requested denoiser."""
    from netdisrupt.core.adjust import svt_denoise
    from netdisrupt.core.netmat import IndicatorSpectra
    from netdisrupt.errors import ValidationError

    if denoise == "none":
        return IndicatorSpectra()
    if denoise == "svt":
        return IndicatorSpectra(denoise=functools.partial(svt_denoise, threshold="auto"))
    if denoise.startswith("svt:"):
        try:
            tau = float(denoise[4:])
        except ValueError:
            raise ValidationError(f"invalid denoise threshold: {denoise!r}") from None
        return IndicatorSpectra(denoise=functools.partial(svt_denoise, threshold=tau))
    raise ValidationError(f"--denoise must be none, svt or svt:<tau>, got {denoise!r}")


def emit(data, as_json: bool, text: str):
    """Print either JSON or the human-readable text."""
    from netdisrupt.formats.results import dumps

    if as_json:
        sys.stdout.write(dumps(data))
    else:
        print(text)


def main(argv=None):
    """Main CLI entry point."""
    parser = argparse.ArgumentParser(
        description="netdisrupt - Bounds on social disruption in network experiments"
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    parser.add_argument("-q", "--quiet", action="store_true", help="Warnings and errors only")
    subparsers = parser.add_subparsers(dest="command", help="Command to run")

    # DPO bounds
    dpo_parser = subparsers.add_parser("bounds-dpo", help="Bounds on P(Y1 <= y1, Y0 <= y0)")
    _add_pair_arguments(dpo_parser)
    _add_adjust_arguments(dpo_parser)
    dpo_parser.add_argument("--y1", type=float, help="Treated-arm threshold")
    dpo_parser.add_argument("--y0", type=float, help="Control-arm threshold")
    dpo_parser.add_argument(
        "--cells", action="store_true", help="Bound every P(Y1 = a, Y0 = b) instead"
    )

    # DTE bounds
    dte_parser = subparsers.add_parser("bounds-dte", help="Bounds on P(Y1 - Y0 <= y)")
    _add_pair_arguments(dte_parser)
    _add_adjust_arguments(dte_parser)
    dte_parser.add_argument(
        "-y", "--y", type=float, nargs="+", required=True, dest="grid", help="Effect value(s)"
    )

    # Spectral treatment effects
    ste_parser = subparsers.add_parser("ste", help="Spectral treatment effects")
    _add_pair_arguments(ste_parser)
    ste_parser.add_argument("--basis", choices=["treated", "untreated"], default="treated")
    ste_parser.add_argument(
        "--grid", type=float, nargs="+", help="Evaluate the point-identified DTE on these values"
    )
    ste_parser.add_argument("-o", "--output", help="Write the effect matrix to this CSV file")

    # Exhaustive oracle
    oracle_parser = subparsers.add_parser("oracle", help="Exact sharp sets for small networks")
    _add_pair_arguments(oracle_parser)
    oracle_parser.add_argument("--y1", type=float, default=0.0, help="Treated-arm threshold")
    oracle_parser.add_argument("--y0", type=float, default=0.0, help="Control-arm threshold")
    oracle_parser.add_argument(
        "--links", action="store_true", help="Count destroyed and created links instead"
    )
    oracle_parser.add_argument("-t", "--threads", type=_positive_int, help="Worker threads")

    # Report
    report_parser = subparsers.add_parser("report", help="Run a batch analysis from a YAML config")
    report_parser.add_argument("config", help="Path to the analysis config")
    report_parser.add_argument(
        "-o", "--output-dir", help="Override the configured output directory"
    )
    report_parser.add_argument("-t", "--threads", type=_positive_int, help="Worker threads")

    args = parser.parse_args(argv)

    from netdisrupt.utils.env import configure_logging

    configure_logging(verbose=args.verbose, quiet=args.quiet)

    commands = {
        "bounds-dpo": bounds_dpo,
        "bounds-dte": bounds_dte,
        "ste": show_ste,
        "oracle": run_oracle,
        "report": run_report_command,
    }
    if args.command not in commands:
        parser.print_help()
        sys.exit(0)

    try:
        commands[args.command](args)
    except NetdisruptError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        sys.exit(exc.exit_code)


def bounds_dpo(args):
    """Bound the joint distribution function at one point, or every pmf cell."""
    from netdisrupt.core.adjust import adjusted_overlap_bounds
    from netdisrupt.core.bounds import dpo_bounds, frechet_hoeffding, pmf_cell_bounds
    from netdisrupt.errors import ValidationError
    from netdisrupt.formats.display import ResultDisplay

    net1, net0 = load_pair(args)
    spectra = indicator_spectra(args.denoise)
    corner = adjusted_overlap_bounds if args.adjust == "reduction" else dpo_bounds

    if args.cells:
        table = pmf_cell_bounds(net1, net0, corner=corner, spectra=spectra)
        emit(table.to_dict(), args.json, ResultDisplay.display_cell_table(table))
        return

    if args.y1 is None or args.y0 is None:
        raise ValidationError("bounds-dpo needs --y1 and --y0 (or --cells)")
    bound = corner(net1, net0, args.y1, args.y0, spectra=spectra)
    baseline = frechet_hoeffding(net1, net0, args.y1, args.y0)
    text = "\n".join(
        [
            ResultDisplay.display_interval(bound, f"F({args.y1:g}, {args.y0:g})"),
            ResultDisplay.display_interval(baseline, "Frechet-Hoeffding"),
        ]
    )
    emit({"bounds": bound.to_dict(), "frechet_hoeffding": baseline.to_dict()}, args.json, text)


def bounds_dte(args):
    """Bound the distribution of treatment effects at each requested value."""
    from netdisrupt.core.bounds import dte_bounds, dte_curve
    from netdisrupt.formats.display import ResultDisplay

    net1, net0 = load_pair(args)
    spectra = indicator_spectra(args.denoise)
    if args.adjust == "reduction":
        print("Note: --adjust applies to DPO bounds only", file=sys.stderr)

    grid = sorted(args.grid)
    if len(grid) == 1:
        bound = dte_bounds(net1, net0, grid[0], spectra=spectra)
        text = ResultDisplay.display_interval(bound, f"Delta({grid[0]:g})")
        emit(bound.to_dict(), args.json, text)
        return

    curve = dte_curve(net1, net0, grid, spectra=spectra)
    lines = [f"Delta({y:g}): [{lo:.6f}, {hi:.6f}]" for y, lo, hi in curve.rows()]
    emit(curve.to_dict(), args.json, "\n".join(lines))


def show_ste(args):
    """Display spectral treatment effects and the disruption lower bound."""
    import numpy as np
    import pandas as pd

    from netdisrupt.core.ste import disruption_lower_bound, dte_point_identified, ste_field
    from netdisrupt.formats.results import FLOAT_FORMAT

    net1, net0 = load_pair(args)
    field = ste_field(net1, net0, args.basis)
    data = {
        "basis": field.basis.value,
        "disruption_lower_bound": disruption_lower_bound(net1, net0),
        "l2_squared": field.l2_squared(),
        "eigengap": field.eigengap,
        "degenerate": field.degenerate,
        "dropped_terms": field.dropped_terms,
    }
    lines = [
        f"Basis: {field.basis.value}",
        f"Disruption lower bound: {data['disruption_lower_bound']:.6g}",
        f"Squared L2 norm of effects: {data['l2_squared']:.6g}",
    ]
    if field.degenerate:
        lines.append("Warning: near-degenerate spectrum; the eigenbasis is not unique")

    if args.grid:
        point = dte_point_identified(net1, net0, sorted(args.grid), args.basis)
        data["point_identified_dte"] = point.to_dict()
        lines.append(f"STT/STU distance: {point.sup_distance:.6g}")
        for y, p in zip(point.curve.grid, point.curve.lower, strict=True):
            lines.append(f"  P(effect <= {y:g}) = {p:.6f}")

    if args.output:
        path = Path(args.output)
        path.parent.mkdir(parents=True, exist_ok=True)
        labels = list((net1 if field.basis.value == "treated" else net0).labels)
        frame = pd.DataFrame(np.asarray(field.values), index=labels, columns=labels)
        frame.to_csv(path, float_format=FLOAT_FORMAT, lineterminator="\n")
        lines.append(f"Wrote {path}")

    emit(data, args.json, "\n".join(lines))


def run_oracle(args):
    """Enumerate every matching of agents between the arms."""
    from netdisrupt.core.oracle import (
        FULL_SET_LIMIT,
        orthogonal_relaxation,
        sharp_destroyed_created,
        sharp_overlap_set,
    )
    from netdisrupt.formats.display import ResultDisplay
    from netdisrupt.utils.env import thread_count

    net1, net0 = load_pair(args)
    workers = thread_count(args.threads)
    full = net1.n <= FULL_SET_LIMIT

    if args.links:
        destroyed, created = sharp_destroyed_created(net1, net0, workers=workers)
        data = {"destroyed": destroyed.to_dict(full), "created": created.to_dict(full)}
        text = "\n".join(
            [
                ResultDisplay.display_sharp_set(destroyed, "Destroyed links", full),
                ResultDisplay.display_sharp_set(created, "Created links", full),
            ]
        )
        emit(data, args.json, text)
        return

    result = sharp_overlap_set(net1, net0, args.y1, args.y0, workers=workers)
    relaxed = orthogonal_relaxation(net1, net0, args.y1, args.y0)
    data = {"sharp_set": result.to_dict(full), "orthogonal_relaxation": list(relaxed)}
    text = "\n".join(
        [
            ResultDisplay.display_sharp_set(result, f"F({args.y1:g}, {args.y0:g})", full),
            f"Orthogonal relaxation: [{relaxed[0]:.6f}, {relaxed[1]:.6f}]",
        ]
    )
    emit(data, args.json, text)


def run_report_command(args):
    """Run the batch report described by a config file."""
    from netdisrupt.report.config import load_config
    from netdisrupt.report.runner import run_report

    config = load_config(args.config)
    if args.output_dir:
        config = config.model_copy(update={"output_dir": Path(args.output_dir)})
    bundle = run_report(config, threads=args.threads)
    print(f"Wrote {len(bundle.files)} files to {bundle.output_dir}")


if __name__ == "__main__":
    main()
