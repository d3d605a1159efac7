"""Command-line scan drivers.

Subcommands (one per measurement style):

    scan-theta      hologram-rotation fringe scan at the configured polarizer
    scan-alpha      fitted visibility versus polarizer angle
    scan-grid       joint/conditional probabilities over the (alpha, theta) grid
    timeline        event-by-event coincidence Monte Carlo (delay-aware)
    render-pattern  azimuthal intensity of the analyzed sector state
    fit             sinusoid fit of a previously written scan CSV

Exit codes: 0 success, 2 configuration error, 3 null pipeline (an element
extinguished the state), 4 output I/O error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import analysis, experiment, output
from .configio import ConfigError, RunSpec, parse_config_file

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NULL = 3
EXIT_IO = 4


def _load(args) -> RunSpec:
    run = parse_config_file(args.config)
    if args.seed is not None:
        counting = replace(run.config.counting, seed=args.seed)
        run = replace(run, config=replace(run.config, counting=counting))
    return run


def _scan_theta(args) -> int:
    run = _load(args)
    config, scan = run.config, run.scan
    series = experiment.theta_scan(config, thetas=scan.thetas())
    if args.counts:
        series = experiment.simulate_counts(config, series)
    fit = analysis.fit_sinusoid(series)
    vis = analysis.visibility(replace(series, fit=fit))
    files = {
        "scan_theta.csv": output.scan_csv(series),
        "scan_theta_summary.csv": output.summary_csv(
            output.fit_summary_rows(vis, fit)),
    }
    if args.svg:
        files["scan_theta.svg"] = output.line_plot_svg(
            series.settings, series.probabilities,
            "conditional probability vs hologram angle")
    output.write_outputs(args.out_dir, files)
    print(f"scan-theta: {len(series.settings)} points, "
          f"visibility={output.fmt(vis)}")
    return EXIT_OK


def _scan_alpha(args) -> int:
    run = _load(args)
    config, scan = run.config, run.scan
    points = []
    for index, alpha in enumerate(scan.alphas()):
        cfg = replace(config, analyzer_a=replace(config.analyzer_a,
                                                 alpha=float(alpha)))
        series = experiment.theta_scan(cfg, points=scan.theta_points)
        if args.counts:
            series = experiment.simulate_counts(cfg, series, repetition=index)
        fit = analysis.fit_sinusoid(series)
        vis = analysis.visibility(replace(series, fit=fit))
        points.append(analysis.VisibilityPoint(float(alpha), vis, fit))
    files = {"scan_alpha.csv": output.alpha_csv(points)}
    if args.svg:
        files["scan_alpha.svg"] = output.line_plot_svg(
            [p.alpha for p in points], [p.visibility for p in points],
            "fringe visibility vs polarizer angle")
    output.write_outputs(args.out_dir, files)
    print(f"scan-alpha: {len(points)} settings, "
          f"max visibility={output.fmt(max(p.visibility for p in points))}")
    return EXIT_OK


def _scan_grid(args) -> int:
    run = _load(args)
    scan = run.scan
    alphas, thetas = scan.alphas(), scan.thetas()
    joint, cond = experiment.conditional_grid(run.config, alphas, thetas)
    output.write_outputs(args.out_dir, {
        "scan_grid.csv": output.grid_csv(alphas, thetas, joint, cond),
    })
    print(f"scan-grid: {len(alphas)}x{len(thetas)} points")
    return EXIT_OK


def _timeline(args) -> int:
    run = _load(args)
    config = run.config
    alpha = config.analyzer_a.alpha
    theta = config.analyzer_b.theta
    events, coincidences = experiment.simulate_timeline(
        config, alpha, theta, args.duration_s)
    summary = [
        ("duration_s", float(args.duration_s)),
        ("coincidences", coincidences),
        ("arm_a_delay_ns", config.arm_delay("A") * 1e9),
        ("arm_b_delay_ns", config.arm_delay("B") * 1e9),
        ("gate_ns", config.counting.gate * 1e9),
        ("events", len(events)),
    ]
    output.write_outputs(args.out_dir, {
        "timeline_events.csv": output.events_csv(events),
        "timeline_summary.csv": output.summary_csv(summary),
    })
    print(f"timeline: {coincidences} coincidences in "
          f"{output.fmt(args.duration_s)} s "
          f"(arm A delayed {output.fmt(config.arm_delay('A') * 1e9)} ns)")
    return EXIT_OK


def _render_pattern(args) -> int:
    run = _load(args)
    ell = args.ell if args.ell is not None else run.config.analyzer_b.ell
    intensity = analysis.render_azimuthal_pattern(ell, args.phase_rad,
                                                  args.grid_n)
    phis = analysis.azimuthal_grid(args.grid_n)
    lobes = analysis.count_azimuthal_lobes(intensity)
    output.write_outputs(args.out_dir, {
        "pattern.csv": output.pattern_csv(phis, intensity),
        "pattern.svg": output.polar_plot_svg(
            intensity, f"azimuthal intensity, {lobes} lobes"),
    })
    print(f"render-pattern: {lobes} lobes for |l|={abs(ell)}")
    return EXIT_OK


def _fit(args) -> int:
    series = output.read_scan_csv(args.csv)
    fit = analysis.fit_sinusoid(series, on=args.column)
    vis = analysis.visibility(replace(series, fit=fit))
    output.write_outputs(args.out_dir, {
        "fit_summary.csv": output.summary_csv(output.fit_summary_rows(vis, fit)),
    })
    print(f"fit: visibility={output.fmt(vis)} offset={output.fmt(fit.offset)} "
          f"amplitude={output.fmt(fit.amplitude)} phase={output.fmt(fit.phase)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oam-eraser",
        description="Hybrid polarization-OAM quantum-eraser simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("config", help="experiment configuration file")
        p.add_argument("--out-dir", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the counting seed")

    p = sub.add_parser("scan-theta", help="hologram fringe scan")
    common(p)
    p.add_argument("--counts", action=argparse.BooleanOptionalAction,
                   default=False, help="sample Poisson counts")
    p.add_argument("--svg", action="store_true", help="also write an SVG plot")
    p.set_defaults(handler=_scan_theta)

    p = sub.add_parser("scan-alpha", help="visibility vs polarizer angle")
    common(p)
    p.add_argument("--counts", action=argparse.BooleanOptionalAction,
                   default=False, help="sample Poisson counts per scan")
    p.add_argument("--svg", action="store_true", help="also write an SVG plot")
    p.set_defaults(handler=_scan_alpha)

    p = sub.add_parser("scan-grid", help="(alpha, theta) probability grid")
    common(p)
    p.set_defaults(handler=_scan_grid)

    p = sub.add_parser("timeline", help="event-level coincidence simulation")
    common(p)
    p.add_argument("--duration-s", type=float, default=1.0,
                   help="simulated wall-clock duration")
    p.set_defaults(handler=_timeline)

    p = sub.add_parser("render-pattern", help="azimuthal sector pattern")
    common(p)
    p.add_argument("--ell", type=int, default=None,
                   help="OAM subspace (defaults to the analyzer hologram)")
    p.add_argument("--phase-rad", type=float, default=0.0,
                   help="intermodal phase")
    p.add_argument("--grid-n", type=int, default=256, help="azimuthal samples")
    p.set_defaults(handler=_render_pattern)

    p = sub.add_parser("fit", help="fit a previously written scan CSV")
    p.add_argument("csv", help="scan CSV path")
    p.add_argument("--column", default="auto",
                   choices=["auto", "probabilities", "counts"],
                   help="which column to fit")
    p.add_argument("--out-dir", default=".", help="output directory")
    p.set_defaults(handler=_fit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"cannot read input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except experiment.NullOutcomeError as exc:
        print(f"null pipeline: {exc}", file=sys.stderr)
        return EXIT_NULL
    except (ValueError, TypeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_IO


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
