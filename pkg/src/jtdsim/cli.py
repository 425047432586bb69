"""Command-line entry point: ``jtdsim <command> [options]``.

Exit status is 0 on success, 2 for bad input and 3 for numerical failures.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import csvio
from .analysis import analyze_jtd
from .biphoton import build_jsa, density, to_temporal
from .errors import InputError, NumericError
from .measurement import (CountsSurface, common_delay_scan, gate_profile, simulate_scan,
                          simulate_temporal_density,
                          synthesize_counts, theoretical_profiles)
from .schmidt import entropy_from_density, schmidt_decompose
from .sweep import entropy_vs_bandwidth, find_factorable_bandwidth
from .units import ExperimentConfig, config_hash, load_config

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3
FIG3_BANDWIDTHS = (6.0, 3.6, 2.2, 1.1)

log = logging.getLogger("jtdsim")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def read_config(path: str | None) -> ExperimentConfig:
    """Load a config file; bare recipe names (``fig4a.json``) resolve to the
    bundled recipes when no such file exists."""
    if path is None:
        return ExperimentConfig()
    p = Path(path)
    if p.exists():
        text = p.read_text(encoding="utf-8")
    else:
        recipe = resources.files("jtdsim") / "recipes" / p.name
        if not recipe.is_file():
            raise InputError(f"config file not found: {path}")
        text = recipe.read_text(encoding="utf-8")
    return load_config(text)


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _floats(text: str):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"expected a comma-separated list of numbers, got {text!r}") from None


# ---------------------------------------------------------------------------
# commands

def cmd_jsa(args, config):
    _emit(csvio.format_density(density(build_jsa(config)), config_hash(config)), args.out)


def cmd_jtd(args, config):
    _emit(csvio.format_density(simulate_temporal_density(config), config_hash(config)), args.out)


def cmd_scan(args, config):
    d = simulate_temporal_density(config)
    g = gate_profile(config, d.grid_s)
    delays = None
    if args.span_ps is not None or args.step_fs is not None:
        half = (args.span_ps or 4.0) * 500.0
        delays = np.arange(-half, half + 1e-9, args.step_fs or 10.0)
    hists = common_delay_scan(d, g, delays)
    _emit(csvio.format_histograms(hists, config_hash(config)), args.out)


def cmd_profiles(args, config):
    bandwidths = _floats(args.bandwidths)
    configs = [config.replace(spdc_pump_fwhm_nm=b) for b in bandwidths]
    hists = theoretical_profiles(configs)
    _emit(csvio.format_profiles(bandwidths, hists, config_hash(config)), args.out)


def cmd_jtdscan(args, config):
    span = None if args.span_ps is None else args.span_ps * 1e3
    surface = simulate_scan(config, span, args.points)
    _emit(csvio.format_surface(surface, config_hash(config)), args.out)


def cmd_schmidt(args, config):
    if args.density:
        loaded = csvio.load_surface(_read(args.density))
        if isinstance(loaded, CountsSurface):
            loaded = loaded.as_surface()
        rep = entropy_from_density(loaded.to_density())
        _emit(json.dumps(rep.to_dict(), indent=2, sort_keys=True) + "\n", args.out)
        return
    jsa = build_jsa(config)
    amp = jsa if args.domain == "spectral" else to_temporal(jsa)
    _emit(csvio.format_spectrum(schmidt_decompose(amp), config_hash(config)), args.out)


def cmd_sweep(args, config):
    kinds = ("gaussian", "sinc") if args.pm == "both" else (args.pm,)
    curves = [entropy_vs_bandwidth((args.min, args.max), args.steps, k, config, args.workers)
              for k in kinds]
    _emit(csvio.format_curves(curves, config_hash(config)), args.out)


def cmd_factorable(args, config):
    bw, ent = find_factorable_bandwidth(args.pm, config, (args.min, args.max))
    _emit(json.dumps({"pm_kind": args.pm, "bandwidth_nm": bw, "entropy_bits": ent},
                     indent=2) + "\n", args.out)


def cmd_synth(args, config):
    if args.surface:
        surface = csvio.load_surface(_read(args.surface))
        if isinstance(surface, CountsSurface):
            raise InputError("synth expects a noiseless surface, not counts")
    else:
        span = None if args.span_ps is None else args.span_ps * 1e3
        surface = simulate_scan(config, span, args.points)
    counts = synthesize_counts(surface, config, args.seed)
    _emit(csvio.format_counts(counts, config_hash(config)), args.out)


def cmd_analyze(args, config):
    data = csvio.load_surface(_read(args.input))
    subtract = None if args.subtract is None else args.subtract == "on"
    _emit(analyze_jtd(data, subtract=subtract).to_json(), args.out)


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="jtdsim", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="JSON configuration file or bundled recipe name")
        p.add_argument("--out", help="output path (default: stdout)")
        p.set_defaults(func=func)
        return p

    command("jsa", cmd_jsa, "joint spectral density surface")
    command("jtd", cmd_jtd, "joint temporal density surface")
    p = command("scan", cmd_scan, "common-delay singles and coincidence histograms")
    p.add_argument("--span-ps", type=float)
    p.add_argument("--step-fs", type=float)
    p = command("profiles", cmd_profiles, "coincidence profiles for several pump bandwidths")
    p.add_argument("--bandwidths", default=",".join(map(str, FIG3_BANDWIDTHS)))
    p = command("jtdscan", cmd_jtdscan, "gated 2D delay scan")
    p.add_argument("--span-ps", type=float)
    p.add_argument("--points", type=int, default=16)
    p = command("schmidt", cmd_schmidt, "Schmidt spectrum and entanglement report")
    p.add_argument("--domain", choices=("spectral", "temporal"), default="spectral")
    p.add_argument("--density", help="surface CSV to analyze under a flat spectral phase")
    p = command("sweep", cmd_sweep, "entropy versus pump bandwidth")
    p.add_argument("--pm", choices=("gaussian", "sinc", "both"), default="both")
    p.add_argument("--min", type=float, default=0.5)
    p.add_argument("--max", type=float, default=8.0)
    p.add_argument("--steps", type=int, default=32)
    p.add_argument("--workers", type=int, default=1)
    p = command("factorable", cmd_factorable, "pump bandwidth of minimum entropy")
    p.add_argument("--pm", choices=("gaussian", "sinc"), default="gaussian")
    p.add_argument("--min", type=float, default=0.5)
    p.add_argument("--max", type=float, default=8.0)
    p = command("synth", cmd_synth, "Poisson counts for a 2D scan")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--surface", help="noiseless surface CSV (default: simulate from config)")
    p.add_argument("--span-ps", type=float)
    p.add_argument("--points", type=int, default=16)
    p = command("analyze", cmd_analyze, "entanglement report from a counts or surface file")
    p.add_argument("input")
    p.add_argument("--subtract", choices=("on", "off"),
                   help="background subtraction (default: on for counts, off for surfaces)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits directly on --help and on usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = read_config(args.config)
        args.func(args, config)
    except InputError as exc:
        print(f"jtdsim: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericError as exc:
        print(f"jtdsim: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
