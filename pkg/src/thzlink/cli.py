"""Batch command line: ``python -m thzlink <subcommand> [options]``.

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import config as cfgmod
from . import rng as rngmod
from .chanmodel import realize_channel
from .errors import ConfigError
from .harness import Scenario, paired_compare, points_to_csv, run_sweep
from .polar import construct

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3


def _series_label(p) -> str:
    return f"{p.regime} {p.decoder} N={p.code_n}"


def write_svg(points, path) -> None:
    """Log-scale BLER versus SNR, one line per (regime, decoder, N)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    series = {}
    for p in points:
        series.setdefault(_series_label(p), []).append(p)
    fig, ax = plt.subplots(figsize=(5, 3.6))
    for label, pts in series.items():
        pts = [p for p in pts if p.bler > 0]
        if pts:
            ax.semilogy([p.snr_db for p in pts], [p.bler for p in pts], marker="o", label=label)
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("BLER")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=7)
    # fixed metadata keeps the file byte-stable across runs
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)


def emit_results(points, out=None, fmt="csv") -> str:
    """Write CSV (and optionally an SVG next to it). Returns the CSV text."""
    if not points:
        raise ValueError("no results to emit")
    if fmt == "svg" and out is None:
        raise ValueError("--format svg needs --out")
    text = points_to_csv(points)
    if out is None:
        sys.stdout.write(text)
        return text
    out = Path(out)
    if fmt == "svg":
        svg = out if out.suffix == ".svg" else out.with_suffix(".svg")
        write_svg(points, svg)
        csv_path = svg.with_suffix(".csv")
    else:
        csv_path = out
    csv_path.write_text(text)
    return text


def _parser():
    ap = argparse.ArgumentParser(prog="thzlink", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("simulate", "compare", "construct-code", "sample-channel", "selftest", "show-config"):
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path)
        p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
        p.add_argument("--out", type=Path)
        p.add_argument("--format", choices=("csv", "svg"), default="csv")
        p.add_argument("--seed", type=int)
        p.add_argument("--lanes", type=int)
    return ap


def _construct_code(resolved) -> dict:
    fr = resolved["frame"]
    poly = cfgmod._parse_poly(fr["crc_poly"])
    code = construct(fr["code_n"], fr["code_k"], poly)
    return {
        "code_n": code.n_bits,
        "code_k": code.k_nonfrozen,
        "crc_poly": None if poly is None else format(poly, "#x"),
        "frozen_mask_hex": code.frozen_mask_hex(),
        "info_positions": code.info_positions.tolist(),
    }


def _sample_channel(sim) -> str:
    scn = Scenario(sim)
    chan = realize_channel(sim.path, sim.fading, scn.sigma2, rngmod.stream(sim.seed, 0))
    freqs = sim.path.subcarrier_freqs()
    lines = ["subcarrier,freq_hz,gain_re,gain_im,abs_gain,path_gain,fading_amp"]
    for l in range(chan.num_subcarriers):
        g = chan.gains[l]
        row = (freqs[l], g.real, g.imag, abs(g), chan.path_gain[l], chan.fading_amp[l])
        lines.append(f"{l + 1}," + ",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def _echo(resolved, out):
    # stdout carries the CSV when no --out is given
    (sys.stdout if out else sys.stderr).write(cfgmod.dumps(resolved))


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "selftest":
            from .selftest import run_selftest

            return EXIT_OK if run_selftest() else EXIT_RUNTIME
        resolved, sim = cfgmod.load(args.config, args.overrides, args.seed)
    except ConfigError as exc:
        for msg in exc.errors:
            print(f"config error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "show-config":
            sys.stdout.write(cfgmod.dumps(resolved))
        elif args.command == "construct-code":
            text = json.dumps(_construct_code(resolved)) + "\n"
            args.out.write_text(text) if args.out else sys.stdout.write(text)
        elif args.command == "sample-channel":
            text = _sample_channel(sim)
            args.out.write_text(text) if args.out else sys.stdout.write(text)
        elif args.command == "simulate":
            _echo(resolved, args.out)
            emit_results(run_sweep(sim, args.lanes), args.out, args.format)
        elif args.command == "compare":
            _echo(resolved, args.out)
            comp = paired_compare(sim, lanes=args.lanes)
            points = [p for arm in comp.arms for p in arm.points]
            emit_results(points, args.out, args.format)
            for (i, target), gap in comp.gaps().items():
                g = "n/a" if gap is None else f"{gap:.2f} dB"
                print(f"gap {comp.arms[i].regime} vs {comp.arms[0].regime} at BLER {target:g}: {g}", file=sys.stderr)
    except ConfigError as exc:
        for msg in exc.errors:
            print(f"config error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
