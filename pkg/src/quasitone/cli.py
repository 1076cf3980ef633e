"""Command line front end.

Subcommands cover the whole pipeline: eval, field, moments, sonify, sweep,
sonogram, score. Exit codes: 0 success, 2 argument or grammar errors, 3
coverage below threshold, 4 numeric or I/O failures.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .analysis import compute_moments, moments_to_json, write_moments
from .errors import CoverageError, QuasitoneError
from .grids import (
    COVERAGE_MIN,
    build_gaussian,
    build_regular,
    coverage,
    default_grid,
    read_field,
    sample_field,
    write_field,
)
from .render import (
    DEFAULT_SAMPLE_RATE,
    SweepTrajectory,
    read_wav,
    render_sweep,
    stft_sonogram,
    synth,
    write_sonogram_csv,
    write_wav,
)
from .score import bank_to_events, write_score
from .sonify import (
    MapConfig,
    load_map_config,
    method1_grid,
    method2_extremes,
    method3_sections,
    method4_moments,
    spatial_gains,
)
from .states import CatState, CoherentState, FockState, SampledState
from .textfmt import fmt17


class UsageFault(Exception):
    """Grammar or config problem; maps to exit code 2."""


def _parse_complex_pair(text, what):
    parts = text.split(",")
    if len(parts) not in (1, 2):
        raise UsageFault(f"{what}: expected <re> or <re,im>, got {text!r}")
    try:
        re = float(parts[0])
        im = float(parts[1]) if len(parts) == 2 else 0.0
    except ValueError as exc:
        raise UsageFault(f"{what}: {exc}") from exc
    return complex(re, im)


def parse_state(text):
    """State grammar: fock:<m> | cat:<re[,im]> | coherent:<re[,im]> | psi:<csv>."""
    kind, sep, rest = text.partition(":")
    if not sep:
        raise UsageFault(f"state {text!r} missing ':'")
    try:
        if kind == "fock":
            return FockState(int(rest))
        if kind == "cat":
            return CatState(_parse_complex_pair(rest, "cat shift"))
        if kind == "coherent":
            return CoherentState(_parse_complex_pair(rest, "coherent displacement"))
        if kind == "psi":
            return _read_psi_csv(rest)
    except UsageFault:
        raise
    except (ValueError, QuasitoneError) as exc:
        raise UsageFault(f"state {text!r}: {exc}") from exc
    raise UsageFault(f"unknown state kind {kind!r}")


def _read_psi_csv(path):
    """Wavefunction CSV with header x,re,im and one sample per row."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise UsageFault(f"cannot read wavefunction: {exc}") from exc
    if not lines or lines[0] != "x,re,im":
        raise UsageFault(f"{path}: expected header 'x,re,im'")
    rows = [ln.split(",") for ln in lines[1:]]
    if any(len(r) != 3 for r in rows):
        raise UsageFault(f"{path}: every row needs x,re,im")
    x = np.array([float(r[0]) for r in rows])
    psi = np.array([complex(float(r[1]), float(r[2])) for r in rows])
    return SampledState(x, psi)


def parse_grid(text, state):
    """Grid grammar: regular:<n>:<min>:<max> | gauss:<n>:<span_sigmas>."""
    parts = text.split(":")
    try:
        if parts[0] == "regular" and len(parts) == 4:
            n = int(parts[1])
            lo = float(parts[2])
            hi = float(parts[3])
            return build_regular(lo, hi, lo, hi, n, n)
        if parts[0] == "gauss" and len(parts) == 3:
            n = int(parts[1])
            span = float(parts[2])
            moments = compute_moments(sample_field(state, default_grid(state)))
            return build_gaussian(moments, n, n, span_sigmas=span)
    except (ValueError, QuasitoneError) as exc:
        raise UsageFault(f"grid {text!r}: {exc}") from exc
    raise UsageFault(f"grid {text!r}: expected regular:<n>:<min>:<max> or gauss:<n>:<span>")


def _load_cfg(args) -> MapConfig:
    if getattr(args, "config", None):
        try:
            return load_map_config(args.config)
        except (OSError, ValueError) as exc:
            raise UsageFault(f"config: {exc}") from exc
    return MapConfig()


def _gated_field(state, args, cfg_unused=None):
    grid = parse_grid(args.grid, state) if args.grid else default_grid(state)
    field = sample_field(state, grid)
    cov = coverage(field)
    if cov < COVERAGE_MIN:
        raise CoverageError(
            f"coverage {cov:.4f} below {COVERAGE_MIN}; refusing to render from this grid"
        )
    return field, cov


def _bank_for(method, field, cfg, duration):
    if method == "I":
        return method1_grid(field, cfg, duration=duration)
    if method == "II":
        return method2_extremes(field, cfg, duration=duration)
    if method == "III":
        return method3_sections(field, cfg, duration=duration)
    return method4_moments(compute_moments(field), cfg, duration or cfg.event_duration)


def _parse_segments(text):
    segs = []
    for chunk in text.split(";"):
        parts = chunk.split(":")
        if len(parts) != 3:
            raise UsageFault(f"segment {chunk!r}: expected <start>:<end>:<seconds>")
        a = _parse_complex_pair(parts[0], "segment start")
        b = _parse_complex_pair(parts[1], "segment end")
        try:
            secs = float(parts[2])
        except ValueError as exc:
            raise UsageFault(f"segment {chunk!r}: {exc}") from exc
        segs.append((a, b, secs))
    try:
        return SweepTrajectory(tuple(segs))
    except ValueError as exc:
        raise UsageFault(str(exc)) from exc


def _build_parser():
    top = argparse.ArgumentParser(prog="quasitone", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="key=value text file of mapping constants")
        return p

    p = add("eval", "print one Wigner value")
    p.add_argument("--state", required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--p", type=float, required=True)

    p = add("field", "sample a state onto a grid and write CSV + sidecar")
    p.add_argument("--state", required=True)
    p.add_argument("--grid")
    p.add_argument("--out", required=True)

    p = add("moments", "statistics of a stored field as JSON")
    p.add_argument("--field", required=True)
    p.add_argument("--out")

    p = add("sonify", "render one mapping of a state to WAV")
    p.add_argument("--state", required=True)
    p.add_argument("--method", required=True, choices=["I", "II", "III", "IV"])
    p.add_argument("--grid")
    p.add_argument("--duration", type=float)
    p.add_argument("--sr", type=int, default=DEFAULT_SAMPLE_RATE)
    p.add_argument("--channels", type=int, default=1, choices=[1, 2, 4])
    p.add_argument("--out", required=True)
    p.add_argument("--score")

    p = add("sweep", "render a shift trajectory to WAV")
    p.add_argument("--out", required=True)
    p.add_argument("--sr", type=int, default=DEFAULT_SAMPLE_RATE)
    p.add_argument("--frame", type=float, default=0.25)
    p.add_argument("--channels", type=int, default=1, choices=[1, 2, 4])
    p.add_argument("--segments", help="<start>:<end>:<seconds>[;...] with complex endpoints re[,im]")

    p = add("sonogram", "short-time spectrum of a WAV as CSV")
    p.add_argument("--audio", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--window", type=int, default=2048)
    p.add_argument("--hop", type=int, default=512)

    p = add("score", "transcribe one mapping of a state to JSON events")
    p.add_argument("--state", required=True)
    p.add_argument("--method", required=True, choices=["I", "II", "III", "IV"])
    p.add_argument("--grid")
    p.add_argument("--duration", type=float)
    p.add_argument("--channels", type=int, default=2, choices=[1, 2, 4])
    p.add_argument("--arpeggiate", action="store_true")
    p.add_argument("--out", required=True)

    return top


def _partial_gains(bank, field, channels):
    if channels == 1:
        return None
    bounds = field.grid.bounds
    moments = None
    rows = []
    for partial in bank.partials:
        if partial.source_r is not None:
            rows.append(spatial_gains(partial.source_r, partial.source_p, bounds, channels))
        else:
            if moments is None:
                moments = compute_moments(field)
            rows.append(spatial_gains(moments.r0, moments.p0, bounds, channels))
    return np.asarray(rows, dtype=float)


def _run(args) -> int:
    cfg = _load_cfg(args)

    if args.command == "eval":
        state = parse_state(args.state)
        from .states import evaluate

        print(fmt17(float(evaluate(state, args.r, args.p))))
        return 0

    if args.command == "field":
        state = parse_state(args.state)
        grid = parse_grid(args.grid, state) if args.grid else default_grid(state)
        field = sample_field(state, grid)
        cov = coverage(field)
        write_field(field, args.out)
        print(f"coverage {cov:.6f}")
        if cov < COVERAGE_MIN:
            print(f"coverage below {COVERAGE_MIN}", file=sys.stderr)
            return 3
        return 0

    if args.command == "moments":
        field = read_field(args.field)
        moments = compute_moments(field)
        if args.out:
            write_moments(moments, args.out)
        else:
            sys.stdout.write(moments_to_json(moments))
        return 0

    if args.command == "sonify":
        state = parse_state(args.state)
        field, _ = _gated_field(state, args)
        bank = _bank_for(args.method, field, cfg, args.duration)
        buffer = synth(bank, sample_rate=args.sr, gains=_partial_gains(bank, field, args.channels))
        write_wav(buffer, args.out)
        if args.score:
            write_score(bank_to_events(bank, field, cfg, channels=args.channels), args.score)
        return 0

    if args.command == "sweep":
        trajectory = _parse_segments(args.segments) if args.segments else None
        buffer = render_sweep(
            trajectory=trajectory,
            cfg=load_map_config(args.config) if args.config else None,
            sample_rate=args.sr,
            frame_seconds=args.frame,
            channels=args.channels,
        )
        write_wav(buffer, args.out)
        return 0

    if args.command == "sonogram":
        sono = stft_sonogram(read_wav(args.audio), window=args.window, hop=args.hop)
        write_sonogram_csv(sono, args.out)
        return 0

    if args.command == "score":
        state = parse_state(args.state)
        field, _ = _gated_field(state, args)
        bank = _bank_for(args.method, field, cfg, args.duration)
        events = bank_to_events(
            bank, field, cfg, channels=args.channels, arpeggiate=args.arpeggiate
        )
        write_score(events, args.out)
        return 0

    raise UsageFault(f"unknown command {args.command!r}")


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _run(args)
    except UsageFault as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CoverageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (QuasitoneError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
