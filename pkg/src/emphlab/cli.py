"""``emphlab`` command line: synth, analyze, codec, montecarlo, table, lsd-sweep.

Exit codes: 0 success, 1 I/O or file format, 2 usage, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from . import armodel, codec, estimator, experiments
from .dsp import FrameConfig, UnstableFilterError
from .estimator import ConsistencyError
from .metrics import lsd_db
from .wavio import WavAudio, WavFormatError, atomic_open, read_wav, write_wav

log = logging.getLogger("emphlab")

EXIT_IO, EXIT_USAGE, EXIT_NUMERIC = 1, 2, 3


class UsageError(Exception):
    pass


def _write_csv(path, header, rows):
    with atomic_open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _fmt(v):
    return f"{v:.10g}" if isinstance(v, (float, np.floating)) else v


def _config(args, sample_rate_hz):
    return FrameConfig.from_ms(sample_rate_hz, args.frame_ms, args.window_ms, args.lookahead_ms)


def _sidecar(path, suffix):
    p = Path(path)
    return p.with_name(f"{p.stem}_{suffix}{p.suffix or '.csv'}")


def cmd_synth(args):
    model = armodel.ArModel(args.alpha, args.sigma2)
    n = int(round(args.duration * args.sample_rate))
    if n < 1:
        raise UsageError("duration too short")
    x = armodel.synthesize_ar1(model, n, args.seed)
    peak = np.max(np.abs(x))
    x = 0.5 * x / peak if peak > 0 else x
    write_wav(args.out, WavAudio(args.sample_rate, x))
    log.info("wrote %d samples to %s", n, args.out)


def cmd_analyze(args):
    audio = read_wav(args.input)
    cfg = _config(args, audio.sample_rate_hz)
    res = experiments.analyze_frames(audio.samples, cfg, args.gamma)
    rows = [(f, _fmt(at), _fmt(rd), _fmt(ah), int(s)) for f, (at, rd, ah, s) in
            enumerate(zip(res.alpha_tilde, res.rho_d, res.alpha_hat, res.silent))]
    _write_csv(args.out, ["frame_index", "alpha_tilde", "rho_d", "alpha_hat", "silent"], rows)
    edges, counts = experiments.histogram(res.alpha_tilde)
    _write_csv(_sidecar(args.out, "hist"), ["bin_lo", "bin_hi", "count"],
               [(_fmt(lo), _fmt(hi), int(c)) for lo, hi, c in zip(edges[:-1], edges[1:], counts)])
    voiced = res.alpha_tilde[~res.silent]
    print(f"frames={len(res.silent)} silent={int(res.silent.sum())} "
          f"mean_alpha_tilde={voiced.mean() if voiced.size else 0.0:.4f}")


def _mode(args):
    if args.mode == "fixed":
        return codec.CodecMode.fixed(args.beta)
    return codec.CodecMode(args.mode, gamma=args.gamma)


def cmd_codec(args):
    mode = _mode(args)
    if args.bits is not None and args.bits < 2:
        raise UsageError("--bits must be >= 2")
    audio = read_wav(args.input)
    cfg = _config(args, audio.sample_rate_hz)
    res = codec.run_pipeline(audio.samples, mode, cfg, bits_per_sample=args.bits)
    write_wav(args.out, WavAudio(audio.sample_rate_hz, res.decoded))
    lsd = lsd_db(audio.samples, res.decoded, cfg).mean_lsd_db
    if args.report:
        rows = [(f, _fmt(te), _fmt(td)) for f, (te, td) in
                enumerate(zip(res.per_frame_coeffs_enc, res.per_frame_coeffs_dec))]
        _write_csv(args.report, ["frame_index", "tap_enc", "tap_dec"], rows)
        step = res.quantizer.step if res.quantizer else float("nan")
        _write_csv(_sidecar(args.report, "summary"), ["metric", "value"], [
            ("mode", str(mode)), ("bits_per_sample", res.bits_per_sample or 0),
            ("step", _fmt(step)), ("snr_db", _fmt(res.snr_db)),
            ("mean_lsd_db", _fmt(lsd)), ("delay_samples", res.delay_samples),
        ])
    print(f"mode={mode} bits={res.bits_per_sample} snr_db={res.snr_db:.3f} lsd_db={lsd:.4f}")


def cmd_montecarlo(args):
    if args.frames < 1 or args.frame_len < 2:
        raise UsageError("--frames must be >= 1 and --frame-len >= 2")
    if not 0.0 < args.gamma < 1.0:
        raise UsageError("--gamma must be in (0, 1)")
    grid = armodel.default_alpha_grid() if args.alphas is None else args.alphas
    reports = armodel.run_monte_carlo(grid, args.gamma, args.frames, args.frame_len,
                                      seed=args.seed, max_workers=experiments.max_workers())
    rows = [(_fmt(r.true_alpha), *map(_fmt, r.ci95_encoder), *map(_fmt, r.ci95_decoder))
            for r in reports]
    _write_csv(args.out, ["true_alpha", "enc_lo", "enc_hi", "dec_lo", "dec_hi"], rows)


def cmd_table(args):
    if not 0.0 < args.gamma < 1.0:
        raise UsageError("--gamma must be in (0, 1)")
    if args.entries < 2:
        raise UsageError("--entries must be >= 2")
    estimator.build_table(args.gamma, args.entries).to_csv(args.out)


def cmd_lsd_sweep(args):
    if not args.modes or not args.gammas or not args.bits:
        raise UsageError("--modes, --gammas and --bits must be non-empty")
    for m in args.modes:
        if m not in codec.MODES:
            raise UsageError(f"unknown mode {m!r}")
    if args.input:
        audio = read_wav(args.input)
        x, rate = audio.samples, audio.sample_rate_hz
    else:
        rate = 16000
        x = experiments.synthetic_material(args.duration, rate, seed=args.seed)
    cfg = _config(args, rate)
    rows = experiments.lsd_sweep(x, args.modes, args.gammas, args.bits, cfg,
                                 workers=experiments.max_workers())
    _write_csv(args.out, ["mode", "gamma", "bits", "mean_lsd", "snr_db", "status"],
               [(r.mode, _fmt(r.gamma), r.bits, _fmt(r.mean_lsd), _fmt(r.snr_db), r.status)
                for r in rows])


def _add_geometry(p):
    p.add_argument("--frame-ms", type=float, default=10.0)
    p.add_argument("--window-ms", type=float, default=30.0)
    p.add_argument("--lookahead-ms", type=float, default=10.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="emphlab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write an AR(1) test signal")
    p.add_argument("--alpha", type=float, default=0.9)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--duration", type=float, default=10.0, help="seconds")
    p.add_argument("--sample-rate", type=int, default=16000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("analyze", help="per-frame coefficient estimates and histogram")
    p.add_argument("input")
    p.add_argument("--gamma", type=float, default=0.7)
    p.add_argument("--out", required=True)
    _add_geometry(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("codec", help="run the PCM codec with pre-/de-emphasis")
    p.add_argument("input")
    p.add_argument("--mode", choices=codec.MODES, default="self")
    p.add_argument("--gamma", type=float, default=0.7)
    p.add_argument("--beta", type=float, default=0.7, help="tap for --mode fixed")
    p.add_argument("--bits", type=int, default=4, help="bits per sample; omit quantization with --no-quant")
    p.add_argument("--no-quant", dest="bits", action="store_const", const=None)
    p.add_argument("--out", required=True)
    p.add_argument("--report")
    _add_geometry(p)
    p.set_defaults(func=cmd_codec)

    p = sub.add_parser("montecarlo", help="95%% intervals of encoder/decoder estimates")
    p.add_argument("--gamma", type=float, default=0.7)
    p.add_argument("--frames", type=int, default=30000, help="trials per alpha")
    p.add_argument("--frame-len", type=int, default=1440)
    p.add_argument("--alphas", type=float, nargs="+")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_montecarlo)

    p = sub.add_parser("table", help="tabulated de-emphasis curve")
    p.add_argument("--gamma", type=float, default=0.7)
    p.add_argument("--entries", type=int, default=1025)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("lsd-sweep", help="mean LSD over modes x gammas x bit depths")
    p.add_argument("input", nargs="?", help="16-bit mono WAV; synthetic AR(1) material if omitted")
    p.add_argument("--modes", nargs="*", default=["self", "forward"])
    p.add_argument("--gammas", type=float, nargs="*", default=[0.3, 0.5, 0.7, 0.8, 0.9])
    p.add_argument("--bits", type=int, nargs="*", default=[3, 4, 5, 6, 7, 8])
    p.add_argument("--duration", type=float, default=60.0, help="seconds of synthetic material")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    _add_geometry(p)
    p.set_defaults(func=cmd_lsd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (OSError, WavFormatError) as exc:
        print(f"emphlab: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConsistencyError, UnstableFilterError, FloatingPointError) as exc:
        print(f"emphlab: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, ValueError) as exc:
        print(f"emphlab: usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
