"""Command-line front end: enhance, eval, sweep, serve.

Exit codes: 0 success, 1 usage or input error, 2 internal error. Telemetry
goes to stdout as key=value lines so scripts can parse it without JSON.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

from .audio_io import FLOAT32, PCM16, AudioBuffer, read_wav, write_wav
from .errors import SgseError
from .evaluate import (
    DEFAULT_SNRS_DB,
    default_conditions,
    run_eval,
    run_sweep,
    write_means_csv,
    write_rows_csv,
)
from .gains import BETA_RANGE, MU_RANGE, NOISE_PRESETS, NU_RANGE, GainParams
from .pipeline import RULES, PipelineConfig, enhance_span
from .stft import StftConfig

DEFAULT_BETAS = (0.1, 0.25, 0.5, 1.0, 2.0, 3.0, 5.0)


class UsageError(SgseError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_gain_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rule", choices=RULES, default="proposed")
    p.add_argument("--beta", type=float, default=None, help="tradeoff, 0.1 to 5")
    p.add_argument("--mu", type=float, default=None, help="prior shape, 0.5 to 3")
    p.add_argument("--nu", type=float, default=None, help="prior shape, 0.01 to 1")
    p.add_argument("--preset", choices=sorted(NOISE_PRESETS), default=None,
                   help="per-noise (mu, nu) preset; explicit --mu/--nu win")
    p.add_argument("--gain-floor", type=float, default=0.1)
    p.add_argument("--gain-cap", type=float, default=10.0)


def _add_shared_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--frame-ms", type=float, default=20.0)
    p.add_argument("--fs-check", type=int, default=None,
                   help="fail if an input WAV is not at this sample rate")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--jobs", type=int, default=1)


def _check_range(name: str, value: float | None, lo: float, hi: float) -> None:
    if value is not None and not (lo <= value <= hi):
        raise UsageError(f"--{name} {value:g} out of range; valid range is {lo:g} to {hi:g}")


def _params_from_args(args) -> GainParams:
    _check_range("beta", args.beta, *BETA_RANGE)
    _check_range("mu", args.mu, *MU_RANGE)
    _check_range("nu", args.nu, *NU_RANGE)
    mu, nu = (NOISE_PRESETS[args.preset] if args.preset else (1.74, 0.126))
    return GainParams(
        beta=args.beta if args.beta is not None else 1.0,
        mu=args.mu if args.mu is not None else mu,
        nu=args.nu if args.nu is not None else nu,
        gain_floor=args.gain_floor,
        gain_cap=args.gain_cap,
    )


def _read_checked(path, fs_check: int | None) -> AudioBuffer:
    buf = read_wav(path)
    if fs_check is not None and buf.sample_rate_hz != fs_check:
        raise UsageError(f"{path}: sample rate {buf.sample_rate_hz} != required {fs_check}")
    return buf


def build_parser() -> _Parser:
    parser = _Parser(prog="sgse", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("enhance", help="enhance one WAV file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.add_argument("--format", choices=[PCM16, FLOAT32], default=FLOAT32)
    p.add_argument("--start", type=float, default=0.0, help="span start in seconds")
    p.add_argument("--dur", type=float, default=None, help="span length in seconds")
    p.add_argument("--spectrogram", default=None, metavar="PNG",
                   help="also save a before/after spectrogram figure")
    _add_gain_flags(p)
    _add_shared_flags(p)

    p = sub.add_parser("eval", help="run the metric harness over a corpus")
    p.add_argument("--manifest", default=None,
                   help="corpus manifest (default: generate the synthetic corpus)")
    p.add_argument("--out-dir", default="eval_out")
    p.add_argument("--snrs", default=",".join(f"{s:g}" for s in DEFAULT_SNRS_DB))
    p.add_argument("--noise", default="*", help="noise-type filter (fnmatch)")
    p.add_argument("--timing", action="store_true",
                   help="measure real-time factors (makes the CSV run-dependent)")
    p.add_argument("--no-figures", action="store_true")
    _add_gain_flags(p)
    _add_shared_flags(p)

    p = sub.add_parser("sweep", help="sweep beta over the eval grid")
    p.add_argument("--manifest", default=None)
    p.add_argument("--out-dir", default="sweep_out")
    p.add_argument("--betas", default=",".join(f"{b:g}" for b in DEFAULT_BETAS))
    p.add_argument("--snrs", default=",".join(f"{s:g}" for s in DEFAULT_SNRS_DB))
    p.add_argument("--noise", default="*")
    p.add_argument("--no-figures", action="store_true")
    _add_gain_flags(p)
    _add_shared_flags(p)

    p = sub.add_parser("serve", help="run the HTTP tuning service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--ui-dir", default=None, help="static UI directory to serve at /")
    _add_gain_flags(p)
    _add_shared_flags(p)

    return parser


def cmd_enhance(args) -> int:
    src = _read_checked(args.infile, args.fs_check)
    cfg = PipelineConfig(
        sample_rate_hz=src.sample_rate_hz,
        stft=StftConfig.for_rate(src.sample_rate_hz, args.frame_ms),
        rule=args.rule,
        params=_params_from_args(args),
    )
    t0 = time.perf_counter()
    out = enhance_span(src.samples, cfg, args.start, args.dur)
    elapsed = time.perf_counter() - t0
    write_wav(args.outfile, AudioBuffer(out, src.sample_rate_hz), args.format)
    duration = len(out) / src.sample_rate_hz
    print(f"rtf={elapsed / duration:.6f}")
    print(f"latency_samples={cfg.stft.frame_len - cfg.stft.hop}")
    print(f"output_samples={len(out)}")
    if args.spectrogram:
        from .plots import plot_spectrogram_pair

        a = int(round(args.start * src.sample_rate_hz))
        noisy = src.samples[a : a + len(out)]
        plot_spectrogram_pair(noisy, out, cfg.stft, src.sample_rate_hz, args.spectrogram)
        print(f"spectrogram={args.spectrogram}")
    return 0


def _parse_float_list(text: str, flag: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"--{flag} expects a comma-separated list of numbers")


def _resolve_manifest(args) -> Path:
    if args.manifest:
        manifest = Path(args.manifest)
    else:
        from .corpus import generate_corpus

        corpus_dir = Path(args.out_dir) / "corpus"
        manifest = generate_corpus(corpus_dir, seed=args.seed)
        print(f"corpus={manifest}")
    if args.fs_check is not None:
        from .evaluate import read_manifest

        for entry in read_manifest(manifest):
            _read_checked(entry.clean_path, args.fs_check)
            _read_checked(entry.noise_path, args.fs_check)
    return manifest


def cmd_eval(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = _resolve_manifest(args)
    conditions = default_conditions(
        rule=args.rule,
        params=_params_from_args(args),
        snrs_db=_parse_float_list(args.snrs, "snrs"),
        noise_type=args.noise,
    )
    report = run_eval(manifest, conditions, frame_ms=args.frame_ms,
                      jobs=args.jobs, measure_rtf=args.timing)
    rows_csv = out_dir / "report.csv"
    means_csv = out_dir / "report_means.csv"
    write_rows_csv(rows_csv, report.rows)
    write_means_csv(means_csv, report.means)
    print(f"rows={len(report.rows)}")
    print(f"report={rows_csv}")
    print(f"means={means_csv}")
    if not args.no_figures and report.means:
        from .plots import plot_eval_means

        fig = plot_eval_means(report.means, out_dir / "eval_metrics.png")
        print(f"figure={fig}")
    for failure in report.failures:
        print(f"failure={failure}", file=sys.stderr)
    print(f"failures={len(report.failures)}")
    return 0


def cmd_sweep(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = _resolve_manifest(args)
    betas = _parse_float_list(args.betas, "betas")
    for b in betas:
        _check_range("betas", b, *BETA_RANGE)
    means, failures = run_sweep(
        manifest,
        betas,
        rule=args.rule,
        params=_params_from_args(args),
        snrs_db=_parse_float_list(args.snrs, "snrs"),
        noise_type=args.noise,
        frame_ms=args.frame_ms,
        jobs=args.jobs,
    )
    sweep_csv = out_dir / "sweep.csv"
    write_means_csv(sweep_csv, means)
    print(f"rows={len(means)}")
    print(f"report={sweep_csv}")
    if not args.no_figures and means:
        from .plots import plot_sweep

        fig = plot_sweep(means, out_dir / "sweep_metrics.png")
        print(f"figure={fig}")
    for failure in failures:
        print(f"failure={failure}", file=sys.stderr)
    print(f"failures={len(failures)}")
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    serve(
        host=args.host,
        port=args.port,
        ui_dir=args.ui_dir,
        default_params=_params_from_args(args),
        default_rule=args.rule,
        frame_ms=args.frame_ms,
    )
    return 0


_COMMANDS = {
    "enhance": cmd_enhance,
    "eval": cmd_eval,
    "sweep": cmd_sweep,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SgseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 2
    except Exception as exc:  # pragma: no cover - internal faults
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
