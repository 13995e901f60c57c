"""Batch evaluation: mix at controlled SNR, enhance, score, report.

A corpus manifest is a text file with one tab-separated record per line:
utterance_id, clean_path, noise_path (paths relative to the manifest).
Each record is crossed with each evaluation condition; failures are
collected and reported without aborting the batch. The CSV report header
matches the EvalRow field names exactly.

Real-time factors are only measured when asked (measure_rtf=True): leaving
them at 0.0 keeps report files byte-identical across runs.
"""

from __future__ import annotations

import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from fnmatch import fnmatch
from pathlib import Path

import numpy as np

from .audio_io import AudioBuffer, read_wav
from .errors import SgseError
from .gains import GainParams
from .metrics import mix_at_snr, segmental_snr, stoi
from .pipeline import PipelineConfig, enhance_buffer
from .stft import StftConfig

DEFAULT_SNRS_DB = (-5.0, 0.0, 5.0)


@dataclass(frozen=True)
class EvalCondition:
    """One evaluation cell: which noise, how loud, which rule/parameters.

    noise_type is matched (fnmatch-style) against the noise file stem of
    each manifest record; "*" applies the condition to every record.
    """

    noise_type: str = "*"
    snr_db: float = 0.0
    rule: str = "proposed"
    params: GainParams = field(default_factory=GainParams)


@dataclass
class EvalRow:
    utterance_id: str
    noise_type: str
    snr_db: float
    rule: str
    beta: float
    mu: float
    nu: float
    stoi_noisy: float
    stoi_enhanced: float
    segsnr_noisy_db: float
    segsnr_enhanced_db: float
    rtf: float


@dataclass
class MeanRow:
    noise_type: str
    snr_db: float
    rule: str
    beta: float
    mu: float
    nu: float
    n_utterances: int
    stoi_noisy: float
    stoi_enhanced: float
    segsnr_noisy_db: float
    segsnr_enhanced_db: float


@dataclass
class EvalReport:
    rows: list[EvalRow]
    means: list[MeanRow]
    failures: list[str]


@dataclass(frozen=True)
class ManifestEntry:
    utterance_id: str
    clean_path: Path
    noise_path: Path

    @property
    def noise_stem(self) -> str:
        return self.noise_path.stem


def read_manifest(path) -> list[ManifestEntry]:
    base = Path(path).parent
    entries = []
    for line_no, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise SgseError(f"{path}:{line_no}: expected 3 tab-separated fields")
        utt, clean_rel, noise_rel = parts
        entries.append(ManifestEntry(utt, base / clean_rel, base / noise_rel))
    return entries


def default_conditions(
    rule: str = "proposed",
    params: GainParams | None = None,
    snrs_db=DEFAULT_SNRS_DB,
    noise_type: str = "*",
) -> list[EvalCondition]:
    params = params or GainParams()
    return [EvalCondition(noise_type, float(s), rule, params) for s in snrs_db]


def _evaluate_one(
    entry: ManifestEntry,
    cond: EvalCondition,
    frame_ms: float,
    measure_rtf: bool,
) -> EvalRow:
    clean = read_wav(entry.clean_path)
    noise = read_wav(entry.noise_path)
    mixture = mix_at_snr(clean, noise, cond.snr_db).mixture

    cfg = PipelineConfig(
        sample_rate_hz=clean.sample_rate_hz,
        stft=StftConfig.for_rate(clean.sample_rate_hz, frame_ms),
        rule=cond.rule,
        params=cond.params,
    )
    t0 = time.perf_counter()
    enhanced = enhance_buffer(mixture.samples, cfg)
    elapsed = time.perf_counter() - t0
    rtf = elapsed / clean.duration_seconds if measure_rtf else 0.0

    # score over the span unaffected by the flush tail
    keep = len(clean) - (cfg.stft.frame_len - cfg.stft.hop)
    fs = clean.sample_rate_hz
    ref = AudioBuffer(clean.samples[:keep], fs)
    noisy = AudioBuffer(mixture.samples[:keep], fs)
    enh = AudioBuffer(enhanced[:keep], fs)

    return EvalRow(
        utterance_id=entry.utterance_id,
        noise_type=entry.noise_stem,
        snr_db=cond.snr_db,
        rule=cond.rule,
        beta=cond.params.beta,
        mu=cond.params.mu,
        nu=cond.params.nu,
        stoi_noisy=stoi(ref, noisy),
        stoi_enhanced=stoi(ref, enh),
        segsnr_noisy_db=segmental_snr(ref, noisy),
        segsnr_enhanced_db=segmental_snr(ref, enh),
        rtf=rtf,
    )


def _task(args):
    entry, cond, frame_ms, measure_rtf = args
    return _evaluate_one(entry, cond, frame_ms, measure_rtf)


def compute_means(rows: list[EvalRow]) -> list[MeanRow]:
    groups: dict[tuple, list[EvalRow]] = {}
    for r in rows:
        groups.setdefault((r.noise_type, r.snr_db, r.rule, r.beta, r.mu, r.nu), []).append(r)
    means = []
    for key in sorted(groups):
        rs = groups[key]
        means.append(
            MeanRow(
                *key,
                n_utterances=len(rs),
                stoi_noisy=float(np.mean([r.stoi_noisy for r in rs])),
                stoi_enhanced=float(np.mean([r.stoi_enhanced for r in rs])),
                segsnr_noisy_db=float(np.mean([r.segsnr_noisy_db for r in rs])),
                segsnr_enhanced_db=float(np.mean([r.segsnr_enhanced_db for r in rs])),
            )
        )
    return means


def run_eval(
    manifest_path,
    conditions: list[EvalCondition],
    frame_ms: float = 20.0,
    jobs: int = 1,
    measure_rtf: bool = False,
) -> EvalReport:
    entries = read_manifest(manifest_path)
    tasks = [
        (e, c, frame_ms, measure_rtf)
        for e in entries
        for c in conditions
        if fnmatch(e.noise_stem, c.noise_type)
    ]
    rows: list[EvalRow] = []
    failures: list[str] = []
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = pool.map(_run_guarded, tasks)
            for (entry, cond, *_), (row, err) in zip(tasks, results):
                if err is not None:
                    failures.append(f"{entry.utterance_id}/{entry.noise_stem}@{cond.snr_db}dB: {err}")
                else:
                    rows.append(row)
    else:
        for t in tasks:
            row, err = _run_guarded(t)
            if err is not None:
                entry, cond = t[0], t[1]
                failures.append(f"{entry.utterance_id}/{entry.noise_stem}@{cond.snr_db}dB: {err}")
            else:
                rows.append(row)
    rows.sort(key=lambda r: (r.utterance_id, r.noise_type, r.snr_db, r.rule, r.beta))
    return EvalReport(rows=rows, means=compute_means(rows), failures=failures)


def _run_guarded(args):
    try:
        return _task(args), None
    except (SgseError, ValueError, OSError) as exc:
        return None, f"{type(exc).__name__}: {exc}"


def run_sweep(
    manifest_path,
    betas,
    rule: str = "proposed",
    params: GainParams | None = None,
    snrs_db=DEFAULT_SNRS_DB,
    noise_type: str = "*",
    frame_ms: float = 20.0,
    jobs: int = 1,
) -> tuple[list[MeanRow], list[str]]:
    """Per-condition means for each tradeoff value in betas."""
    params = params or GainParams()
    means: list[MeanRow] = []
    failures: list[str] = []
    for beta in betas:
        conds = default_conditions(rule, replace(params, beta=float(beta)), snrs_db, noise_type)
        report = run_eval(manifest_path, conds, frame_ms=frame_ms, jobs=jobs)
        means.extend(report.means)
        failures.extend(report.failures)
    return means, failures


# -- CSV reports ---------------------------------------------------------------


def _format_value(v) -> str:
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def _write_csv(path, records) -> None:
    names = [f.name for f in fields(records[0])] if records else None
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if names is None:
            return
        writer.writerow(names)
        for r in records:
            writer.writerow([_format_value(getattr(r, n)) for n in names])


def write_rows_csv(path, rows: list[EvalRow]) -> None:
    if not rows:
        Path(path).write_text(",".join(f.name for f in fields(EvalRow)) + "\r\n")
        return
    _write_csv(path, rows)


def write_means_csv(path, means: list[MeanRow]) -> None:
    if not means:
        Path(path).write_text(",".join(f.name for f in fields(MeanRow)) + "\r\n")
        return
    _write_csv(path, means)
