"""HTTP tuning service: upload a clip, adjust parameters, render spans.

Renders are stateless on purpose: every render runs a fresh pipeline over
the requested span (with up to init_noise_seconds of preceding audio
prepended for noise initialization, then trimmed), so the same request
always returns the same bytes and A/B comparisons are honest. Uploaded
clips should start with a couple of seconds of speech-free audio; if the
initialization stretch looks speech-active the render response carries an
X-Preroll-Warning header.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass

import numpy as np
from fastapi import FastAPI, HTTPException, Request, Response
from pydantic import BaseModel

from . import noise as noise_mod
from .audio_io import FLOAT32, AudioBuffer, read_wav_bytes, wav_bytes
from .errors import SgseError
from .gains import GainParams
from .pipeline import RULES, PipelineConfig, enhance_span
from .plots import spectrogram_db
from .stft import StftConfig, analyze

MAX_UPLOAD_BYTES = 100 * 2**20
SESSION_TTL_SECONDS = 30 * 60


class ParamsBody(BaseModel):
    beta: float | None = None
    mu: float | None = None
    nu: float | None = None
    rule: str | None = None


@dataclass
class Session:
    id: str
    source: AudioBuffer
    params: GainParams
    rule: str
    frame_ms: float
    last_access: float
    lock: threading.Lock

    def config(self) -> PipelineConfig:
        return PipelineConfig(
            sample_rate_hz=self.source.sample_rate_hz,
            stft=StftConfig.for_rate(self.source.sample_rate_hz, self.frame_ms),
            rule=self.rule,
            params=self.params,
        )


class SessionStore:
    """Thread-safe session map with idle expiry."""

    def __init__(self, ttl_seconds: float = SESSION_TTL_SECONDS, clock=time.monotonic):
        self._ttl = ttl_seconds
        self._clock = clock
        self._lock = threading.Lock()
        self._sessions: dict[str, Session] = {}

    def _purge(self) -> None:
        now = self._clock()
        dead = [k for k, s in self._sessions.items() if now - s.last_access > self._ttl]
        for k in dead:
            del self._sessions[k]

    def create(self, source: AudioBuffer, params: GainParams, rule: str, frame_ms: float) -> Session:
        s = Session(
            id=uuid.uuid4().hex,
            source=source,
            params=params,
            rule=rule,
            frame_ms=frame_ms,
            last_access=self._clock(),
            lock=threading.Lock(),
        )
        with self._lock:
            self._purge()
            self._sessions[s.id] = s
        return s

    def get(self, session_id: str) -> Session:
        with self._lock:
            self._purge()
            s = self._sessions.get(session_id)
            if s is None:
                raise KeyError(session_id)
            s.last_access = self._clock()
            return s

    def delete(self, session_id: str) -> bool:
        with self._lock:
            return self._sessions.pop(session_id, None) is not None


def preroll_speech_fraction(samples: np.ndarray, config: PipelineConfig) -> float:
    """Fraction of initialization frames whose VAD statistic exceeds eta.

    The reference floor comes from the quietest fifth of the preroll frames
    (bias-corrected for exponentially distributed noise power) rather than
    their mean, so speech in the preroll registers instead of masking itself.
    """
    st = config.stft
    n = min(len(samples), int(config.init_noise_seconds * config.sample_rate_hz))
    if n < st.frame_len:
        return 0.0
    frames = analyze(samples[:n], st)
    power = np.abs(np.stack([f.bins for f in frames])) ** 2
    floor = np.quantile(power, 0.2, axis=0) / -np.log(0.8)
    est = noise_mod.NoiseEstimate(psd=np.maximum(floor, noise_mod.PSD_FLOOR), initialized=True)
    hits = 0
    for f in frames:
        gamma = np.abs(f.bins) ** 2 / est.psd
        xi = np.maximum(gamma - 1.0, 0.0)
        if noise_mod.vad_statistic(f, est, xi) > config.vad_threshold:
            hits += 1
    return hits / len(frames)


def create_app(
    default_params: GainParams | None = None,
    default_rule: str = "proposed",
    frame_ms: float = 20.0,
    store: SessionStore | None = None,
) -> FastAPI:
    app = FastAPI(title="sgse tuning service")
    sessions = store if store is not None else SessionStore()
    defaults = default_params or GainParams()

    def _get(session_id: str) -> Session:
        try:
            return sessions.get(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown session")

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request):
        body = await request.body()
        if len(body) > MAX_UPLOAD_BYTES:
            raise HTTPException(status_code=413, detail="upload exceeds 100 MB")
        try:
            source = read_wav_bytes(body, origin="<upload>")
        except SgseError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        s = sessions.create(source, defaults, default_rule, frame_ms)
        return {
            "id": s.id,
            "sample_rate_hz": source.sample_rate_hz,
            "duration_seconds": source.duration_seconds,
            "params": _echo(s),
        }

    def _echo(s: Session) -> dict:
        return {"beta": s.params.beta, "mu": s.params.mu, "nu": s.params.nu, "rule": s.rule}

    @app.put("/sessions/{session_id}/params")
    def update_params(session_id: str, body: ParamsBody):
        s = _get(session_id)
        if body.rule is not None and body.rule not in RULES:
            raise HTTPException(status_code=422, detail=f"rule must be one of {RULES}")
        with s.lock:
            p = s.params
            s.params = GainParams(
                beta=body.beta if body.beta is not None else p.beta,
                mu=body.mu if body.mu is not None else p.mu,
                nu=body.nu if body.nu is not None else p.nu,
                gain_floor=p.gain_floor,
                gain_cap=p.gain_cap,
            )
            if body.rule is not None:
                s.rule = body.rule
            return _echo(s)

    def _span(s: Session, start: float, dur: float | None) -> np.ndarray:
        fs = s.source.sample_rate_hz
        a = int(round(start * fs))
        n = len(s.source) - a if dur is None else int(round(dur * fs))
        if a < 0 or n <= 0 or a + n > len(s.source):
            raise HTTPException(status_code=416, detail="span outside source audio")
        return s.source.samples[a : a + n]

    @app.get("/sessions/{session_id}/render")
    def render(session_id: str, start: float = 0.0, dur: float | None = None):
        s = _get(session_id)
        with s.lock:
            cfg = s.config()
            _span(s, start, dur)  # range check before the heavy work
            try:
                out = enhance_span(s.source.samples, cfg, start, dur)
            except ValueError as exc:
                raise HTTPException(status_code=416, detail=str(exc))
            fs = s.source.sample_rate_hz
            a = int(round(start * fs))
            preroll_start = a - min(int(round(cfg.init_noise_seconds * fs)), a)
            frac = preroll_speech_fraction(s.source.samples[preroll_start:], cfg)
            headers = {}
            if frac > 0.5:
                headers["X-Preroll-Warning"] = (
                    f"initialization audio looks speech-active ({frac:.0%} of frames)"
                )
            payload = wav_bytes(AudioBuffer(out, fs), FLOAT32)
            return Response(content=payload, media_type="audio/wav", headers=headers)

    @app.get("/sessions/{session_id}/spectrogram")
    def spectrogram(session_id: str, start: float = 0.0, dur: float | None = None, kind: str = "noisy"):
        s = _get(session_id)
        if kind not in ("noisy", "enhanced"):
            raise HTTPException(status_code=422, detail="kind must be noisy or enhanced")
        with s.lock:
            cfg = s.config()
            samples = _span(s, start, dur)
            if kind == "enhanced":
                samples = enhance_span(s.source.samples, cfg, start, dur)
            if len(samples) < cfg.stft.frame_len:
                raise HTTPException(status_code=416, detail="span shorter than one frame")
            db = spectrogram_db(samples, cfg.stft)
            fs = s.source.sample_rate_hz
            return {
                "frames": db.shape[0],
                "bins": db.shape[1],
                "hop_seconds": cfg.stft.hop / fs,
                "bin_hz": fs / cfg.stft.fft_size,
                "db": np.round(db, 3).tolist(),
            }

    @app.delete("/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str):
        if not sessions.delete(session_id):
            raise HTTPException(status_code=404, detail="unknown session")
        return Response(status_code=204)

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    return app


def serve(
    host: str = "127.0.0.1",
    port: int = 8080,
    ui_dir: str | None = None,
    default_params: GainParams | None = None,
    default_rule: str = "proposed",
    frame_ms: float = 20.0,
) -> None:
    """Run the service under uvicorn (blocking)."""
    import uvicorn

    app = create_app(default_params, default_rule, frame_ms)
    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    uvicorn.run(app, host=host, port=port, log_level="info")
