"""WAV reading/writing and sample-rate conversion for mono buffers.

Supports RIFF/WAVE with PCM 16-bit (format tag 1) and IEEE float 32-bit
(format tag 3), little-endian, 1 or 2 channels. Stereo is averaged down to
mono; the whole engine is single-microphone.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from math import gcd
from pathlib import Path

import numpy as np
from scipy.signal import firwin, resample_poly

from .errors import EmptyAudio, IoFailure, MalformedWav, UnsupportedFormat

PCM16 = "pcm16"
FLOAT32 = "float32"

# symmetric divisor so that -32768 maps exactly to -1.0
_INT16_SCALE = 32768.0


@dataclass
class AudioBuffer:
    """Mono sample sequence plus its sample rate.

    Samples are float64 with nominal range [-1, 1]; rate must be positive.
    """

    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise ValueError("AudioBuffer samples must be one-dimensional")
        if int(self.sample_rate_hz) <= 0:
            raise ValueError("sample_rate_hz must be positive")
        self.sample_rate_hz = int(self.sample_rate_hz)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration_seconds(self) -> float:
        return len(self.samples) / self.sample_rate_hz


def _parse_chunks(data: bytes):
    """Yield (chunk_id, payload) pairs from a RIFF body, tolerating padding."""
    pos = 12
    while pos + 8 <= len(data):
        cid, size = struct.unpack_from("<4sI", data, pos)
        pos += 8
        payload = data[pos : pos + size]
        if len(payload) < size:
            # declared size overruns the file: keep what is there (some
            # recorders close files without fixing up the data size)
            if cid != b"data":
                raise MalformedWav(f"chunk {cid!r} truncated")
        yield cid, payload
        pos += size + (size & 1)


def read_wav(path) -> AudioBuffer:
    """Read a PCM16 or float32 WAV file as a mono AudioBuffer in [-1, 1]."""
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    return read_wav_bytes(data, origin=str(path))


def read_wav_bytes(data: bytes, origin: str = "<bytes>") -> AudioBuffer:
    """Decode in-memory WAV bytes (same constraints as read_wav)."""
    path = origin
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise MalformedWav(f"{path}: not a RIFF/WAVE file")

    fmt = None
    payload = None
    for cid, body in _parse_chunks(data):
        if cid == b"fmt " and fmt is None:
            if len(body) < 16:
                raise MalformedWav(f"{path}: fmt chunk too short")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif cid == b"data" and payload is None:
            payload = body
    if fmt is None or payload is None:
        raise MalformedWav(f"{path}: missing fmt or data chunk")

    tag, channels, rate, _byte_rate, block_align, bits = fmt
    if tag not in (1, 3):
        raise UnsupportedFormat(f"{path}: format tag {tag} not supported (want 1 or 3)")
    if channels not in (1, 2):
        raise UnsupportedFormat(f"{path}: {channels} channels not supported")
    if tag == 1 and bits != 16:
        raise UnsupportedFormat(f"{path}: PCM must be 16-bit, got {bits}")
    if tag == 3 and bits != 32:
        raise UnsupportedFormat(f"{path}: IEEE float must be 32-bit, got {bits}")
    if rate <= 0:
        raise MalformedWav(f"{path}: invalid sample rate {rate}")

    bytes_per_frame = channels * bits // 8
    if block_align and block_align != bytes_per_frame:
        raise MalformedWav(f"{path}: block align {block_align} inconsistent with format")
    n_frames = len(payload) // bytes_per_frame
    if n_frames == 0:
        raise EmptyAudio(f"{path}: no audio samples")
    payload = payload[: n_frames * bytes_per_frame]

    if tag == 1:
        raw = np.frombuffer(payload, dtype="<i2").astype(np.float64) / _INT16_SCALE
    else:
        raw = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    if channels == 2:
        raw = raw.reshape(-1, 2).mean(axis=1)
    if not np.all(np.isfinite(raw)):
        raise MalformedWav(f"{path}: non-finite samples")
    return AudioBuffer(raw, rate)


def wav_bytes(buffer: AudioBuffer, format: str = PCM16) -> bytes:
    """Encode a mono buffer as WAV bytes; PCM16 clamps to [-1, 1] first."""
    if len(buffer) == 0:
        raise EmptyAudio("refusing to encode zero-length buffer")
    if format == PCM16:
        q = np.round(np.clip(buffer.samples, -1.0, 1.0) * _INT16_SCALE)
        frames = np.clip(q, -32768, 32767).astype("<i2").tobytes()
        tag, bits = 1, 16
    elif format == FLOAT32:
        frames = buffer.samples.astype("<f4").tobytes()
        tag, bits = 3, 32
    else:
        raise ValueError(f"unknown wav format {format!r}")

    rate = buffer.sample_rate_hz
    block = bits // 8
    if tag == 1:
        fmt_chunk = struct.pack("<HHIIHH", tag, 1, rate, rate * block, block, bits)
        extra = b""
    else:
        # IEEE float carries a zero-length extension plus a fact chunk
        fmt_chunk = struct.pack("<HHIIHHH", tag, 1, rate, rate * block, block, bits, 0)
        extra = b"fact" + struct.pack("<II", 4, len(buffer))
    body = b"WAVE" + b"fmt " + struct.pack("<I", len(fmt_chunk)) + fmt_chunk
    body += extra + b"data" + struct.pack("<I", len(frames)) + frames
    return b"RIFF" + struct.pack("<I", len(body)) + body


def write_wav(path, buffer: AudioBuffer, format: str = PCM16) -> None:
    """Write a mono WAV file; see wav_bytes for the encoding rules."""
    blob = wav_bytes(buffer, format)
    try:
        Path(path).write_bytes(blob)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def resample(buffer: AudioBuffer, target_rate_hz: int) -> AudioBuffer:
    """Polyphase resampler (Kaiser-windowed sinc, >= 64 taps).

    Output length is round(n * target / source); identity when rates match.
    """
    target_rate_hz = int(target_rate_hz)
    if target_rate_hz <= 0:
        raise ValueError("target_rate_hz must be positive")
    if target_rate_hz == buffer.sample_rate_hz:
        return buffer

    g = gcd(buffer.sample_rate_hz, target_rate_hz)
    up = target_rate_hz // g
    down = buffer.sample_rate_hz // g
    # low-pass at min(source, target)/2, expressed at the upsampled rate;
    # 64 * max(up, down) + 1 taps keeps the transition band narrow even for
    # small ratios like 2:1
    taps = 64 * max(up, down) + 1
    h = firwin(taps, min(1.0 / up, 1.0 / down), window=("kaiser", 8.0))
    out = resample_poly(buffer.samples, up, down, window=h)

    want = int(round(len(buffer) * target_rate_hz / buffer.sample_rate_hz))
    if len(out) > want:
        out = out[:want]
    elif len(out) < want:
        out = np.pad(out, (0, want - len(out)))
    return AudioBuffer(out, target_rate_hz)
