"""File formats: 16-bit PCM WAV, SLRAW1 multiplexed dumps and playlist listings.

The stdlib ``wave`` module stops at the first ``data`` chunk and cannot
tell us about a second one, so WAV files are parsed here chunk by chunk.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass

import numpy as np

from .errors import FormatError

_FMT = struct.Struct("<HHIIHH")
PCM = 1
MAX_CHANNELS = 16
RAW_MAGIC = b"SLRAW1\0\0"
RAW_HEADER = struct.Struct("<8sHHHxx")


@dataclass(frozen=True)
class WavSpec:
    channels: int
    sample_rate: int
    bit_depth: int = 16

    def __post_init__(self):
        if not 1 <= self.channels <= MAX_CHANNELS:
            raise FormatError(f"unsupported channel count {self.channels}")
        if self.bit_depth != 16:
            raise FormatError(f"unsupported bit depth {self.bit_depth}")
        if self.sample_rate <= 0:
            raise FormatError(f"invalid sample rate {self.sample_rate}")


def quantize(samples) -> np.ndarray:
    """Float samples to int16: clip to [-1, 1-1/32768], round half away from zero."""
    x = np.clip(np.asarray(samples, dtype=np.float64), -1.0, 1.0 - 1.0 / 32768) * 32768.0
    return (np.sign(x) * np.floor(np.abs(x) + 0.5)).astype(np.int16)


def dequantize(ints) -> np.ndarray:
    return np.asarray(ints, dtype=np.float32) / np.float32(32768.0)


def _chunks(data: bytes, start: int):
    i = start
    while i < len(data):
        if i + 8 > len(data):
            raise FormatError("truncated chunk header")
        cid, size = struct.unpack_from("<4sI", data, i)
        body = data[i + 8:i + 8 + size]
        if len(body) < size:
            raise FormatError(f"truncated {cid.decode('latin-1')!r} chunk")
        yield cid, body
        i += 8 + size + (size & 1)


def parse_wav(data: bytes) -> tuple[WavSpec, np.ndarray]:
    if len(data) < 12:
        raise FormatError("truncated header")
    riff, _, wave = struct.unpack_from("<4sI4s", data, 0)
    if riff != b"RIFF" or wave != b"WAVE":
        raise FormatError("not a RIFF/WAVE file")
    spec = None
    payload = None
    for cid, body in _chunks(data, 12):
        if cid == b"fmt ":
            if spec is not None:
                raise FormatError("more than one fmt chunk")
            if len(body) < _FMT.size:
                raise FormatError("truncated fmt chunk")
            code, channels, rate, byte_rate, align, bits = _FMT.unpack_from(body)
            if code != PCM:
                raise FormatError(f"compressed WAV (format code {code}) is not supported")
            if bits != 16:
                raise FormatError(f"{bits}-bit samples are not supported")
            spec = WavSpec(channels, rate, bits)
            if align != 2 * channels or byte_rate != rate * align:
                raise FormatError("inconsistent fmt chunk")
        elif cid == b"data":
            if payload is not None:
                raise FormatError("more than one data chunk")
            payload = body
    if spec is None:
        raise FormatError("missing fmt chunk")
    if payload is None:
        raise FormatError("missing data chunk")
    if len(payload) % (2 * spec.channels):
        raise FormatError("data length is not a whole number of sample frames")
    ints = np.frombuffer(payload, dtype="<i2")
    return spec, dequantize(ints)


def read_wav(path) -> tuple[WavSpec, np.ndarray]:
    """Returns the spec and interleaved float32 samples."""
    with open(path, "rb") as f:
        return parse_wav(f.read())


def _header(spec: WavSpec, data_bytes: int) -> bytes:
    align = 2 * spec.channels
    return (
        struct.pack("<4sI4s", b"RIFF", 36 + data_bytes, b"WAVE")
        + struct.pack("<4sI", b"fmt ", _FMT.size)
        + _FMT.pack(PCM, spec.channels, spec.sample_rate, spec.sample_rate * align, align, 16)
        + struct.pack("<4sI", b"data", data_bytes)
    )


class WavWriter:
    """Incremental writer; sizes in the header are patched on close."""

    def __init__(self, path, spec: WavSpec):
        self.spec = spec
        self.path = path
        self.frames = 0
        self._f = open(path, "wb")
        self._f.write(_header(spec, 0))

    def write(self, samples) -> None:
        """``samples`` is either interleaved 1-D or shaped (channels, n)."""
        a = np.asarray(samples)
        if a.ndim == 2:
            if a.shape[0] != self.spec.channels:
                raise FormatError(f"expected {self.spec.channels} channels, got {a.shape[0]}")
            a = a.T.reshape(-1)
        elif a.size % self.spec.channels:
            raise FormatError("sample count is not a multiple of the channel count")
        self._f.write(quantize(a).astype("<i2").tobytes())
        self.frames += a.size // self.spec.channels

    def close(self) -> None:
        if self._f.closed:
            return
        data_bytes = self.frames * self.spec.channels * 2
        self._f.seek(0)
        self._f.write(_header(self.spec, data_bytes))
        self._f.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def write_wav(path, spec: WavSpec, samples) -> None:
    with WavWriter(path, spec) as w:
        w.write(samples)


class RawWriter:
    """SLRAW1: a 16-byte header then, per frame, interleaved int16 audio,
    video bytes and midi events (per channel: u32 count, then u32 offset,
    u8 length and payload per event)."""

    def __init__(self, path, counts: tuple[int, int, int]):
        self.counts = tuple(counts)
        self.path = path
        self.frames = 0
        self._f = open(path, "wb")
        self._f.write(RAW_HEADER.pack(RAW_MAGIC, *self.counts))

    def write_frame(self, audio, video, midi) -> None:
        a, v, m = self.counts
        audio = np.asarray(audio)
        video = np.asarray(video, dtype=np.uint8)
        if audio.shape[0] != a or video.shape[0] != v or len(midi) != m:
            raise FormatError(f"frame does not match kind {self.counts}")
        if a:
            self._f.write(quantize(audio.T.reshape(-1)).astype("<i2").tobytes())
        if v:
            self._f.write(video.tobytes())
        for events in midi:
            self._f.write(struct.pack("<I", len(events)))
            for offset, payload in events:
                payload = bytes(payload)
                self._f.write(struct.pack("<IB", offset, len(payload)) + payload)
        self.frames += 1

    def close(self) -> None:
        self._f.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def write_raw(path, counts, frames) -> None:
    """``frames`` yields (audio, video, midi) triples."""
    with RawWriter(path, counts) as w:
        for audio, video, midi in frames:
            w.write_frame(audio, video, midi)


def read_raw_header(data: bytes) -> tuple[int, int, int]:
    if len(data) < RAW_HEADER.size:
        raise FormatError("truncated SLRAW1 header")
    magic, a, v, m = RAW_HEADER.unpack_from(data)
    if magic != RAW_MAGIC:
        raise FormatError("not an SLRAW1 file")
    return a, v, m


def read_sidecar(path) -> dict[str, str]:
    meta = {}
    with open(path, encoding="utf-8") as f:
        for n, line in enumerate(f, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise FormatError(f"{path}:{n}: expected key=value")
            key, value = line.split("=", 1)
            meta[key.strip()] = value.strip()
    return meta


def parse_playlist(path) -> list[tuple[str, dict[str, str]]]:
    """Entries in file order; each carries its filename and sidecar metadata."""
    base = os.path.dirname(os.path.abspath(path))
    out = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            full = line if os.path.isabs(line) else os.path.join(base, line)
            meta = {"filename": full}
            sidecar = full + ".meta"
            if os.path.exists(sidecar):
                meta.update(read_sidecar(sidecar))
            out.append((full, meta))
    return out
