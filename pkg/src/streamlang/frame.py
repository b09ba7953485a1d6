"""Frames and engine constants."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, KindMismatch


@dataclass(frozen=True)
class EngineConfig:
    sample_rate: int = 44100
    frame_duration: float = 0.04
    video_width: int = 64
    video_height: int = 64
    device_rate_offset: float = 0.0002
    seed: int = 0

    def __post_init__(self):
        if self.sample_rate <= 0 or self.frame_duration <= 0:
            raise ConfigError("sample rate and frame duration must be positive")
        n = self.sample_rate * self.frame_duration
        if abs(n - round(n)) > 1e-6 or round(n) == 0:
            raise ConfigError(
                f"sample rate x frame duration must be a positive integer, got {n:g}"
            )

    @property
    def frame_len(self) -> int:
        return round(self.sample_rate * self.frame_duration)

    def samples(self, seconds: float) -> int:
        return round(seconds * self.sample_rate)

    @property
    def fps(self) -> float:
        # one video image per frame
        return 1.0 / self.frame_duration


class Frame:
    """A fixed-length buffer filled in place from ``position`` onwards.

    ``breaks`` is sorted and unique; its last element is the fill position.
    Any break below ``length`` is a track boundary, and the frame is full once
    the last break reaches ``length``.  Video holds one image per channel for
    the whole frame; each fill overwrites it.
    """

    __slots__ = ("counts", "length", "audio", "video", "midi", "breaks", "metadata")

    def __init__(self, counts, length: int, height: int = 64, width: int = 64):
        a, v, m = counts
        self.counts = (a, v, m)
        self.length = length
        self.audio = np.zeros((a, length), dtype=np.float32)
        self.video = np.zeros((v, height, width), dtype=np.uint8)
        self.midi: list[list] = [[] for _ in range(m)]
        self.breaks: list[int] = []
        self.metadata: list[tuple[int, dict]] = []

    @classmethod
    def like(cls, other: "Frame") -> "Frame":
        _, h, w = other.video.shape
        return cls(other.counts, other.length, h, w)

    @property
    def position(self) -> int:
        return self.breaks[-1] if self.breaks else 0

    @property
    def full(self) -> bool:
        return self.position >= self.length

    def add_break(self, pos: int) -> None:
        if pos < self.position or pos > self.length:
            raise ValueError(f"break {pos} outside [{self.position}, {self.length}]")
        if not self.breaks or self.breaks[-1] != pos:
            self.breaks.append(pos)

    def add_metadata(self, pos: int, meta: dict) -> None:
        self.metadata.append((pos, dict(meta)))
        self.metadata.sort(key=lambda pm: pm[0])

    def track_boundaries(self) -> list[int]:
        return [b for b in self.breaks if b < self.length]

    def clear(self) -> None:
        self.audio[:] = 0
        self.video[:] = 0
        for ch in self.midi:
            ch.clear()
        self.breaks.clear()
        self.metadata.clear()

    def copy_from(self, src: "Frame", start: int, end: int) -> None:
        """Copy samples, events and metadata of ``[start, end)`` and the video image."""
        self.audio[:, start:end] = src.audio[:, start:end]
        self.video[:] = src.video
        for dst, ch in zip(self.midi, src.midi):
            dst.extend(ev for ev in ch if start <= ev[0] < end)
        for pos, meta in src.metadata:
            if start <= pos < end:
                self.add_metadata(pos, meta)

    def check_kind(self, counts) -> None:
        if (
            self.counts != tuple(counts)
            or self.audio.shape != (counts[0], self.length)
            or self.video.shape[0] != counts[1]
            or len(self.midi) != counts[2]
        ):
            raise KindMismatch(f"frame of kind {self.counts} where {tuple(counts)} was declared")
