"""Sources without inputs: synthesis, files and the simulated device."""

from __future__ import annotations

import logging
import os

import numpy as np

from ..errors import FormatError, ScriptRuntimeError
from ..formats import parse_playlist, read_wav
from ..source import Source

log = logging.getLogger("streamlang")


class TrackSource(Source):
    """A generator emitting successive tracks.

    A track ending exactly at the frame end cannot be signalled by that
    fill, so the boundary is delivered by an empty fill at the start of the
    next one.
    """

    def __init__(self, graph, name, kind=None, pos=None):
        super().__init__(graph, name, (), kind, pos)
        self._track_pos = 0
        self._pending_end = False

    def _track_length(self):
        """Length of the current track in samples, None for an endless one."""
        return None

    def _track_start(self):
        """Called before the first sample of a track; may return metadata."""
        return None

    def _track_end(self) -> None:
        pass

    def _render(self, frame, p: int, n: int) -> None:
        raise NotImplementedError

    def _is_ready(self, frame=None) -> bool:
        return True

    def _fill(self, frame) -> None:
        p = frame.position
        if self._pending_end:
            self._pending_end = False
            frame.add_break(p)
            return
        if self._track_pos == 0:
            meta = self._track_start()
            if meta:
                frame.add_metadata(p, meta)
        n = frame.length - p
        total = self._track_length()
        ends = total is not None and total - self._track_pos <= n
        if ends:
            n = total - self._track_pos
        self._render(frame, p, n)
        self._track_pos += n
        frame.add_break(p + n)
        if ends:
            self._track_pos = 0
            self._track_end()
            if p + n == frame.length:
                self._pending_end = True

    def _remaining(self, frame=None):
        if self._pending_end:
            return 0
        total = self._track_length()
        return None if total is None else total - self._track_pos

    def cut_track(self) -> None:
        if self._track_pos:
            self._track_pos = 0
            self._track_end()
            self._pending_end = True


class Sine(TrackSource):
    def __init__(self, graph, kind, pos=None, duration=None, frequency=440.0, amplitude=1.0):
        super().__init__(graph, "sine", kind, pos)
        if frequency <= 0:
            raise ScriptRuntimeError("sine: frequency must be positive", pos)
        if not 0 <= amplitude <= 1:
            raise ScriptRuntimeError("sine: amplitude must lie in [0, 1]", pos)
        if duration is not None and duration <= 0:
            raise ScriptRuntimeError("sine: duration must be positive", pos)
        self.duration = duration
        self.frequency = frequency
        self.amplitude = amplitude
        self._n = 0  # samples emitted so far, the phase runs on across tracks

    def _track_length(self):
        return None if self.duration is None else self.cfg.samples(self.duration)

    def _render(self, frame, p, n):
        i = np.arange(self._n, self._n + n, dtype=np.float64)
        x = self.amplitude * np.sin(2 * np.pi * self.frequency * i / self.cfg.sample_rate)
        frame.audio[:, p:p + n] = x.astype(np.float32)
        self._n += n

    def infallible(self) -> bool:
        return True


class Blank(TrackSource):
    def __init__(self, graph, kind, pos=None, duration=None):
        super().__init__(graph, "blank", kind, pos)
        if duration is not None and duration <= 0:
            raise ScriptRuntimeError("blank: duration must be positive", pos)
        self.duration = duration

    def _track_length(self):
        return None if self.duration is None else self.cfg.samples(self.duration)

    def _render(self, frame, p, n):
        frame.audio[:, p:p + n] = 0
        frame.video[:] = 0

    def infallible(self) -> bool:
        return True


class Noise(TrackSource):
    """Seeded white noise; equal seeds give equal streams however they are split."""

    def __init__(self, graph, kind, pos=None, duration=None, amplitude=0.5, seed=None):
        super().__init__(graph, "noise", kind, pos)
        if duration is not None and duration <= 0:
            raise ScriptRuntimeError("noise: duration must be positive", pos)
        self.duration = duration
        self.amplitude = amplitude
        self.seed = seed
        self._rng = None

    def setup(self):
        seed = self.seed if self.seed is not None else (self.cfg.seed, self.id)
        self._rng = np.random.default_rng(seed)

    def _track_length(self):
        return None if self.duration is None else self.cfg.samples(self.duration)

    def _render(self, frame, p, n):
        x = self._rng.uniform(-self.amplitude, self.amplitude, size=(n, self.counts[0]))
        frame.audio[:, p:p + n] = x.T.astype(np.float32)

    def infallible(self) -> bool:
        return True


def convert_channels(data: np.ndarray, channels: int) -> np.ndarray:
    """Adapt (c, n) samples to ``channels`` rows: mono is duplicated, mixing
    down to mono averages, other counts wrap around the available channels."""
    c = data.shape[0]
    if c == channels:
        return data
    if channels == 0:
        return data[:0]
    if channels == 1:
        return data.mean(axis=0, keepdims=True).astype(np.float32)
    return data[[i % c for i in range(channels)]]


class FilePlayer(TrackSource):
    """Plays WAV files one after another, skipping unreadable ones."""

    def __init__(self, graph, name, kind, pos=None):
        super().__init__(graph, name, kind, pos)
        self._entries = None
        self._next = 0
        self._track = None  # (samples (c, n), metadata)

    def _load_entries(self):
        raise NotImplementedError

    def entries(self):
        if self._entries is None:
            self._entries = self._load_entries()
        return self._entries

    def _load_next(self) -> bool:
        entries = self.entries()
        while self._track is None and self._next < len(entries):
            path, meta = entries[self._next]
            self._next += 1
            try:
                spec, samples = read_wav(path)
            except (OSError, FormatError) as e:
                log.warning("%s: skipping %s: %s", self.name, path, e)
                continue
            if spec.sample_rate != self.cfg.sample_rate:
                log.warning("%s: skipping %s: sample rate %d", self.name, path, spec.sample_rate)
                continue
            data = samples.reshape(-1, spec.channels).T
            if data.shape[1] == 0:
                log.warning("%s: skipping empty file %s", self.name, path)
                continue
            self._track = (np.ascontiguousarray(convert_channels(data, self.counts[0])), meta)
        return self._track is not None

    def _is_ready(self, frame=None) -> bool:
        return self._pending_end or self._track is not None or self._load_next()

    def _track_length(self):
        if self._track is None and not self._load_next():
            return 0
        return self._track[0].shape[1]

    def _track_start(self):
        self._track_length()
        return self._track[1] if self._track else None

    def _track_end(self):
        self._track = None

    def _remaining(self, frame=None):
        if self._pending_end:
            return 0
        if self._track is None and not self._load_next():
            return 0
        return self._track[0].shape[1] - self._track_pos

    def _render(self, frame, p, n):
        data = self._track[0]
        frame.audio[:, p:p + n] = data[:, self._track_pos:self._track_pos + n]
        frame.video[:] = 0

    def infallible(self) -> bool:
        return False


class Playlist(FilePlayer):
    def __init__(self, graph, kind, pos=None, listing=""):
        super().__init__(graph, "playlist", kind, pos)
        self.listing = listing

    def _load_entries(self):
        try:
            return parse_playlist(self.listing)
        except (OSError, FormatError) as e:
            log.warning("playlist: cannot read %s: %s", self.listing, e)
            return []


class InputStub(FilePlayer):
    """Stands in for a network input: replays the named local file once if it exists."""

    def __init__(self, graph, kind, pos=None, url=""):
        super().__init__(graph, "input.stub", kind, pos)
        self.url = url

    def _load_entries(self):
        path = self.url[len("file://"):] if self.url.startswith("file://") else self.url
        if os.path.isfile(path):
            return [(path, {"filename": path, "url": self.url})]
        return []


class InputDevice(Noise):
    """The simulated sound card input: seeded noise on the device clock."""

    def __init__(self, graph, kind, pos=None):
        super().__init__(graph, kind, pos, amplitude=0.25)
        self.name = "input.device"

    def setup(self):
        self._rng = np.random.default_rng((self.cfg.seed, 0xDE))

    def clock_constraints(self, solver):
        solver.unify(self.clock, solver.device, self.pos)
