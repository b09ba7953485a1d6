"""Single-input operators: fades, channel and gain stages, metadata hooks."""

from __future__ import annotations

import numpy as np
from scipy.signal import lfilter

from ..errors import ScriptRuntimeError
from ..source import Source


class Unary(Source):
    """Pulls its input into the caller's frame, then transforms ``[p, q)``."""

    def __init__(self, graph, name, kind, pos, source):
        super().__init__(graph, name, [source], kind, pos)

    @property
    def input(self) -> Source:
        return self.inputs[0]

    def _fill(self, frame):
        p = frame.position
        self.input.get(frame)
        q = frame.position
        self.process(frame, p, q)

    def process(self, frame, p: int, q: int) -> None:
        pass


def _check_duration(name, duration, pos):
    if duration < 0:
        raise ScriptRuntimeError(f"{name}: duration must not be negative", pos)


class FadeInitial(Unary):
    """Gain ``min(1, k/N)`` where ``k`` counts samples since the track start."""

    def __init__(self, graph, kind, pos=None, source=None, duration=3.0):
        super().__init__(graph, "fade.initial", kind, pos, source)
        _check_duration(self.name, duration, pos)
        self.duration = duration
        self.k = 0

    def process(self, frame, p, q):
        n = self.cfg.samples(self.duration)
        if n > 0 and self.k < n:
            g = np.minimum(1.0, np.arange(self.k, self.k + q - p) / n)
            frame.audio[:, p:q] *= g.astype(np.float32)
        self.k += q - p
        if not frame.full:
            self.k = 0


class FadeFinal(Unary):
    """Gain ``min(1, r/N)`` where ``r`` is the number of samples left in the track.

    Without a known track length only the data of the current fill is
    faded once a boundary shows up.  Over the tail handed to a transition
    the fade starts at once and the tail is cut when it completes.
    """

    def __init__(self, graph, kind, pos=None, source=None, duration=3.0):
        super().__init__(graph, "fade.final", kind, pos, source)
        _check_duration(self.name, duration, pos)
        self.duration = duration
        self.k = 0  # samples into a tail fade

    def _fill(self, frame):
        n = self.cfg.samples(self.duration)
        p = frame.position
        src = self.input
        if src.ending():
            if self.k >= n:
                frame.add_break(p)
                src.cut_track()
                return
            src.get(frame)
            q = frame.position
            if q - p > n - self.k:
                # the fade completes inside this fill
                q = p + n - self.k
                frame.audio[:, q:] = 0
                frame.breaks[-1] = q
            g = (n - np.arange(self.k, self.k + q - p)) / n
            frame.audio[:, p:q] *= g.astype(np.float32)
            self.k += q - p
            if not frame.full or self.k >= n:
                src.cut_track()
            return
        r = src.remaining(frame)
        src.get(frame)
        q = frame.position
        if n == 0:
            return
        if r is None:
            if frame.full:
                return
            r = q - p
        g = np.minimum(1.0, (r - np.arange(q - p)) / n)
        frame.audio[:, p:q] *= g.astype(np.float32)


class Swap(Unary):
    def __init__(self, graph, kind, pos=None, source=None):
        super().__init__(graph, "swap", kind, pos, source)

    def process(self, frame, p, q):
        frame.audio[[0, 1], p:q] = frame.audio[[1, 0], p:q]


class Amplify(Unary):
    def __init__(self, graph, kind, pos=None, factor=1.0, source=None):
        super().__init__(graph, "amplify", kind, pos, source)
        self.factor = factor

    def process(self, frame, p, q):
        x = frame.audio[:, p:q].astype(np.float64) * self.factor
        frame.audio[:, p:q] = np.clip(x, -1.0, 1.0)


class Normalize(Unary):
    """Gain ``target/rms`` clamped to [0.1, 10], with the mean square
    tracked by a one-second exponential moving average."""

    MIN_GAIN, MAX_GAIN = 0.1, 10.0
    WINDOW = 1.0

    def __init__(self, graph, kind, pos=None, source=None, target=0.2):
        super().__init__(graph, "normalize", kind, pos, source)
        if target <= 0:
            raise ScriptRuntimeError("normalize: target must be positive", pos)
        self.target = target
        self.ms = target * target  # the gain starts at 1

    def process(self, frame, p, q):
        if q == p or frame.audio.shape[0] == 0:
            return
        alpha = 1.0 / (self.cfg.sample_rate * self.WINDOW)
        x = frame.audio[:, p:q].astype(np.float64)
        power = np.mean(x * x, axis=0)
        ms, _ = lfilter([alpha], [1.0, alpha - 1.0], power, zi=[(1.0 - alpha) * self.ms])
        self.ms = ms[-1]
        rms = np.sqrt(ms)
        with np.errstate(divide="ignore"):
            gain = np.clip(self.target / rms, self.MIN_GAIN, self.MAX_GAIN)
        frame.audio[:, p:q] = np.clip(x * gain, -1.0, 1.0)


class Echo(Unary):
    """Adds the input delayed by ``delay`` seconds at half gain (single tap)."""

    GAIN = 0.5

    def __init__(self, graph, kind, pos=None, delay=0.5, source=None):
        super().__init__(graph, "echo", kind, pos, source)
        if delay <= 0:
            raise ScriptRuntimeError("echo: delay must be positive", pos)
        self.delay = delay

    def setup(self):
        d = self.cfg.samples(self.delay)
        if d <= 0:
            raise ScriptRuntimeError("echo: delay is shorter than one sample", self.pos)
        self.history = np.zeros((self.counts[0], d), dtype=np.float64)

    def process(self, frame, p, q):
        n = q - p
        if n == 0:
            return
        x = frame.audio[:, p:q].astype(np.float64)
        buf = np.concatenate([self.history, x], axis=1)
        d = self.history.shape[1]
        frame.audio[:, p:q] = np.clip(x + self.GAIN * buf[:, :n], -1.0, 1.0)
        self.history = buf[:, -d:]


class Greyscale(Unary):
    """Luma of the first three video planes; fewer planes pass unchanged."""

    def __init__(self, graph, kind, pos=None, source=None):
        super().__init__(graph, "greyscale", kind, pos, source)

    def process(self, frame, p, q):
        v = frame.video
        if v.shape[0] >= 3:
            r, g, b = (v[i].astype(np.float64) for i in range(3))
            y = np.clip(np.rint(0.299 * r + 0.587 * g + 0.114 * b), 0, 255).astype(np.uint8)
            v[0:3] = y


class OnMetadata(Unary):
    def __init__(self, graph, kind, pos=None, handler=None, source=None):
        super().__init__(graph, "on_metadata", kind, pos, source)
        self.handler = handler
        self.calls = 0

    def process(self, frame, p, q):
        for pos, meta in frame.metadata:
            if p <= pos < q:
                self.calls += 1
                self.handler(list(meta.items()))
