"""Active sources: file and device outputs, and the cross-clock buffer."""

from __future__ import annotations

import collections
import hashlib
import logging
import threading

from ..errors import ScriptRuntimeError, SourceFailed
from ..formats import RawWriter, WavSpec, WavWriter, quantize
from ..frame import Frame
from ..source import Source

log = logging.getLogger("streamlang")

MAX_EMPTY_FILLS = 64


class Output(Source):
    """Pulls one frame per cycle from its input and hands it to ``emit``.

    The node also streams its input on to any consumer.  With
    ``fallible`` an input that has no data leaves the rest of the frame
    unwritten instead of being an error.
    """

    active = True

    def __init__(self, graph, name, kind, pos=None, source=None, fallible=False):
        super().__init__(graph, name, [source], kind, pos)
        self.fallible = bool(fallible)
        self.frame: Frame | None = None
        self.written = 0
        self.boundaries: list[int] = []  # track boundaries, in output samples
        self.metadata: list[tuple[int, dict]] = []
        self.idle = False
        self.recording: list | None = None  # set to a list to keep float copies of the audio

    def setup(self):
        c = self.cfg
        self.frame = Frame(self.counts, c.frame_len, c.video_height, c.video_width)
        self.open()

    def open(self) -> None:
        pass

    def emit(self, frame: Frame, n: int) -> None:
        pass

    def _fill(self, frame):
        self.inputs[0].get(frame)

    def output_cycle(self) -> None:
        f = self.frame
        f.clear()
        empty = 0
        while not f.full:
            if not self.is_ready(f):
                if self.fallible:
                    break
                raise SourceFailed(f"input of {self.name} has no data", self.pos)
            before = f.position
            self.get(f)
            empty = empty + 1 if f.position == before else 0
            if empty > MAX_EMPTY_FILLS:
                raise SourceFailed(f"input of {self.name} makes no progress", self.pos)
        n = f.position
        self.boundaries.extend(self.written + b for b in f.track_boundaries() if b < n)
        self.metadata.extend((self.written + p, m) for p, m in f.metadata if p < n)
        self.idle = n == 0
        if n:
            self.emit(f, n)
            if self.recording is not None:
                self.recording.append(f.audio[:, :n].copy())
        self.written += n


class OutputFile(Output):
    def __init__(self, graph, kind, pos=None, format=None, path="", source=None, fallible=False):
        super().__init__(graph, "output.file", kind, pos, source, fallible)
        self.format = format
        self.path = path
        self.writer = None

    def open(self):
        if self.format.counts != self.counts:
            raise ScriptRuntimeError(
                f"output.file: format %{self.format.name} has kind {self.format.counts}, "
                f"stream has {self.counts}", self.pos,
            )
        try:
            if self.format.name == "wav":
                self.writer = WavWriter(self.path, WavSpec(self.counts[0], self.cfg.sample_rate))
            else:
                self.writer = RawWriter(self.path, self.counts)
        except OSError as e:
            raise ScriptRuntimeError(f"output.file: cannot open {self.path}: {e}", self.pos) from None

    def emit(self, frame, n):
        if isinstance(self.writer, WavWriter):
            self.writer.write(frame.audio[:, :n])
        else:
            midi = [[ev for ev in ch if ev[0] < n] for ch in frame.midi]
            self.writer.write_frame(frame.audio[:, :n], frame.video, midi)

    def shutdown(self):
        if self.writer is not None:
            self.writer.close()


class OutputDevice(Output):
    """The simulated sound card: counts samples and hashes what it plays."""

    def __init__(self, graph, kind, pos=None, source=None, fallible=False):
        super().__init__(graph, "output.device", kind, pos, source, fallible)
        self.digest = hashlib.sha256()

    def clock_constraints(self, solver):
        super().clock_constraints(solver)
        solver.unify(self.clock, solver.device, self.pos)

    def emit(self, frame, n):
        self.digest.update(quantize(frame.audio[:, :n].T.reshape(-1)).astype("<i2").tobytes())


class BufferFeeder(Source):
    """Hidden active node pushing the buffered source's frames into the queue."""

    active = True

    def __init__(self, graph, kind, owner, source):
        super().__init__(graph, "buffer.feeder", [source], kind, owner.pos)
        self.owner = owner
        self.fallible = True

    def setup(self):
        c = self.cfg
        self.frame = Frame(self.counts, c.frame_len, c.video_height, c.video_width)

    def _fill(self, frame):
        self.inputs[0].get(frame)

    def output_cycle(self) -> None:
        f = self.frame
        f.clear()
        empty = 0
        while not f.full and self.is_ready(f) and empty <= MAX_EMPTY_FILLS:
            before = f.position
            self.get(f)
            empty = empty + 1 if f.position == before else 0
        self.owner.push(f.audio.copy(), f.video.copy())


class Buffer(Source):
    """The only way across clocks: a FIFO of frames filled on the input's clock."""

    def __init__(self, graph, kind, pos=None, duration=1.0, source=None):
        super().__init__(graph, "buffer", [], kind, pos)
        if duration <= 0:
            raise ScriptRuntimeError("buffer: duration must be positive", pos)
        self.duration = duration
        self.upstream = source
        self.queue: collections.deque = collections.deque()
        self.lock = threading.Lock()  # the feeder runs on another clock's thread
        self.feeder = BufferFeeder(graph, kind, self, source)
        self.overflows = 0
        self.underflows = 0
        self._chunk = None
        self._offset = 0

    def setup(self):
        self.depth = max(1, round(self.duration / self.cfg.frame_duration))

    def clock_constraints(self, solver):
        pass

    def push(self, audio, video) -> None:
        with self.lock:
            if len(self.queue) >= self.depth:
                self.queue.popleft()
                self.overflows += 1
                log.info("buffer#%d: overflow, dropping a frame", self.id)
            self.queue.append((audio, video))

    def _is_ready(self, frame=None) -> bool:
        return True

    def _remaining(self, frame=None):
        return None

    def infallible(self) -> bool:
        return True

    def _fill(self, frame):
        p = frame.position
        L = frame.length
        while p < L:
            if self._chunk is None:
                with self.lock:
                    self._chunk = self.queue.popleft() if self.queue else None
                self._offset = 0
                if self._chunk is None:
                    self.underflows += 1
                    log.info("buffer#%d: underflow, playing silence", self.id)
                    frame.audio[:, p:] = 0
                    break
            audio, video = self._chunk
            m = min(L - p, audio.shape[1] - self._offset)
            frame.audio[:, p:p + m] = audio[:, self._offset:self._offset + m]
            frame.video[:] = video
            self._offset += m
            p += m
            if self._offset >= audio.shape[1]:
                self._chunk = None
        frame.add_break(L)

