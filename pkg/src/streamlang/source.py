"""Source nodes and the fill protocol.

Consumers call :meth:`Source.get` with a frame that is not full; the source
writes from the frame's position up to its end or an earlier track
boundary.  A fill that leaves the frame short, including one that writes
nothing, means the current track ended at the new position.

Shared sources are *cached*: the first request of a clock cycle runs the
operator on a private frame and every consumer receives copies.
"""

from __future__ import annotations

import logging

from .errors import SourceFailed
from .frame import EngineConfig, Frame

log = logging.getLogger("streamlang")

# a source that keeps reporting empty fills while claiming to be ready is broken
MAX_EMPTY_FILLS = 64


class _Cache:
    def __init__(self, frame: Frame):
        self.frame = frame
        self.segments: list[tuple[int, int]] = []
        self.cursors: dict[int, int] = {}

    def find(self, key: int, p: int):
        """Index of the first segment this consumer still has to see at ``p``."""
        cur = self.cursors.get(key, 0)
        while cur < len(self.segments):
            s, e = self.segments[cur]
            if e > p or s == e == p:
                return cur
            cur += 1
        return None


class Source:
    """Base class of every stream operator.

    Subclasses implement ``_fill`` and, when needed, ``_is_ready``,
    ``_remaining``, ``_end_of_cycle`` and ``infallible``.
    """

    active = False
    # generated by a transition at runtime rather than by the script
    dynamic = False

    def __init__(self, graph, name: str, inputs=(), kind=None, pos=None):
        self.name = name
        self.inputs: list[Source] = list(inputs)
        self.kind = kind  # ContentKind in the runtime substitution
        self.pos = pos
        self.counts: tuple[int, int, int] | None = None
        self.cfg: EngineConfig | None = None
        self.clock = None  # static clock term, then the runtime clock
        self.cached = False
        self.fills = 0
        self.real_fills = 0
        self.prepared = False
        self._cache: _Cache | None = None
        self.graph = graph
        self.id = graph.register(self) if graph is not None else -1

    def __repr__(self) -> str:
        return f"<{self.name}#{self.id}>"

    # operator hooks

    def _is_ready(self, frame=None) -> bool:
        return all(s.is_ready(frame) for s in self.inputs)

    def _remaining(self, frame=None):
        """Samples left in the current track, or None when unknown."""
        return self.inputs[0].remaining(frame) if len(self.inputs) == 1 else None

    def _fill(self, frame: Frame) -> None:
        raise NotImplementedError

    def _end_of_cycle(self) -> None:
        pass

    def infallible(self) -> bool:
        return all(s.infallible() for s in self.inputs)

    def clock_constraints(self, solver) -> None:
        """By default a node runs on the clock of its inputs."""
        for s in self.inputs:
            solver.unify(self.clock, s.clock, self.pos)

    def setup(self) -> None:
        """Allocate per-node buffers once ``counts`` and ``cfg`` are known."""

    def shutdown(self) -> None:
        pass

    def ending(self) -> bool:
        """True when the current track is the tail handed to a transition."""
        return False

    def cut_track(self) -> None:
        pass

    # lifecycle

    def prepare(self, cfg: EngineConfig) -> None:
        if self.prepared:
            return
        self.cfg = cfg
        self.setup()
        self.prepared = True

    # consumer entry points

    def is_ready(self, frame: Frame | None = None) -> bool:
        c = self._cache
        if self.cached and c is not None and frame is not None:
            if c.find(id(frame), frame.position) is not None:
                return True
        return self._is_ready(frame)

    def remaining(self, frame: Frame | None = None):
        c = self._cache
        if not (self.cached and c is not None and frame is not None):
            return self._remaining(frame)
        p = frame.position
        idx = c.find(id(frame), p)
        if idx is None:
            return self._remaining(c.frame)
        L = c.frame.length
        for s, e in c.segments[idx:]:
            if e < L:
                return e - p
        r = self._remaining(c.frame)
        return None if r is None else c.frame.position - p + r

    def get(self, frame: Frame) -> None:
        frame.check_kind(self.counts)
        if frame.full:
            log.warning("%r asked to fill a full frame", self)
            return
        if self.cached:
            self._cached_get(frame)
        else:
            self._raw_fill(frame)

    def _raw_fill(self, frame: Frame) -> None:
        self.fills += 1
        self._fill(frame)
        if frame.breaks and frame.breaks[-1] > frame.length:
            raise SourceFailed(f"{self!r} filled beyond the frame end")

    def _cached_get(self, frame: Frame) -> None:
        p = frame.position
        key = id(frame)
        c = self._cache
        if c is None:
            c = self._cache = _Cache(Frame.like(frame))
            self.real_fills += 1
        empty = 0
        while (idx := c.find(key, p)) is None:
            if not self._is_ready(c.frame):
                raise SourceFailed(f"{self!r} has no data at position {p}")
            if c.frame.position < p:
                c.frame.add_break(p)
            before = c.frame.position
            self._raw_fill(c.frame)
            c.segments.append((before, c.frame.position))
            empty = empty + 1 if c.frame.position == before else 0
            if empty > MAX_EMPTY_FILLS:
                raise SourceFailed(f"{self!r} makes no progress")
        s, e = c.segments[idx]
        if s > p:
            frame.audio[:, p:s] = 0
        frame.copy_from(c.frame, max(p, s), e)
        frame.add_break(e)
        c.cursors[key] = idx + 1

    def end_of_cycle(self) -> None:
        self._cache = None
        self._end_of_cycle()


class TailProxy(Source):
    """The old source as seen by a transition: it ends once ``cut_track`` is called."""

    dynamic = True

    def __init__(self, graph, old: Source):
        super().__init__(graph, "tail", [old], kind=old.kind)
        self.done = False

    def _is_ready(self, frame=None) -> bool:
        return not self.done and self.inputs[0].is_ready(frame)

    def _remaining(self, frame=None):
        return 0 if self.done else self.inputs[0].remaining(frame)

    def _fill(self, frame):
        if self.done:
            frame.add_break(frame.position)
            return
        self.inputs[0].get(frame)

    def ending(self) -> bool:
        return True

    def cut_track(self) -> None:
        self.done = True

    def infallible(self) -> bool:
        return False
